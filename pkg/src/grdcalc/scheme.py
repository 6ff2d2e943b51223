"""Exact finite-difference schemes with rational coefficients and nodes.

A scheme is a finite formal combination ``sum_i a_i * f(x + b_i*h)`` stored
as terms ``(a_i, b_i)`` with nonzero rational coefficients at strictly
increasing rational nodes.  A scheme differentiates ``n`` times when its
moments ``m_j = sum_i a_i * b_i**j`` vanish for ``j < n`` with ``m_n != 0``;
it is normalized when ``m_n = n!``.  All arithmetic is exact over
:class:`fractions.Fraction`, so orders, normalizers, decompositions and
equality are computed without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Optional, Sequence, Union

Rationalish = Union[Fraction, int, str]


class CalculusError(ValueError):
    """Base class for input and domain errors raised by this package."""


class ZeroScheme(CalculusError):
    """An operation that needs a nonzero scheme received the zero scheme."""


class DuplicateNodes(CalculusError):
    """A node list contains a repeated node."""


class WrongNodeCount(CalculusError):
    """A node list has the wrong number of nodes for the requested order."""


class UnderdeterminedSystem(CalculusError):
    """The defining linear system has more unknowns than independent conditions."""


class InconsistentSystem(CalculusError):
    """The defining linear system has no solution."""


class ZeroNodeParityError(CalculusError):
    """A node at zero is incompatible with odd-order symmetry."""


class ZeroScale(CalculusError):
    """Scale factors must be nonzero."""


class ZeroDilation(CalculusError):
    """Dilation factors in combinations must be nonzero."""


class InvalidOrder(CalculusError):
    """The differentiation order must be a positive integer."""


def parse_rational(text: Rationalish) -> Fraction:
    """Parse a rational from an int, Fraction, or a 'p/q' / 'p' string."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise CalculusError(f"not a rational: {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Format a rational as a reduced 'p/q' string (denominator always shown)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Term:
    """One summand ``coeff * f(x + node*h)`` of a scheme."""

    coeff: Fraction
    node: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", parse_rational(self.coeff))
        object.__setattr__(self, "node", parse_rational(self.node))


@dataclass(frozen=True)
class Scheme:
    """A canonical scheme: nonzero coefficients at strictly increasing nodes.

    Construct directly only from already-clean term lists; use
    :func:`canonicalize` to merge duplicate nodes and drop zero coefficients.
    The empty scheme represents the zero combination.
    """

    terms: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        clean = tuple(sorted(self.terms, key=lambda t: t.node))
        object.__setattr__(self, "terms", clean)
        for left, right in zip(clean, clean[1:]):
            if left.node == right.node:
                raise DuplicateNodes(f"duplicate node {left.node}")
        for term in clean:
            if term.coeff == 0:
                raise CalculusError(f"zero coefficient at node {term.node}")

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def nodes(self) -> tuple[Fraction, ...]:
        return tuple(t.node for t in self.terms)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(t.coeff for t in self.terms)

    def coeff_at(self, node: Rationalish) -> Fraction:
        """Coefficient at a node, zero when the node is absent."""
        node = parse_rational(node)
        for term in self.terms:
            if term.node == node:
                return term.coeff
        return Fraction(0)


PairLike = Union[Term, Sequence[Rationalish]]


def canonicalize(terms: Iterable[PairLike]) -> Scheme:
    """Build a scheme from (coeff, node) pairs: merge nodes, drop zeros, sort."""
    acc: dict[Fraction, Fraction] = {}
    for item in terms:
        if isinstance(item, Term):
            coeff, node = item.coeff, item.node
        else:
            coeff, node = item
        coeff, node = parse_rational(coeff), parse_rational(node)
        acc[node] = acc.get(node, Fraction(0)) + coeff
    return Scheme(tuple(Term(c, b) for b, c in sorted(acc.items()) if c != 0))


def moment(scheme: Scheme, j: int) -> Fraction:
    """The j-th node moment ``sum_i a_i * b_i**j`` (exact)."""
    if j < 0:
        raise CalculusError("moment exponent must be >= 0")
    return sum((t.coeff * t.node ** j for t in scheme), Fraction(0))


@dataclass(frozen=True)
class OrderInfo:
    """Order data: first nonvanishing moment index, its value, and n!/m_n."""

    order: int
    leading_moment: Fraction
    normalizer: Fraction


def order_info(scheme: Scheme) -> OrderInfo:
    """Detect the differentiation order of a nonzero scheme.

    The order is the least ``j`` with ``m_j != 0``.  For a nonzero canonical
    scheme some moment below ``len(scheme)`` is nonzero (a Vandermonde system
    on distinct nodes is nonsingular), so the search is bounded.
    """
    if scheme.is_zero:
        raise ZeroScheme("the zero scheme has no order")
    for j in range(len(scheme)):
        m_j = moment(scheme, j)
        if m_j != 0:
            return OrderInfo(j, m_j, Fraction(factorial(j)) / m_j)
    raise AssertionError("nonzero scheme with all leading moments zero")


def normalized(scheme: Scheme) -> Scheme:
    """Rescale coefficients so the leading moment equals order factorial."""
    info = order_info(scheme)
    if info.normalizer == 1:
        return scheme
    return Scheme(tuple(Term(t.coeff * info.normalizer, t.node) for t in scheme))


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a (possibly overdetermined) exact linear system by elimination.

    Uses partial pivoting by magnitude; raises UnderdeterminedSystem when a
    column has no pivot and InconsistentSystem when a zero row meets a
    nonzero right-hand side.
    """
    n_rows, n_cols = len(rows), len(rows[0]) if rows else 0
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in range(n_cols):
        best = None
        for i in range(rank, n_rows):
            if aug[i][col] != 0 and (best is None or abs(aug[i][col]) > abs(aug[best][col])):
                best = i
        if best is None:
            raise UnderdeterminedSystem(f"no pivot for unknown {col}")
        aug[rank], aug[best] = aug[best], aug[rank]
        pivot = aug[rank][col]
        for i in range(n_rows):
            if i != rank and aug[i][col] != 0:
                factor = aug[i][col] / pivot
                aug[i] = [x - factor * y for x, y in zip(aug[i], aug[rank])]
        pivots.append((rank, col))
        rank += 1
        if rank == n_rows:
            if col + 1 < n_cols:
                raise UnderdeterminedSystem("more unknowns than conditions")
            break
    for i in range(rank, n_rows):
        if aug[i][n_cols] != 0:
            raise InconsistentSystem("conditions cannot all hold")
    solution = [Fraction(0)] * n_cols
    for row, col in pivots:
        solution[col] = aug[row][n_cols] / aug[row][col]
    return solution


def construct_exact(nodes: Sequence[Rationalish], n: int) -> Scheme:
    """The unique normalized scheme of order ``n`` on ``n+1`` distinct nodes.

    Solves the moment conditions ``m_j = 0`` for ``j < n`` and ``m_n = n!``
    by exact elimination on the node Vandermonde system.
    """
    if not isinstance(n, int) or n < 1:
        raise InvalidOrder(f"order must be a positive integer, got {n!r}")
    points = [parse_rational(b) for b in nodes]
    if len(points) != n + 1:
        raise WrongNodeCount(f"order {n} needs exactly {n + 1} nodes, got {len(points)}")
    if len(set(points)) != len(points):
        raise DuplicateNodes("nodes must be distinct")
    rows = [[b ** j for b in points] for j in range(n + 1)]
    rhs = [Fraction(0)] * n + [Fraction(factorial(n))]
    coeffs = _solve_exact(rows, rhs)
    return canonicalize(zip(coeffs, points))


def construct_exact_symmetric(
    node_pairs: Sequence[Rationalish], include_zero: bool, n: int
) -> Scheme:
    """The normalized order-``n`` scheme on nodes ``{+-p}`` (and optionally 0)
    whose reflection satisfies ``S(-h) = (-1)**n * S(h)``.

    The symmetry fixes the coefficient at ``-p`` to ``(-1)**n`` times the one
    at ``p`` and makes every moment of parity opposite to ``n`` vanish, so the
    unknowns are one coefficient per pair (plus the zero-node coefficient for
    even ``n``) and the conditions are the moments ``j = n, n-2, ...``.
    """
    if not isinstance(n, int) or n < 1:
        raise InvalidOrder(f"order must be a positive integer, got {n!r}")
    pairs = [parse_rational(p) for p in node_pairs]
    if any(p <= 0 for p in pairs):
        raise CalculusError("node pairs must be positive")
    if len(set(pairs)) != len(pairs):
        raise DuplicateNodes("node pairs must be distinct")
    if include_zero and n % 2 == 1:
        raise ZeroNodeParityError("a zero node forces a zero coefficient at odd order")
    sign = Fraction(-1) ** n
    exponents = list(range(n % 2, n + 1, 2))
    n_unknowns = len(pairs) + (1 if include_zero else 0)
    if n_unknowns > len(exponents):
        raise UnderdeterminedSystem(
            f"{n_unknowns} unknowns but only {len(exponents)} parity-matching conditions"
        )
    rows = []
    for j in exponents:
        row = [2 * p ** j for p in pairs]
        if include_zero:
            row.append(Fraction(1 if j == 0 else 0))
        rows.append(row)
    rhs = [Fraction(factorial(n)) if j == n else Fraction(0) for j in exponents]
    solution = _solve_exact(rows, rhs)
    terms = []
    for coeff, p in zip(solution, pairs):
        terms.append((coeff, p))
        terms.append((sign * coeff, -p))
    if include_zero:
        terms.append((solution[-1], Fraction(0)))
    return canonicalize(terms)


def scale(scheme: Scheme, r: Rationalish) -> Scheme:
    """Scale by ``r``: nodes become ``r*b`` and coefficients ``a/r**n``.

    This is the change of variable ``h -> r*h`` compensated so that the
    result differentiates ``n`` times with the same normalizer.
    """
    r = parse_rational(r)
    if r == 0:
        raise ZeroScale("scale factor must be nonzero")
    if scheme.is_zero:
        raise ZeroScheme("cannot scale the zero scheme")
    n = order_info(scheme).order
    return Scheme(tuple(Term(t.coeff / r ** n, r * t.node) for t in scheme))


def reflect(scheme: Scheme) -> Scheme:
    """The scheme evaluated at ``-h``: every node negated."""
    return Scheme(tuple(Term(t.coeff, -t.node) for t in scheme))


def decompose(scheme: Scheme, n: Optional[int] = None) -> tuple[Scheme, Scheme]:
    """Split into the symmetric and skew parts at reference order ``n``.

    Returns ``(plus, minus)`` with ``plus = (S(h) + (-1)**n S(-h)) / 2`` and
    ``minus = (S(h) - (-1)**n S(-h)) / 2``, so ``S = plus + minus``.  The
    symmetric part keeps every moment of the same parity as ``n`` and the
    skew part the opposite-parity ones.  ``n`` defaults to the detected order.
    """
    if n is None:
        n = order_info(scheme).order
    if not isinstance(n, int) or n < 1:
        raise InvalidOrder(f"order must be a positive integer, got {n!r}")
    sign = Fraction(-1) ** n
    half = Fraction(1, 2)
    mirrored = reflect(scheme)
    plus = canonicalize(
        [(half * t.coeff, t.node) for t in scheme]
        + [(half * sign * t.coeff, t.node) for t in mirrored]
    )
    minus = canonicalize(
        [(half * t.coeff, t.node) for t in scheme]
        + [(-half * sign * t.coeff, t.node) for t in mirrored]
    )
    return plus, minus


def is_symmetric(scheme: Scheme, n: Optional[int] = None) -> bool:
    """Whether ``S(-h) = (-1)**n * S(h)`` exactly (the skew part vanishes)."""
    if scheme.is_zero:
        return True
    if n is None:
        n = order_info(scheme).order
    sign = Fraction(-1) ** n
    return all(scheme.coeff_at(-t.node) == sign * t.coeff for t in scheme)


def combine(parts: Iterable[tuple[Rationalish, Rationalish, Scheme]]) -> Scheme:
    """Form ``sum_k c_k * S_k(d_k * h)`` and canonicalize.

    Each part is ``(c_k, d_k, S_k)``; the dilation ``d_k`` multiplies nodes
    only (no normalizing division, unlike :func:`scale`).
    """
    terms: list[tuple[Fraction, Fraction]] = []
    for coeff, dilation, part in parts:
        coeff, dilation = parse_rational(coeff), parse_rational(dilation)
        if dilation == 0:
            raise ZeroDilation("dilation factors must be nonzero")
        terms.extend((coeff * t.coeff, dilation * t.node) for t in part)
    return canonicalize(terms)


def _scale_witness(a: Scheme, b: Scheme) -> Optional[Fraction]:
    """A factor ``r`` with ``scale(a, r) == b``, or None.

    Any valid ``r`` maps the largest-magnitude nodes of ``a`` onto those of
    ``b``, so only the two signed ratios of those magnitudes can work; each
    candidate is verified by exact comparison.
    """
    if a.is_zero or b.is_zero:
        raise ZeroScheme("scale witnesses are defined for nonzero schemes")
    if len(a) != len(b):
        return None
    max_a = max(abs(t.node) for t in a)
    max_b = max(abs(t.node) for t in b)
    if max_a == 0 or max_b == 0:
        return Fraction(1) if a == b else None
    ratio = max_b / max_a
    for candidate in (ratio, -ratio):
        if scale(a, candidate) == b:
            return candidate
    return None


def scheme_to_json_dict(scheme: Scheme) -> dict:
    """JSON form: ``{"terms": [{"coeff": "p/q", "node": "p/q"}, ...]}``."""
    return {
        "terms": [
            {"coeff": format_rational(t.coeff), "node": format_rational(t.node)}
            for t in scheme
        ]
    }


def scheme_from_json(data: Union[str, dict]) -> Scheme:
    """Read a scheme from a JSON string or dict produced by scheme_to_json_dict.

    Coefficients and nodes may be 'p/q' strings, integer strings, or ints.
    """
    import json

    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise CalculusError(f"invalid scheme JSON: {exc}") from exc
    if not isinstance(data, dict) or "terms" not in data:
        raise CalculusError("scheme JSON must be an object with a 'terms' list")
    terms = data["terms"]
    if not isinstance(terms, list):
        raise CalculusError("'terms' must be a list")
    pairs = []
    for entry in terms:
        if not isinstance(entry, dict) or "coeff" not in entry or "node" not in entry:
            raise CalculusError("each term needs 'coeff' and 'node'")
        pairs.append((parse_rational(entry["coeff"]), parse_rational(entry["node"])))
    return canonicalize(pairs)


def _format_node(node: Fraction) -> str:
    if node == 0:
        return "f(x)"
    sign = "+" if node > 0 else "-"
    mag = abs(node)
    if mag == 1:
        return f"f(x{sign}h)"
    if mag.denominator == 1:
        return f"f(x{sign}{mag.numerator}h)"
    return f"f(x{sign}({mag.numerator}/{mag.denominator})h)"


def format_scheme(scheme: Scheme) -> str:
    """Human-readable rendering, largest node first."""
    if scheme.is_zero:
        return "0"
    pieces = []
    for term in sorted(scheme, key=lambda t: t.node, reverse=True):
        mag = abs(term.coeff)
        if mag == 1:
            body = _format_node(term.node)
        elif mag.denominator == 1:
            body = f"{mag.numerator}*{_format_node(term.node)}"
        else:
            body = f"({mag.numerator}/{mag.denominator})*{_format_node(term.node)}"
        pieces.append(("- " if term.coeff < 0 else "+ ") + body)
    text = " ".join(pieces)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]
