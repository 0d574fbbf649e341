"""Pure X / pure Z clock operators in polynomial form.

An operator stores one polynomial per qudit in its *natural* variable: ``x``
for X-type and ``x̄`` for Z-type. The physical support on qudit ``n`` is

* X: ``x^{r0} a_n(x)``
* Z: ``x^{r0} b_n(x̄)``

where ``r0`` is the anchor. Stored coefficients always have non-negative
exponents with a zero exponent present on every axis, which fixes ``r0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .algebra import Axis, LaurentPoly, Open, Periodic, check_prime, inv_mod, poly_reduce
from .errors import DomainError, StructuralError

SPECIES = ("X", "Z")


def _check_species(species: str) -> str:
    s = str(species).upper()
    if s not in SPECIES:
        raise StructuralError(f"species must be X or Z, got {species!r}")
    return s


@dataclass(frozen=True)
class CssOperator:
    species: str
    p: int
    D: int
    N: int
    coeffs: Tuple[LaurentPoly, ...]
    anchor: Tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return len(self.coeffs) == 0

    def natural(self) -> Tuple[LaurentPoly, ...]:
        """Coefficients in the natural variable; zero polynomials for the identity."""
        if self.is_identity:
            return tuple(LaurentPoly.zero(self.p, self.D) for _ in range(self.N))
        return self.coeffs

    def support(self) -> Tuple[LaurentPoly, ...]:
        """Per-qudit polynomials in ``x`` giving the physical support."""
        out = []
        for c in self.natural():
            body = c if self.species == "X" else c.bar()
            out.append(body.shift(self.anchor))
        return tuple(out)

    def raw(self) -> Tuple[LaurentPoly, ...]:
        """Natural-variable coefficients with the anchor multiplied back in."""
        shift = self.anchor if self.species == "X" else tuple(-r for r in self.anchor)
        return tuple(c.shift(shift) for c in self.natural())

    def span(self) -> Tuple[int, ...]:
        """Extent (max - min exponent) of the support along every axis."""
        if self.is_identity:
            return (0,) * self.D
        hi = [0] * self.D
        for c in self.coeffs:
            if c.is_zero():
                continue
            for i, e in enumerate(c.max_exponents()):
                hi[i] = max(hi[i], e)
        return tuple(hi)

    def scale(self, c: int) -> "CssOperator":
        if c % self.p == 0:
            return identity(self.species, self.p, self.D, self.N)
        return CssOperator(self.species, self.p, self.D, self.N,
                           tuple(a.scale(c) for a in self.coeffs), self.anchor)

    def to_text(self) -> str:
        return operator_to_text(self)

    def pretty(self) -> str:
        names = var_names(self.D, "x̄" if self.species == "Z" else "x")
        body = ", ".join(c.pretty(names) for c in self.natural())
        return f"{self.species}[({body}) @ {list(self.anchor)}]"

    def __repr__(self):
        return f"CssOperator({self.pretty()})"


def var_names(D: int, prefix: str = "x") -> List[str]:
    return [prefix] if D == 1 else [f"{prefix}{i + 1}" for i in range(D)]


def identity(species: str, p: int, D: int, N: int) -> CssOperator:
    return CssOperator(_check_species(species), check_prime(p), int(D), int(N), (), (0,) * int(D))


def make_operator(species: str, p: int, D: int, N: int,
                  raw_coeffs: Sequence[LaurentPoly],
                  anchor: Optional[Sequence[int]] = None) -> CssOperator:
    """Canonicalize natural-variable coefficients into an anchored operator.

    ``anchor`` is an extra offset (in ``x`` coordinates) applied on top of
    whatever monomial is factored out of ``raw_coeffs``.
    """
    species = _check_species(species)
    p = check_prime(p)
    raw_coeffs = tuple(raw_coeffs)
    if len(raw_coeffs) != N:
        raise StructuralError(f"expected {N} coefficient polynomials, got {len(raw_coeffs)}")
    for c in raw_coeffs:
        if c.p != p or c.nvars != D:
            raise StructuralError("coefficients must share p and the spatial dimension")
    extra = tuple(anchor) if anchor is not None else (0,) * D
    if len(extra) != D:
        raise StructuralError("anchor length differs from D")
    live = [c for c in raw_coeffs if not c.is_zero()]
    if not live:
        return identity(species, p, D, N)
    lo = [min(c.min_exponents()[i] for c in live) for i in range(D)]
    neg = tuple(-e for e in lo)
    coeffs = tuple(c.shift(neg) for c in raw_coeffs)
    if species == "X":
        r0 = tuple(a + b for a, b in zip(lo, extra))
    else:
        r0 = tuple(b - a for a, b in zip(lo, extra))
    return CssOperator(species, p, D, N, coeffs, r0)


def from_support(species: str, p: int, D: int, N: int,
                 support: Sequence[LaurentPoly]) -> CssOperator:
    """Build an operator from its per-qudit physical support polynomials in ``x``."""
    species = _check_species(species)
    nat = [s if species == "X" else s.bar() for s in support]
    return make_operator(species, p, D, N, nat)


def _match(a: CssOperator, b: CssOperator):
    if a.p != b.p or a.D != b.D or a.N != b.N:
        raise StructuralError("operators differ in p, D or N")


def commutation_poly(a: CssOperator, b: CssOperator) -> LaurentPoly:
    """Commutation polynomial ``c(x) = sum_n S^a_n(x) S^b_n(x̄)``.

    The coefficient of ``x^t`` is the commutator exponent of ``a`` with ``b``
    translated by ``t``. Same-species pairs always commute and give 0; a
    (Z, X) pair returns the negated, inverted polynomial of the (X, Z) pair.
    """
    _match(a, b)
    zero = LaurentPoly.zero(a.p, a.D)
    if a.species == b.species or a.is_identity or b.is_identity:
        return zero
    if a.species == "Z":
        return -commutation_poly(b, a).bar()
    acc = zero
    # S^b(x̄) = x̄^{r1} b(x) with b the natural Z coefficient
    for ca, cb in zip(a.coeffs, b.coeffs):
        if ca.is_zero() or cb.is_zero():
            continue
        acc = acc + ca * cb
    rel = tuple(r0 - r1 for r0, r1 in zip(a.anchor, b.anchor))
    return acc.shift(rel)


def commutes(a: CssOperator, b: CssOperator, bc: Optional[Sequence[Axis]] = None) -> bool:
    c = commutation_poly(a, b)
    if bc is not None:
        c = poly_reduce(c, bc)
    return c.constant_term() == 0


def translate(op: CssOperator, shift: Sequence[int]) -> CssOperator:
    shift = tuple(int(s) for s in shift)
    if len(shift) != op.D:
        raise StructuralError("shift length differs from D")
    if op.is_identity:
        return op
    return CssOperator(op.species, op.p, op.D, op.N, op.coeffs,
                       tuple(a + s for a, s in zip(op.anchor, shift)))


def weight(op: CssOperator, bc: Optional[Sequence[Axis]] = None) -> int:
    """Number of (site, qudit) pairs acted on after boundary reduction."""
    if op.is_identity:
        return 0
    if bc is not None and len(tuple(bc)) != op.D:
        raise DomainError("boundary spec length differs from operator dimension")
    total = 0
    for s in op.support():
        total += len(poly_reduce(s, bc) if bc is not None else s)
    return total


def multiply(a: CssOperator, b: CssOperator) -> CssOperator:
    """Group product of two same-species operators (phases dropped)."""
    _match(a, b)
    if a.species != b.species:
        raise StructuralError("product of X and Z operators is not a CSS operator")
    sup = [sa + sb for sa, sb in zip(a.support(), b.support())]
    return from_support(a.species, a.p, a.D, a.N, sup)


def dual(op: CssOperator) -> CssOperator:
    """Swap species and invert space, keeping the natural coefficients."""
    other = "Z" if op.species == "X" else "X"
    if op.is_identity:
        return identity(other, op.p, op.D, op.N)
    return CssOperator(other, op.p, op.D, op.N, op.coeffs, tuple(-r for r in op.anchor))


def monic(op: CssOperator) -> CssOperator:
    """Scale so that the first non-zero coefficient is 1."""
    for c in op.coeffs:
        if not c.is_zero():
            lead = c.terms[0][1]
            return op.scale(inv_mod(lead, op.p))
    return op


# text format

def operator_to_text(op: CssOperator) -> str:
    head = f"{op.species} {op.p} {op.D} {op.N} anchor={','.join(str(r) for r in op.anchor)}"
    lines = [head] + [c.to_text() for c in op.natural()]
    return "\n".join(lines)


def operator_from_lines(lines: Sequence[str]) -> CssOperator:
    head = lines[0].split()
    if len(head) != 5 or not head[4].startswith("anchor="):
        raise StructuralError(f"bad operator header {lines[0]!r}")
    species, p, D, N = head[0], int(head[1]), int(head[2]), int(head[3])
    vec = head[4][len("anchor="):]
    anchor = tuple(int(v) for v in vec.split(",")) if vec else ()
    if len(anchor) != D:
        raise StructuralError("anchor length differs from D")
    body = [LaurentPoly.from_text(s) for s in lines[1:1 + N]]
    if len(body) != N:
        raise StructuralError("operator text is missing coefficient lines")
    op = make_operator(species, p, D, N, body)
    if op.is_identity:
        return op
    shift = anchor if species == "X" else tuple(-a for a in anchor)
    return make_operator(species, p, D, N, [c.shift(shift) for c in body])


def operator_from_text(text: str) -> CssOperator:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    return operator_from_lines(lines)


__all__ = [
    "CssOperator", "SPECIES", "commutation_poly", "commutes", "dual", "from_support",
    "identity", "make_operator", "monic", "multiply", "operator_from_lines",
    "operator_from_text", "operator_to_text", "translate", "var_names", "weight",
    "Open", "Periodic",
]
