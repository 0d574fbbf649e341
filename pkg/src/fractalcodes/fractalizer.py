"""Fractalization of CSS operators and codes.

A rule set assigns to every original axis ``i`` a list of polynomials
``f_i^{(1)}(y), ..., f_i^{(n)}(y)`` in ``m`` new variables. Operators are
lifted by substituting, in their natural variable,

    x_i -> sum_j f_i^{(j)}(y) x_i^j          (X type)
    x̄_i -> sum_j f_i^{(j)}(ȳ) x̄_i^j         (Z type)

so an order-1 rule set reduces to ``x_i -> f_i(y) x_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    Axis,
    LaurentPoly,
    Open,
    Periodic,
    check_prime,
    multiplication_matrix,
    parse_poly,
    poly_from_vector,
    poly_pow,
    poly_reduce,
    poly_substitute,
)
from .errors import DomainError, StructuralError, UnsupportedOperatorError
from .linalg import kernel_fp
from .pauli import CssOperator, make_operator, var_names


@dataclass(frozen=True)
class LcaRuleSet:
    p: int
    D: int
    m: int
    order: int
    rules: Tuple[Tuple[LaurentPoly, ...], ...]

    def __post_init__(self):
        check_prime(self.p)
        if len(self.rules) != self.D:
            raise StructuralError(f"need {self.D} rules, got {len(self.rules)}")
        if self.order < 1:
            raise StructuralError("rule order must be at least 1")
        for i, rule in enumerate(self.rules):
            if len(rule) != self.order:
                raise StructuralError(f"rule {i} has {len(rule)} terms, order is {self.order}")
            for f in rule:
                if f.p != self.p or f.nvars != self.m:
                    raise StructuralError(f"rule {i} polynomial is not over F_{self.p} in {self.m} variables")
            lead = rule[0]
            if lead.constant_term() == 0:
                raise StructuralError(f"rule {i} needs a non-zero constant term")
            if not lead.is_polynomial():
                raise StructuralError(f"rule {i} has negative exponents")

    @classmethod
    def first_order(cls, polys: Sequence[LaurentPoly]) -> "LcaRuleSet":
        polys = list(polys)
        if not polys:
            raise StructuralError("at least one rule polynomial is required")
        return cls(polys[0].p, len(polys), polys[0].nvars, 1, tuple((f,) for f in polys))

    @classmethod
    def identity(cls, p: int, D: int, m: int = 1) -> "LcaRuleSet":
        one = LaurentPoly.one(p, m)
        return cls(p, D, m, 1, tuple((one,) for _ in range(D)))

    @classmethod
    def parse(cls, exprs: Sequence[Sequence[str]] | Sequence[str], p: int, m: int = 1) -> "LcaRuleSet":
        """Build from strings; each entry is one polynomial or a list of ``order`` polynomials."""
        names = var_names(m, "y")
        rows = []
        for e in exprs:
            terms = [e] if isinstance(e, str) else list(e)
            rows.append(tuple(parse_poly(t, p, names) for t in terms))
        order = len(rows[0]) if rows else 1
        return cls(p, len(rows), m, order, tuple(rows))

    def lead(self, i: int) -> LaurentPoly:
        return self.rules[i][0]

    def is_identity(self) -> bool:
        return self.order == 1 and all(r[0].is_one() for r in self.rules)

    def max_degree(self) -> int:
        return max((f.degree() for r in self.rules for f in r if not f.is_zero()), default=0)

    def to_text(self) -> str:
        lines = [f"{self.p} {self.m} {self.D} {self.order}"]
        for rule in self.rules:
            lines.extend(f.to_text() for f in rule)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LcaRuleSet":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        try:
            p, m, D, order = (int(v) for v in lines[0].split())
        except ValueError as exc:
            raise StructuralError(f"bad rule-set header {lines[0]!r}") from exc
        body = [LaurentPoly.from_text(ln) for ln in lines[1:]]
        if len(body) != D * order:
            raise StructuralError(f"expected {D * order} polynomial lines, got {len(body)}")
        rules = tuple(tuple(body[i * order:(i + 1) * order]) for i in range(D))
        return cls(p, D, m, order, rules)


@dataclass(frozen=True)
class CommensurabilityBasis:
    axis: Tuple[int, ...]
    basis: Tuple[LaurentPoly, ...]
    full: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _images(rules: LcaRuleSet, D: int) -> List[LaurentPoly]:
    """Images of the original natural variables in the D+m ring."""
    total = D + rules.m
    ypos = list(range(D, total))
    out = []
    for i in range(D):
        img = LaurentPoly.zero(rules.p, total)
        for j, f in enumerate(rules.rules[i], start=1):
            if f.is_zero():
                continue
            img = img + f.embed(total, ypos) * LaurentPoly.var(rules.p, total, i, j)
        out.append(img)
    return out


def _lift(coeffs: Sequence[LaurentPoly], rules: LcaRuleSet, D: int) -> List[LaurentPoly]:
    images = _images(rules, D)
    return [poly_substitute(c, images) if not c.is_zero()
            else LaurentPoly.zero(rules.p, D + rules.m) for c in coeffs]


def _check_compatible(op: CssOperator, rules: LcaRuleSet):
    if rules.p != op.p:
        raise StructuralError("rules and operator live over different fields")
    if rules.D != op.D:
        raise StructuralError(f"operator has D={op.D} but the rule set covers {rules.D} axes")


def fractalize_op_ho(op: CssOperator, rules: LcaRuleSet,
                     s0: Optional[Sequence[int]] = None) -> CssOperator:
    """Fractalize with rules of any order; anchor becomes ``(r0, s0)``."""
    _check_compatible(op, rules)
    s0 = tuple(s0) if s0 is not None else (0,) * rules.m
    if len(s0) != rules.m:
        raise StructuralError("s0 length differs from the number of new axes")
    total = op.D + rules.m
    if op.is_identity:
        return make_operator(op.species, op.p, total, op.N, [LaurentPoly.zero(op.p, total)] * op.N)
    lifted = _lift(op.coeffs, rules, op.D)
    return make_operator(op.species, op.p, total, op.N, lifted, anchor=tuple(op.anchor) + s0)


def fractalize_op(op: CssOperator, rules: LcaRuleSet,
                  s0: Optional[Sequence[int]] = None) -> CssOperator:
    """First-order fractalization ``x_i -> f_i(y) x_i`` of a local operator."""
    if rules.order != 1:
        raise UnsupportedOperatorError("higher-order rules need fractalize_op_ho")
    return fractalize_op_ho(op, rules, s0)


def commensurability_basis(rules: LcaRuleSet, axis, L, y_sizes: Sequence[int]) -> CommensurabilityBasis:
    """Basis of ``{q : q f_i^{L_i} = q}`` on the periodic y torus.

    ``axis`` and ``L`` may be sequences, in which case the intersection over all
    listed axes is returned.
    """
    axes = (axis,) if isinstance(axis, (int, np.integer)) else tuple(axis)
    Ls = (L,) if isinstance(L, (int, np.integer)) else tuple(L)
    if len(axes) != len(Ls):
        raise StructuralError("one length per axis required")
    y_sizes = tuple(int(v) for v in y_sizes)
    if len(y_sizes) != rules.m:
        raise StructuralError("one y size per new axis required")
    if rules.order != 1:
        raise UnsupportedOperatorError("commensurability is defined for first-order rules")
    bc_y = tuple(Periodic(v) for v in y_sizes)
    blocks = []
    for i, Li in zip(axes, Ls):
        g = poly_reduce(poly_pow(rules.lead(i), int(Li)), bc_y) - LaurentPoly.one(rules.p, rules.m)
        blocks.append(multiplication_matrix(poly_reduce(g, bc_y), y_sizes))
    dim = int(np.prod(y_sizes))
    if blocks:
        K = kernel_fp(np.vstack(blocks), rules.p)
    else:
        K = np.eye(dim, dtype=np.int64)
    full = K.shape[0] == dim
    if full:
        basis = tuple(poly_from_vector(row, y_sizes, rules.p) for row in np.eye(dim, dtype=np.int64))
    else:
        basis = tuple(poly_from_vector(row, y_sizes, rules.p) for row in K)
    return CommensurabilityBasis(axes, basis, full)


def nonlocal_axes(op: CssOperator, sizes: Sequence[int], bc: Sequence[Axis]) -> List[int]:
    """Periodic original axes along which the operator wraps the whole torus."""
    span = op.span()
    out = []
    for i in range(op.D):
        ax = bc[i]
        if isinstance(ax, Periodic) and span[i] + 1 >= ax.L:
            out.append(i)
    return out


def fractalize_nonlocal(op: CssOperator, rules: LcaRuleSet, sizes: Sequence[int],
                        bc: Sequence[Axis], axes: Optional[Sequence[int]] = None) -> List[CssOperator]:
    """Fractalize an operator that wraps periodic axes, one image per basis polynomial q.

    ``sizes`` and ``bc`` cover all ``D + m`` axes. The anchor along wrapped
    axes is fixed to 0. Returns an empty list when no non-zero q exists.
    """
    _check_compatible(op, rules)
    if rules.order != 1:
        raise UnsupportedOperatorError("non-local fractalization is defined for first-order rules")
    D, m = op.D, rules.m
    sizes = tuple(int(v) for v in sizes)
    bc = tuple(bc)
    if len(sizes) != D + m or len(bc) != D + m:
        raise StructuralError("sizes and boundary need one entry per original and new axis")
    axes = nonlocal_axes(op, sizes, bc) if axes is None else sorted(int(a) for a in axes)
    for i in axes:
        if not isinstance(bc[i], Periodic):
            raise DomainError(f"axis {i} is not periodic, so the operator cannot wrap it")
    y_bc = bc[D:]
    y_periodic = all(isinstance(ax, Periodic) for ax in y_bc)
    if axes and not y_periodic:
        raise DomainError("commensurability needs periodic new axes")
    if y_periodic:
        qs = commensurability_basis(rules, axes, [sizes[i] for i in axes], sizes[D:]).basis
    else:
        qs = (LaurentPoly.one(op.p, m),)
    if not qs:
        return []
    total = D + m
    if op.is_identity:
        return []
    # fold the anchor into the natural coefficients, then wrap the non-local axes
    wrap = tuple(Periodic(sizes[i]) if i in axes else Open() for i in range(D))
    raw = [poly_reduce(c, wrap) for c in op.raw()]
    live = [c for c in raw if not c.is_zero()]
    if not live:
        return []
    lo = [0 if i in axes else min(c.min_exponents()[i] for c in live) for i in range(D)]
    nat = [c.shift([-v for v in lo]) for c in raw]
    local_anchor = tuple(lo) if op.species == "X" else tuple(-v for v in lo)
    lifted = _lift(nat, rules, D)
    ypos = list(range(D, total))
    reduce_bc = tuple(Open() for _ in range(D)) + tuple(
        ax if isinstance(ax, Periodic) else Open() for ax in y_bc)
    out = []
    for q in qs:
        qq = q.embed(total, ypos)
        body = [poly_reduce(c * qq, reduce_bc) for c in lifted]
        out.append(make_operator(op.species, op.p, total, op.N, body,
                                 anchor=local_anchor + (0,) * m))
    return out


def fractalize_code(spec, rules: LcaRuleSet, name: Optional[str] = None):
    """Fractalize every generator of a translation-invariant code."""
    from .codes import CodeSpec

    if rules.D != spec.D or rules.p != spec.p:
        raise StructuralError("rule set does not match the code's dimension or field")
    for g in spec.xgens + spec.zgens:
        if not isinstance(g, CssOperator) or g.species not in ("X", "Z"):
            raise UnsupportedOperatorError("only pure X or pure Z generators can be fractalized")
    lift = fractalize_op if rules.order == 1 else fractalize_op_ho
    xs = tuple(lift(g, rules) for g in spec.xgens)
    zs = tuple(lift(g, rules) for g in spec.zgens)
    label = name or (f"{spec.name}+frac" if spec.name else "fractalized")
    return CodeSpec(spec.p, spec.D + rules.m, spec.N, xs, zs, name=label)


def commutation_identity_holds(a: CssOperator, b: CssOperator, rules: LcaRuleSet,
                               s0: Sequence[int], s1: Sequence[int]) -> bool:
    """Check ``c_frac = y^{s0-s1} x^{r0-r1} (a b)(f(y) o x)`` symbolically.

    Here ``a b`` is the anchor-free product of natural coefficients, so the
    anchor offset is carried as a plain monomial rather than substituted.
    """
    from .pauli import commutation_poly

    if a.species != "X" or b.species != "Z":
        raise StructuralError("expects an (X, Z) pair")
    fa = fractalize_op(a, rules, s0)
    fb = fractalize_op(b, rules, s1)
    lhs = commutation_poly(fa, fb)
    total = a.D + rules.m
    prod = LaurentPoly.zero(a.p, a.D)
    for ca, cb in zip(a.natural(), b.natural()):
        prod = prod + ca * cb
    lifted = _lift([prod], rules, a.D)[0]
    shift = tuple(r0 - r1 for r0, r1 in zip(a.anchor, b.anchor)) + tuple(
        u - v for u, v in zip(s0, s1))
    rhs = lifted.shift(shift) if not lifted.is_zero() else LaurentPoly.zero(a.p, total)
    return lhs == rhs


__all__ = [
    "CommensurabilityBasis", "LcaRuleSet", "commensurability_basis",
    "commutation_identity_holds", "fractalize_code", "fractalize_nonlocal",
    "fractalize_op", "fractalize_op_ho", "nonlocal_axes",
]
