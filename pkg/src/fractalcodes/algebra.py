"""Multivariate Laurent polynomials over a prime field.

Polynomials are immutable. Terms are kept as a tuple of ``(exponents, coeff)``
pairs sorted lexicographically by exponent vector, with coefficients reduced to
``1..p-1``; two polynomials are equal iff their term tuples are equal.

Text form::

    p=2; vars=2; 1*x1^0x2^0 + 1*x1^1x2^-1

A zero polynomial prints as ``0`` after the header.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, StructuralError

Exponent = Tuple[int, ...]


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


def check_prime(p: int) -> int:
    """Return ``p`` as an int, raising if it is not a prime."""
    if isinstance(p, bool) or int(p) != p or not is_prime(int(p)):
        raise DomainError(f"field characteristic must be prime, got {p!r}")
    return int(p)


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class Open:
    """Open (unbounded) axis."""

    def __repr__(self):
        return "Open()"


@dataclass(frozen=True)
class Periodic:
    """Periodic axis of length ``L``: ``x^L = 1``."""

    L: int

    def __post_init__(self):
        if int(self.L) < 1:
            raise DomainError(f"periodic length must be positive, got {self.L}")


Axis = Union[Open, Periodic]
BoundarySpec = Tuple[Axis, ...]


def periodic(*sizes: int) -> BoundarySpec:
    return tuple(Periodic(int(L)) for L in sizes)


def boundary(sizes: Sequence[int], periodic_axes=True) -> BoundarySpec:
    """Build a boundary spec from sizes and a bool (or per-axis bools)."""
    if isinstance(periodic_axes, bool):
        periodic_axes = [periodic_axes] * len(sizes)
    if len(periodic_axes) != len(sizes):
        raise StructuralError("periodic flags and sizes differ in length")
    return tuple(Periodic(int(L)) if per else Open() for L, per in zip(sizes, periodic_axes))


class LaurentPoly:
    """Laurent polynomial in ``nvars`` variables with coefficients in F_p."""

    __slots__ = ("p", "nvars", "terms", "_hash")

    def __init__(self, p: int, nvars: int, terms: Union[Mapping, Iterable, None] = None):
        self.p = check_prime(p)
        self.nvars = int(nvars)
        acc: Dict[Exponent, int] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for exp, c in items:
                exp = tuple(int(e) for e in exp)
                if len(exp) != self.nvars:
                    raise StructuralError(
                        f"exponent {exp} has length {len(exp)}, expected {self.nvars}")
                acc[exp] = (acc.get(exp, 0) + int(c)) % self.p
        self.terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._hash = None

    @classmethod
    def _raw(cls, p, nvars, sorted_terms):
        obj = cls.__new__(cls)
        obj.p = p
        obj.nvars = nvars
        obj.terms = sorted_terms
        obj._hash = None
        return obj

    # constructors

    @classmethod
    def zero(cls, p: int, nvars: int) -> "LaurentPoly":
        return cls(p, nvars)

    @classmethod
    def one(cls, p: int, nvars: int) -> "LaurentPoly":
        return cls(p, nvars, {(0,) * nvars: 1})

    @classmethod
    def constant(cls, p: int, nvars: int, c: int) -> "LaurentPoly":
        return cls(p, nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, p: int, exps: Sequence[int], coeff: int = 1) -> "LaurentPoly":
        return cls(p, len(exps), {tuple(exps): coeff})

    @classmethod
    def var(cls, p: int, nvars: int, i: int, power: int = 1) -> "LaurentPoly":
        e = [0] * nvars
        e[i] = power
        return cls(p, nvars, {tuple(e): 1})

    # basic queries

    def as_dict(self) -> Dict[Exponent, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == (((0,) * self.nvars, 1),)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def coeff(self, exp: Sequence[int]) -> int:
        return self.as_dict().get(tuple(exp), 0)

    def constant_term(self) -> int:
        return self.coeff((0,) * self.nvars)

    def support(self) -> Tuple[Exponent, ...]:
        return tuple(e for e, _ in self.terms)

    def __len__(self):
        return len(self.terms)

    def min_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e, _ in self.terms) for i in range(self.nvars))

    def max_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(e[i] for e, _ in self.terms) for i in range(self.nvars))

    def degree(self, i: Optional[int] = None) -> int:
        """Largest exponent of variable ``i``, or largest total degree if ``i`` is None."""
        if not self.terms:
            return -1
        if i is None:
            return max(sum(e) for e, _ in self.terms)
        return max(e[i] for e, _ in self.terms)

    def is_polynomial(self) -> bool:
        """True when no exponent is negative."""
        return all(x >= 0 for e, _ in self.terms for x in e)

    def evaluate_at_one(self) -> int:
        return sum(c for _, c in self.terms) % self.p

    # arithmetic

    def _check(self, other: "LaurentPoly"):
        if not isinstance(other, LaurentPoly):
            raise StructuralError(f"expected LaurentPoly, got {type(other).__name__}")
        if other.p != self.p or other.nvars != self.nvars:
            raise StructuralError(
                f"mismatched rings: (p={self.p}, nvars={self.nvars}) vs "
                f"(p={other.p}, nvars={other.nvars})")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, (int, np.integer)):
            return LaurentPoly.constant(self.p, self.nvars, int(other))
        self._check(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        p = self.p
        for e, c in other.terms:
            acc[e] = (acc.get(e, 0) + c) % p
        return LaurentPoly._raw(p, self.nvars, tuple(sorted((e, c) for e, c in acc.items() if c)))

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return LaurentPoly._raw(p, self.nvars, tuple((e, (-c) % p) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c: int) -> "LaurentPoly":
        c %= self.p
        if c == 0:
            return LaurentPoly.zero(self.p, self.nvars)
        return LaurentPoly._raw(self.p, self.nvars,
                                tuple((e, (v * c) % self.p) for e, v in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        self._check(other)
        p = self.p
        acc: Dict[Exponent, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = (acc.get(e, 0) + c1 * c2) % p
        return LaurentPoly._raw(p, self.nvars, tuple(sorted((e, c) for e, c in acc.items() if c)))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, t: int):
        return poly_pow(self, t)

    def shift(self, exps: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``x^exps``."""
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise StructuralError("shift vector length differs from nvars")
        return LaurentPoly._raw(
            self.p, self.nvars,
            tuple(sorted((tuple(a + b for a, b in zip(e, exps)), c) for e, c in self.terms)))

    def bar(self) -> "LaurentPoly":
        return poly_bar(self)

    def reduce(self, bc: Sequence[Axis]) -> "LaurentPoly":
        return poly_reduce(self, bc)

    def substitute(self, subst, nvars: Optional[int] = None) -> "LaurentPoly":
        return poly_substitute(self, subst, nvars)

    def embed(self, nvars: int, positions: Optional[Sequence[int]] = None) -> "LaurentPoly":
        """Re-express in a ring with ``nvars`` variables; variable i goes to ``positions[i]``."""
        if positions is None:
            positions = range(self.nvars)
        positions = list(positions)
        if len(positions) != self.nvars:
            raise StructuralError("embedding needs one position per variable")
        out = []
        for e, c in self.terms:
            new = [0] * nvars
            for i, pos in enumerate(positions):
                new[pos] += e[i]
            out.append((tuple(new), c))
        return LaurentPoly(self.p, nvars, out)

    # comparisons

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            return self == LaurentPoly.constant(self.p, self.nvars, int(other))
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.p == other.p and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.nvars, self.terms))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # text

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        """Canonical serialization with a ``p=..; vars=..;`` header."""
        return f"p={self.p}; vars={self.nvars}; {self.body_text(names)}"

    def body_text(self, names: Optional[Sequence[str]] = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "".join(f"{n}^{k}" for n, k in zip(names, e))
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

    def pretty(self, names: Optional[Sequence[str]] = None) -> str:
        """Compact human-readable form, e.g. ``1 + y + y^2``."""
        if names is None:
            names = ["x"] if self.nvars == 1 else [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms, key=lambda t: (sum(t[0]), t[0])):
            factors = []
            for n, k in zip(names, e):
                if k == 1:
                    factors.append(n)
                elif k != 0:
                    factors.append(f"{n}^{k}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LaurentPoly({self.to_text()!r})"

    @classmethod
    def from_text(cls, text: str) -> "LaurentPoly":
        m = re.match(r"\s*p\s*=\s*(\d+)\s*;\s*vars\s*=\s*(\d+)\s*;(.*)$", text, re.S)
        if not m:
            raise StructuralError(f"missing 'p=..; vars=..;' header in {text!r}")
        p, nvars, body = int(m.group(1)), int(m.group(2)), m.group(3)
        names = [f"x{i + 1}" for i in range(nvars)]
        return parse_poly(body, p, names)


# free-function API


def poly_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def poly_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def poly_pow(a: LaurentPoly, t: int) -> LaurentPoly:
    t = int(t)
    if t < 0:
        if not a.is_monomial():
            raise DomainError("negative power of a non-monomial Laurent polynomial")
        (e, c), = a.terms
        return LaurentPoly(a.p, a.nvars, {tuple(-x for x in e): inv_mod(c, a.p)}) ** (-t)
    result = LaurentPoly.one(a.p, a.nvars)
    base = a
    while t:
        if t & 1:
            result = result * base
        t >>= 1
        if t:
            base = base * base
    return result


def poly_bar(a: LaurentPoly) -> LaurentPoly:
    return LaurentPoly._raw(a.p, a.nvars,
                            tuple(sorted((tuple(-x for x in e), c) for e, c in a.terms)))


def poly_reduce(a: LaurentPoly, bc: Sequence[Axis]) -> LaurentPoly:
    bc = tuple(bc)
    if len(bc) != a.nvars:
        raise StructuralError(f"boundary spec has {len(bc)} axes, polynomial has {a.nvars}")
    mods = [ax.L if isinstance(ax, Periodic) else None for ax in bc]
    if all(m is None for m in mods):
        return a
    out = []
    for e, c in a.terms:
        out.append((tuple(x % m if m else x for x, m in zip(e, mods)), c))
    return LaurentPoly(a.p, a.nvars, out)


def _unit_inverse(q: LaurentPoly) -> Optional[LaurentPoly]:
    if q.is_monomial():
        (e, c), = q.terms
        return LaurentPoly(q.p, q.nvars, {tuple(-x for x in e): inv_mod(c, q.p)})
    return None


def poly_substitute(a: LaurentPoly, subst, nvars: Optional[int] = None) -> LaurentPoly:
    """Simultaneously substitute polynomials for variables of ``a``.

    ``subst`` is either a sequence with one image per variable of ``a`` or a
    mapping ``var index -> image``. Variables missing from a mapping are sent to
    the variable with the same index in the target ring (which has ``nvars``
    variables, defaulting to the images' variable count).
    """
    if isinstance(subst, Mapping):
        if not subst:
            return a if nvars in (None, a.nvars) else a.embed(nvars)
        first = next(iter(subst.values()))
        target = first.nvars if nvars is None else nvars
        images = []
        for i in range(a.nvars):
            if i in subst:
                images.append(subst[i])
            else:
                if i >= target:
                    raise StructuralError(f"variable {i} has no image in a ring of {target} variables")
                images.append(LaurentPoly.var(a.p, target, i))
    else:
        images = list(subst)
        if len(images) != a.nvars:
            raise StructuralError("need exactly one image per variable")
        target = images[0].nvars if images else (nvars or 0)
    for im in images:
        if im.p != a.p or im.nvars != target:
            raise StructuralError("substitution images must share p and nvars")
    zero = LaurentPoly.zero(a.p, target)
    if a.is_zero():
        return zero
    lo = a.min_exponents()
    inverses = {}
    for i in range(a.nvars):
        if lo[i] < 0:
            inv = _unit_inverse(images[i])
            if inv is None:
                raise DomainError(
                    f"variable {i} appears with negative exponent but its image is not invertible")
            inverses[i] = inv
    power_cache: Dict[Tuple[int, int], LaurentPoly] = {}

    def power(i, k):
        key = (i, k)
        if key not in power_cache:
            if k == 0:
                power_cache[key] = LaurentPoly.one(a.p, target)
            elif k > 0:
                power_cache[key] = power(i, k - 1) * images[i]
            else:
                power_cache[key] = power(i, k + 1) * inverses[i]
        return power_cache[key]

    acc: Dict[Exponent, int] = {}
    p = a.p
    for e, c in a.terms:
        term = LaurentPoly.constant(p, target, c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        for te, tc in term.terms:
            acc[te] = (acc.get(te, 0) + tc) % p
    return LaurentPoly(p, target, acc)


def group_algebra_index(sizes: Sequence[int]):
    """All exponent vectors of the torus group algebra in row-major order."""
    return list(product(*[range(L) for L in sizes]))


def multiplication_matrix(a: LaurentPoly, sizes: Sequence[int]) -> np.ndarray:
    """Matrix of ``g -> a*g`` on F_p[x]/(x_i^{L_i}-1) in the monomial basis.

    Entry ``[s, s']`` is the coefficient of ``x^(s-s')`` in ``a`` (mod sizes).
    """
    sizes = tuple(int(L) for L in sizes)
    if len(sizes) != a.nvars:
        raise StructuralError("one size per variable required")
    dim = int(np.prod(sizes)) if sizes else 1
    mat = np.zeros((dim, dim), dtype=np.int64)
    if not sizes:
        mat[0, 0] = a.constant_term()
        return mat
    grid = np.array(group_algebra_index(sizes), dtype=np.int64).reshape(dim, len(sizes))
    cols = np.arange(dim)
    for e, c in a.terms:
        shifted = (grid + np.array(e)) % np.array(sizes)
        rows = np.ravel_multi_index(shifted.T, sizes)
        mat[rows, cols] = (mat[rows, cols] + c) % a.p
    return mat


def poly_from_vector(vec, sizes: Sequence[int], p: int) -> LaurentPoly:
    idx = group_algebra_index(sizes)
    return LaurentPoly(p, len(sizes), {e: int(v) for e, v in zip(idx, vec) if int(v) % p})


def poly_to_vector(a: LaurentPoly, sizes: Sequence[int]) -> np.ndarray:
    sizes = tuple(sizes)
    dim = int(np.prod(sizes)) if sizes else 1
    vec = np.zeros(dim, dtype=np.int64)
    red = poly_reduce(a, periodic(*sizes))
    for e, c in red.terms:
        vec[np.ravel_multi_index(e, sizes) if sizes else 0] += c
    return vec % a.p


def poly_inverse(a: LaurentPoly, bc: Sequence[Axis]) -> Optional[LaurentPoly]:
    """Inverse of ``a`` in the periodic group algebra, or None if ``a`` is a zero divisor."""
    from .linalg import solve_fp

    bc = tuple(bc)
    if len(bc) != a.nvars:
        raise StructuralError("boundary spec length differs from nvars")
    if any(not isinstance(ax, Periodic) for ax in bc):
        raise DomainError("inverse needs every axis periodic")
    sizes = [ax.L for ax in bc]
    mat = multiplication_matrix(a, sizes)
    rhs = poly_to_vector(LaurentPoly.one(a.p, a.nvars), sizes)
    sol = solve_fp(mat, rhs, a.p)
    if sol is None:
        return None
    return poly_from_vector(sol, sizes, a.p)


# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_]*\d*)|(\^|\*|\+|-|\(|\)))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise StructuralError(f"cannot parse polynomial near {text[pos:]!r}")
        pos = m.end()
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2)))
        elif m.group(3) is not None:
            tokens.append(("op", m.group(3)))
    return tokens


class _Parser:
    def __init__(self, text, p, names):
        self.tokens = _tokenize(text)
        self.i = 0
        self.p = p
        self.names = {n: k for k, n in enumerate(names)}
        self.nvars = len(names)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise StructuralError("empty polynomial")
        val = self.expr()
        if self.i != len(self.tokens):
            raise StructuralError(f"unexpected token {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while True:
            kind, tok = self.peek()
            if (kind, tok) == ("op", "*"):
                self.take()
                val = val * self.factor()
            elif kind in ("int", "name") or (kind, tok) == ("op", "("):
                val = val * self.factor()
            else:
                return val

    def factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, tok = self.take()
            if kind != "int":
                raise StructuralError("exponent must be an integer")
            return poly_pow(base, sign * tok)
        return base

    def atom(self):
        kind, tok = self.take()
        if kind == "int":
            return LaurentPoly.constant(self.p, self.nvars, tok)
        if kind == "name":
            if tok not in self.names:
                raise StructuralError(f"unknown variable {tok!r}; expected one of {list(self.names)}")
            return LaurentPoly.var(self.p, self.nvars, self.names[tok])
        if (kind, tok) == ("op", "("):
            val = self.expr()
            if self.take() != ("op", ")"):
                raise StructuralError("unbalanced parenthesis")
            return val
        raise StructuralError(f"unexpected token {tok!r}")


def parse_poly(text: str, p: int, names: Sequence[str]) -> LaurentPoly:
    """Parse an expression such as ``1+y+y^2`` or ``(1+x1)*x2^-1``."""
    return _Parser(text, check_prime(p), list(names)).parse()
