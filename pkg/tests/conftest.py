import sys
from pathlib import Path

import hypothesis.strategies as st
from hypothesis import settings

from fractalcodes.algebra import LaurentPoly

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def polys(draw, p=None, nvars=1, max_terms=5, lo=-3, hi=4, nonzero=False):
    p = draw(st.sampled_from([2, 3, 5])) if p is None else p
    n = draw(st.integers(1 if nonzero else 0, max_terms))
    exps = draw(st.lists(st.tuples(*[st.integers(lo, hi)] * nvars), min_size=n, max_size=n))
    coeffs = draw(st.lists(st.integers(1, p - 1), min_size=n, max_size=n))
    f = LaurentPoly(p, nvars, list(zip(exps, coeffs)))
    if nonzero and f.is_zero():
        f = LaurentPoly.one(p, nvars)
    return f


@st.composite
def poly_triples(draw, nvars=1):
    p = draw(st.sampled_from([2, 3, 5]))
    return tuple(draw(polys(p=p, nvars=nvars)) for _ in range(3))


@st.composite
def rule_polys(draw, p, max_deg=3):
    """Polynomials in y with non-zero constant term and non-negative exponents."""
    deg = draw(st.integers(0, max_deg))
    coeffs = [draw(st.integers(1, p - 1))] + [draw(st.integers(0, p - 1)) for _ in range(deg)]
    return LaurentPoly(p, 1, {(i,): c for i, c in enumerate(coeffs)})
