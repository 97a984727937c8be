"""Shared strategies and oracles for the test suite."""

from hypothesis import strategies as st

from nilvdw.nilgroup import CoordAffine, GroupElement
from nilvdw.poly import Polynomial, poly_eval_int


def polys(max_degree=4, bound=5):
    return st.lists(st.integers(-bound, bound), max_size=max_degree + 1).map(
        lambda c: Polynomial(tuple(c))
    )


def elements(m, k, shift_bound=3, coeff_bound=5):
    coord = st.builds(CoordAffine, st.integers(-shift_bound, shift_bound), polys(k, coeff_bound))
    return st.lists(coord, min_size=m, max_size=m).map(lambda cs: GroupElement(tuple(cs)))


SAMPLE_POINTS = range(-6, 7)


def as_function(g):
    """The map on integer-valued functions that ``g`` denotes.

    Built only from ``poly_eval_int`` so it can check the normal-form
    algebra without going through ``poly_shift`` or ``compose``.
    """

    def act(fs):
        out = []
        for f, c in zip(fs, g.coords):
            out.append(lambda t, f=f, c=c: f(t + c.shift) + poly_eval_int(c.offset, t))
        return out

    return act


def poly_functions(polys_):
    return [lambda t, p=p: poly_eval_int(p, t) for p in polys_]


def same_functions(fs, gs, points=SAMPLE_POINTS):
    return all(f(t) == g(t) for f, g in zip(fs, gs) for t in points)
