import random
from fractions import Fraction

import pytest

from wittkit.hahn import HahnSeries
from wittkit.values import Zp1
from wittkit.witt import WittVec
from wittkit.wittpoly import get_table


@pytest.fixture(scope="session")
def table2():
    return get_table(2)


@pytest.fixture(scope="session")
def table3():
    return get_table(3)


@pytest.fixture()
def rng():
    return random.Random(20230817)


def rand_zp1(rng, p=2, span=4, max_den_exp=2):
    return Zp1(Fraction(rng.randint(-span, span), p ** rng.randint(0, max_den_exp)), p)


def rand_monomial_series(rng, p=2, span=4):
    return HahnSeries.t_pow(p, rand_zp1(rng, p, span))


def rand_witt(rng, p=2, n=3, span=4, p_min=0, zero_rate=0.3, nonzero_lead=False):
    coords = []
    for i in range(n):
        if rng.random() < zero_rate and not (nonzero_lead and i == 0):
            coords.append(HahnSeries.zero(p, "Zp1"))
        else:
            coords.append(rand_monomial_series(rng, p, span))
    return WittVec(p, "Zp1", p_min, tuple(coords))


def witt_repr_equal(a: WittVec, b: WittVec) -> bool:
    """Exact equality of representations on the common window."""
    an, bn = a.normalized(), b.normalized()
    lo = min(an.p_min, bn.p_min)
    hi = min(an.prec_n, bn.prec_n)
    for level in range(lo, hi):
        ca = an.coord(level) if level >= an.p_min else None
        cb = bn.coord(level) if level >= bn.p_min else None
        ca = ca.terms if ca is not None else ()
        cb = cb.terms if cb is not None else ()
        if ca != cb:
            return False
    return True
