from fractions import Fraction

import pytest

from wittkit.tower import (TOWER_TAGS, Monomial, covering_table_check,
                           gauge_eval, monomial_from_json,
                           monomial_membership)


def m(a, g):
    return Monomial(a, Fraction(g))


def test_monomial_multiplication_and_json():
    x = m(1, Fraction(1, 2)) * m(-2, 3)
    assert x == m(-1, Fraction(7, 2))
    assert monomial_from_json(x.to_json()) == x


@pytest.mark.parametrize("mono,tag,want", [
    (m(1, 1), "A", True),
    (m(-1, 1), "A", False),
    (m(-1, 1), "A1", True),       # p inverted
    (m(1, -1), "A1", False),
    (m(1, -1), "A2", True),       # [t] inverted
    (m(-1, 1), "A2", False),
    (m(-1, -1), "A12", True),     # p[t] inverted repairs both constraints
    (m(-1, 1), "A12", True),
    # inverting p frees the a-axis: B1 membership is gamma >= 0
    (m(-3, 2), "B1", True),
    (m(1, -1), "B1", False),
    # inverting [t] frees the gamma-axis: B2 membership is a >= 0
    (m(2, -3), "B2", True),
    (m(-1, 3), "B2", False),
    # p[t] inverted repairs a + gamma >= 0 for any monomial
    (m(5, -6), "B12", True),
    (m(-4, 1), "B12", True),
    # primed rings invert both p and [t]: every monomial is a unit multiple
    (m(-3, -2), "B1p", True),
    (m(-1, -1), "B2p", True),
])
def test_monomial_membership_table(mono, tag, want):
    assert monomial_membership(mono, tag) is want


def test_membership_rejects_unknown_tag():
    with pytest.raises(ValueError):
        monomial_membership(m(0, 0), "C3")


def test_gauges_on_singletons():
    assert gauge_eval([m(2, 1)], "B1") == 1
    assert gauge_eval([m(2, 1)], "B2") == 2
    assert gauge_eval([m(2, 1)], "B12") == 3
    assert gauge_eval([m(-1, 3)], "B1") == 2  # min(3, 2)


def test_gauge_takes_minimum_over_support():
    exp = [m(0, 5), m(3, 0), m(1, 1)]
    assert gauge_eval(exp, "B12") == 2


def test_gauge_rejects_bad_input():
    with pytest.raises(ValueError):
        gauge_eval([m(0, 0)], "A")
    with pytest.raises(ValueError):
        gauge_eval([], "B1")


def test_gauge_submultiplicative_on_products():
    pts = [m(a, Fraction(g, 2)) for a in range(-3, 4) for g in range(-6, 7)]
    for tag in ("B1", "B2", "B12"):
        for x in pts[::5]:
            for y in pts[::7]:
                gx, gy = gauge_eval([x], tag), gauge_eval([y], tag)
                assert gauge_eval([x * y], tag) >= gx + gy


def test_covering_table_window_eight():
    rep = covering_table_check(window=8)
    assert rep.ok
    assert not rep.failures
    assert all(c["ok"] for c in rep.checks)
    names = {c["check"] for c in rep.checks}
    assert "B1p == B1[1/[t]]" in names and "B1 | B2 <= B12" in names


def test_covering_table_detects_mutated_gauge():
    bad = {"B12": lambda mono: mono.a + mono.gamma - 1}
    rep = covering_table_check(window=4, gauges=bad)
    assert not rep.ok
    failing = {f["check"] for f in rep.failures}
    assert any("B12" in name for name in failing)
    assert rep.failures[0]["monomial"] is not None


def test_all_tags_enumerated():
    for tag in TOWER_TAGS:
        assert monomial_membership(m(3, 3), tag)
