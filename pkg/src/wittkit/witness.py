"""Executable non-coherence witnesses and the factorization obstruction.

Three constructions are provided, each self-validating:

* an archimedean witness: a strictly decreasing valuation sequence with a
  limit outside Z[1/p], giving a principal-ideal intersection whose image in
  the valuation ring is not finitely generated at any finite stage;
* a non-archimedean (rank-2 lex) witness with divergent exponent sums;
* the rapidly-decaying-sequence element of W(m_K) that is not a product of
  two elements of W(m_K), with a finite "irrational at height H" certificate
  via Liouville-style approximation gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import NotAFactorizationError, PrecisionError
from .hahn import HahnSeries
from .newton import newton_polygon, np_slopes
from .values import GammaElt, Lex, Rat, Zp1, in_value_group, lex
from .witt import (WittVec, divide_exact_teichmuller, mul_teichmuller,
                   ring_membership, teichmuller, witt_add, witt_mul, witt_sub,
                   witt_divide_with_precision, _and3)
from .wittpoly import WittPolyTable, get_table


def _verdict(b: Optional[bool]) -> str:
    return "in" if b is True else ("out" if b is False else "indeterminate")


# -- archimedean branch ----------------------------------------------------


@dataclass(frozen=True)
class ArchimedeanWitness:
    p: int
    depth: int
    a_seq: Tuple[Fraction, ...]  # a_n = v of the n-th Teichmuller coordinate
    r: Fraction  # limit of a_seq, outside Z[1/p]
    f: WittVec
    g: WittVec

    @property
    def bound(self) -> Fraction:
        return 2 * self.a_seq[0] - self.r

    def validate(self) -> None:
        a = self.a_seq
        assert all(in_value_group(x, self.p) for x in a), "a_n must lie in Z[1/p]"
        assert all(x > y for x, y in zip(a, a[1:])), "a_n must strictly decrease"
        assert all(x > self.r for x in a), "a_n must stay above the limit"
        diffs = [x - y for x, y in zip(a, a[1:])]
        assert all(d1 > d2 for d1, d2 in zip(diffs, diffs[1:])), \
            "valuation differences must strictly decrease"
        assert not in_value_group(self.r, self.p), "limit must avoid Z[1/p]"


def build_archimedean_witness(p: int = 2, depth: int = 5,
                              a_seq: Optional[List[Fraction]] = None,
                              r: Optional[Fraction] = None) -> ArchimedeanWitness:
    """Default instance: a_0 = 1, steps 4^-k, limit r = 2/3 (for p = 2).

    A user-supplied sequence is validated against the same invariants.
    """
    if a_seq is None:
        q = Fraction(p * p)
        a_seq = [Fraction(1)]
        for k in range(1, depth):
            a_seq.append(a_seq[-1] - q ** (-k))
        # limit of 1 - sum 4^-k = 1 - 1/(q-1)
        r = 1 - Fraction(1, q - 1)
    else:
        if r is None:
            raise ValueError("a user-supplied sequence needs an explicit limit r")
        a_seq = [Fraction(x) for x in a_seq]
    group = "Zp1"
    f = teichmuller(HahnSeries.t_pow(p, Zp1(a_seq[0], p)), depth)
    g = WittVec(p, group, 0,
                tuple(HahnSeries.t_pow(p, Zp1(a, p)) for a in a_seq))
    w = ArchimedeanWitness(p, depth, tuple(a_seq), Fraction(r), f, g)
    w.validate()
    return w


def chain_valuations(w: ArchimedeanWitness, k_max: int) -> List[Fraction]:
    """Leading valuations v_k = ceil(bound * m_k) / m_k, m_k = p^(2k-1).

    Strictly decreasing, all above the bound, with infimum the bound.
    """
    out = []
    for k in range(1, k_max + 1):
        m = w.p ** (2 * k - 1)
        out.append(Fraction(math.ceil(w.bound * m), m))
    assert all(x > y for x, y in zip(out, out[1:])), "chain must strictly decrease"
    assert all(x > w.bound for x in out), "chain must stay above the bound"
    return out


def chain_element(w: ArchimedeanWitness, v_k: Fraction) -> WittVec:
    """h_k = g * [t^(v_k)] / [t^(a_0)], an element of (f) cap (g)."""
    shift = Zp1(v_k - w.a_seq[0], w.p)
    return mul_teichmuller(w.g, HahnSeries.t_pow(w.p, shift))


# -- non-archimedean branch ------------------------------------------------


@dataclass(frozen=True)
class NonArchWitness:
    p: int
    depth: int
    r_seq: Tuple[Fraction, ...]  # r_1, r_2, ... positive, decreasing, divergent sum
    f: WittVec  # [x] with v(x) = (1, 0)
    g: WittVec  # sum p^n [x / y^(r_1+...+r_n)]

    def partial_sums(self) -> List[Fraction]:
        out, acc = [], Fraction(0)
        for r in self.r_seq:
            acc += r
            out.append(acc)
        return out

    def validate(self) -> None:
        rs = self.r_seq
        assert all(x > 0 for x in rs), "r_n must be positive"
        assert all(in_value_group(x, self.p) for x in rs), "r_n must lie in Z[1/p]"
        assert all(x > y for x, y in zip(rs, rs[1:])), "r_n must strictly decrease"
        # divergence of the defaults: every term at least 1
        assert sum(rs) >= len(rs), "partial sums must grow without bound"


def build_nonarchimedean_witness(p: int = 2, depth: int = 5,
                                 r_seq: Optional[List[Fraction]] = None) -> NonArchWitness:
    """Default r_n = 1 + p^-n: decreasing in Z[1/p], divergent sum."""
    if r_seq is None:
        r_seq = [1 + Fraction(1, p ** n) for n in range(1, depth + 1)]
    r_seq = [Fraction(x) for x in r_seq]
    f = teichmuller(HahnSeries.t_pow(p, lex(1, 0, p)), depth)
    sums = [Fraction(0)]
    for r in r_seq[:depth - 1]:
        sums.append(sums[-1] + r)
    g = WittVec(p, "Lex", 0,
                tuple(HahnSeries.t_pow(p, lex(1, -s, p)) for s in sums))
    w = NonArchWitness(p, depth, tuple(r_seq), f, g)
    w.validate()
    return w


def nonarch_chain_element(w: NonArchWitness, k: int) -> WittVec:
    """h_k = g * [x^2 y^-k] / [x], with leading valuation (2, -k)."""
    return mul_teichmuller(w.g, HahnSeries.t_pow(w.p, lex(1, -k, w.p)))


# -- membership and chain reports ------------------------------------------


@dataclass
class MembershipCertificate:
    verdict: str  # "in" | "out" | "indeterminate"
    q_by_f: WittVec
    q_by_g: WittVec
    q_by_f_in_a: Optional[bool]
    q_by_g_in_a: Optional[bool]

    def to_json(self):
        return {
            "verdict": self.verdict,
            "q_by_f_in_A": _verdict(self.q_by_f_in_a),
            "q_by_g_in_A": _verdict(self.q_by_g_in_a),
            "q_by_f": self.q_by_f.to_json(),
            "q_by_g": self.q_by_g.to_json(),
        }


def intersection_membership(h: WittVec, witness,
                            table: Optional[WittPolyTable] = None) -> MembershipCertificate:
    """Certified membership of h in (f) cap (g) inside A."""
    table = table or get_table(h.p)
    if h.is_zero():
        z = h
        return MembershipCertificate("in", z, z, True, True)
    f0 = witness.f.coords[0]
    qf = divide_exact_teichmuller(h, f0)
    qg = witt_divide_with_precision(h, witness.g, table)
    mf = ring_membership(qf, "A")
    mg = ring_membership(qg, "A")
    both = _and3(mf, mg)
    return MembershipCertificate(_verdict(both), qf, qg, mf, mg)


@dataclass
class ChainReport:
    kind: str  # "archimedean" | "nonarchimedean"
    bound: Optional[Fraction]
    entries: List[dict] = field(default_factory=list)
    all_in: bool = True
    strictly_decreasing: bool = True

    def to_json(self):
        return {
            "kind": self.kind,
            "bound": None if self.bound is None else
                     {"num": self.bound.numerator, "den": self.bound.denominator},
            "entries": self.entries,
            "all_in": self.all_in,
            "strictly_decreasing": self.strictly_decreasing,
        }


def ideal_chain_report(witness, k_max: int,
                       table: Optional[WittPolyTable] = None) -> ChainReport:
    """Chain h_1..h_k_max in (f) cap (g) with strictly decreasing leading
    valuations; finite-stage evidence of non-finite-generation."""
    table = table or get_table(witness.p)
    if isinstance(witness, ArchimedeanWitness):
        report = ChainReport("archimedean", witness.bound)
        assert not in_value_group(witness.bound, witness.p)
        vs = chain_valuations(witness, k_max)
        lead_vals: List[GammaElt] = []
        for k, v_k in enumerate(vs, start=1):
            h_k = chain_element(witness, v_k)
            cert = intersection_membership(h_k, witness, table)
            lead = h_k.coords[0].valuation()
            assert lead.value == v_k
            assert v_k > witness.bound
            lead_vals.append(lead)
            report.entries.append({
                "k": k,
                "leading_valuation": {"num": v_k.numerator, "den": v_k.denominator},
                "membership": cert.to_json(),
            })
            if cert.verdict != "in":
                report.all_in = False
    else:
        report = ChainReport("nonarchimedean", None)
        lead_vals = []
        for k in range(1, k_max + 1):
            h_k = nonarch_chain_element(witness, k)
            cert = intersection_membership(h_k, witness, table)
            lead = h_k.coords[0].valuation()
            assert lead == lex(2, -k, witness.p)
            lead_vals.append(lead)
            report.entries.append({
                "k": k,
                "leading_valuation": lead.to_json(),
                "membership": cert.to_json(),
            })
            if cert.verdict != "in":
                report.all_in = False
    report.strictly_decreasing = all(
        x > y for x, y in zip(lead_vals, lead_vals[1:]))
    return report


# -- rapidly decaying sequences (factorization obstruction) ----------------


@dataclass(frozen=True)
class ScholzeElement:
    p: int
    depth: int
    s_seq: Tuple[Fraction, ...]
    x: WittVec

    def validate(self) -> None:
        s = self.s_seq
        assert s[0] == 1
        assert all(a > b > 0 for a, b in zip(s, s[1:])), "s_n must decrease to 0"
        assert all(b <= a * a for a, b in zip(s, s[1:])), \
            "gap condition s_{n+1} <= s_n^2 violated"


def build_rapid_sequence(depth: int) -> List[Fraction]:
    """s_k = 2^-(2^k - 1): doubly exponential decay, s_0 = 1."""
    return [Fraction(1, 2 ** (2 ** k - 1)) for k in range(depth + 1)]


def build_scholze_element(p: int, depth: int,
                          s_seq: Optional[List[Fraction]] = None) -> ScholzeElement:
    if s_seq is None:
        s_seq = build_rapid_sequence(depth)
    s_seq = [Fraction(x) for x in s_seq]
    x = WittVec(p, "Rat", 0,
                tuple(HahnSeries.t_pow(p, Rat(s, p)) for s in s_seq))
    el = ScholzeElement(p, depth, tuple(s_seq), x)
    el.validate()
    assert ring_membership(el.x, "W(m_K)") is True
    return el


def regrouped_subsequence(s_seq: List[Fraction]) -> List[Fraction]:
    """Even-block regrouping s_{2j} - s_{2j+1}: the consecutive-gap sums of an
    infinite subsequence with infinite complement."""
    out = []
    j = 0
    while 2 * j + 1 < len(s_seq):
        out.append(s_seq[2 * j] - s_seq[2 * j + 1])
        j += 1
    return out


@dataclass
class LiouvilleResult:
    certified: bool
    height: int
    reason: str
    failing_rational: Optional[Fraction] = None
    interval: Optional[Tuple[Fraction, Fraction]] = None

    def to_json(self):
        frac = None
        if self.failing_rational is not None:
            frac = {"num": self.failing_rational.numerator,
                    "den": self.failing_rational.denominator}
        iv = None
        if self.interval is not None:
            iv = [{"num": q.numerator, "den": q.denominator} for q in self.interval]
        return {"certified": self.certified, "height": self.height,
                "reason": self.reason, "failing_rational": frac, "interval": iv}


def liouville_certificate(terms: List[Fraction], height: int) -> LiouvilleResult:
    """Finite certificate that the (tail-completed) sum of ``terms`` is not a
    rational of denominator <= height.

    Requires terms positive, strictly decreasing, with the gap condition
    t_{j+1} <= t_j^2 and t_last <= 1/2; then the full sum lies in the open
    interval (S, S + T] with S the window sum and T = 2 * t_last^2 the tail
    bound, and the certificate checks no rational of bounded height lands in
    [S, S + T].
    """
    terms = [Fraction(t) for t in terms]
    if not terms:
        return LiouvilleResult(False, height, "empty term selection")
    if any(t <= 0 for t in terms) or any(a <= b for a, b in zip(terms, terms[1:])):
        return LiouvilleResult(False, height,
                               "terms must be positive and strictly decreasing")
    s_window = sum(terms)
    gap_ok = all(b <= a * a for a, b in zip(terms, terms[1:])) and terms[-1] <= Fraction(1, 2)
    # naive tail bound used only to name a failing rational when refusing
    naive_tail = 2 * terms[-1]
    if not gap_ok:
        lo, hi = s_window, s_window + naive_tail
        for b in range(1, height + 1):
            a = math.floor(hi * b)
            if lo <= Fraction(a, b) <= hi:
                return LiouvilleResult(False, height, "gap condition violated",
                                       Fraction(a, b), (lo, hi))
        return LiouvilleResult(False, height, "gap condition violated")
    tail = 2 * terms[-1] ** 2
    lo, hi = s_window, s_window + tail
    for b in range(1, height + 1):
        # smallest integer a with a/b >= lo; in the interval iff a/b <= hi
        a = math.ceil(lo * b)
        if Fraction(a, b) <= hi:
            return LiouvilleResult(False, height, "rational inside tail interval",
                                   Fraction(a, b), (lo, hi))
    return LiouvilleResult(True, height,
                           f"no rational of denominator <= {height} in the tail interval",
                           None, (lo, hi))


# -- factorization obstruction checker -------------------------------------


@dataclass
class ObstructionReport:
    status: str  # "violation" | "indeterminate"
    violations: List[dict] = field(default_factory=list)
    suggestion: Optional[str] = None

    def to_json(self):
        return {"status": self.status, "violations": self.violations,
                "suggestion": self.suggestion}


def _witt_equal_at_precision(a: WittVec, b: WittVec) -> bool:
    """Teichmuller expansions are canonical, so equality on the common
    window is coordinatewise (no structure polynomials needed)."""
    an, bn = a.normalized(), b.normalized()
    lo = min(an.p_min, bn.p_min)
    hi = min(an.prec_n, bn.prec_n)
    for level in range(lo, hi):
        ca = an.coord(level) if an.p_min <= level < an.prec_n else None
        cb = bn.coord(level) if bn.p_min <= level < bn.prec_n else None
        ta = ca.terms if ca is not None else ()
        tb = cb.terms if cb is not None else ()
        if ta != tb:
            return False
    return True


def _teich_coord(v: WittVec) -> Optional[HahnSeries]:
    """The series c when v = [c], else None."""
    vn = v.normalized()
    if vn.p_min == 0 and vn.coords and vn.coords[0].terms \
            and all(c.is_zero() for c in vn.coords[1:]):
        return vn.coords[0]
    return None


def factorization_obstruction_check(x_elt: ScholzeElement, y: WittVec, z: WittVec,
                                    table: Optional[WittPolyTable] = None) -> ObstructionReport:
    """Given a claimed factorization x = y*z, certify at least one violated
    requirement for y, z in W(m_K)."""
    table = table or get_table(x_elt.p)
    cy, cz = _teich_coord(y), _teich_coord(z)
    if cy is not None:
        prod = mul_teichmuller(z, cy)
    elif cz is not None:
        prod = mul_teichmuller(y, cz)
    else:
        prod = witt_mul(y, z, table)
    if not _witt_equal_at_precision(prod, x_elt.x):
        raise NotAFactorizationError("y*z does not reproduce x at precision")

    report = ObstructionReport("indeterminate")
    saw_indeterminate = False
    for name, factor in (("y", y), ("z", z)):
        m = ring_membership(factor, "W(m_K)")
        if m is False:
            report.violations.append(
                {"kind": "factor_not_in_W_mK", "factor": name})
        elif m is None:
            saw_indeterminate = True

    # Slope multiset: certified slopes of y and z must combine to x's.
    try:
        sx = np_slopes(newton_polygon(x_elt.x, complete=True))
        sy = np_slopes(newton_polygon(y))
        sz = np_slopes(newton_polygon(z))
        if (sy + sz) - sx:
            report.violations.append(
                {"kind": "slope_multiset_mismatch",
                 "detail": "certified factor slopes not contained in x's slopes"})
    except Exception:
        saw_indeterminate = True

    # Bounded-below coordinate valuations against v(x_n) -> 0.
    for name, factor in (("y", y), ("z", z)):
        floors = [c.valuation() for c in factor.normalized().coords if c.terms]
        if floors and len(floors) == len(factor.normalized().coords):
            c_min = min(floors)
            if c_min.sign() > 0:
                below = [i for i, s in enumerate(x_elt.s_seq)
                         if s < c_min.as_fractions()[0]]
                if below:
                    report.violations.append(
                        {"kind": "valuations_bounded_below",
                         "factor": name,
                         "bound": {"num": c_min.as_fractions()[0].numerator,
                                   "den": c_min.as_fractions()[0].denominator},
                         "x_level_below": below[0]})

    if report.violations:
        report.status = "violation"
    elif saw_indeterminate:
        report.suggestion = "increase depth (p-adic precision) or t-precision caps"
    else:
        report.status = "indeterminate"
        report.suggestion = "no violation certified at this precision; deepen the window"
    return report
