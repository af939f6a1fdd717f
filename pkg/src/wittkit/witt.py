"""p-typical Witt vectors over the Hahn-series field model, at finite precision.

An element is stored by its Teichmuller expansion sum_{n>=p_min} p^n [c_n]
with coordinates c_n Hahn series, known modulo p^N.  Negative p_min encodes
localization at p.  Ring operations convert Teichmuller coordinates to Witt
coordinates (exact, by perfectness), evaluate the universal structure
polynomials, and convert back.

Membership predicates are three-valued: ``True``/``False`` when certified at
the stored t-precision, ``None`` when a coordinate's valuation sign is hidden
by its cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import GroupMismatchError, PrecisionError, ZeroSeriesError
from .hahn import HahnSeries, hahn_from_json
from .values import GammaElt, gamma_scale_int
from .wittpoly import WittPolyTable, eval_poly, get_table

RING_TAGS = ("A", "A[1/p]", "W(K)", "W(K)[1/p]", "W(m_K)")


def _and3(*vals: Optional[bool]) -> Optional[bool]:
    """Three-valued conjunction: False dominates, then None."""
    if any(v is False for v in vals):
        return False
    if any(v is None for v in vals):
        return None
    return True


@dataclass(frozen=True)
class WittVec:
    p: int
    group: str
    p_min: int
    coords: Tuple[HahnSeries, ...]

    def __post_init__(self):
        for c in self.coords:
            if c.p != self.p or c.group != self.group:
                raise GroupMismatchError("coordinate field mismatch")

    # -- structure ---------------------------------------------------------

    @property
    def prec_n(self) -> int:
        """p-adic precision bound N: the element is known modulo p^N."""
        return self.p_min + len(self.coords)

    def coord(self, level: int) -> HahnSeries:
        """Teichmuller coordinate at an absolute level (exact zero below p_min)."""
        if level < self.p_min:
            return HahnSeries.zero(self.p, self.group)
        if level >= self.prec_n:
            raise PrecisionError(f"level {level} beyond precision {self.prec_n}")
        return self.coords[level - self.p_min]

    def normalized(self) -> "WittVec":
        """Strip exactly-zero leading coordinates, raising p_min."""
        coords = list(self.coords)
        p_min = self.p_min
        while coords and coords[0].is_zero() and coords[0].is_exact():
            coords.pop(0)
            p_min += 1
        return WittVec(self.p, self.group, p_min, tuple(coords))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def pshift(self, k: int) -> "WittVec":
        """Multiply by p**k (exact: shifts every level by k)."""
        return WittVec(self.p, self.group, self.p_min + k, self.coords)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(p: int, group: str, prec_n: int) -> "WittVec":
        return WittVec(p, group, 0,
                       tuple(HahnSeries.zero(p, group) for _ in range(prec_n)))

    @staticmethod
    def one(p: int, group: str, prec_n: int) -> "WittVec":
        return teichmuller(HahnSeries.one(p, group), prec_n)

    @staticmethod
    def p_power(p: int, group: str, e: int, prec_n: int) -> "WittVec":
        return WittVec.one(p, group, prec_n).pshift(e)

    def to_json(self):
        return {
            "p_min": self.p_min,
            "N": self.prec_n,
            "coords": [c.to_json() for c in self.coords],
        }

    def __repr__(self):
        parts = [f"p^{self.p_min + i}[{c!r}]" for i, c in enumerate(self.coords)]
        return f"Witt({' + '.join(parts) or '0'}; N={self.prec_n})"


def teichmuller(c: HahnSeries, prec_n: int) -> WittVec:
    """[c] at p-adic precision prec_n."""
    coords = (c,) + tuple(HahnSeries.zero(c.p, c.group) for _ in range(prec_n - 1))
    return WittVec(c.p, c.group, 0, coords)


def witt_from_json(obj) -> WittVec:
    coords = tuple(hahn_from_json(c) for c in obj["coords"])
    if not coords:
        raise ValueError("empty coordinate list")
    return WittVec(coords[0].p, coords[0].group, obj["p_min"], coords)


# -- coordinate conversion -------------------------------------------------


def _to_witt_coords(v: WittVec, length: int) -> List[HahnSeries]:
    """Relative Witt coordinates x_k = c_k^(p^k) for k < length, zero-padded."""
    out = []
    for k in range(length):
        if k < len(v.coords):
            out.append(v.coords[k].frobenius_iter(k))
        else:
            out.append(HahnSeries.zero(v.p, v.group))
    return out


def _from_witt_coords(xs: List[HahnSeries]) -> Tuple[HahnSeries, ...]:
    return tuple(x.frobenius_iter(-k) for k, x in enumerate(xs))


def _aligned(a: WittVec, b: WittVec) -> Tuple[int, int, WittVec, WittVec]:
    if a.p != b.p or a.group != b.group:
        raise GroupMismatchError("Witt vectors over different base fields")
    p_min = min(a.p_min, b.p_min)
    n = min(a.prec_n, b.prec_n)
    length = n - p_min
    if length <= 0:
        raise PrecisionError("no common p-adic precision after alignment")

    def pad(v: WittVec) -> WittVec:
        extra = tuple(HahnSeries.zero(v.p, v.group) for _ in range(v.p_min - p_min))
        return WittVec(v.p, v.group, p_min, extra + v.coords)

    return p_min, length, pad(a), pad(b)


# -- ring operations -------------------------------------------------------


def witt_add(a: WittVec, b: WittVec, table: Optional[WittPolyTable] = None) -> WittVec:
    table = table or get_table(a.p)
    p_min, length, a2, b2 = _aligned(a, b)
    table.ensure(length)
    xs = _to_witt_coords(a2, length)
    ys = _to_witt_coords(b2, length)
    zs = [eval_poly(table.add_polys[k], xs, ys, a.p, a.group) for k in range(length)]
    return WittVec(a.p, a.group, p_min, _from_witt_coords(zs))


def witt_neg(a: WittVec, table: Optional[WittPolyTable] = None) -> WittVec:
    table = table or get_table(a.p)
    length = len(a.coords)
    if length == 0:
        return a
    table.ensure(length)
    xs = _to_witt_coords(a, length)
    ys = [HahnSeries.zero(a.p, a.group)] * length
    zs = [eval_poly(table.neg_polys[k], xs, ys, a.p, a.group) for k in range(length)]
    return WittVec(a.p, a.group, a.p_min, _from_witt_coords(zs))


def witt_sub(a: WittVec, b: WittVec, table: Optional[WittPolyTable] = None) -> WittVec:
    return witt_add(a, witt_neg(b, table), table)


def witt_mul(a: WittVec, b: WittVec, table: Optional[WittPolyTable] = None) -> WittVec:
    if a.p != b.p or a.group != b.group:
        raise GroupMismatchError("Witt vectors over different base fields")
    table = table or get_table(a.p)
    length = min(len(a.coords), len(b.coords))
    if length <= 0:
        raise PrecisionError("no common p-adic precision for product")
    table.ensure(length)
    xs = _to_witt_coords(a, length)
    ys = _to_witt_coords(b, length)
    zs = [eval_poly(table.mul_polys[k], xs, ys, a.p, a.group) for k in range(length)]
    return WittVec(a.p, a.group, a.p_min + b.p_min, _from_witt_coords(zs))


def mul_teichmuller(h: WittVec, c: HahnSeries) -> WittVec:
    """h * [c], exact coordinatewise (Teichmuller multiplicativity)."""
    return WittVec(h.p, h.group, h.p_min, tuple(x * c for x in h.coords))


def divide_exact_teichmuller(h: WittVec, c: HahnSeries,
                             gamma_prec: Optional[GammaElt] = None) -> WittVec:
    """h / [c] coordinatewise.

    Exact when c is a single monomial; otherwise multiplies by a truncated
    inverse of c (gamma_prec, or derived from the coordinate caps).
    """
    if c.is_zero():
        raise ZeroSeriesError("division by zero series")
    if len(c.terms) == 1 and c.is_exact():
        g0, c0 = c.leading()
        inv = HahnSeries.t_pow(c.p, -g0, pow(c0, -1, c.p))
    else:
        if gamma_prec is None:
            caps = [x.prec for x in h.coords if x.prec is not None]
            if not caps:
                raise PrecisionError(
                    "dividing exact coordinates by a non-monomial needs gamma_prec"
                )
            gamma_prec = max(caps) - c.valuation()
        inv = c.invert(gamma_prec)
    return mul_teichmuller(h, inv)


# -- division and membership ----------------------------------------------


def witt_divide_with_precision(h: WittVec, g: WittVec,
                               table: Optional[WittPolyTable] = None) -> WittVec:
    """Quotient q with h = g*q modulo (p^N, t-precision), computed level by level.

    Requires the normalized leading Teichmuller coordinate of g to be nonzero
    at its precision (g a unit of W(K) after dividing out its p-power).
    """
    table = table or get_table(h.p)
    gn = g.normalized()
    if not gn.coords:
        raise ZeroSeriesError("division by zero Witt vector")
    g0 = gn.coords[0]
    if g0.is_zero():
        if g0.is_exact():
            raise ZeroSeriesError("division by zero Witt vector")
        raise PrecisionError("leading coordinate of divisor hidden by t-precision")
    if len(g0.terms) == 1 and g0.is_exact():
        glead, gc = g0.leading()
        g0_inv = HahnSeries.t_pow(g0.p, -glead, pow(gc, -1, g0.p))
    else:
        caps = [x.prec for x in list(h.coords) + list(gn.coords) if x.prec is not None]
        if caps:
            cap = max(caps)
        else:
            # All-exact inputs: expand far enough to cover the visible spread.
            spread = [t[0] for x in list(h.coords) + list(gn.coords) for t in x.terms]
            cap = max(spread) + gamma_scale_int(max(spread) - min(spread), 4)
        g0_inv = g0.invert(cap - g0.valuation())

    mh, mg = h.p_min, gn.p_min
    mq = mh - mg
    rem = h
    q_coords: List[HahnSeries] = []
    for j in range(len(h.coords)):
        level = mh + j
        if rem.prec_n <= level:
            break
        if level < rem.p_min:
            d = HahnSeries.zero(h.p, h.group)
        else:
            d = rem.coord(level)
        qj = d * g0_inv
        q_coords.append(qj)
        if qj.is_zero() and qj.is_exact():
            continue
        term = mul_teichmuller(gn, qj).pshift(mq + j)
        rem = witt_sub(rem, term, table)
    if not q_coords:
        raise PrecisionError("no quotient levels computable at this precision")
    return WittVec(h.p, h.group, mq, tuple(q_coords))


def ring_membership(h: WittVec, tag: str) -> Optional[bool]:
    """Three-valued membership of h in one of the model rings."""
    if tag not in RING_TAGS:
        raise ValueError(f"unknown ring tag {tag!r}; expected one of {RING_TAGS}")
    if tag == "W(K)[1/p]":
        return True
    hn = h.normalized()

    def no_p_denominator() -> Optional[bool]:
        checks = []
        for i, c in enumerate(hn.coords):
            if hn.p_min + i >= 0:
                break
            if not c.is_zero():
                return False
            checks.append(None)  # zero at a cap below level 0: undecidable
        if hn.p_min >= 0:
            return True
        return None if checks else True

    if tag == "W(K)":
        return no_p_denominator()
    if tag == "A[1/p]":
        return _and3(*(c.val_ge_zero() for c in hn.coords))
    if tag == "A":
        return _and3(no_p_denominator(),
                     *(c.val_ge_zero() for c in hn.coords))
    # W(m_K)
    return _and3(no_p_denominator(),
                 *(c.val_gt_zero() for c in hn.coords))


def witt_unit_inverse(h: WittVec, table: Optional[WittPolyTable] = None) -> WittVec:
    """Inverse of h in W(K)[1/p] at precision.

    h must be a unit: after stripping its p-power, the leading Teichmuller
    coordinate is nonzero at precision.
    """
    table = table or get_table(h.p)
    hn = h.normalized()
    if not hn.coords or hn.coords[0].is_zero():
        if hn.coords and not hn.coords[0].is_exact():
            raise PrecisionError("unit leading coordinate hidden by t-precision")
        raise ZeroSeriesError("not a unit: zero at precision")
    m = hn.p_min
    body = WittVec(h.p, h.group, 0, hn.coords)  # h = p^m * body
    c0 = body.coords[0]
    if len(c0.terms) == 1 and c0.is_exact():
        g0, cc = c0.leading()
        c0_inv = HahnSeries.t_pow(c0.p, -g0, pow(cc, -1, c0.p))
    else:
        caps = [x.prec for x in body.coords if x.prec is not None]
        spread = [t[0] for x in body.coords for t in x.terms]
        if caps:
            cap = max(caps)
        else:
            width = max(spread) - min(spread)
            cap = max(spread) + gamma_scale_int(width, 4)
        c0_inv = c0.invert(cap - c0.valuation())
    v = mul_teichmuller(body, c0_inv)  # v = 1 + r with r divisible by p
    r = witt_sub(v, WittVec.one(h.p, h.group, v.prec_n), table).normalized()
    inv = WittVec.one(h.p, h.group, v.prec_n)
    power = WittVec.one(h.p, h.group, v.prec_n)
    if not r.coords or r.p_min >= v.prec_n:
        return mul_teichmuller(inv, c0_inv).pshift(-m)
    for _ in range(1, len(body.coords)):
        power = witt_mul(witt_neg(r, table), power, table)
        power = WittVec(power.p, power.group, power.p_min,
                        power.coords[:v.prec_n - power.p_min])
        if power.p_min >= v.prec_n or power.normalized().p_min >= v.prec_n:
            break
        inv = witt_add(inv, power, table)
    out = mul_teichmuller(inv, c0_inv)
    return out.pshift(-m)
