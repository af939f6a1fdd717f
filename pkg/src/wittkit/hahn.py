"""Finite-support Hahn series over F_p with exact group-valued exponents.

A series is a finite strictly-increasing list of ``(exponent, coefficient)``
terms with coefficients in F_p \\ {0}, plus an optional exponent cap ``prec``:
the element is known modulo t**prec.  ``prec is None`` means the series is
exact.  The model is perfect: Frobenius scales exponents by p and admits an
exact p-th root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import GroupMismatchError, ZeroSeriesError
from .values import GammaElt, gamma_zero

Term = Tuple[GammaElt, int]


def _min_prec(a: Optional[GammaElt], b: Optional[GammaElt]) -> Optional[GammaElt]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class HahnSeries:
    p: int
    group: str  # "Zp1" | "Rat" | "Lex"
    terms: Tuple[Term, ...]
    prec: Optional[GammaElt] = None

    def __post_init__(self):
        merged = {}
        for g, c in self.terms:
            if g.variant != self.group:
                raise GroupMismatchError(
                    f"exponent variant {g.variant} != series group {self.group}"
                )
            merged[g] = (merged.get(g, 0) + c) % self.p
        kept = sorted(
            ((g, c) for g, c in merged.items() if c != 0),
            key=lambda t: t[0],
        )
        if self.prec is not None:
            kept = [(g, c) for g, c in kept if g < self.prec]
        object.__setattr__(self, "terms", tuple(kept))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(p: int, group: str, prec: Optional[GammaElt] = None) -> "HahnSeries":
        return HahnSeries(p, group, (), prec)

    @staticmethod
    def one(p: int, group: str) -> "HahnSeries":
        return HahnSeries(p, group, ((gamma_zero(group, p), 1),))

    @staticmethod
    def t_pow(p: int, gamma: GammaElt, coeff: int = 1) -> "HahnSeries":
        """The monomial coeff * t**gamma."""
        return HahnSeries(p, gamma.variant, ((gamma, coeff % p),))

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        """Zero at the stored precision (exactly zero when prec is None)."""
        return not self.terms

    def is_exact(self) -> bool:
        return self.prec is None

    def valuation(self) -> Optional[GammaElt]:
        """Least exponent, or None for a series that is zero at precision."""
        return self.terms[0][0] if self.terms else None

    def valuation_floor(self) -> Optional[GammaElt]:
        """Certified lower bound for the valuation; None means +infinity."""
        if self.terms:
            return self.terms[0][0]
        return self.prec  # zero up to the cap; exact zero gives None

    def leading(self) -> Term:
        if not self.terms:
            raise ZeroSeriesError("zero series has no leading term")
        return self.terms[0]

    def val_ge_zero(self) -> Optional[bool]:
        """Three-valued v(self) >= 0; None when the cap hides the sign."""
        if self.terms:
            return self.terms[0][0].sign() >= 0
        if self.prec is None:
            return True
        return True if self.prec.sign() >= 0 else None

    def val_gt_zero(self) -> Optional[bool]:
        if self.terms:
            return self.terms[0][0].sign() > 0
        if self.prec is None:
            return True
        return True if self.prec.sign() > 0 else None

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "HahnSeries") -> None:
        if self.p != other.p or self.group != other.group:
            raise GroupMismatchError(
                f"cannot combine series over (p={self.p},{self.group}) "
                f"and (p={other.p},{other.group})"
            )

    def __add__(self, other: "HahnSeries") -> "HahnSeries":
        self._check(other)
        return HahnSeries(
            self.p, self.group, self.terms + other.terms, _min_prec(self.prec, other.prec)
        )

    def __neg__(self) -> "HahnSeries":
        return HahnSeries(
            self.p, self.group, tuple((g, (-c) % self.p) for g, c in self.terms), self.prec
        )

    def __sub__(self, other: "HahnSeries") -> "HahnSeries":
        return self + (-other)

    def __mul__(self, other: "HahnSeries") -> "HahnSeries":
        self._check(other)
        prod = [(ga + gb, ca * cb) for ga, ca in self.terms for gb, cb in other.terms]
        # Error propagation: a cap on one factor is shifted by the other
        # factor's valuation floor.  An exactly-zero factor kills the error.
        prec = None
        for x, y in ((self, other), (other, self)):
            if x.prec is not None and not (y.is_zero() and y.is_exact()):
                fl = y.valuation_floor()
                if fl is not None:
                    prec = _min_prec(prec, x.prec + fl)
        return HahnSeries(self.p, self.group, tuple(prod), prec)

    def __pow__(self, e: int) -> "HahnSeries":
        if e < 0:
            raise ValueError("negative powers: use invert()")
        out = HahnSeries.one(self.p, self.group)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def scale(self, gamma: GammaElt, coeff: int = 1) -> "HahnSeries":
        """Multiply by the monomial coeff * t**gamma (exact)."""
        return self * HahnSeries.t_pow(self.p, gamma, coeff)

    def invert(self, gamma_prec: GammaElt) -> "HahnSeries":
        """Inverse b with self*b == 1 modulo t**(gamma_prec + v(self)).

        Factors out the leading monomial and expands a geometric series.
        """
        if self.is_zero():
            raise ZeroSeriesError("cannot invert a series that is zero at precision")
        g0, c0 = self.leading()
        lead_inv = HahnSeries.t_pow(self.p, -g0, pow(c0, -1, self.p))
        if len(self.terms) == 1 and self.is_exact():
            return lead_inv  # exact monomial inverse, no cap needed
        u = self.scale(-g0, pow(c0, -1, self.p)) - HahnSeries.one(self.p, self.group)
        # self = c0 t^g0 (1 + u) with v(u) > 0; invert 1 + u geometrically.
        acc = HahnSeries.one(self.p, self.group)
        power = HahnSeries.one(self.p, self.group)
        while True:
            power = (-u) * power
            if power.is_zero() or not (power.valuation() < gamma_prec):
                break
            acc = acc + power
        out = lead_inv * acc
        cap = gamma_prec - g0
        return HahnSeries(out.p, out.group, out.terms, _min_prec(out.prec, cap))

    # -- perfectness -------------------------------------------------------

    def frobenius(self) -> "HahnSeries":
        return self._scale_exponents(1)

    def pth_root(self) -> "HahnSeries":
        return self._scale_exponents(-1)

    def frobenius_iter(self, n: int) -> "HahnSeries":
        """Apply frobenius n times (n may be negative for p-th roots)."""
        return self._scale_exponents(n)

    def _scale_exponents(self, e: int) -> "HahnSeries":
        terms = tuple((g.scale_p(e), c) for g, c in self.terms)
        prec = None if self.prec is None else self.prec.scale_p(e)
        return HahnSeries(self.p, self.group, terms, prec)

    # -- splitting ---------------------------------------------------------

    def split_nonneg(self) -> Tuple["HahnSeries", "HahnSeries"]:
        """Exact splitting into (exponents >= 0, exponents < 0) parts."""
        plus = tuple((g, c) for g, c in self.terms if g.sign() >= 0)
        minus = tuple((g, c) for g, c in self.terms if g.sign() < 0)
        return (
            HahnSeries(self.p, self.group, plus, self.prec),
            HahnSeries(self.p, self.group, minus),
        )

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "p": self.p,
            "group": self.group,
            "terms": [[g.to_json(), c] for g, c in self.terms],
            "prec": "exact" if self.prec is None else self.prec.to_json(),
        }

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"{c}*t^({g!r})" for g, c in self.terms)
        cap = "" if self.prec is None else f" mod t^({self.prec!r})"
        return f"<{body}{cap}>"


def hahn_from_json(obj) -> HahnSeries:
    from .values import gamma_from_json

    p, group = obj["p"], obj["group"]
    terms = tuple((gamma_from_json(g, group, p), c) for g, c in obj["terms"])
    prec = None if obj.get("prec", "exact") == "exact" else gamma_from_json(obj["prec"], group, p)
    return HahnSeries(p, group, terms, prec)
