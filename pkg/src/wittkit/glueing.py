"""Constructive two-chart glueing over A = W(o_K), B = W(K).

A rank-d bundle on the punctured spectrum is free data on the charts
Spec A[1/p] and Spec B, glued over B[1/p] by a transition matrix T.  The
pipeline factors T = U * Q^(-1) with U invertible over A[1/p] and Q
invertible over W(K); the columns of Q then generate the global sections
H0 = Q * A^d, and the certificate T*Q - U == 0 is checkable by direct Witt
arithmetic at precision.

The factorization runs a small Birkhoff-style elimination: right column
operations over W(K) triangularize T (every nonzero element of W(K)[1/p]
is a p-power times a unit), and the leftover entries blocking A[1/p]
membership are removed by an atomic two-column move built around the
identity
    [[1, 0], [p^-a [c], 1]] * [[p^a, [c^-1]], [-[c], 0]] = [[p^a, [c^-1]], [0, p^-a]]
whose right factor has determinant 1 over W(K) and whose product has
entries in A[1/p].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (NotAFactorizationError, PrecisionError,
                     UnsupportedFormError, ZeroSeriesError)
from .hahn import HahnSeries
from .values import (GammaElt, gamma_from_fraction, gamma_from_json,
                     gamma_scale_int, gamma_zero)
from .witt import (WittVec, mul_teichmuller, ring_membership, teichmuller,
                   witt_add, witt_mul, witt_neg, witt_sub, witt_unit_inverse)
from .wittpoly import WittPolyTable, get_table, table_level_cap

Matrix = List[List[WittVec]]

_MAX_ELIM_STEPS = 120


def _work_len() -> int:
    """Working coordinate length for matrix arithmetic: one below the table
    cap, since per-operation cost grows steeply with the level."""
    return max(2, min(table_level_cap(), 5))


# -- matrices of Witt vectors ----------------------------------------------


def mat_identity(p: int, group: str, d: int, prec_n: int) -> Matrix:
    return [[WittVec.one(p, group, prec_n) if i == j
             else WittVec.zero(p, group, prec_n)
             for j in range(d)] for i in range(d)]


def mat_copy(m: Matrix) -> Matrix:
    return [row[:] for row in m]


def _trunc_len(v: WittVec, maxlen: int) -> WittVec:
    v = v.normalized()
    if len(v.coords) <= maxlen:
        return v
    return WittVec(v.p, v.group, v.p_min, v.coords[:maxlen])


def _wmul(a: WittVec, b: WittVec, table: WittPolyTable) -> WittVec:
    if a.is_zero() or b.is_zero():
        n = min(a.prec_n + b.p_min, b.prec_n + a.p_min) - (a.p_min + b.p_min)
        return WittVec(a.p, a.group, a.p_min + b.p_min,
                       tuple(HahnSeries.zero(a.p, a.group) for _ in range(max(n, 1))))
    cap = _work_len()
    return witt_mul(_trunc_len(a, cap), _trunc_len(b, cap), table)


def _wadd(a: WittVec, b: WittVec, table: WittPolyTable) -> WittVec:
    """witt_add with the aligned window truncated to the working length."""
    cap = _work_len()
    a, b = a.normalized(), b.normalized()
    if not a.coords or not b.coords:
        # one side is zero up to its window: the sum is the other side,
        # truncated to the common precision
        z, x = (a, b) if not a.coords else (b, a)
        prec = min(z.prec_n, x.prec_n)
        keep = prec - x.p_min
        if keep <= 0:
            return WittVec(x.p, x.group, prec, ())
        return WittVec(x.p, x.group, x.p_min, x.coords[:keep])
    allowed = min(a.p_min, b.p_min) + cap

    def trunc(v: WittVec) -> WittVec:
        keep = allowed - v.p_min
        if keep >= len(v.coords):
            return v
        if keep <= 0:
            raise PrecisionError("p-adic windows too far apart for the table cap")
        return WittVec(v.p, v.group, v.p_min, v.coords[:keep])

    return witt_add(trunc(a), trunc(b), table)


def _wsub(a: WittVec, b: WittVec, table: WittPolyTable) -> WittVec:
    return _wadd(a, witt_neg(b, table), table)


def mat_mul(a: Matrix, b: Matrix, table: WittPolyTable) -> Matrix:
    d, e, f = len(a), len(b), len(b[0])
    out = []
    for i in range(d):
        row = []
        for j in range(f):
            acc = _wmul(a[i][0], b[0][j], table)
            for k in range(1, e):
                acc = _wadd(acc, _wmul(a[i][k], b[k][j], table), table)
            row.append(acc)
        out.append(row)
    return out


def mat_sub(a: Matrix, b: Matrix, table: WittPolyTable) -> Matrix:
    return [[_wsub(x, y, table) for x, y in zip(ra, rb)]
            for ra, rb in zip(a, b)]


def det_witt(m: Matrix, table: WittPolyTable) -> WittVec:
    d = len(m)
    if d == 1:
        return m[0][0]
    acc: Optional[WittVec] = None
    for j in range(d):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = _wmul(m[0][j], det_witt(minor, table), table)
        if j % 2:
            term = witt_neg(term, table)
        acc = term if acc is None else _wadd(acc, term, table)
    return acc


def mat_adjugate(m: Matrix, table: WittPolyTable) -> Matrix:
    d = len(m)
    if d == 1:
        return [[WittVec.one(m[0][0].p, m[0][0].group, m[0][0].prec_n)]]
    adj = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            minor = [row[:i] + row[i + 1:]
                     for k, row in enumerate(m) if k != j]
            c = det_witt(minor, table)
            if (i + j) % 2:
                c = witt_neg(c, table)
            adj[i][j] = c
    return adj


def mat_inverse(m: Matrix, table: WittPolyTable) -> Matrix:
    """Inverse over the fraction field W(K)[1/p] at precision (d <= 3 in tests)."""
    det = det_witt(m, table)
    det_inv = witt_unit_inverse(det, table)
    adj = mat_adjugate(m, table)
    return [[_wmul(x, det_inv, table) for x in row] for row in adj]


def mat_is_zero(m: Matrix) -> bool:
    return all(e.is_zero() for row in m for e in row)


# -- glue data --------------------------------------------------------------


@dataclass(frozen=True)
class GlueDatum:
    """Transition matrix given as a product of structured atoms.

    Atoms (applied left to right):
      ("diag", ((a_1, gamma_1), ..., (a_d, gamma_d)))   diag(p^a_i [t^gamma_i])
      ("perm", (s_0, ..., s_{d-1}))                     column permutation
      ("elem", i, j, mu)                                I + mu * E_{ij}, mu a WittVec
    """
    p: int
    group: str
    rank: int
    factors: Tuple[tuple, ...]
    prec_n: int
    gamma_max: Fraction

    def matrix(self, table: Optional[WittPolyTable] = None) -> Matrix:
        """Assemble T, padding internal precision so that negative p-levels
        in the atoms do not starve the product of its p^N window."""
        table = table or get_table(self.p)
        pad = 1
        for atom in self.factors:
            if atom[0] == "diag":
                pad += sum(abs(a) for a, _ in atom[1])
            elif atom[0] == "elem":
                pad += max(0, -atom[3].p_min)
        n = self.prec_n + pad
        m = mat_identity(self.p, self.group, self.rank, n)
        for atom in self.factors:
            m = mat_mul(m, self._atom_matrix(atom, n), table)
        return m

    def _atom_matrix(self, atom: tuple, n: Optional[int] = None) -> Matrix:
        kind = atom[0]
        d, p, group = self.rank, self.p, self.group
        n = self.prec_n if n is None else n
        if kind == "diag":
            m = mat_identity(p, group, d, n)
            for i, (a, gamma) in enumerate(atom[1]):
                if not isinstance(gamma, (Fraction, int)):
                    g = gamma
                else:
                    g = gamma_from_fraction(Fraction(gamma), group, p)
                m[i][i] = teichmuller(HahnSeries.t_pow(p, g), n).pshift(a)
            return m
        if kind == "perm":
            perm = atom[1]
            m = [[WittVec.zero(p, group, n) for _ in range(d)] for _ in range(d)]
            for j, i in enumerate(perm):
                m[i][j] = WittVec.one(p, group, n)
            return m
        if kind == "elem":
            _, i, j, mu = atom
            if i == j:
                raise UnsupportedFormError("elementary atom needs i != j")
            m = mat_identity(p, group, d, n)
            m[i][j] = mu
            return m
        raise UnsupportedFormError(f"unknown atom kind {kind!r}")

    def to_json(self):
        atoms = []
        for atom in self.factors:
            if atom[0] == "diag":
                atoms.append({"kind": "diag",
                              "entries": [[a, _gamma_json(g, self.group, self.p)]
                                          for a, g in atom[1]]})
            elif atom[0] == "perm":
                atoms.append({"kind": "perm", "perm": list(atom[1])})
            else:
                atoms.append({"kind": "elem", "i": atom[1], "j": atom[2],
                              "mu": atom[3].to_json()})
        return {"p": self.p, "group": self.group, "rank": self.rank,
                "N": self.prec_n,
                "gamma_max": {"num": self.gamma_max.numerator,
                              "den": self.gamma_max.denominator},
                "factors": atoms}


def _gamma_json(g, group, p):
    if isinstance(g, (Fraction, int)):
        g = gamma_from_fraction(Fraction(g), group, p)
    return g.to_json()


def glue_datum_from_json(obj) -> GlueDatum:
    from .witt import witt_from_json
    p, group = obj["p"], obj["group"]
    factors = []
    for atom in obj["factors"]:
        if atom["kind"] == "diag":
            factors.append(("diag", tuple(
                (a, gamma_from_json(g, group, p)) for a, g in atom["entries"])))
        elif atom["kind"] == "perm":
            factors.append(("perm", tuple(atom["perm"])))
        else:
            factors.append(("elem", atom["i"], atom["j"],
                            witt_from_json(atom["mu"])))
    gm = obj["gamma_max"]
    return GlueDatum(p, group, obj["rank"], tuple(factors), obj["N"],
                     Fraction(gm["num"], gm["den"]))


# -- Birkhoff-style elimination --------------------------------------------


def _col_addmul(m: Matrix, q: Matrix, dst: int, src: int, coeff: WittVec,
                table: WittPolyTable) -> None:
    """col_dst += coeff * col_src, mirrored on the op accumulator q."""
    for mat in (m, q):
        for row in mat:
            row[dst] = _wadd(row[dst], _wmul(coeff, row[src], table), table)


def _col_scale(m: Matrix, q: Matrix, k: int, coeff: WittVec,
               table: WittPolyTable) -> None:
    for mat in (m, q):
        for row in mat:
            row[k] = _wmul(row[k], coeff, table)


def _col_swap(m: Matrix, q: Matrix, i: int, j: int) -> None:
    for mat in (m, q):
        for row in mat:
            row[i], row[j] = row[j], row[i]


def _col_pair_move(m: Matrix, q: Matrix, j: int, i: int,
                   q11: WittVec, q12: WittVec, q21: WittVec, q22: WittVec,
                   table: WittPolyTable) -> None:
    """(col_j, col_i) <- (q11*col_j + q21*col_i, q12*col_j + q22*col_i)."""
    for mat in (m, q):
        for row in mat:
            cj, ci = row[j], row[i]
            row[j] = _wadd(_wmul(q11, cj, table), _wmul(q21, ci, table), table)
            row[i] = _wadd(_wmul(q12, cj, table), _wmul(q22, ci, table), table)


def _entry_in_a1p(x: WittVec) -> Optional[bool]:
    return ring_membership(x, "A[1/p]")


def _leading_teich_inverse(c: HahnSeries, prec_n: int) -> WittVec:
    """[c^-1] as a Witt vector (exact for monomials, truncated otherwise)."""
    if len(c.terms) == 1 and c.is_exact():
        g0, c0 = c.leading()
        inv = HahnSeries.t_pow(c.p, -g0, pow(c0, -1, c.p))
    else:
        spread = max(g for g, _ in c.terms) - c.valuation()
        cap = -c.valuation() + gamma_scale_int(spread, 5)
        inv = c.invert(cap)
    return teichmuller(inv, prec_n)


def _clip_to_wk(coeff: WittVec, msg: str) -> Optional[WittVec]:
    """Drop negative p-levels of coeff that carry no certain content (they are
    exactly zero whenever the op divides evenly; caps can hide that).  Raises
    if a negative level certainly has content; returns None when nothing at
    level >= 0 is known."""
    cn = coeff.normalized()
    if cn.p_min >= 0:
        return cn
    drop = min(-cn.p_min, len(cn.coords))
    if any(c.terms for c in cn.coords[:drop]):
        raise NotAFactorizationError(msg)
    coords = cn.coords[drop:]
    if not coords:
        return None
    return WittVec(cn.p, cn.group, 0, coords)


def _low_truncation(x: WittVec, m: int) -> WittVec:
    """The levels-below-m prefix of the Teichmuller expansion (an element)."""
    xn = x.normalized()
    keep = max(0, m - xn.p_min)
    length = max(x.prec_n - xn.p_min, keep, 1)
    zero = HahnSeries.zero(x.p, x.group)
    coords = xn.coords[:keep] + tuple(zero for _ in range(length - keep))
    return WittVec(x.p, x.group, xn.p_min, coords)


def _first_bad_term(x: WittVec, below_level: int):
    """Lowest level n < below_level whose coordinate has negative valuation."""
    xn = x.normalized()
    for i, c in enumerate(xn.coords):
        level = xn.p_min + i
        if level >= below_level:
            break
        if c.terms and c.valuation().sign() < 0:
            return level, c
        if not c.terms and not c.is_exact() and c.prec.sign() < 0:
            raise PrecisionError("coordinate sign hidden by t-precision cap")
    return None


def _triangularize(m: Matrix, q: Matrix, table: WittPolyTable) -> None:
    """Right W(K) column ops bringing m to lower-triangular form."""
    d = len(m)
    for r in range(d):
        # pivot: remaining column whose row-r entry has minimal p-valuation
        best, best_m = None, None
        for j in range(r, d):
            e = m[r][j].normalized()
            if e.coords and not e.coords[0].is_zero():
                if best is None or e.p_min < best_m:
                    best, best_m = j, e.p_min
        if best is None:
            raise NotAFactorizationError(
                f"transition matrix singular at precision (row {r})")
        if best != r:
            _col_swap(m, q, r, best)
        pivot_inv = witt_unit_inverse(m[r][r], table)
        for j in range(r + 1, d):
            e = m[r][j]
            if e.is_zero():
                continue
            coeff = _clip_to_wk(witt_neg(_wmul(e, pivot_inv, table), table),
                                "pivot was not minimal")
            if coeff is None:
                continue
            _col_addmul(m, q, j, r, coeff, table)


def _beta_clear(m: Matrix, q: Matrix, table: WittPolyTable) -> None:
    """Remove, by right ops, the parts of below-diagonal entries at p-levels
    >= the column diagonal level whenever they block A[1/p] membership."""
    d = len(m)
    for j in range(d):
        for i in range(j + 1, d):
            entry = m[i][j]
            if entry.is_zero() or _entry_in_a1p(entry) is True:
                continue
            mi = m[i][i].normalized().p_min
            high = _wsub(entry, _low_truncation(entry, mi), table)
            hn = high.normalized()
            if not hn.coords or hn.p_min >= entry.prec_n:
                continue
            if _entry_in_a1p(high) is True:
                continue
            diag_inv = witt_unit_inverse(m[i][i], table)
            coeff = _clip_to_wk(witt_neg(_wmul(high, diag_inv, table), table),
                                "high part not divisible by diagonal")
            if coeff is None:
                continue
            _col_addmul(m, q, j, i, coeff, table)


def _atomic_move(m: Matrix, q: Matrix, j: int, i: int, n: int, c: HahnSeries,
                 table: WittPolyTable) -> None:
    """Clear the term p^n[c] (v(c) < 0, n below the diagonal level) of entry
    (i, j) with a determinant-unit column-pair move over W(K)."""
    prec = m[i][j].prec_n - m[i][j].p_min + 4
    diag = m[i][i].normalized()
    mi = diag.p_min
    a = mi - n
    if a <= 0:
        raise NotAFactorizationError("atomic move needs a level deficit")
    unit = WittVec(diag.p, diag.group, 0, diag.coords)
    unit_inv = witt_unit_inverse(unit, table)
    c_w = teichmuller(c, prec)
    c_inv = _leading_teich_inverse(c, prec)
    q11 = WittVec.p_power(m[i][j].p, m[i][j].group, a, prec)
    q12 = c_inv
    q21 = witt_neg(_wmul(c_w, unit_inv, table), table)
    q22 = WittVec.zero(m[i][j].p, m[i][j].group, prec)
    _col_pair_move(m, q, j, i, q11, q12, q21, q22, table)


def _det_is_a_unit(m: Matrix, table: WittPolyTable) -> Optional[bool]:
    det = det_witt(m, table).normalized()
    if not det.coords or det.coords[0].is_zero():
        return False if det.coords and det.coords[0].is_exact() else None
    lead = det.coords[0].valuation()
    return lead.sign() == 0


def birkhoff_factor(datum: GlueDatum,
                    table: Optional[WittPolyTable] = None) -> Tuple[Matrix, Matrix]:
    """T = U * Q^(-1): returns (U, Q) with U over A[1/p], Q over GL_d(W(K))."""
    table = table or get_table(datum.p)
    t = datum.matrix(table)
    d = datum.rank
    m = mat_copy(t)
    q = mat_identity(datum.p, datum.group, d, datum.prec_n)
    for _ in range(_MAX_ELIM_STEPS):
        entries_ok = all(_entry_in_a1p(e) is True for row in m for e in row)
        if entries_ok:
            du = _det_is_a_unit(m, table)
            if du is True:
                return m, q
            if du is None:
                raise PrecisionError("determinant unit status hidden by caps")
        _triangularize(m, q, table)
        _beta_clear(m, q, table)
        worst = None
        for j in range(d):
            for i in range(j + 1, d):
                mi = m[i][i].normalized().p_min
                bad = _first_bad_term(m[i][j], mi)
                if bad is not None and (worst is None or bad[0] < worst[2]):
                    worst = (j, i, bad[0], bad[1])
        if worst is not None:
            j, i, n, c = worst
            _atomic_move(m, q, j, i, n, c, table)
            continue
        # entries clean up to diagonal units: strip a Teichmuller leading
        # unit, or normalize a diagonal whose higher coordinates block
        # A[1/p] membership, one column at a time
        moved = False
        for k in range(d):
            dk = m[k][k].normalized()
            if dk.coords and dk.coords[0].terms:
                # a diagonal blocking A[1/p] membership sheds its whole
                # W(K)-unit part; one in A[1/p] whose leading Teichmuller
                # still blocks the determinant sheds just that factor
                if _entry_in_a1p(m[k][k]) is not True:
                    coeff = witt_unit_inverse(m[k][k], table).pshift(dk.p_min)
                    _col_scale(m, q, k, coeff, table)
                    moved = True
                    break
                if dk.coords[0].valuation().sign() != 0:
                    c_inv = _leading_teich_inverse(dk.coords[0], _work_len())
                    _col_scale(m, q, k, c_inv, table)
                    moved = True
                    break
        if not moved and not all(_entry_in_a1p(e) is True for row in m for e in row):
            raise NotAFactorizationError("elimination stalled")
    raise NotAFactorizationError("elimination exceeded the step budget")


# -- sections, lattices, and the pipeline ----------------------------------


def valuation_lattice_dim(gens: Sequence[Sequence[HahnSeries]]):
    """dim of (o_K-span of gens) tensor kappa, by column reduction over o_K.

    Returns (dim, free_rank_d, basis): dim <= d always; the pivot columns are
    an o_K-basis of the span (free of rank dim), and free_rank_d iff dim == d.
    """
    if not gens:
        return 0, False, []
    d = len(gens[0])
    cols = [list(g) for g in gens]
    basis: List[List[HahnSeries]] = []
    used_rows: List[int] = []
    while True:
        pivot = None  # (row, col_index, valuation)
        for ci, col in enumerate(cols):
            for r in range(d):
                if r in used_rows:
                    continue
                e = col[r]
                if not e.terms:
                    continue
                v = e.valuation()
                if pivot is None or v < pivot[2]:
                    pivot = (r, ci, v)
        if pivot is None:
            break
        r, ci, _ = pivot
        pcol = cols.pop(ci)
        pe = pcol[r]
        if len(pe.terms) == 1 and pe.is_exact():
            g0, c0 = pe.leading()
            pe_inv = HahnSeries.t_pow(pe.p, -g0, pow(c0, -1, pe.p))
        else:
            spread = max(g for g, _ in pe.terms) - pe.valuation()
            pe_inv = pe.invert(-pe.valuation() + gamma_scale_int(spread, 4))
        for col in cols:
            if col[r].terms:
                ratio = col[r] * pe_inv
                for k in range(d):
                    col[k] = col[k] - ratio * pcol[k]
        basis.append(pcol)
        used_rows.append(r)
        if len(used_rows) == d:
            break
    dim = len(basis)
    return dim, dim == d, basis


@dataclass
class SectionGenerators:
    datum: GlueDatum
    u: Matrix
    q: Matrix
    gens: List[List[WittVec]]  # columns of q, in W(K)^d chart coordinates
    certificates: List[dict]


def h0_sections(datum: GlueDatum,
                table: Optional[WittPolyTable] = None) -> SectionGenerators:
    """Generators of H0 at precision: the columns of Q, with membership
    certificates (generator in W(K)^d, its T-image in A[1/p]^d)."""
    table = table or get_table(datum.p)
    u, q = birkhoff_factor(datum, table)
    gens = [[q[i][k] for i in range(datum.rank)] for k in range(datum.rank)]
    certs = []
    for k in range(datum.rank):
        in_wk = [ring_membership(q[i][k], "W(K)") for i in range(datum.rank)]
        img_ok = [_entry_in_a1p(u[i][k]) for i in range(datum.rank)]
        certs.append({"generator_in_W(K)": all(x is True for x in in_wk),
                      "image_in_A[1/p]": all(x is True for x in img_ok)})
    return SectionGenerators(datum, u, q, gens, certs)


# -- graded lattice over kappa((pbar)) -------------------------------------


class FpLaurent:
    """Truncated Laurent series over F_p in the graded variable pbar."""

    __slots__ = ("p", "coef", "prec")

    def __init__(self, p: int, coef: Optional[Dict[int, int]] = None,
                 prec: int = 0):
        self.p = p
        self.prec = prec
        self.coef = {k: v % p for k, v in (coef or {}).items()
                     if v % p and k < prec}

    def is_zero(self) -> bool:
        return not self.coef

    def val(self) -> Optional[int]:
        return min(self.coef) if self.coef else None

    def add(self, other: "FpLaurent") -> "FpLaurent":
        c = dict(self.coef)
        for k, v in other.coef.items():
            c[k] = c.get(k, 0) + v
        return FpLaurent(self.p, c, min(self.prec, other.prec))

    def sub(self, other: "FpLaurent") -> "FpLaurent":
        c = dict(self.coef)
        for k, v in other.coef.items():
            c[k] = c.get(k, 0) - v
        return FpLaurent(self.p, c, min(self.prec, other.prec))

    def mul(self, other: "FpLaurent") -> "FpLaurent":
        if self.is_zero() or other.is_zero():
            return FpLaurent(self.p, {}, min(self.prec, other.prec))
        prec = min(self.prec + other.val(), other.prec + self.val())
        c: Dict[int, int] = {}
        for k1, v1 in self.coef.items():
            for k2, v2 in other.coef.items():
                c[k1 + k2] = c.get(k1 + k2, 0) + v1 * v2
        return FpLaurent(self.p, c, prec)

    def div(self, other: "FpLaurent") -> "FpLaurent":
        """Series division; requires other nonzero."""
        if other.is_zero():
            raise ZeroSeriesError("division by zero graded series")
        v = other.val()
        lead = other.coef[v]
        lead_inv = pow(lead, -1, self.p)
        rem = FpLaurent(self.p, dict(self.coef), self.prec)
        prec = min(self.prec - v, other.prec - v + (0 if self.is_zero() else self.val() - v))
        out: Dict[int, int] = {}
        while not rem.is_zero():
            rv = rem.val()
            if rv - v >= prec:
                break
            q = (rem.coef[rv] * lead_inv) % self.p
            out[rv - v] = q
            qs = FpLaurent(self.p, {rv - v: q}, prec + v + 1)
            rem = rem.sub(qs.mul(other))
        return FpLaurent(self.p, out, prec)


def graded_image(v: WittVec, prec_n: int) -> FpLaurent:
    """Image in kappa((pbar)): level-n coefficient is the residue (t^0
    coefficient) of the n-th Teichmuller coordinate."""
    zero = gamma_zero(v.group, v.p)
    c: Dict[int, int] = {}
    for i, coord in enumerate(v.coords):
        for g, a in coord.terms:
            if g == zero:
                c[v.p_min + i] = a
    return FpLaurent(v.p, c, min(prec_n, v.prec_n))


@dataclass
class GradedBasisResult:
    ok: bool
    indices: List[int]
    defect: int  # d - achieved lattice rank
    basis: List[List[WittVec]]


def graded_lattice_basis(gens: List[List[WittVec]], datum: GlueDatum,
                         table: Optional[WittPolyTable] = None,
                         q_inv: Optional[Matrix] = None) -> GradedBasisResult:
    """Select d generators whose graded images form a kappa[[pbar]]-lattice
    basis, by column reduction over the discrete valuation ring F_p[[pbar]].

    Generators are expressed in the Q-chart coordinates (w = Q^-1 g), where
    the graded module of H0 is free, before reduction to the residue field.
    """
    table = table or get_table(datum.p)
    d = datum.rank
    if q_inv is None:
        _, q = birkhoff_factor(datum, table)
        q_inv = mat_inverse(q, table)
    images = []
    for g in gens:
        w = []
        for i in range(d):
            acc = _wmul(q_inv[i][0], g[0], table)
            for k in range(1, d):
                acc = _wadd(acc, _wmul(q_inv[i][k], g[k], table), table)
            w.append(acc)
        images.append([graded_image(x, datum.prec_n) for x in w])

    work = [(idx, [FpLaurent(datum.p, dict(x.coef), x.prec) for x in img])
            for idx, img in enumerate(images)]
    chosen: List[int] = []
    used_rows: List[int] = []
    while len(chosen) < d:
        pivot = None
        for wi, (idx, vec) in enumerate(work):
            if idx in chosen:
                continue
            for r in range(d):
                if r in used_rows:
                    continue
                e = vec[r]
                if e.is_zero():
                    continue
                if pivot is None or e.val() < pivot[3]:
                    pivot = (wi, idx, r, e.val())
        if pivot is None:
            break
        wi, idx, r, _ = pivot
        _, pvec = work[wi]
        for wj, (jdx, vec) in enumerate(work):
            if wj == wi or jdx in chosen:
                continue
            if not vec[r].is_zero():
                ratio = vec[r].div(pvec[r])
                work[wj] = (jdx, [a.sub(ratio.mul(b))
                                  for a, b in zip(vec, pvec)])
        chosen.append(idx)
        used_rows.append(r)
    defect = d - len(chosen)
    return GradedBasisResult(defect == 0, chosen, defect,
                             [gens[i] for i in chosen])


# -- transfer of generators -------------------------------------------------


@dataclass
class TransferCertificate:
    ok: bool
    expressions: List[List[WittVec]]  # row per generator: coefficients r_i
    failing_level: Optional[int] = None
    detail: str = ""


def transfer_generators_check(basis: List[List[WittVec]],
                              gens: List[List[WittVec]], datum: GlueDatum,
                              table: Optional[WittPolyTable] = None) -> TransferCertificate:
    """Express each generator as sum r_i v_i and certify r_i in A by peeling
    p-powers: at each stage the common p-pole must drop by one because the
    basis is a basis modulo p."""
    table = table or get_table(datum.p)
    d = datum.rank
    vmat = [[basis[k][i] for k in range(d)] for i in range(d)]
    vinv = mat_inverse(vmat, table)
    exprs: List[List[WittVec]] = []
    for g in gens:
        r = []
        for i in range(d):
            acc = _wmul(vinv[i][0], g[0], table)
            for k in range(1, d):
                acc = _wadd(acc, _wmul(vinv[i][k], g[k], table), table)
            r.append(acc)
        exprs.append(r)
    for r in exprs:
        poles = [x.normalized().p_min for x in r
                 if x.normalized().coords]
        m = max(0, -min(poles)) if poles else 0
        # descending induction: p^m r_i must gain one power of p per stage
        for stage in range(m):
            level = m - 1 - stage
            if any(x.normalized().coords and x.normalized().p_min < -level
                   for x in r):
                return TransferCertificate(
                    False, exprs, level,
                    "coefficients not divisible: candidate basis fails modulo p")
        for x in r:
            mem = ring_membership(x, "A")
            if mem is False:
                return TransferCertificate(
                    False, exprs, 0, "coefficient outside A at precision")
            if mem is None:
                return TransferCertificate(
                    False, exprs, None, "coefficient membership indeterminate")
    return TransferCertificate(True, exprs)


# -- full pipeline ----------------------------------------------------------


@dataclass
class GlueCertificate:
    datum: GlueDatum
    basis: List[List[WittVec]]
    u: Matrix
    q: Matrix
    residual_zero: bool
    u_in_a1p: bool
    q_in_wk: bool
    transfer: TransferCertificate

    @property
    def ok(self) -> bool:
        return (self.residual_zero and self.u_in_a1p and self.q_in_wk
                and self.transfer.ok)

    def to_json(self):
        return {
            "rank": self.datum.rank,
            "basis": [[x.to_json() for x in col] for col in self.basis],
            "U": [[x.to_json() for x in row] for row in self.u],
            "Q": [[x.to_json() for x in row] for row in self.q],
            "residual": "zero" if self.residual_zero else "nonzero",
            "U_in_A[1/p]": self.u_in_a1p,
            "Q_in_W(K)": self.q_in_wk,
            "transfer_ok": self.transfer.ok,
        }


def glue_to_free(datum: GlueDatum,
                 table: Optional[WittPolyTable] = None) -> GlueCertificate:
    """h0_sections -> graded_lattice_basis -> transfer_generators_check,
    returning the two-chart factorization certificate."""
    table = table or get_table(datum.p)
    sections = h0_sections(datum, table)
    u, q = sections.u, sections.q
    q_inv = mat_inverse(q, table)
    graded = graded_lattice_basis(sections.gens, datum, table, q_inv)
    if not graded.ok:
        raise NotAFactorizationError(
            f"graded lattice rank defect {graded.defect} at precision")
    transfer = transfer_generators_check(graded.basis, sections.gens, datum, table)
    t = datum.matrix(table)
    residual = mat_sub(mat_mul(t, q, table), u, table)
    u_ok = all(_entry_in_a1p(e) is True for row in u for e in row)
    q_ok = all(ring_membership(e, "W(K)") is True for row in q for e in row)
    return GlueCertificate(datum, graded.basis, u, q,
                           mat_is_zero(residual), u_ok, q_ok, transfer)


def reflexivity_check(basis: Optional[Matrix], datum: GlueDatum,
                      table: Optional[WittPolyTable] = None) -> bool:
    """M -> M** is the identity at precision, via the two-chart description."""
    if datum.rank == 0:
        return True
    table = table or get_table(datum.p)
    if basis is None:
        cert = glue_to_free(datum, table)
        basis = [[cert.basis[k][i] for k in range(datum.rank)]
                 for i in range(datum.rank)]
    binv = mat_inverse(basis, table)
    composite = mat_mul(basis, binv, table)
    ident = mat_identity(datum.p, datum.group, datum.rank, datum.prec_n)
    return mat_is_zero(mat_sub(composite, ident, table))


def fully_faithful_probe(x: WittVec) -> bool:
    """A[1/p] and W(K) membership jointly imply A membership (vacuous when
    either fails or is indeterminate)."""
    a1p = ring_membership(x, "A[1/p]")
    wk = ring_membership(x, "W(K)")
    if a1p is True and wk is True:
        return ring_membership(x, "A") is True
    return True
