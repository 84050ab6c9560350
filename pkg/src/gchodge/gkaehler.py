"""Generalized Kaehler pairs: commuting-structure validation, the generalized
metric, the L1+/L1- splitting, the U_{r,s} bigrading, the four components of
d_H, bigraded cohomology, Lie algebroid decompositions, and deformation
compatibility.

The Kaehler identities live here only through their exact cohomological
consequences; no adjoint operators or metrics on spinors are constructed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb

from .cohomology import TwistedCohomology, _preimage_in
from .courant import GenElem, algebroid_from_basis, pairing
from .errors import (MetricNotPositive, NotADecomposition,
                     NotClosedUnderBracket, NotCommuting, NotIsotropic,
                     SplitNotIntegrable)
from .families import FamilySpec, ks_class
from .forms import Form, popcount
from .gcs import GCStruct, form_of_vec, pairing_gram
from .liemodel import LieAlgebroid, _mask_indices
from .linalg import QuotientSpace, Subspace, Vec, mat_mul, vec_axpy
from .scalars import ONE, QI


class GKPair:
    """Validated generalized Kaehler pair with the simultaneous bigrading."""

    def __init__(self, s1: GCStruct, s2: GCStruct, G, Lp: LieAlgebroid,
                 Lm: LieAlgebroid):
        self.s1 = s1
        self.s2 = s2
        self.model = s1.model
        self.G = G
        self.Lp = Lp   # L1+ = L1 cap L2
        self.Lm = Lm   # L1- = L1 cap conj(L2)
        self.n = s1.n
        self._blade_parts: dict[int, dict[tuple[int, int], Vec]] = {}
        dim = self.model.dim
        u_vecs: dict[tuple[int, int], list[Vec]] = {}
        for mask in range(1 << dim):
            parts: dict[tuple[int, int], Vec] = {}
            for r, p1 in s1._blade_parts[mask].items():
                for s, p2 in s2._decompose_vec(p1).items():
                    if p2:
                        parts[(r, s)] = vec_axpy(parts.get((r, s), {}), ONE, p2)
            self._blade_parts[mask] = parts
            for rs, v in parts.items():
                u_vecs.setdefault(rs, []).append(v)
        self.U2 = {rs: Subspace.span(1 << dim, vs) for rs, vs in u_vecs.items()}
        self.U2_dims = {rs: sp.dim for rs, sp in self.U2.items() if sp.dim}

    def decompose2(self, w: Form) -> dict[tuple[int, int], Form]:
        parts: dict[tuple[int, int], Vec] = {}
        for mask, c in w.coeffs.items():
            for rs, p in self._blade_parts[mask].items():
                parts[rs] = vec_axpy(parts.get(rs, {}), c, p)
        return {rs: form_of_vec(w.dim, v) for rs, v in parts.items() if v}

    def U2_subspace(self, r: int, s: int) -> Subspace:
        return self.U2.get((r, s), Subspace.zero(1 << self.model.dim))

    def delta_plus_bar_vec(self, v: Vec) -> Vec:
        w = form_of_vec(self.model.dim, v)
        comps, _resid = delta_components(self, w)
        return dict(comps["delbar+"].coeffs)


def gk_validate(s1: GCStruct, s2: GCStruct) -> GKPair:
    if s1.model is not s2.model and s1.model.structure != s2.model.structure:
        raise NotCommuting("structures live on different models")
    J1, J2 = s1.J, s2.J
    if mat_mul(J1, J2) != mat_mul(J2, J1):
        raise NotCommuting("J1 J2 != J2 J1")
    n4 = len(J1)
    G = [[-x for x in row] for row in mat_mul(J1, J2)]
    P = pairing_gram(s1.model.dim)
    GT = [list(col) for col in zip(*G)]
    S = mat_mul(GT, P)
    for i in range(n4):
        for j in range(n4):
            if S[i][j] != S[j][i]:
                raise MetricNotPositive("<G.,.> is not symmetric")
    # exact Sylvester criterion
    for k in range(1, n4 + 1):
        minor = [[S[i][j] for j in range(k)] for i in range(k)]
        from .linalg import mat_det
        d = mat_det(minor)
        if not d.is_real() or d.re <= 0:
            raise MetricNotPositive(
                f"leading principal minor {k} is {d}", order=k)
    dim = s1.model.dim
    L1 = Subspace.span(2 * dim, [b.to_coords() for b in s1.L.basis])
    L2 = Subspace.span(2 * dim, [b.to_coords() for b in s2.L.basis])
    L2c = L2.conj()
    plus = L1.intersect(L2)
    minus = L1.intersect(L2c)
    if plus.dim + minus.dim != dim:
        raise MetricNotPositive(
            f"eigenbundle split has dims {plus.dim}+{minus.dim} != {dim}")
    try:
        Lp = algebroid_from_basis(
            s1.model, [GenElem.from_coords(dim, v) for v in plus.basis()],
            name="L1+")
        Lm = algebroid_from_basis(
            s1.model, [GenElem.from_coords(dim, v) for v in minus.basis()],
            name="L1-")
    except (NotClosedUnderBracket, NotIsotropic) as e:
        raise SplitNotIntegrable(str(e), **e.details) from e
    return GKPair(s1, s2, G, Lp, Lm)


# -- bigrading --------------------------------------------------------------------

@dataclass
class BigradingReport:
    dims: dict[tuple[int, int], int]
    total_ok: bool
    parity_ok: bool
    commute_ok: bool
    hodge_dims_ok: bool

    def lines(self):
        row = ", ".join(f"U_({r},{s})={d}" for (r, s), d in sorted(self.dims.items()))
        return [f"bigrading dims: {row}",
                f"sum = 2^dim: {'yes' if self.total_ok else 'NO'}; "
                f"r+s parity: {'ok' if self.parity_ok else 'VIOLATED'}; "
                f"projectors commute: {'yes' if self.commute_ok else 'NO'}; "
                f"binomial dims: {'ok' if self.hodge_dims_ok else 'NO'}"]


def bigrading(pair: GKPair) -> BigradingReport:
    dims = dict(pair.U2_dims)
    total = sum(dims.values())
    n = pair.n
    dim = pair.model.dim
    parity_ok = all((r + s - n) % 2 == 0 for r, s in dims)
    hodge_ok = True
    for (r, s), d in dims.items():
        p = (r + s + n) // 2
        q = (r - s + n) // 2
        if not (0 <= p <= n and 0 <= q <= n) or d != comb(n, p) * comb(n, q):
            hodge_ok = False
    # commutation: decompose in the other order and compare
    commute_ok = True
    for mask in range(1 << dim):
        other: dict[tuple[int, int], Vec] = {}
        for s, p2 in pair.s2._blade_parts[mask].items():
            for r, p1 in pair.s1._decompose_vec(p2).items():
                if p1:
                    other[(r, s)] = vec_axpy(other.get((r, s), {}), ONE, p1)
        mine = pair._blade_parts[mask]
        if {k: v for k, v in other.items() if v} != {k: v for k, v in mine.items() if v}:
            commute_ok = False
    return BigradingReport(dims, total == 1 << dim, parity_ok, commute_ok,
                           hodge_ok)


# -- the four components of d_H ------------------------------------------------------

BIDEGREES = {"delta+": (-1, -1), "delta-": (-1, 1),
             "delbar+": (1, 1), "delbar-": (1, -1)}


def delta_components(pair: GKPair, w: Form):
    """Projections of d_H w onto the four Kaehler bidegrees plus the residual
    (which vanishes exactly for a valid pair)."""
    dim = pair.model.dim
    comps = {name: Form(dim) for name in BIDEGREES}
    resid = Form(dim)
    for (r, s), part in pair.decompose2(w).items():
        dw = pair.model.d_H(part)
        for (r2, s2), piece in pair.decompose2(dw).items():
            delta = (r2 - r, s2 - s)
            for name, bid in BIDEGREES.items():
                if delta == bid:
                    comps[name] = comps[name] + piece
                    break
            else:
                resid = resid + piece
    return comps, resid


@dataclass
class DeltaReport:
    residual_ok: bool
    matches_delbar1: bool
    matches_delbar2: bool
    anticommute_ok: bool        # the nine bidegree components of d_H^2 = 0
    strong_anticommute: bool    # every pair anticommutes individually

    def lines(self):
        return [f"d_H splits into the four bidegrees: "
                f"{'yes' if self.residual_ok else 'NO'}",
                f"delbar_1 = delbar+ + delbar-: "
                f"{'yes' if self.matches_delbar1 else 'NO'}",
                f"delbar_2 = delbar+ + delta-: "
                f"{'yes' if self.matches_delbar2 else 'NO'}",
                f"bidegree components of d_H^2 = 0 vanish: "
                f"{'yes' if self.anticommute_ok else 'NO'}",
                f"all pairs anticommute individually: "
                f"{'yes' if self.strong_anticommute else 'no (only forced sums)'}"]


def delta_split_check(pair: GKPair, samples: int = 12, seed: int = 5) -> DeltaReport:
    """Verify the four-component split and the bidegree expansion of
    d_H^2 = 0.  The (0,0) component forces only the SUM
    {delta+, delbar+} + {delta-, delbar-} = 0; individual vanishing of those
    two diagonal pairs is an analytic Kaehler identity, reported separately."""
    dim = pair.model.dim
    rng = random.Random(seed)
    residual_ok = True
    m1 = m2 = True
    for mask in range(1 << dim):
        w = Form(dim, {mask: ONE})
        comps, resid = delta_components(pair, w)
        if not resid.is_zero():
            residual_ok = False
        if comps["delbar+"] + comps["delbar-"] != pair.s1.delbar(w):
            m1 = False
        if comps["delbar+"] + comps["delta-"] != pair.s2.delbar(w):
            m2 = False
    anti_ok = True
    strong_ok = True
    names = list(BIDEGREES)
    forced_pairs = [("delta+", "delta-"), ("delta+", "delbar-"),
                    ("delta-", "delbar+"), ("delbar+", "delbar-")]

    def anticomm(a, b, w):
        fb = delta_components(pair, w)[0]
        return delta_components(pair, fb[b])[0][a] \
            + delta_components(pair, fb[a])[0][b]

    for _ in range(samples):
        w = Form(dim, {rng.randrange(1 << dim): QI(rng.randrange(-2, 3), 1)})
        comps = delta_components(pair, w)[0]
        for nm in names:  # squares vanish
            if not delta_components(pair, comps[nm])[0][nm].is_zero():
                anti_ok = False
        for a, b in forced_pairs:
            if not anticomm(a, b, w).is_zero():
                anti_ok = False
        diag_sum = anticomm("delta+", "delbar+", w) \
            + anticomm("delta-", "delbar-", w)
        if not diag_sum.is_zero():
            anti_ok = False
        if not anticomm("delta+", "delbar+", w).is_zero():
            strong_ok = False
    return DeltaReport(residual_ok, m1, m2, anti_ok, strong_ok)


# -- bigraded cohomology ----------------------------------------------------------------

@dataclass
class BigradedCohomologyReport:
    dims: dict[tuple[int, int], int]
    total_matches_twisted: bool
    blocks_decompose: bool
    intersection_ok: bool
    marginals_ok: bool

    def lines(self):
        row = ", ".join(f"H^({r},{s})={d}"
                        for (r, s), d in sorted(self.dims.items()) if d)
        return [f"bigraded cohomology: {row}",
                f"sum equals twisted total: "
                f"{'yes' if self.total_matches_twisted else 'NO'}",
                f"H^(r,s) = H^r_1 cap H^s_2 as subspaces: "
                f"{'yes' if self.intersection_ok else 'NO'}",
                f"marginal sums reproduce both decompositions: "
                f"{'yes' if self.marginals_ok else 'NO'}"]


def bigraded_cohomology(pair: GKPair) -> BigradedCohomologyReport:
    m = pair.model
    N = 1 << m.dim
    n = pair.n
    zero = Subspace.zero(N)
    dims = {}
    for (r, s) in pair.U2_dims:
        cyc = _preimage_in(pair.U2_subspace(r, s), pair.delta_plus_bar_vec, zero)
        lower = pair.U2_subspace(r - 1, s - 1)
        bounds = [pair.delta_plus_bar_vec(v) for v in lower.basis()]
        bounds = [b for b in bounds if b]
        dims[(r, s)] = QuotientSpace(N, cyc.basis(), bounds).dim
    tw = TwistedCohomology(m)
    total_ok = sum(dims.values()) == tw.total_dim

    # blocks inside twisted cohomology
    def block_coords(space: Subspace) -> Subspace:
        cyc = _preimage_in(space, pair.s1.dH_vec, zero)
        vecs = []
        for v in cyc.basis():
            c = tw.coords(form_of_vec(m.dim, v))
            vecs.append(c if c is not None else {})
        return Subspace.span(tw.total_dim, vecs)

    blocks = {rs: block_coords(pair.U2_subspace(*rs)) for rs in pair.U2_dims}
    b1 = {k: block_coords(pair.s1.U_subspace(k)) for k in range(-n, n + 1)}
    b2 = {k: block_coords(pair.s2.U_subspace(k)) for k in range(-n, n + 1)}
    inter_ok = all(blocks[(r, s)] == b1[r].intersect(b2[s])
                   for (r, s) in blocks)
    decomp_ok = True
    acc = Subspace.zero(tw.total_dim)
    for rs, b in blocks.items():
        if acc.intersect(b).dim:
            decomp_ok = False
        acc = acc.sum(b)
    decomp_ok = decomp_ok and acc.dim == tw.total_dim
    marg_ok = True
    for k in range(-n, n + 1):
        acc1 = Subspace.zero(tw.total_dim)
        acc2 = Subspace.zero(tw.total_dim)
        for (r, s), b in blocks.items():
            if r == k:
                acc1 = acc1.sum(b)
            if s == k:
                acc2 = acc2.sum(b)
        if acc1 != b1[k] or acc2 != b2[k]:
            marg_ok = False
    # block dims agree with the delbar+ cohomology dims
    dims_ok = all(blocks[rs].dim == d for rs, d in dims.items())
    return BigradedCohomologyReport(dims, total_ok and dims_ok, decomp_ok,
                                    inter_ok, marg_ok)


# -- Lie algebroid decompositions ----------------------------------------------------------

def _table_differential(rank: int, table, c: dict[int, QI]) -> dict[int, QI]:
    """Cartan formula with a custom bracket table (lists over the basis)."""
    out: dict[int, QI] = {}
    degs = {popcount(mask) + 1 for mask in c}
    for target_deg in degs:
        for mask in range(1 << rank):
            if popcount(mask) != target_deg:
                continue
            idxs = _mask_indices(mask)
            val = QI(0)
            for p in range(len(idxs)):
                for q in range(p + 1, len(idxs)):
                    rest = mask & ~(1 << idxs[p]) & ~(1 << idxs[q])
                    br = table[idxs[p]][idxs[q]]
                    sgn_pq = -1 if (p + q) & 1 else 1
                    for mth, coeff in enumerate(br):
                        if not coeff:
                            continue
                        bit = 1 << mth
                        if rest & bit:
                            continue
                        cm = c.get(rest | bit)
                        if not cm:
                            continue
                        ins = popcount(rest & (bit - 1))
                        sgn = sgn_pq * (-1 if ins & 1 else 1)
                        term = coeff * cm
                        val = val + (term if sgn > 0 else -term)
            if val:
                out[mask] = val
    return out


@dataclass
class SplitCheckReport:
    sum_ok: bool
    squares_ok: bool
    anticommute_ok: bool

    @property
    def ok(self) -> bool:
        return self.sum_ok and self.squares_ok and self.anticommute_ok

    def lines(self):
        return [f"d_A = d_A1 + d_A2: {'holds' if self.sum_ok else 'FAILS'}",
                f"d_A1^2 = d_A2^2 = 0: {'holds' if self.squares_ok else 'FAILS'}",
                f"d_A1 d_A2 + d_A2 d_A1 = 0: "
                f"{'holds' if self.anticommute_ok else 'FAILS'}"]


def algebroid_split_check(L: LieAlgebroid, A1: LieAlgebroid, A2: LieAlgebroid,
                          samples: int = 16, seed: int = 7) -> SplitCheckReport:
    """Verify the bigraded differential identities for a decomposition
    A = A1 + A2 of the algebroid L (same ambient span required)."""
    dim = L.ambient.dim
    span_L = Subspace.span(2 * dim, [b.to_coords() for b in L.basis])
    span_12 = Subspace.span(2 * dim, [b.to_coords()
                                      for b in A1.basis + A2.basis])
    if span_L != span_12 or A1.rank + A2.rank != L.rank:
        raise NotADecomposition("A1 + A2 does not decompose L")
    try:
        combined = algebroid_from_basis(L.ambient, A1.basis + A2.basis,
                                        name=f"{A1.name}+{A2.name}")
    except (NotClosedUnderBracket, NotIsotropic) as e:
        raise NotADecomposition(str(e)) from e
    r1 = A1.rank
    rank = combined.rank
    full = combined.bracket_table
    # check the sub-brackets stay in their own factors
    for i in range(rank):
        for j in range(rank):
            both1 = i < r1 and j < r1
            both2 = i >= r1 and j >= r1
            if both1 and any(full[i][j][r1:]):
                raise NotADecomposition("[A1, A1] leaks into A2")
            if both2 and any(full[i][j][:r1]):
                raise NotADecomposition("[A2, A2] leaks into A1")
    t1 = [[None] * rank for _ in range(rank)]
    t2 = [[None] * rank for _ in range(rank)]
    zero_row = [QI(0)] * rank
    for i in range(rank):
        for j in range(rank):
            br = full[i][j]
            both1 = i < r1 and j < r1
            both2 = i >= r1 and j >= r1
            if both1:
                t1[i][j] = list(br)
                t2[i][j] = list(zero_row)
            elif both2:
                t1[i][j] = list(zero_row)
                t2[i][j] = list(br)
            else:
                t1[i][j] = [QI(0)] * r1 + list(br[r1:])
                t2[i][j] = list(br[:r1]) + [QI(0)] * (rank - r1)
    rng = random.Random(seed)
    sum_ok = squares_ok = anti_ok = True
    for _ in range(samples):
        mask = rng.randrange(1, 1 << rank)
        c = {mask: QI(rng.randrange(-2, 3), rng.randrange(-1, 2))}
        if not c[mask]:
            c = {mask: ONE}
        d_full = combined.differential(c)
        d1 = _table_differential(rank, t1, c)
        d2 = _table_differential(rank, t2, c)
        if d_full != _add_cochains(d1, d2):
            sum_ok = False
        if _table_differential(rank, t1, d1) or _table_differential(rank, t2, d2):
            squares_ok = False
        anti = _add_cochains(_table_differential(rank, t1, d2),
                             _table_differential(rank, t2, d1))
        if anti:
            anti_ok = False
    return SplitCheckReport(sum_ok, squares_ok, anti_ok)


def _add_cochains(a: dict[int, QI], b: dict[int, QI]) -> dict[int, QI]:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k)
        t = v if w is None else w + v
        if t:
            out[k] = t
        elif w is not None:
            del out[k]
    return out


# -- deformation compatibility ----------------------------------------------------------------

@dataclass
class GKDeformationReport:
    samples_gk: dict[tuple, bool]
    plus_ok: bool
    minus_ok: bool
    plus_residual: Vec
    minus_residual: Vec

    @property
    def compatible(self) -> bool:
        return self.plus_ok and self.minus_ok

    def lines(self):
        return [f"pi_1+(rho_1) = pi_2+(rho_2): "
                f"{'holds' if self.plus_ok else 'FAILS'}",
                f"pi_1-(rho_1) = conj(pi_2-)(rho_2): "
                f"{'holds' if self.minus_ok else 'FAILS'}"]


def _restrict_cochain(src: LieAlgebroid, cochain: dict[int, QI],
                      sub_basis) -> dict[int, QI]:
    out: dict[int, QI] = {}
    r = len(sub_basis)
    for a in range(r):
        for b in range(a + 1, r):
            v = src.cochain_eval(cochain, [sub_basis[a], sub_basis[b]])
            if v:
                out[(1 << a) | (1 << b)] = v
    return out


def gk_deformation_check(f1: FamilySpec, f2: FamilySpec,
                         direction: int = 0) -> GKDeformationReport:
    """Prop-style compatibility of the two Kodaira-Spencer classes of a
    deformation of a generalized Kaehler pair."""
    s1 = f1.base_structure()
    s2 = f2.base_structure()
    pair = gk_validate(s1, s2)
    samples_gk = {}
    for pt in sorted({*f1.samples, *f2.samples}, key=str):
        try:
            gk_validate(f1.structure_at(pt), f2.structure_at(pt))
            samples_gk[pt] = True
        except Exception:
            samples_gk[pt] = False
    k1 = ks_class(f1, direction)
    k2 = ks_class(f2, direction)
    plus_basis = pair.Lp.basis
    minus_basis = pair.Lm.basis
    c1p = _restrict_cochain(s1.L, k1.cochain, plus_basis)
    c2p = _restrict_cochain(s2.L, k2.cochain, plus_basis)
    h2p = pair.Lp.cohomology(2)
    plus_resid = _add_cochains(c1p, {k: -v for k, v in c2p.items()})
    pr = h2p.coords(plus_resid)
    plus_ok = pr is not None and not pr
    c1m = _restrict_cochain(s1.L, k1.cochain, minus_basis)
    conj_minus = [b.conj() for b in minus_basis]
    c2m_conj = _restrict_cochain(s2.L, k2.cochain, conj_minus)
    c2m = {k: v.conj() for k, v in c2m_conj.items()}
    h2m = pair.Lm.cohomology(2)
    minus_resid = _add_cochains(c1m, {k: -v for k, v in c2m.items()})
    mr = h2m.coords(minus_resid)
    minus_ok = mr is not None and not mr
    return GKDeformationReport(samples_gk, plus_ok, minus_ok,
                               pr or {}, mr or {})
