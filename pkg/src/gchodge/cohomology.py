"""Exact cohomology engines on the invariant spinor space: twisted and delbar
cohomology, the generalized Froelicher spectral sequence, the del-delbar lemma,
Hodge filtrations, the Mukai pairing on cohomology, strong Lefschetz, and the
complex-type mixed Hodge structure.

Everything is rank arithmetic over Q(i); there is no harmonic theory anywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .courant import random_real_form
from .errors import WrongType
from .forms import Form, mukai_pairing, popcount
from .gcs import GCStruct, form_of_vec, spin_apply, spin_op
from .liemodel import LieModel
from .linalg import (Echelon, QuotientSpace, Subspace, Vec, mat_det,
                     matrix_kernel, vec_axpy)
from .scalars import ONE, QI


# -- twisted cohomology --------------------------------------------------------

class TwistedCohomology:
    """Z2-graded cohomology of d_H on the 2^{2n}-dimensional spinor space,
    with canonical representatives and exact class coordinates."""

    def __init__(self, m: LieModel):
        self.model = m
        dim = m.dim
        N = 1 << dim
        self._N = N
        dH = spin_op(dim, m.d_H)
        evens = [b for b in range(N) if popcount(b) % 2 == 0]
        odds = [b for b in range(N) if popcount(b) % 2 == 1]
        self.even = self._quotient(dH, evens, odds)
        self.odd = self._quotient(dH, odds, evens)
        self.dim_even = self.even.dim
        self.dim_odd = self.odd.dim
        self.total_dim = self.dim_even + self.dim_odd

    def _quotient(self, dH, blades, other) -> QuotientSpace:
        cols = [spin_apply(dH, {b: ONE}) for b in blades]
        cycles = []
        for combo in matrix_kernel(cols):
            v: Vec = {}
            for j, c in combo.items():
                v = vec_axpy(v, c, {blades[j]: ONE})
            cycles.append(v)
        bounds = [w for w in (spin_apply(dH, {b: ONE}) for b in other) if w]
        return QuotientSpace(self._N, cycles, bounds)

    def parity_coords(self, w: Form, parity: int) -> Vec | None:
        q = self.even if parity == 0 else self.odd
        return q.coords(dict(w.coeffs))

    def coords(self, w: Form) -> Vec | None:
        """Total coordinates: even block first, odd block shifted."""
        ce = self.even.coords(dict(w.parity_part(0).coeffs))
        co = self.odd.coords(dict(w.parity_part(1).coeffs))
        if ce is None or co is None:
            return None
        out = dict(ce)
        for k, v in co.items():
            out[self.dim_even + k] = v
        return out

    def rep_form(self, coords: Vec, parity: int | None = None) -> Form:
        """A representative of the class with the given coordinates."""
        out: Vec = {}
        for idx, c in coords.items():
            if parity is None:
                rep = (self.even.reps[idx] if idx < self.dim_even
                       else self.odd.reps[idx - self.dim_even])
            else:
                rep = (self.even if parity == 0 else self.odd).reps[idx]
            out = vec_axpy(out, c, rep)
        return form_of_vec(self.model.dim, out)

    def conj_coords(self, coords: Vec, parity: int | None = None) -> Vec:
        return (self.coords(self.rep_form(coords).conj()) if parity is None
                else self.parity_coords(self.rep_form(coords, parity).conj(), parity))


def twisted_cohomology(m: LieModel) -> TwistedCohomology:
    m.require_valid()
    return TwistedCohomology(m)


# -- delbar cohomology -----------------------------------------------------------

def _preimage_in(V: Subspace, op, W: Subspace) -> Subspace:
    """{v in V : op(v) in W} computed by exact kernel arithmetic."""
    basis = V.basis()
    ech = Echelon()
    for w in W.basis():
        ech.insert(w)
    residuals = [ech.reduce(op(v))[0] for v in basis]
    out = []
    for combo in matrix_kernel(residuals):
        v: Vec = {}
        for j, c in combo.items():
            v = vec_axpy(v, c, basis[j])
        out.append(v)
    return Subspace.span(V.ambient, out)


def _image_of(V: Subspace, op) -> Subspace:
    return Subspace.span(V.ambient, [op(v) for v in V.basis()])


def delbar_cohomology(s: GCStruct) -> dict[int, QuotientSpace]:
    """H^k_delbar for k = -n..n, as quotients inside the spinor space."""
    n = s.n
    N = 1 << s.model.dim
    zero = Subspace.zero(N)
    out = {}
    for k in range(-n, n + 1):
        cycles = _preimage_in(s.U_subspace(k), s.delbar_vec, zero).basis()
        bounds = [w for w in (s.delbar_vec(v) for v in s.U_subspace(k - 1).basis()) if w]
        out[k] = QuotientSpace(N, cycles, bounds)
    return out


def delbar_dims(s: GCStruct) -> dict[int, int]:
    return {k: q.dim for k, q in delbar_cohomology(s).items()}


# -- generalized Froelicher spectral sequence --------------------------------------

@dataclass
class FrolicherReport:
    pages: dict[int, dict[int, int]]       # r -> {k: dim E_r^k}
    degenerates: bool
    delbar_total: int
    twisted_total: int

    def lines(self):
        out = []
        for r in sorted(self.pages):
            row = ", ".join(f"E^{k}={d}" for k, d in sorted(self.pages[r].items()))
            out.append(f"page E_{r}: {row}")
        out.append(f"degenerates at E_1: {'yes' if self.degenerates else 'NO'}"
                   f" (delbar total {self.delbar_total},"
                   f" twisted total {self.twisted_total})")
        return out


def frolicher_pages(s: GCStruct) -> FrolicherReport:
    """Pages of the bigraded complex W^{p,q} = U_{p-q}, folded along the
    2-periodicity in (p,q); E_1^k = H^k_delbar, differentials shift k by 1-2r."""
    n = s.n
    N = 1 << s.model.dim
    zero = Subspace.zero(N)

    def usum(ks) -> Subspace:
        out = Subspace.zero(N)
        for k in ks:
            if -n <= k <= n:
                out = out.sum(s.U_subspace(k))
        return out

    _fcache: dict[tuple[int, int], Subspace] = {}
    _zcache: dict[tuple[int, int, int], Subspace] = {}

    def flevel(j: int, m: int) -> Subspace:
        # F^j on the total degree m: U_k with k <= m-2j, k = m mod 2
        key = (m - 2 * j, m & 1)
        if key not in _fcache:
            _fcache[key] = usum(range(-n + ((m - n) % 2), m - 2 * j + 1, 2))
        return _fcache[key]

    def zspace(r: int, j: int, m: int) -> Subspace:
        key = (r, m - 2 * j, m & 1)
        if key not in _zcache:
            _zcache[key] = _preimage_in(flevel(j, m), s.dH_vec, flevel(j + r, m + 1))
        return _zcache[key]

    pages: dict[int, dict[int, int]] = {}
    rmax = n + 1
    for r in range(1, rmax + 1):
        page = {}
        for k in range(-n, n + 1):
            m = k & 1
            j = (m - k) // 2
            Z = zspace(r, j, m)
            denom = zspace(r - 1, j + 1, m).sum(
                _image_of(zspace(r - 1, j - r + 1, m - 1), s.dH_vec))
            page[k] = Z.dim - Z.intersect(denom).dim
        pages[r] = page
    tw = TwistedCohomology(s.model)
    dtot = sum(delbar_dims(s).values())
    degenerates = pages[1] == pages[rmax]
    return FrolicherReport(pages, degenerates, dtot, tw.total_dim)


# -- del-delbar lemma ---------------------------------------------------------------

@dataclass
class DdbarReport:
    holds: bool
    im_del_cap_ker_delbar: int
    im_delbar_cap_ker_del: int
    im_deldelbar: int
    witness: Form | None

    def lines(self):
        if self.holds:
            return ["del-delbar lemma: holds"]
        return [f"del-delbar lemma: FAILS "
                f"(dims {self.im_del_cap_ker_delbar}/"
                f"{self.im_delbar_cap_ker_del}/{self.im_deldelbar})",
                f"witness: {self.witness!r}"]


def ddbar_check(s: GCStruct) -> DdbarReport:
    """Im(del) cap Ker(delbar) = Im(delbar) cap Ker(del) = Im(del delbar)."""
    N = 1 << s.model.dim
    full = Subspace.full(N)
    zero = Subspace.zero(N)
    ker_del = _preimage_in(full, s.partial_vec, zero)
    ker_dbar = _preimage_in(full, s.delbar_vec, zero)
    im_del = _image_of(full, s.partial_vec)
    im_dbar = _image_of(full, s.delbar_vec)
    im_dd = _image_of(full, lambda v: s.partial_vec(s.delbar_vec(v)))
    A = im_del.intersect(ker_dbar)
    B = im_dbar.intersect(ker_del)
    holds = A == B == im_dd
    witness = None
    if not holds:
        for big in (A, B):
            for v in big.basis():
                if not im_dd.contains(v):
                    witness = form_of_vec(s.model.dim, v)
                    break
            if witness:
                break
    return DdbarReport(holds, A.dim, B.dim, im_dd.dim, witness)


# -- Hodge filtration -----------------------------------------------------------------

@dataclass
class HodgeReport:
    twisted_dims: tuple[int, int]
    delbar_dims: dict[int, int]
    frolicher_degenerates: bool
    ddbar_holds: bool
    filtration: dict[int, Subspace]
    filtration_dims: dict[int, int]
    hodge_ok: bool
    hodge_by_p: dict[int, bool]
    graded_match: dict[int, bool] | None   # dim F^p - dim F^{p-2} == h^p_delbar

    def lines(self):
        ev, od = self.twisted_dims
        out = [f"twisted dims: even {ev}, odd {od}",
               "delbar dims: " + ", ".join(
                   f"h^{k}={d}" for k, d in sorted(self.delbar_dims.items())),
               f"frolicher degenerates: {'yes' if self.frolicher_degenerates else 'NO'}",
               f"ddbar: {'holds' if self.ddbar_holds else 'FAILS'}",
               "filtration dims: " + ", ".join(
                   f"F^{p}={d}" for p, d in sorted(self.filtration_dims.items())),
               f"hodge filtration condition: {'holds' if self.hodge_ok else 'FAILS'}"]
        if self.graded_match is not None:
            ok = all(self.graded_match.values())
            out.append(f"graded pieces match delbar dims: {'yes' if ok else 'NO'}")
        return out


def filtration_subspace(s: GCStruct, tw: TwistedCohomology, p: int) -> Subspace:
    """F^p H: classes representable in the U_{<=p} chain of matching parity."""
    n = s.n
    N = 1 << s.model.dim
    sigma = Subspace.zero(N)
    for j in range(-n + ((p + n) % 2), p + 1, 2):
        sigma = sigma.sum(s.U_subspace(j))
    cycles = _preimage_in(sigma, s.dH_vec, Subspace.zero(N))
    parity = (p + n + s.parity) % 2
    h_dim = tw.dim_even if parity == 0 else tw.dim_odd
    coords = []
    for v in cycles.basis():
        c = tw.parity_coords(form_of_vec(s.model.dim, v), parity)
        coords.append(c if c is not None else {})
    return Subspace.span(h_dim, coords)


def hodge_filtration(s: GCStruct, precomputed=None) -> HodgeReport:
    n = s.n
    tw = TwistedCohomology(s.model)
    dd = precomputed if precomputed is not None else ddbar_check(s)
    frl = frolicher_pages(s)
    db = delbar_dims(s)
    filt = {p: filtration_subspace(s, tw, p) for p in range(-n, n + 1)}
    hodge_by_p = {}
    for p in range(-n, n + 1):
        parity = (p + n + s.parity) % 2
        h_dim = tw.dim_even if parity == 0 else tw.dim_odd
        fp = filt[p]
        q = -p - 2
        fq = filt[q] if q in filt else Subspace.zero(h_dim)
        fq_conj = Subspace.span(h_dim, [
            tw.conj_coords(v, parity) for v in fq.basis()])
        hodge_by_p[p] = (fp.dim + fq_conj.dim == h_dim
                         and fp.intersect(fq_conj).dim == 0)
    # nesting and top equalities are structural; verify and fold into hodge_ok
    nesting = all(filt[p].contains_subspace(filt[p - 2])
                  for p in range(-n + 2, n + 1))
    top_even = filt[n].dim == (tw.dim_even if (2 * n + s.parity) % 2 == 0
                               else tw.dim_odd)
    top_odd = filt[n - 1].dim == (tw.dim_even if (2 * n - 1 + s.parity) % 2 == 0
                                  else tw.dim_odd)
    hodge_ok = all(hodge_by_p.values()) and nesting and top_even and top_odd
    graded = None
    if dd.holds:
        graded = {}
        for p in range(-n, n + 1):
            lower = filt[p - 2].dim if p - 2 >= -n else 0
            graded[p] = (filt[p].dim - lower) == db.get(p, 0)
    return HodgeReport(
        twisted_dims=(tw.dim_even, tw.dim_odd),
        delbar_dims=db,
        frolicher_degenerates=frl.degenerates,
        ddbar_holds=dd.holds,
        filtration=filt,
        filtration_dims={p: f.dim for p, f in filt.items()},
        hodge_ok=hodge_ok,
        hodge_by_p=hodge_by_p,
        graded_match=graded,
    )


# -- Mukai pairing on cohomology --------------------------------------------------------

@dataclass
class MukaiQReport:
    matrix: list[list[QI]]
    descends: bool
    nondegenerate: bool
    block_orthogonal: bool | None
    measured_dh_sign: int | None

    def lines(self):
        out = [f"Q descends to cohomology: {'yes' if self.descends else 'NO'}",
               f"Q nondegenerate: {'yes' if self.nondegenerate else 'NO'}"]
        if self.block_orthogonal is not None:
            out.append("Q pairs H^j with H^-j only: "
                       f"{'yes' if self.block_orthogonal else 'NO'}")
        if self.measured_dh_sign is not None:
            out.append("measured sign in (d_H w, g) = s (w, d_H g): "
                       f"s = {self.measured_dh_sign:+d}")
        return out


def mukai_Q(s: GCStruct, samples: int = 20, seed: int = 11) -> MukaiQReport:
    m = s.model
    tw = TwistedCohomology(m)
    reps = ([form_of_vec(m.dim, r) for r in tw.even.reps]
            + [form_of_vec(m.dim, r) for r in tw.odd.reps])
    Q = [[mukai_pairing(a, b) for b in reps] for a in reps]
    rng = random.Random(seed)
    descends = True
    for _ in range(samples):
        pert = m.d_H(random_real_form(m.dim, rng.randrange(m.dim + 1), rng))
        a = rng.randrange(len(reps)) if reps else 0
        b = rng.randrange(len(reps)) if reps else 0
        if reps and mukai_pairing(reps[a] + pert, reps[b]) != Q[a][b]:
            descends = False
            break
        if reps and mukai_pairing(reps[a], reps[b] + pert) != Q[a][b]:
            descends = False
            break
    nondeg = bool(mat_det(Q)) if reps else True

    # the grading blocks pair only across opposite degrees
    n = s.n
    N = 1 << m.dim
    zero = Subspace.zero(N)
    blocks = {}
    for k in range(-n, n + 1):
        blocks[k] = _preimage_in(s.U_subspace(k), s.dH_vec, zero)
    orth = True
    for j in range(-n, n + 1):
        for k in range(-n, n + 1):
            if j + k == 0:
                continue
            for a in blocks[j].basis():
                for b in blocks[k].basis():
                    if mukai_pairing(form_of_vec(m.dim, a), form_of_vec(m.dim, b)):
                        orth = False

    # measured sign in the integration-by-parts identity
    sign = None
    for cand in (1, -1):
        ok = True
        for _ in range(samples):
            w = random_real_form(m.dim, rng.randrange(m.dim + 1), rng)
            g = random_real_form(m.dim, rng.randrange(m.dim + 1), rng)
            lhs = mukai_pairing(m.d_H(w), g)
            rhs = mukai_pairing(w, m.d_H(g))
            if lhs != (rhs if cand == 1 else -rhs):
                ok = False
                break
        if ok:
            sign = cand
            break
    return MukaiQReport(Q, descends, nondeg, orth, sign)


# -- strong Lefschetz ----------------------------------------------------------------------

def invariant_derham(m: LieModel, k: int) -> QuotientSpace:
    """Untwisted invariant de Rham cohomology in degree k."""
    N = 1 << m.dim
    dform = spin_op(m.dim, m.d)
    blades_k = [b for b in range(N) if popcount(b) == k]
    cols = [spin_apply(dform, {b: ONE}) for b in blades_k]
    cycles = []
    for combo in matrix_kernel(cols):
        v: Vec = {}
        for j, c in combo.items():
            v = vec_axpy(v, c, {blades_k[j]: ONE})
        cycles.append(v)
    bounds = []
    if k:
        for b in range(N):
            if popcount(b) == k - 1:
                w = spin_apply(dform, {b: ONE})
                if w:
                    bounds.append(w)
    return QuotientSpace(N, cycles, bounds)


@dataclass
class LefschetzReport:
    verdicts: dict[int, bool]
    kernel_witness: Form | None

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def lines(self):
        out = [f"omega^(n-{k}): H^{k} -> H^(2n-{k}) "
               f"{'iso' if ok else 'NOT iso'}"
               for k, ok in sorted(self.verdicts.items())]
        if self.kernel_witness is not None:
            out.append(f"lefschetz kernel witness: {self.kernel_witness!r}")
        return out


def lefschetz_check(s: GCStruct) -> LefschetzReport:
    if s.kind != "symplectic":
        raise WrongType("strong Lefschetz requires a symplectic-type structure")
    m = s.model
    n = s.n
    verdicts = {}
    witness = None
    for k in range(n + 1):
        hk = invariant_derham(m, k)
        h2nk = invariant_derham(m, 2 * n - k)
        power = Form.one(m.dim)
        for _ in range(n - k):
            power = power.wedge(s.omega)
        cols = []
        for r in hk.reps:
            img = power.wedge(form_of_vec(m.dim, r))
            cols.append(h2nk.coords(dict(img.coeffs)) or {})
        rank = Subspace.span(max(h2nk.dim, 1), cols).dim
        ok = rank == hk.dim == h2nk.dim
        verdicts[k] = ok
        if not ok and witness is None:
            for combo in matrix_kernel(cols):
                v: Vec = {}
                for j, c in combo.items():
                    v = vec_axpy(v, c, hk.reps[j])
                witness = form_of_vec(m.dim, v)
                break
    return LefschetzReport(verdicts, witness)


# -- complex-type mixed Hodge structure ----------------------------------------------------

@dataclass
class MHSReport:
    skipped: str | None
    gr_dims: dict[int, int] | None
    split_ok: bool
    split_by_ij: dict[tuple[int, int], bool] | None
    graded_hodge_dims: dict[int, list[int]] | None

    def lines(self):
        if self.skipped:
            return [f"mixed Hodge structure: skipped ({self.skipped})"]
        out = ["Gr^j dims: " + ", ".join(
            f"{j}:{d}" for j, d in sorted(self.gr_dims.items())),
            f"MHS split condition: {'holds' if self.split_ok else 'FAILS'}"]
        return out


def weight_mhs_check(s: GCStruct) -> MHSReport:
    if s.kind != "complex":
        raise WrongType("weight filtration check requires a complex-type structure")
    dd = ddbar_check(s)
    if not dd.holds:
        return MHSReport("del-delbar lemma fails at this structure",
                         None, False, None, None)
    m = s.model
    n = s.n
    N = 1 << m.dim
    tw = TwistedCohomology(m)
    H_dim = tw.total_dim

    def total_coords_subspace(vecs) -> Subspace:
        out = []
        for v in vecs:
            c = tw.coords(form_of_vec(m.dim, v))
            out.append(c if c is not None else {})
        return Subspace.span(H_dim, out)

    # W^j: classes with representatives of form-degree >= j
    W: dict[int, Subspace] = {}
    for j in range(0, 2 * n + 2):
        span = Subspace.span(N, [{b: ONE} for b in range(N) if popcount(b) >= j])
        cyc = _preimage_in(span, s.dH_vec, Subspace.zero(N))
        W[j] = total_coords_subspace(cyc.basis())

    # wrapped filtration F~^k = F^k + F^{k-1} in total coordinates
    def embed(parity: int, sub: Subspace) -> Subspace:
        if parity == 0:
            return Subspace.span(H_dim, sub.basis())
        return Subspace.span(H_dim, [
            {kk + tw.dim_even: c for kk, c in v.items()} for v in sub.basis()])

    filt = {}
    for p in range(-n, n + 1):
        parity = (p + n + s.parity) % 2
        filt[p] = embed(parity, filtration_subspace(s, tw, p))

    def filt_ext(k: int) -> Subspace:
        # extend each parity chain by zero below and by its own top above
        if k < -n:
            return Subspace.zero(H_dim)
        if k > n:
            return filt[n] if (k - n) % 2 == 0 else filt[n - 1]
        return filt[k]

    Ft = {k: filt_ext(k).sum(filt_ext(k - 1)) for k in range(-n - 1, n + 3)}

    def conj_total(sub: Subspace) -> Subspace:
        return Subspace.span(H_dim, [tw.conj_coords(v) for v in sub.basis()])

    gr_dims = {}
    split_by = {}
    graded_hodge: dict[int, list[int]] = {}
    ok = True
    for j in range(0, 2 * n + 1):
        grq = QuotientSpace(H_dim, W[j].basis(), W[j + 1].basis())
        gr_dims[j] = grq.dim
        if grq.dim == 0:
            continue
        dims_along_i = []
        # within weight j the U-grading steps by 2, so the Hodge condition
        # lives at indices i of the same parity as j
        for i in range(-n - 1, n + 2):
            if (i - j) % 2:
                continue
            part = Ft.get(i, Subspace.zero(H_dim)).intersect(W[j])
            img = Subspace.span(grq.dim,
                                [grq.coords(v) or {} for v in part.basis()])
            conj_part = conj_total(Ft.get(-i - 2, Subspace.zero(H_dim))
                                   .intersect(W[j]))
            conj_img = Subspace.span(grq.dim,
                                     [grq.coords(v) or {} for v in conj_part.basis()])
            good = (img.dim + conj_img.dim == grq.dim
                    and img.intersect(conj_img).dim == 0)
            split_by[(i, j)] = good
            ok = ok and good
            dims_along_i.append(img.dim)
        graded_hodge[j] = dims_along_i
    return MHSReport(None, gr_dims, ok, split_by, graded_hodge)
