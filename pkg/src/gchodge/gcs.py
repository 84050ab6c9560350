"""Generalized complex structures on a model: constructors, eigenbundle,
pure spinors, the U_k grading via the spinorial action of J, del/delbar,
and the symplectic phi/delta machinery.

The grading operator is the image of J under so(E) = wedge^2 E inside the
Clifford algebra; U_k is its -ik eigenspace, realized exactly by Lagrange
interpolation over the forced spectrum {-in, ..., in}.
"""

from __future__ import annotations

from fractions import Fraction

from .courant import GenElem, algebroid_from_basis, clifford_act, pairing
from .errors import (BMismatch, DegenerateOmega, EngineError, NotAlmostComplex,
                     NotClosedUnderBracket, NotIntegrable, NotIsotropic,
                     NotOrthogonal, OmegaNotClosed, SpectrumViolation,
                     TwistWrongType, WrongType)
from .forms import Form, popcount
from .liemodel import LieAlgebroid, LieModel
from .linalg import (Matrix, Subspace, Vec, mat_inv, mat_mul, mat_vec,
                     matrix_kernel, vec_axpy, vec_scale)
from .scalars import I, ONE, QI

Half = QI(Fraction(1, 2))


# -- E_C matrix plumbing -------------------------------------------------------

def pairing_gram(dim: int) -> Matrix:
    n2 = 2 * dim
    P = [[QI(0)] * n2 for _ in range(n2)]
    for i in range(dim):
        P[i][dim + i] = Half
        P[dim + i][i] = Half
    return P


def apply_matrix(J: Matrix, a: GenElem) -> GenElem:
    coords = list(a.vec) + list(a.cov)
    out = mat_vec(J, coords)
    return GenElem(a.dim, out[:a.dim], out[a.dim:])


def gen_from_sparse(dim: int, v: Vec) -> GenElem:
    return GenElem.from_coords(dim, v)


# -- spinor-space operators -----------------------------------------------------

SpinOp = dict[int, Vec]  # column mask -> sparse image


def spin_op(dim: int, f) -> SpinOp:
    cols: SpinOp = {}
    for mask in range(1 << dim):
        w = f(Form(dim, {mask: ONE}))
        if w.coeffs:
            cols[mask] = dict(w.coeffs)
    return cols


def spin_apply(op: SpinOp, v: Vec) -> Vec:
    out: Vec = {}
    for j, c in v.items():
        col = op.get(j)
        if col:
            out = vec_axpy(out, c, col)
    return out


def form_of_vec(dim: int, v: Vec) -> Form:
    return Form(dim, dict(v))


class GCStruct:
    """Validated generalized complex structure with exact grading machinery."""

    def __init__(self, model: LieModel, J: Matrix, L: LieAlgebroid,
                 kind: str = "general"):
        self.model = model
        self.J = J
        self.L = L
        self.kind = kind
        self.n = model.dim // 2
        self.omega = None      # symplectic data
        self.B = None
        self.beta = None       # bivector coefficients {(i,j): QI}, i<j 0-based
        self.Imat = None       # complex-type data
        self._build_grading()
        self._extract_spinor()

    # -- grading -------------------------------------------------------------

    def _build_grading(self):
        dim, n = self.model.dim, self.n
        Jm = self.J
        duals = []
        for a in range(2 * dim):
            u = GenElem.from_coords(dim, {a: ONE})
            Ju = apply_matrix(Jm, u)
            if a < dim:
                v = GenElem.e(dim, a + 1, QI(2))
            else:
                v = GenElem.x(dim, a - dim + 1, QI(2))
            duals.append((Ju, v))
        trace = QI(0)
        for Ju, v in duals:
            trace = trace + pairing(Ju, v)

        quarter = QI(Fraction(1, 4))

        def act(w: Form) -> Form:
            out = Form(dim)
            for Ju, v in duals:
                out = out + clifford_act(Ju, clifford_act(v, w))
            return out.scale(quarter) - w.scale(trace * quarter)

        self.N = spin_op(dim, act)

        # minimal polynomial: prod_k (N + ik) = 0 over k = -n..n
        for mask in range(1 << dim):
            v: Vec = {mask: ONE}
            for k in range(-n, n + 1):
                v = vec_axpy(spin_apply(self.N, v), QI(0, k), v)
                if not v:
                    break
            if v:
                raise SpectrumViolation(
                    "spinorial operator violates the forced spectrum "
                    f"{{-i{n}..i{n}}} on blade {mask}", blade=mask)

        # Lagrange/Vandermonde coefficients for exact eigenprojections
        ks = list(range(-n, n + 1))
        V = [[QI(0, -k) ** m for k in ks] for m in range(len(ks))]
        self._vand_inv = mat_inv(V)
        self._ks = ks

        # decompose every basis blade once; record U bases and parity
        self._blade_parts: dict[int, dict[int, Vec]] = {}
        u_vecs: dict[int, list[Vec]] = {k: [] for k in ks}
        for mask in range(1 << dim):
            parts = self._decompose_vec({mask: ONE})
            self._blade_parts[mask] = parts
            total: Vec = {}
            for k, p in parts.items():
                total = vec_axpy(total, ONE, p)
                if p:
                    u_vecs[k].append(p)
            if total != {mask: ONE}:
                raise SpectrumViolation("eigenprojections do not resolve identity")
        self.U = {k: Subspace.span(1 << dim, u_vecs[k]) for k in ks}
        self.U_dims = {k: self.U[k].dim for k in ks}

        parity = None
        for k in ks:
            for v in self.U[k].basis():
                for mask in v:
                    p = (popcount(mask) - (k + n)) % 2
                    if parity is None:
                        parity = p
                    elif parity != p:
                        raise SpectrumViolation(
                            "inconsistent parity across the U grading")
        self.parity = parity if parity is not None else 0

        # pairing-normalized dual basis of L inside conj(L): <lam^a, l_b> = delta/2
        lbar = [b.conj() for b in self.L.basis]
        G = [[pairing(lb, l) for l in self.L.basis] for lb in lbar]
        Ginv = mat_inv(G)
        self.Lbar_basis = lbar
        self.dual_basis = []
        for a in range(len(lbar)):
            coeffs = [Ginv[a][g] * Half for g in range(len(lbar))]
            elem = GenElem(self.model.dim)
            for g, c in enumerate(coeffs):
                if c:
                    elem = elem + lbar[g].scale(c)
            self.dual_basis.append(elem)

    def _decompose_vec(self, v: Vec) -> dict[int, Vec]:
        powers = [v]
        for _ in range(2 * self.n):
            powers.append(spin_apply(self.N, powers[-1]))
        out: dict[int, Vec] = {}
        for idx, k in enumerate(self._ks):
            comp: Vec = {}
            for m, p in enumerate(powers):
                comp = vec_axpy(comp, self._vand_inv[idx][m], p)
            if comp:
                out[k] = comp
        return out

    # -- public grading API ----------------------------------------------------

    def decompose(self, w: Form) -> dict[int, Form]:
        parts: dict[int, Vec] = {}
        for mask, c in w.coeffs.items():
            for k, p in self._blade_parts[mask].items():
                parts[k] = vec_axpy(parts.get(k, {}), c, p)
        return {k: form_of_vec(w.dim, v) for k, v in parts.items() if v}

    def project(self, k: int, w: Form) -> Form:
        return self.decompose(w).get(k, Form(w.dim))

    def U_subspace(self, k: int) -> Subspace:
        return self.U.get(k, Subspace.zero(1 << self.model.dim))

    def d_H(self, w: Form) -> Form:
        return self.model.d_H(w)

    def del_delbar(self, w: Form):
        """Returns (del w, delbar w, residual): the U_{k-1} and U_{k+1}
        projections of d_H w summed over graded components, and whatever
        lands elsewhere (zero exactly when the structure is integrable)."""
        lower = Form(self.model.dim)
        upper = Form(self.model.dim)
        resid = Form(self.model.dim)
        for k, comp in self.decompose(w).items():
            dw = self.d_H(comp)
            for j, part in self.decompose(dw).items():
                if j == k - 1:
                    lower = lower + part
                elif j == k + 1:
                    upper = upper + part
                else:
                    resid = resid + part
        return lower, upper, resid

    def partial(self, w: Form) -> Form:
        return self.del_delbar(w)[0]

    def delbar(self, w: Form) -> Form:
        return self.del_delbar(w)[1]

    # vec-level operators for the cohomology engines
    def dH_vec(self, v: Vec) -> Vec:
        return dict(self.d_H(form_of_vec(self.model.dim, v)).coeffs)

    def delbar_vec(self, v: Vec) -> Vec:
        return dict(self.delbar(form_of_vec(self.model.dim, v)).coeffs)

    def partial_vec(self, v: Vec) -> Vec:
        return dict(self.partial(form_of_vec(self.model.dim, v)).coeffs)

    # -- spinor -----------------------------------------------------------------

    def _extract_spinor(self):
        dim = self.model.dim
        cur: list[Vec] = [{m: ONE} for m in range(1 << dim)]
        for l in self.L.basis:
            op = lambda f, l=l: clifford_act(l, f)
            cols = [dict(clifford_act(l, form_of_vec(dim, b)).coeffs) for b in cur]
            combos = matrix_kernel(cols)
            nxt = []
            for combo in combos:
                v: Vec = {}
                for j, c in combo.items():
                    v = vec_axpy(v, c, cur[j])
                nxt.append(v)
            cur = nxt
            if not cur:
                break
        self.canonical_dim = len(cur)
        if len(cur) == 1:
            v = cur[0]
            lead = min(v, key=lambda m: (popcount(m), m))
            self.spinor = form_of_vec(dim, vec_scale(v, v[lead].inv()))
        else:
            self.spinor = None

    # -- cochain Clifford action -------------------------------------------------

    def cliff_cochain(self, c: dict[int, QI], w: Form) -> Form:
        """Clifford action of a wedge^k L* cochain through the half-normalized
        identification L* = conj(L); ascending factors act right-to-left."""
        out = Form(self.model.dim)
        for mask, coeff in c.items():
            idxs = []
            mm = mask
            while mm:
                low = mm & -mm
                idxs.append(low.bit_length() - 1)
                mm &= mm - 1
            term = w
            for i in reversed(idxs):
                term = clifford_act(self.dual_basis[i], term)
            out = out + term.scale(coeff)
        return out

    def __repr__(self):
        return (f"GCStruct(kind={self.kind}, model={self.model.name!r}, "
                f"parity={self.parity})")


# -- constructors ---------------------------------------------------------------

def _validate_J(m: LieModel, J: Matrix):
    n4 = 2 * m.dim
    if len(J) != n4 or any(len(r) != n4 for r in J):
        raise NotAlmostComplex(f"J must be {n4}x{n4}")
    for row in J:
        for x in row:
            if not x.is_real():
                raise NotAlmostComplex("J must have real (rational) entries")
    J2 = mat_mul(J, J)
    minus = [[QI(-1) if i == j else QI(0) for j in range(n4)] for i in range(n4)]
    if J2 != minus:
        raise NotAlmostComplex("J^2 != -1")
    P = pairing_gram(m.dim)
    JT = [list(col) for col in zip(*J)]
    if mat_mul(mat_mul(JT, P), J) != P:
        raise NotOrthogonal("<Ja, Jb> != <a, b>")


def make_general(m: LieModel, J: Matrix, kind: str = "general") -> GCStruct:
    m.require_valid()
    J = [[x if isinstance(x, QI) else QI(x) for x in row] for row in J]
    _validate_J(m, J)
    n4 = 2 * m.dim
    cols = []
    for j in range(n4):
        col: Vec = {}
        for i in range(n4):
            x = J[i][j] - (I if i == j else QI(0))
            if x:
                col[i] = x
        cols.append(col)
    kernel = matrix_kernel(cols)
    if len(kernel) != m.dim:
        raise NotAlmostComplex(
            f"+i eigenspace has dim {len(kernel)}, expected {m.dim}")
    basis = [gen_from_sparse(m.dim, v) for v in kernel]
    try:
        L = algebroid_from_basis(m, basis, name="L")
    except NotClosedUnderBracket as e:
        raise NotIntegrable(f"+i eigenbundle not Dorfman-closed: {e}",
                            **e.details) from e
    except NotIsotropic as e:  # cannot happen for orthogonal J; keep the guard
        raise NotIntegrable(str(e)) from e
    return GCStruct(m, J, L, kind=kind)


def make_symplectic(m: LieModel, omega: Form, B: Form | None = None) -> GCStruct:
    m.require_valid()
    B = B if B is not None else Form(m.dim)
    for f, nm in ((omega, "omega"), (B, "B")):
        if not f.is_zero() and not f.is_homogeneous(2):
            raise WrongType(f"{nm} must be a 2-form")
        if any(v.im for v in f.coeffs.values()):
            raise WrongType(f"{nm} must be real")
    n = m.dim // 2
    top = omega
    for _ in range(n - 1):
        top = top.wedge(omega)
    if top.is_zero():
        raise DegenerateOmega("omega^n = 0")
    if not m.d(omega).is_zero():
        raise OmegaNotClosed(f"d omega = {m.d(omega)!r}")
    if m.d(B) != m.H:
        raise BMismatch(f"dB = {m.d(B)!r} but H = {m.H!r}")

    dim = m.dim
    Mw = [[QI(0)] * dim for _ in range(dim)]
    for i in range(dim):
        ix = omega.contract_index(i + 1)
        for mask, v in ix.coeffs.items():
            Mw[mask.bit_length() - 1][i] = v
    try:
        Mb = mat_inv(Mw)
    except ZeroDivisionError:
        raise DegenerateOmega("omega is not invertible") from None
    MB = [[QI(0)] * dim for _ in range(dim)]
    for i in range(dim):
        ix = B.contract_index(i + 1)
        for mask, v in ix.coeffs.items():
            MB[mask.bit_length() - 1][i] = v

    J0 = [[QI(0)] * (2 * dim) for _ in range(2 * dim)]
    for i in range(dim):
        for j in range(dim):
            J0[i][dim + j] = -Mb[i][j]
            J0[dim + i][j] = Mw[i][j]
    EB = [[QI(0)] * (2 * dim) for _ in range(2 * dim)]
    EBi = [[QI(0)] * (2 * dim) for _ in range(2 * dim)]
    for i in range(dim):
        EB[i][i] = ONE
        EB[dim + i][dim + i] = ONE
        EBi[i][i] = ONE
        EBi[dim + i][dim + i] = ONE
        for j in range(dim):
            EB[dim + i][j] = MB[i][j]
            EBi[dim + i][j] = -MB[i][j]
    J = mat_mul(EB, mat_mul(J0, EBi))

    s = make_general(m, J, kind="symplectic")
    s.omega = omega
    s.B = B
    s.beta = {(i, j): Mb[i][j] for i in range(dim) for j in range(i + 1, dim)
              if Mb[i][j]}
    rho = (omega.scale(I) - B).exp()
    if s.spinor != rho:
        raise EngineError("symplectic spinor mismatch against e^{-B+i omega}")
    if not m.d_H(rho).is_zero():
        raise EngineError("symplectic spinor is not d_H-closed")
    return s


def make_complex(m: LieModel, Imat: Matrix) -> GCStruct:
    m.require_valid()
    dim = m.dim
    Imat = [[x if isinstance(x, QI) else QI(x) for x in row] for row in Imat]
    if len(Imat) != dim or any(len(r) != dim for r in Imat):
        raise NotAlmostComplex(f"I must be {dim}x{dim}")
    I2 = mat_mul(Imat, Imat)
    if I2 != [[QI(-1) if i == j else QI(0) for j in range(dim)] for i in range(dim)]:
        raise NotAlmostComplex("I^2 != -1")
    h30, h03 = _three_zero_parts(m.H, Imat)
    if not h30.is_zero() or not h03.is_zero():
        raise TwistWrongType(
            "twist has a (3,0)+(0,3) component",
            part30=repr(h30), part03=repr(h03))
    J = [[QI(0)] * (2 * dim) for _ in range(2 * dim)]
    for i in range(dim):
        for j in range(dim):
            J[i][j] = -Imat[i][j]
            J[dim + i][dim + j] = Imat[j][i]  # I^T on covectors
    s = make_general(m, J, kind="complex")
    s.Imat = Imat
    return s


def _three_zero_parts(H: Form, Imat: Matrix):
    """(3,0) and (0,3) components of a 3-form w.r.t. the complex structure."""
    dim = H.dim
    if H.is_zero():
        return Form(dim), Form(dim)
    # generator e^i splits via the +-i eigenprojectors of I on covectors
    IT = [[Imat[j][i] for j in range(dim)] for i in range(dim)]
    p10 = []
    p01 = []
    for i in range(dim):
        row10: dict[int, QI] = {}
        row01: dict[int, QI] = {}
        for j in range(dim):
            # P^{1,0} = (1 - i I*)/2 acting on e^i
            val10 = (ONE if i == j else QI(0)) - I * IT[i][j]
            val01 = (ONE if i == j else QI(0)) + I * IT[i][j]
            if val10:
                row10[1 << j] = val10 * Half
            if val01:
                row01[1 << j] = val01 * Half
        p10.append(Form(dim, row10))
        p01.append(Form(dim, row01))
    out30 = Form(dim)
    out03 = Form(dim)
    for mask, v in H.coeffs.items():
        idxs = [b for b in range(dim) if mask >> b & 1]
        t30 = p10[idxs[0]].wedge(p10[idxs[1]]).wedge(p10[idxs[2]])
        t03 = p01[idxs[0]].wedge(p01[idxs[1]]).wedge(p01[idxs[2]])
        out30 = out30 + t30.scale(v)
        out03 = out03 + t03.scale(v)
    return out30, out03


# -- symplectic phi / delta machinery ---------------------------------------------

def _beta_contract(s: GCStruct, a: Form) -> Form:
    out = Form(a.dim)
    for (i, j), c in s.beta.items():
        out = out + a.contract_index(j + 1).contract_index(i + 1).scale(c)
    return out


def beta_exp(s: GCStruct, a: Form, factor: QI) -> Form:
    """exp(factor * beta-contraction) applied to a; nilpotent, exact."""
    out = a
    term = a
    k = 1
    while True:
        term = _beta_contract(s, term)
        if term.is_zero():
            return out
        coeff = factor ** k * QI(Fraction(1, _fact(k)))
        out = out + term.scale(coeff)
        k += 1


def _fact(k: int) -> int:
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def symp_phi(s: GCStruct, a: Form) -> Form:
    """phi(a) = e^{-B+i omega} ^ e^{beta/2i} a, mapping degree k onto U_{k-n}."""
    if s.kind != "symplectic":
        raise WrongType("phi requires a symplectic-type structure")
    inner = beta_exp(s, a, ONE / (2 * I))
    return s.spinor.wedge(inner)


def symp_delta(s: GCStruct, a: Form) -> Form:
    """delta = [beta, d] = beta d - d beta (untwisted d)."""
    if s.kind != "symplectic":
        raise WrongType("delta requires a symplectic-type structure")
    m = s.model
    return _beta_contract(s, m.d(a)) - m.d(_beta_contract(s, a))


def grading_projectors(s: GCStruct):
    """The exact eigenprojector data: a map k -> projector callable."""
    return {k: (lambda w, k=k: s.project(k, w)) for k in s._ks}
