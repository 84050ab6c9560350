"""Invariant geometric models: a 2n-dim Lie algebra with a closed 3-form twist,
its Chevalley-Eilenberg complex, and complex Lie algebroids inside E_C = g + g*.

Structure data lists d e^k directly: an entry (k, i, j, c) contributes
c * e^i ^ e^j to d e^k, equivalently <e^k, [x_i, x_j]> = -c.
"""

from __future__ import annotations

from .errors import JacobiFailure, NotClosedUnderBracket, TwistNotClosed
from .forms import Form, popcount
from .linalg import QuotientSpace, solve_columns, vec_axpy
from .scalars import ONE, QI


class LieModel:
    """2n-dimensional Lie algebra with structure constants and twist H."""

    def __init__(self, dim: int, structure, H: Form | None = None, name: str = ""):
        if dim % 2:
            from .errors import DimensionOdd
            raise DimensionOdd(f"model dimension must be even, got {dim}")
        self.dim = dim
        self.name = name
        self.structure = tuple((int(k), int(i), int(j), c if isinstance(c, QI) else QI(c))
                               for (k, i, j, c) in structure)
        self.H = H if H is not None else Form(dim)
        if self.H.dim != dim:
            from .errors import DimensionMismatch
            raise DimensionMismatch("twist form lives on a different dimension")
        if not self.H.is_zero() and not self.H.is_homogeneous(3):
            raise TwistNotClosed("twist must be a pure 3-form", degree=sorted(self.H.degrees()))
        if any(v.im for v in self.H.coeffs.values()):
            raise TwistNotClosed("twist 3-form must be real")
        # d e^k for each generator, 1-based index
        self._dgen = [Form(dim) for _ in range(dim + 1)]
        for (k, i, j, c) in self.structure:
            self._dgen[k] = self._dgen[k] + Form.blade(dim, (i, j), c)

    def d_generator(self, k: int) -> Form:
        return self._dgen[k]

    # -- differentials --------------------------------------------------------

    def d(self, a: Form) -> Form:
        """Chevalley-Eilenberg differential, a degree-1 antiderivation."""
        out = Form(self.dim)
        for mask, v in a.coeffs.items():
            sign = 1
            rest = mask
            while rest:
                low = rest & -rest
                i = low.bit_length()  # 1-based generator index
                dg = self._dgen[i]
                if not dg.is_zero():
                    term = dg.wedge(Form(self.dim, {mask & ~low: ONE}))
                    out = out + term.scale(v * sign)
                sign = -sign
                rest &= rest - 1
        return out

    def d_H(self, a: Form) -> Form:
        return self.d(a) + self.H.wedge(a)

    def bracket_vectors(self, xi, yj):
        """Lie bracket of constant vector fields, coefficient lists (0-based)."""
        out = [QI(0)] * self.dim
        for (k, i, j, c) in self.structure:
            # <e^k,[x_i,x_j]> = -c
            t = xi[i - 1] * yj[j - 1] - xi[j - 1] * yj[i - 1]
            if t:
                out[k - 1] = out[k - 1] - c * t
        return out

    def validate(self) -> "ModelReport":
        """Check d^2 = 0 on generators and d H = 0."""
        jacobi = []
        for k in range(1, self.dim + 1):
            r = self.d(self._dgen[k])
            if not r.is_zero():
                jacobi.append((k, r))
        dh = self.d(self.H)
        return ModelReport(self, jacobi, dh)

    def require_valid(self):
        rep = self.validate()
        rep.raise_on_failure()
        return rep

    def __repr__(self):
        return f"LieModel(dim={self.dim}, name={self.name!r})"


class ModelReport:
    def __init__(self, model: LieModel, jacobi_failures, dh_residual: Form):
        self.model = model
        self.jacobi_failures = jacobi_failures
        self.dh_residual = dh_residual

    @property
    def ok(self) -> bool:
        return not self.jacobi_failures and self.dh_residual.is_zero()

    def raise_on_failure(self):
        if self.jacobi_failures:
            ks = [k for k, _r in self.jacobi_failures]
            raise JacobiFailure(f"d^2 e{ks} != 0", generators=ks)
        if not self.dh_residual.is_zero():
            raise TwistNotClosed(f"dH = {self.dh_residual!r}")

    def lines(self):
        out = []
        for k, r in self.jacobi_failures:
            out.append(f"jacobi: d^2 e{k} = {r!r}")
        if not self.dh_residual.is_zero():
            out.append(f"twist: dH = {self.dh_residual!r}")
        if not out:
            out.append("model valid: d^2 = 0, dH = 0")
        return out


def validate_model(m: LieModel) -> ModelReport:
    return m.validate()


def ce_differential(m: LieModel, a: Form) -> Form:
    return m.d(a)


# -- Lie algebroids -----------------------------------------------------------

class LieAlgebroid:
    """Bracket-closed isotropic subbundle of E_C with precomputed tables.

    Cochains of degree k are dicts {mask over basis indices: QI} with full
    antisymmetry implicit in the ascending mask convention.
    """

    def __init__(self, ambient: LieModel, basis, bracket_table, name: str = ""):
        self.ambient = ambient
        self.basis = list(basis)          # list of GenElem
        self.rank = len(self.basis)
        self.bracket_table = bracket_table  # [i][j] -> list of QI over basis
        self.name = name

    def anchor_matrix(self):
        """Columns are the tangent parts of the basis elements."""
        return [[self.basis[j].vec[i] for j in range(self.rank)]
                for i in range(self.ambient.dim)]

    # -- cochain complex ----------------------------------------------------

    def differential(self, c: dict[int, QI], degree: int | None = None) -> dict[int, QI]:
        """Cartan formula on invariant cochains:
        (dc)(a_0..a_k) = sum_{p<q} (-1)^{p+q} c([a_p,a_q], ..hat p..hat q..)."""
        out: dict[int, QI] = {}
        seen: set[int] = set()
        for mask in c:
            deg = popcount(mask)
            target = deg + 1
            # iterate over all masks of degree deg+1 containing contributions:
            # easier to iterate output masks lazily; collect candidates from
            # inserting brackets. Instead: iterate all output masks once.
            seen.add(target)
        for target_deg in seen:
            for mask in _masks_of_degree(self.rank, target_deg):
                val = QI(0)
                idxs = _mask_indices(mask)
                for p in range(len(idxs)):
                    for q in range(p + 1, len(idxs)):
                        rest = mask & ~(1 << idxs[p]) & ~(1 << idxs[q])
                        br = self.bracket_table[idxs[p]][idxs[q]]
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
                            # c([a_p,a_q], rest) with the bracket argument first:
                            # move it into ascending position inside rest|bit
                            ins = popcount(rest & (bit - 1))
                            sgn = sgn_pq * (-1 if ins & 1 else 1)
                            term = coeff * cm
                            val = val + (term if sgn > 0 else -term)
                if val:
                    out[mask] = val
        return out

    def cohomology(self, k: int) -> QuotientSpace:
        """H^k as a quotient of cochain space, masks over 2^rank coords."""
        masks_k = list(_masks_of_degree(self.rank, k))
        cycles = []
        for combo in _operator_kernel(self, masks_k):
            cycles.append(combo)
        boundaries = []
        if k >= 1:
            for m in _masks_of_degree(self.rank, k - 1):
                img = self.differential({m: ONE})
                if img:
                    boundaries.append(img)
        return QuotientSpace(1 << self.rank, cycles, boundaries)

    def conj(self) -> "LieAlgebroid":
        from .courant import algebroid_from_basis
        return algebroid_from_basis(self.ambient, [b.conj() for b in self.basis],
                                    name=f"conj({self.name})")

    def coords_of(self, elem) -> list[QI]:
        """Coordinates of an E_C element in this algebroid's basis."""
        cols = [b.to_coords() for b in self.basis]
        sol = solve_columns(cols, elem.to_coords())
        if sol is None:
            raise NotClosedUnderBracket("element is not in the algebroid span")
        return [sol.get(a, QI(0)) for a in range(self.rank)]

    def cochain_eval(self, c: dict[int, QI], elems) -> QI:
        """Evaluate an alternating cochain on arbitrary span elements."""
        coords = [self.coords_of(e) for e in elems]
        k = len(elems)
        out = QI(0)
        for mask, val in c.items():
            idxs = _mask_indices(mask)
            if len(idxs) != k:
                continue
            sub = [[coords[col][row] for col in range(k)] for row in idxs]
            from .linalg import mat_det
            d = mat_det(sub)
            if d:
                out = out + val * d
        return out


def _masks_of_degree(rank: int, k: int):
    if k < 0 or k > rank:
        return
    for m in range(1 << rank):
        if popcount(m) == k:
            yield m


def _mask_indices(mask: int):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask &= mask - 1
    return out


def _operator_kernel(L: LieAlgebroid, masks_k):
    """Kernel vectors of d restricted to span of the given cochain masks."""
    cols = [L.differential({m: ONE}) for m in masks_k]
    from .linalg import matrix_kernel
    out = []
    for combo in matrix_kernel(cols):
        vec = {}
        for j, c in combo.items():
            vec = vec_axpy(vec, c, {masks_k[j]: ONE})
        out.append(vec)
    return out


def algebroid_differential(L: LieAlgebroid, c: dict[int, QI]) -> dict[int, QI]:
    return L.differential(c)


def algebroid_cohomology(L: LieAlgebroid, k: int) -> QuotientSpace:
    return L.cohomology(k)
