"""Exact multivariate polynomials over Q(i), and forms/matrices with
polynomial coefficients.  These carry the parameter dependence of families;
derivatives are formal, so no approximation enters anywhere.
"""

from __future__ import annotations

from .forms import Form
from .linalg import Matrix
from .scalars import ONE, QI

Expt = tuple[int, ...]


class ParamPoly:
    """Polynomial in t_1..t_m with QI coefficients, exponent-tuple keyed."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[Expt, QI] | None = None):
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, nvars: int, c) -> "ParamPoly":
        c = c if isinstance(c, QI) else QI(c)
        return cls(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, j: int) -> "ParamPoly":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __add__(self, other):
        other = self._co(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            w = out.get(e)
            t = c if w is None else w + c
            if t:
                out[e] = t
            elif w is not None:
                del out[e]
        return ParamPoly(self.nvars, out)

    def _co(self, other) -> "ParamPoly":
        if isinstance(other, ParamPoly):
            return other
        return ParamPoly.const(self.nvars, other)

    def __sub__(self, other):
        return self + self._co(other).scale(QI(-1))

    def __neg__(self):
        return self.scale(QI(-1))

    def scale(self, z) -> "ParamPoly":
        z = z if isinstance(z, QI) else QI(z)
        if not z:
            return ParamPoly(self.nvars)
        return ParamPoly(self.nvars, {e: c * z for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (QI, int)):
            return self.scale(other)
        out: dict[Expt, QI] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                w = out.get(e)
                t = c1 * c2 if w is None else w + c1 * c2
                if t:
                    out[e] = t
                elif w is not None:
                    del out[e]
        return ParamPoly(self.nvars, out)

    __rmul__ = __mul__

    def diff(self, j: int) -> "ParamPoly":
        out: dict[Expt, QI] = {}
        for e, c in self.terms.items():
            if e[j]:
                e2 = list(e)
                e2[j] -= 1
                out[tuple(e2)] = c * e[j]
        return ParamPoly(self.nvars, out)

    def eval(self, point) -> QI:
        out = QI(0)
        for e, c in self.terms.items():
            term = c
            for j, k in enumerate(e):
                for _ in range(k):
                    term = term * point[j]
            out = out + term
        return out

    def conj(self) -> "ParamPoly":
        return ParamPoly(self.nvars, {e: c.conj() for e, c in self.terms.items()})

    def shift(self, point) -> "ParamPoly":
        """Substitute t -> t + point, recentering at the given basepoint."""
        if not any(point):
            return self
        out = ParamPoly(self.nvars)
        for e, c in self.terms.items():
            term = ParamPoly.const(self.nvars, c)
            for j, k in enumerate(e):
                f = ParamPoly.var(self.nvars, j) + ParamPoly.const(self.nvars, point[j])
                for _ in range(k):
                    term = term * f
            out = out + term
        return out

    def __eq__(self, other):
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e)):
            mono = "".join(f"t{j + 1}" + (f"^{k}" if k > 1 else "")
                           for j, k in enumerate(e) if k)
            c = str(self.terms[e])
            bits.append(f"{c} {mono}".strip() if mono else c)
        return " + ".join(bits)


class PolyForm:
    """A multivector whose blade coefficients are ParamPoly."""

    __slots__ = ("dim", "nvars", "coeffs")

    def __init__(self, dim: int, nvars: int, coeffs=None):
        self.dim = dim
        self.nvars = nvars
        self.coeffs: dict[int, ParamPoly] = {
            m: p for m, p in (coeffs or {}).items() if not p.is_zero()}

    @classmethod
    def from_form(cls, f: Form, nvars: int) -> "PolyForm":
        return cls(f.dim, nvars,
                   {m: ParamPoly.const(nvars, c) for m, c in f.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "PolyForm") -> "PolyForm":
        out = dict(self.coeffs)
        for m, p in other.coeffs.items():
            out[m] = out[m] + p if m in out else p
        return PolyForm(self.dim, self.nvars, out)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + other.scale_poly(ParamPoly.const(self.nvars, QI(-1)))

    def scale_poly(self, p: ParamPoly) -> "PolyForm":
        return PolyForm(self.dim, self.nvars,
                        {m: q * p for m, q in self.coeffs.items()})

    def scale(self, z: QI) -> "PolyForm":
        return PolyForm(self.dim, self.nvars,
                        {m: q.scale(z) for m, q in self.coeffs.items()})

    def wedge(self, other: "PolyForm") -> "PolyForm":
        from .forms import blade_wedge_sign
        out: dict[int, ParamPoly] = {}
        for ma, pa in self.coeffs.items():
            for mb, pb in other.coeffs.items():
                if ma & mb:
                    continue
                s = blade_wedge_sign(ma, mb)
                term = pa * pb
                if s < 0:
                    term = term.scale(QI(-1))
                m = ma | mb
                out[m] = out[m] + term if m in out else term
        return PolyForm(self.dim, self.nvars, out)

    def contract_index(self, i: int) -> "PolyForm":
        from .forms import insert_sign
        bit = 1 << (i - 1)
        out: dict[int, ParamPoly] = {}
        for m, p in self.coeffs.items():
            if m & bit:
                q = p if insert_sign(m, i - 1) > 0 else p.scale(QI(-1))
                k = m & ~bit
                out[k] = out[k] + q if k in out else q
        return PolyForm(self.dim, self.nvars, out)

    def exp(self) -> "PolyForm":
        """Exponential of a polynomial form with no scalar part."""
        if 0 in self.coeffs:
            raise ValueError("exp needs a form without scalar part")
        from fractions import Fraction
        one = PolyForm(self.dim, self.nvars,
                       {0: ParamPoly.const(self.nvars, ONE)})
        out = one
        term = one
        k = 1
        while True:
            term = term.wedge(self)
            if term.is_zero():
                return out
            out = out + term.scale(QI(Fraction(1, _fact(k))))
            k += 1

    def shift(self, point) -> "PolyForm":
        return PolyForm(self.dim, self.nvars,
                        {m: p.shift(point) for m, p in self.coeffs.items()})

    def diff(self, j: int) -> "PolyForm":
        return PolyForm(self.dim, self.nvars,
                        {m: p.diff(j) for m, p in self.coeffs.items()})

    def eval(self, point) -> Form:
        return Form(self.dim, {m: p.eval(point) for m, p in self.coeffs.items()})

    def conj(self) -> "PolyForm":
        return PolyForm(self.dim, self.nvars,
                        {m: p.conj() for m, p in self.coeffs.items()})

    def min_degree(self) -> int | None:
        degs = [sum(e) for p in self.coeffs.values() for e in p.terms]
        return min(degs, default=None)

    def monomial_slices(self) -> dict[Expt, Form]:
        """Split into Q(i)-forms per exponent tuple."""
        out: dict[Expt, dict[int, QI]] = {}
        for m, p in self.coeffs.items():
            for e, c in p.terms.items():
                out.setdefault(e, {})[m] = c
        return {e: Form(self.dim, d) for e, d in out.items()}

    def max_degree(self) -> int:
        return max((p.degree() for p in self.coeffs.values()), default=0)


def _fact(k: int) -> int:
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def dH_poly(m, pf: PolyForm) -> PolyForm:
    """d_H applied coefficient-wise (the twist is parameter-independent)."""
    out = PolyForm(pf.dim, pf.nvars)
    for mask, p in pf.coeffs.items():
        image = m.d_H(Form(pf.dim, {mask: ONE}))
        for m2, c in image.coeffs.items():
            term = p.scale(c)
            out.coeffs[m2] = out.coeffs[m2] + term if m2 in out.coeffs else term
    return PolyForm(pf.dim, pf.nvars, out.coeffs)


# -- polynomial matrices -------------------------------------------------------

PolyMatrix = list[list[ParamPoly]]


def pmat_from_qi(M: Matrix, nvars: int) -> PolyMatrix:
    return [[ParamPoly.const(nvars, x) for x in row] for row in M]


def pmat_eval(M: PolyMatrix, point) -> Matrix:
    return [[p.eval(point) for p in row] for row in M]


def pmat_diff(M: PolyMatrix, j: int) -> PolyMatrix:
    return [[p.diff(j) for p in row] for row in M]


def pmat_mul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    n, k, m = len(A), len(B), len(B[0])
    nv = A[0][0].nvars
    out = [[ParamPoly(nv) for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for t in range(k):
            p = A[i][t]
            if p.is_zero():
                continue
            for j in range(m):
                if not B[t][j].is_zero():
                    out[i][j] = out[i][j] + p * B[t][j]
    return out


def pmat_vec(M: PolyMatrix, v: list[ParamPoly]) -> list[ParamPoly]:
    nv = v[0].nvars if v else 0
    out = []
    for row in M:
        acc = ParamPoly(nv)
        for p, x in zip(row, v):
            if not p.is_zero() and not x.is_zero():
                acc = acc + p * x
        out.append(acc)
    return out
