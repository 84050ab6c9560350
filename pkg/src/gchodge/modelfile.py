"""The .gcm model-file format: parser, canonical emitter, and builders.

A file holds one model (dimension, structure lines, twist) plus any number of
structure blocks ([symplectic]/[complex]/[general]), [family] blocks, and
[gk] blocks referencing structures or families by name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (DimensionOdd, EngineError, ModelSyntaxError,
                     UnknownGenerator)
from .forms import Form, blade_name, popcount
from .liemodel import LieModel
from .linalg import Matrix
from .poly import ParamPoly, PolyForm, PolyMatrix
from .scalars import ONE, QI, format_qi

_NUM = re.compile(r"^(-?\d+)(?:/(\d+))?(i?)$")
_GEN = re.compile(r"^e(\d+)$")
_VEC = re.compile(r"^x(\d+)$")
_VAR = re.compile(r"^t(\d+)(?:\^(\d+))?$")


@dataclass
class StructBlock:
    kind: str
    name: str
    data: dict = field(default_factory=dict)
    line: int = 0


@dataclass
class ModelFile:
    dim: int
    structure: list
    H: Form
    blocks: list[StructBlock]

    def model(self, name: str = "") -> LieModel:
        return LieModel(self.dim, self.structure, self.H, name=name)

    def block(self, name: str) -> StructBlock:
        for b in self.blocks:
            if b.name == name:
                return b
        raise EngineError(f"no block named {name!r}")


def _tokens(line: str) -> list[str]:
    out = []
    for raw in line.replace("+", " + ").replace("^", " ^ ").split():
        out.append(raw)
    # re-attach unary minus to the following token for simpler term handling
    return out


def _parse_scalar(tok: str, lno: int) -> QI:
    m = _NUM.match(tok)
    if not m:
        raise ModelSyntaxError(f"bad rational literal {tok!r}", lno)
    num = int(m.group(1))
    den = int(m.group(2) or 1)
    if den == 0:
        raise ModelSyntaxError(f"zero denominator in {tok!r}", lno)
    val = Fraction(num, den)
    return QI(0, val) if m.group(3) else QI(val)


def _parse_form_expr(text: str, dim: int, nvars: int, lno: int) -> PolyForm:
    """Sum of terms; a term multiplies rational/i literals, t-monomials and
    one optional blade chain e_a^e_b^..."""
    out = PolyForm(dim, nvars)
    txt = text.replace("^", " ^ ").replace("-", " + -1 * ").replace("+", " + ")
    for chunk in txt.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        coeff = ParamPoly.const(nvars, ONE)
        blade_mask = None
        blade_sign = 1
        factors = [f for f in chunk.replace("*", " ").split() if f]
        i = 0
        while i < len(factors):
            tok = factors[i]
            if tok == "0" and len(factors) == 1:
                coeff = ParamPoly(nvars)
                i += 1
                continue
            if tok == "i":
                coeff = coeff.scale(QI(0, 1))
                i += 1
                continue
            gm = _GEN.match(tok)
            if gm:
                # consume a blade chain e_a ^ e_b ^ ...
                idxs = [int(gm.group(1))]
                i += 1
                while i + 1 < len(factors) and factors[i] == "^":
                    g2 = _GEN.match(factors[i + 1])
                    if not g2:
                        raise ModelSyntaxError(
                            f"expected generator after '^', got {factors[i + 1]!r}",
                            lno)
                    idxs.append(int(g2.group(1)))
                    i += 2
                for k in idxs:
                    if not 1 <= k <= dim:
                        raise UnknownGenerator(f"generator e{k} exceeds dim {dim}",
                                               lno)
                bl = Form.blade(dim, idxs)
                if bl.is_zero():
                    blade_mask, blade_sign = None, 0
                else:
                    ((blade_mask, c),) = bl.coeffs.items()
                    blade_sign = 1 if c == ONE else -1
                continue
            vm = _VAR.match(tok)
            if vm and int(vm.group(1)) <= nvars:
                j = int(vm.group(1))
                power = 1
                i += 1
                if i + 1 < len(factors) and factors[i] == "^" \
                        and factors[i + 1].isdigit():
                    power = int(factors[i + 1])
                    i += 2
                for _ in range(power):
                    coeff = coeff * ParamPoly.var(nvars, j - 1)
                continue
            if vm:
                raise UnknownGenerator(
                    f"parameter {tok!r} exceeds variable count {nvars}", lno)
            nm = _NUM.match(tok)
            if nm:
                coeff = coeff.scale(_parse_scalar(tok, lno))
                i += 1
                continue
            raise ModelSyntaxError(f"unexpected token {tok!r}", lno)
        if blade_sign == 0:
            continue
        if blade_sign < 0:
            coeff = coeff.scale(QI(-1))
        mask = blade_mask if blade_mask is not None else 0
        out = out + PolyForm(dim, nvars, {mask: coeff})
    return out


def _parse_matrix(text: str, size: int, nvars: int, lno: int) -> PolyMatrix:
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) != size:
        raise ModelSyntaxError(f"expected {size} matrix rows, got {len(rows)}",
                               lno)
    out = []
    for r in rows:
        entries = [e.strip() for e in r.split(",")]
        if len(entries) != size:
            raise ModelSyntaxError(
                f"expected {size} entries per row, got {len(entries)}", lno)
        row = []
        for e in entries:
            pf = _parse_form_expr(e, 2, nvars, lno)  # scalar-only parse
            for mask in pf.coeffs:
                if mask:
                    raise ModelSyntaxError("matrix entries must be scalars", lno)
            row.append(pf.coeffs.get(0, ParamPoly(nvars)))
        out.append(row)
    return out


def _parse_point(text: str, nvars: int, lno: int) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != nvars:
        raise ModelSyntaxError(
            f"sample needs {nvars} coordinates, got {len(parts)}", lno)
    return tuple(_parse_scalar(p, lno) for p in parts)


def parse_model(text: str) -> ModelFile:
    dim = None
    structure = []
    H = None
    blocks: list[StructBlock] = []
    current: StructBlock | None = None
    pending_key_lines: dict[str, tuple[str, int]] = {}

    for lno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ModelSyntaxError("unterminated block header", lno)
            fields = line[1:-1].split()
            if len(fields) != 2:
                raise ModelSyntaxError(
                    "block header needs a kind and a name", lno)
            kind, name = fields
            if kind not in ("symplectic", "complex", "general", "family", "gk"):
                raise ModelSyntaxError(f"unknown block kind {kind!r}", lno)
            current = StructBlock(kind, name, {}, lno)
            blocks.append(current)
            continue
        if "=" not in line:
            raise ModelSyntaxError("expected 'key = value'", lno)
        key, val = (s.strip() for s in line.split("=", 1))
        if current is None:
            if key == "dim":
                try:
                    dim = int(val)
                except ValueError:
                    raise ModelSyntaxError(f"bad dimension {val!r}", lno) from None
                if dim % 2 or dim <= 0:
                    raise DimensionOdd(f"dimension must be even positive, got {dim}")
            elif key.startswith("d "):
                gen = key[2:].strip()
                gm = _GEN.match(gen)
                if not gm or dim is None:
                    raise ModelSyntaxError(f"bad structure line {key!r}", lno)
                k = int(gm.group(1))
                if not 1 <= k <= dim:
                    raise UnknownGenerator(f"generator e{k} exceeds dim {dim}", lno)
                pf = _parse_form_expr(val, dim, 0, lno)
                for mask, poly in pf.coeffs.items():
                    if popcount(mask) != 2:
                        raise ModelSyntaxError(
                            "structure lines need degree-2 right-hand sides", lno)
                    c = poly.terms.get((), QI(0))
                    i = (mask & -mask).bit_length()
                    j = mask.bit_length()
                    structure.append((k, i, j, c))
            elif key == "H":
                if dim is None:
                    raise ModelSyntaxError("H given before dim", lno)
                pf = _parse_form_expr(val, dim, 0, lno)
                H = Form(dim, {m: p.terms.get((), QI(0))
                               for m, p in pf.coeffs.items()})
            else:
                raise ModelSyntaxError(f"unknown top-level key {key!r}", lno)
        else:
            current.data[key] = (val, lno)
    if dim is None:
        raise ModelSyntaxError("missing 'dim = ...'", 0)
    return ModelFile(dim, structure, H if H is not None else Form(dim), blocks)


# -- builders -------------------------------------------------------------------

def build_structure(mf: ModelFile, block: StructBlock, model: LieModel):
    from .gcs import make_complex, make_general, make_symplectic
    dim = mf.dim

    def form_of(key, default=None):
        if key not in block.data:
            if default is not None:
                return default
            raise ModelSyntaxError(f"block {block.name!r} needs {key!r}",
                                   block.line)
        val, lno = block.data[key]
        pf = _parse_form_expr(val, dim, 0, lno)
        return pf.eval(())

    if block.kind == "symplectic":
        return make_symplectic(model, form_of("omega"), form_of("B", Form(dim)))
    if block.kind == "complex":
        val, lno = block.data["I"]
        It = _parse_matrix(val, dim, 0, lno)
        return make_complex(model, [[p.eval(()) for p in row] for row in It])
    if block.kind == "general":
        val, lno = block.data["J"]
        Jt = _parse_matrix(val, 2 * dim, 0, lno)
        return make_general(model, [[p.eval(()) for p in row] for row in Jt])
    raise EngineError(f"block {block.name!r} is not a structure block")


def build_family(mf: ModelFile, block: StructBlock, model: LieModel):
    from .families import FamilySpec
    if block.kind != "family":
        raise EngineError(f"block {block.name!r} is not a family block")
    dim = mf.dim

    def raw(key, required=True):
        if key not in block.data:
            if required:
                raise ModelSyntaxError(f"family {block.name!r} needs {key!r}",
                                       block.line)
            return None
        return block.data[key]

    kind_val, _ = raw("kind")
    kind = kind_val.strip()
    nv_val, nv_lno = raw("variables")
    try:
        nvars = int(nv_val)
    except ValueError:
        raise ModelSyntaxError(f"bad variable count {nv_val!r}", nv_lno) from None
    samples = []
    sm = raw("samples", required=False)
    if sm:
        val, lno = sm
        for part in val.split(";"):
            if part.strip():
                samples.append(_parse_point(part, nvars, lno))
    basepoint = None
    bp = raw("basepoint", required=False)
    if bp:
        basepoint = _parse_point(bp[0], nvars, bp[1])
    if kind == "symplectic":
        oval, olno = raw("omega")
        omega_t = _parse_form_expr(oval, dim, nvars, olno)
        Bv = raw("B", required=False)
        B_t = _parse_form_expr(Bv[0], dim, nvars, Bv[1]) if Bv else None
        return FamilySpec(model, "symplectic", nvars, samples=samples,
                          basepoint=basepoint, omega_t=omega_t, B_t=B_t,
                          name=block.name)
    if kind == "complex":
        val, lno = raw("I")
        return FamilySpec(model, "complex", nvars, samples=samples,
                          basepoint=basepoint,
                          It=_parse_matrix(val, dim, nvars, lno),
                          name=block.name)
    if kind == "general":
        val, lno = raw("J")
        return FamilySpec(model, "general", nvars, samples=samples,
                          basepoint=basepoint,
                          Jt=_parse_matrix(val, 2 * dim, nvars, lno),
                          name=block.name)
    raise ModelSyntaxError(f"unknown family kind {kind!r}", block.line)


# -- canonical emission ------------------------------------------------------------

def _emit_scalar(z: QI) -> str:
    return format_qi(z)


def _emit_poly(p: ParamPoly) -> str:
    if p.is_zero():
        return "0"
    bits = []
    for e in sorted(p.terms, key=lambda e: (sum(e), e)):
        c = p.terms[e]
        mono = " ".join(
            f"t{j + 1}" + (f"^{k}" if k > 1 else "")
            for j, k in enumerate(e) if k)
        cs = _emit_scalar(c)
        bits.append(f"{cs} {mono}".strip())
    return " + ".join(bits)


def _scalar_pieces(z: QI) -> list[str]:
    """Real and imaginary parts as separate term coefficients, so emitted
    text re-parses term by term."""
    out = []
    if z.re:
        out.append(str(z.re))
    if z.im:
        out.append("i" if z.im == 1 else ("-i" if z.im == -1 else f"{z.im}i"))
    return out


def _emit_polyform(pf: PolyForm) -> str:
    if pf.is_zero():
        return "0"
    bits = []
    for mask in sorted(pf.coeffs, key=lambda m: (popcount(m), m)):
        poly = pf.coeffs[mask]
        bl = blade_name(mask)
        for e in sorted(poly.terms, key=lambda e: (sum(e), e)):
            mono = " ".join(
                f"t{j + 1}" + (f"^{k}" if k > 1 else "")
                for j, k in enumerate(e) if k)
            for cs in _scalar_pieces(poly.terms[e]):
                bits.append(" ".join(x for x in (cs, mono, bl) if x))
    return " + ".join(bits)


def _emit_form(f: Form) -> str:
    if f.is_zero():
        return "0"
    bits = []
    for mask in f.blades_sorted():
        bl = blade_name(mask)
        for cs in _scalar_pieces(f.coeffs[mask]):
            bits.append(f"{cs} {bl}".strip())
    return " + ".join(bits)


def emit_model(mf: ModelFile) -> str:
    out = [f"dim = {mf.dim}"]
    dgen: dict[int, Form] = {}
    for (k, i, j, c) in mf.structure:
        f = dgen.get(k, Form(mf.dim)) + Form.blade(mf.dim, (i, j), c)
        dgen[k] = f
    for k in sorted(dgen):
        if not dgen[k].is_zero():
            out.append(f"d e{k} = {_emit_form(dgen[k])}")
    out.append(f"H = {_emit_form(mf.H)}")
    for b in mf.blocks:
        out.append("")
        out.append(f"[{b.kind} {b.name}]")
        nvars = 0
        if b.kind == "family" and "variables" in b.data:
            try:
                nvars = int(b.data["variables"][0])
            except ValueError:
                nvars = 0
        for key, (val, lno) in b.data.items():
            if key in ("omega", "B", "H"):
                pf = _parse_form_expr(val, mf.dim, nvars, lno)
                out.append(f"{key} = {_emit_polyform(pf)}")
            elif key in ("I", "J"):
                size = mf.dim if key == "I" else 2 * mf.dim
                M = _parse_matrix(val, size, nvars, lno)
                rows = "; ".join(", ".join(_emit_poly(p) for p in row)
                                 for row in M)
                out.append(f"{key} = {rows}")
            elif key == "samples":
                pts = [p.strip() for p in val.split(";") if p.strip()]
                canon = "; ".join(
                    ", ".join(_emit_scalar(c)
                              for c in _parse_point(p, nvars or p.count(",") + 1, lno))
                    for p in pts)
                out.append(f"samples = {canon}")
            else:
                out.append(f"{key} = {val}")
    return "\n".join(out) + "\n"
