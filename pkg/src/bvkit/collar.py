"""From a quadratic local action on a collar to boundary data: extract
the boundary one-form of the variational split, reduce by the kernel of
its exterior derivative, and push vector fields through the reduction.

The variational split reads off rows of the Hessian: with S(x) = half
x^T G x and G symmetric, dS(x)[dx] = sum_a (Gx)_a dx_a; rows indexed by
boundary variables form the boundary one-form, the rest are the interior
field equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .complexes import CellComplex
from .numkit import Matrix, Subspace, kernel
from .symplect import (
    NotBasic,
    OneForm,
    PresymplecticSpace,
    presymplectic_reduce,
    reduce_one_form,
)


class NonlocalAction(ValueError):
    pass


class NotProjectable(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    name: str
    cell_dim: int
    degree: int = 0


@dataclass(frozen=True)
class QuadraticLocalTheory:
    """A quadratic action on the total field vector of a complex.

    One variable per cell per field, enumerated field by field in layout
    order. `action` is the symmetric matrix G with S(x) = half x^T G x.
    `stencil[a]`, when given, lists the variables row a of G may touch.
    """

    complex: CellComplex
    field_layout: tuple[FieldSpec, ...]
    action: Matrix
    stencil: Optional[tuple[tuple[int, ...], ...]] = None

    def __post_init__(self):
        n = self.n_vars
        if self.action.shape != (n, n):
            raise ValueError("action matrix size mismatch")
        if self.action.transpose() != self.action:
            raise ValueError("action matrix must be symmetric")

    @property
    def n_vars(self) -> int:
        return sum(self.complex.n_cells(f.cell_dim) for f in self.field_layout)

    def field_offset(self, name: str) -> int:
        off = 0
        for f in self.field_layout:
            if f.name == name:
                return off
            off += self.complex.n_cells(f.cell_dim)
        raise KeyError(name)

    def var_index(self, name: str, cell: int) -> int:
        return self.field_offset(name) + cell

    def field_of_var(self, a: int) -> tuple[FieldSpec, int]:
        off = 0
        for f in self.field_layout:
            n = self.complex.n_cells(f.cell_dim)
            if a < off + n:
                return f, a - off
            off += n
        raise IndexError(a)

    def boundary_vars(self) -> list[int]:
        """Variables sitting on boundary-flagged cells."""
        out = []
        off = 0
        for f in self.field_layout:
            for i in self.complex.boundary_indices(f.cell_dim):
                out.append(off + i)
            off += self.complex.n_cells(f.cell_dim)
        return sorted(out)

    def action_value(self, x) -> Fraction:
        gx = self.action.apply(x)
        return sum((a * b for a, b in zip(x, gx)), Fraction(0)) / 2

    def variation(self, x) -> tuple[Fraction, ...]:
        """Covector of dS at x: dS(x)[dx] = variation(x) . dx."""
        return self.action.apply(x)


def prism(base: CellComplex, layers: int) -> CellComplex:
    """Product of a complex of dimension at most 1 with a path of
    `layers` edges; layer-0 cells (and prisms over the base's own
    boundary) carry the boundary flag."""
    if base.dim > 1:
        raise ValueError("prism construction supports base dimension <= 1")
    if layers < 1:
        raise ValueError("need at least one layer")
    nt = layers + 1
    v_names = tuple(f"{c}|{t}" for t in range(nt) for c in base.cells[0])
    ve_names = tuple(f"{c}|{t}.{t + 1}" for t in range(layers)
                     for c in base.cells[0])
    n0 = base.n_cells(0)
    n1 = base.n_cells(1)
    has_edges = base.dim >= 1
    e_names = tuple(f"{c}|{t}" for t in range(nt)
                    for c in (base.cells[1] if has_edges else ()))
    sq_names = tuple(f"{c}|{t}.{t + 1}" for t in range(layers)
                     for c in (base.cells[1] if has_edges else ()))

    cells1 = ve_names + e_names
    d_base = base.boundary_op(1) if has_edges else Matrix.zeros(n0, 0)

    d1 = [[Fraction(0)] * len(cells1) for _ in v_names]
    for t in range(layers):
        for c in range(n0):
            col = t * n0 + c
            d1[t * n0 + c][col] -= 1
            d1[(t + 1) * n0 + c][col] += 1
    for t in range(nt):
        for c in range(n1):
            col = len(ve_names) + t * n1 + c
            for r in range(n0):
                if d_base[r, c] != 0:
                    d1[t * n0 + r][col] += d_base[r, c]

    d2 = [[Fraction(0)] * len(sq_names) for _ in cells1]
    for t in range(layers):
        for c in range(n1):
            col = t * n1 + c
            # d(edge x interval) = (d edge) x interval - edge x d(interval)
            for r in range(n0):
                if d_base[r, c] != 0:
                    d2[t * n0 + r][col] += d_base[r, c]
            d2[len(ve_names) + (t + 1) * n1 + c][col] -= 1
            d2[len(ve_names) + t * n1 + c][col] += 1

    def layer_of_v(i):
        return i // n0

    vflags = tuple(layer_of_v(i) == 0
                   or base.boundary_flags[0][i % n0] for i in range(len(v_names)))
    veflags = tuple(base.boundary_flags[0][i % n0]
                    for i in range(len(ve_names)))
    eflags = tuple((i // n1 == 0) if n1 else False for i in range(len(e_names)))
    sqflags = (False,) * len(sq_names)

    weights = None
    if base.weights is not None:
        w0 = base.weights[0]
        w1 = base.weights[1] if has_edges else ()
        weights = (tuple(w0[i % n0] for i in range(len(v_names))),
                   tuple([w0[i % n0] for i in range(len(ve_names))]
                         + [w1[i % n1] for i in range(len(e_names))]),
                   tuple(w1[i % n1] for i in range(len(sq_names))))

    if has_edges:
        cells = (v_names, cells1, sq_names)
        ops = (Matrix.from_rows(d1), Matrix.from_rows(d2))
        flags = (vflags, veflags + eflags, sqflags)
    else:
        cells = (v_names, cells1)
        ops = (Matrix.from_rows(d1),)
        flags = (vflags, veflags)
        weights = weights[:2] if weights else None
    return CellComplex(cells, ops, flags, weights, cubical=base.cubical)


@dataclass(frozen=True)
class CollarModel:
    base: CellComplex
    layers: int
    total: CellComplex

    @staticmethod
    def build(base: CellComplex, layers: int = 2) -> "CollarModel":
        if layers < 2:
            raise ValueError("a collar needs at least two layers")
        return CollarModel(base, layers, prism(base, layers))


def boundary_one_form(t: QuadraticLocalTheory,
                      boundary_vars: Optional[Sequence[int]] = None) -> OneForm:
    """Boundary residue of dS: the rows of the action matrix indexed by
    boundary variables, as a one-form in the variations."""
    if boundary_vars is None:
        boundary_vars = t.boundary_vars()
    n = t.n_vars
    bset = set(boundary_vars)
    if t.stencil is not None:
        for a in range(n):
            allowed = set(t.stencil[a]) | {a}
            for b in range(n):
                if t.action[a, b] != 0 and b not in allowed:
                    raise NonlocalAction(
                        f"action couples variable {a} outside its stencil")
    coeff = Matrix.from_rows([
        list(t.action.row(a)) if a in bset else [Fraction(0)] * n
        for a in range(n)])
    return OneForm(n, coeff)


def el_form(t: QuadraticLocalTheory,
            boundary_vars: Optional[Sequence[int]] = None) -> Matrix:
    """Interior rows of dS: the discrete field equations."""
    if boundary_vars is None:
        boundary_vars = t.boundary_vars()
    bset = set(boundary_vars)
    return Matrix.from_rows([
        [Fraction(0)] * t.n_vars if a in bset else list(t.action.row(a))
        for a in range(t.n_vars)])


@dataclass(frozen=True)
class BoundaryPackage:
    boundary_space: PresymplecticSpace
    alpha: Optional[OneForm]
    projection: Matrix
    basic: bool

    @property
    def preboundary_dim(self) -> int:
        return self.projection.cols

    def kernel_subspace(self) -> Subspace:
        return kernel(self.projection)


def preboundary_reduce(a: OneForm) -> BoundaryPackage:
    """Reduce the preboundary two-form d(a) by its kernel and push a
    down when it is basic."""
    omega = a.d()
    v = PresymplecticSpace(a.ambient_dim, omega)
    red = presymplectic_reduce(v)
    try:
        alpha = reduce_one_form(v, a)
        basic = True
    except NotBasic:
        alpha = None
        basic = False
    return BoundaryPackage(red.space, alpha, red.projection, basic)


def project_vector_field(q: Matrix, pkg: BoundaryPackage) -> Matrix:
    """Descend a linear vector field through the reduction: the unique
    Q with Q @ projection = projection @ q, when q preserves the kernel."""
    p = pkg.projection
    if q.shape != (p.cols, p.cols):
        raise ValueError("vector field size mismatch")
    ker = kernel(p)
    for kv in ker.basis:
        if not ker.contains(q.apply(kv)):
            raise NotProjectable("field does not preserve the kernel")
    from .numkit import section_of

    s = section_of(p)
    out = p @ q @ s
    assert out @ p == p @ q
    return out
