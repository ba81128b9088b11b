"""Linear presymplectic geometry: complements, the isotropic/coisotropic/
Lagrangian trichotomy, kernel reduction, coisotropic reduction, and the
Gotay coisotropic embedding.

Sign convention, fixed here for the whole package: a one-form with
coefficient matrix W (alpha at x is the covector W x + const) has exterior
derivative d(alpha) with matrix W^T - W, i.e. omega(u, v) = u^T (W^T - W) v.
Every module that differentiates a one-form imports `d_of_coeff`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .numkit import (
    Matrix,
    Subspace,
    Vector,
    kernel,
    quotient,
    section_of,
    zero_vec,
)


def d_of_coeff(w: Matrix) -> Matrix:
    """Exterior derivative of the one-form with coefficient matrix w."""
    return w.transpose() - w


@dataclass(frozen=True)
class PresymplecticSpace:
    """Q^dim with a (possibly degenerate) antisymmetric pairing."""

    dim: int
    omega: Matrix

    def __post_init__(self):
        if self.omega.shape != (self.dim, self.dim):
            raise ValueError("omega must be square of size dim")
        if not self.omega.is_antisymmetric():
            raise ValueError("omega must be antisymmetric")

    @staticmethod
    def standard(n_pairs: int) -> "PresymplecticSpace":
        """Darboux space with omega(p_i, q_i) = 1, coordinates (q1..qn, p1..pn)."""
        n = 2 * n_pairs
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n_pairs):
            rows[n_pairs + i][i] = Fraction(1)
            rows[i][n_pairs + i] = Fraction(-1)
        return PresymplecticSpace(n, Matrix.from_rows(rows))

    @staticmethod
    def trivial(dim: int) -> "PresymplecticSpace":
        return PresymplecticSpace(dim, Matrix.zeros(dim, dim))

    def pairing(self, u, v) -> Fraction:
        return sum((a * b for a, b in zip(u, self.omega.apply(v))), Fraction(0))

    def kernel_subspace(self) -> Subspace:
        return kernel(self.omega)

    def is_nondegenerate(self) -> bool:
        return self.kernel_subspace().dim == 0


@dataclass(frozen=True)
class OneForm:
    """Linear-plus-constant one-form: alpha at x is the covector coeff@x + const.

    The constant part carries affine data (the geodesic fixture needs it);
    it is invisible to d.
    """

    ambient_dim: int
    coeff: Matrix
    const: Vector = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.coeff.shape != (self.ambient_dim, self.ambient_dim):
            raise ValueError("coeff must be square of size ambient_dim")
        if self.const is None:
            object.__setattr__(self, "const", zero_vec(self.ambient_dim))
        elif len(self.const) != self.ambient_dim:
            raise ValueError("const length mismatch")

    @staticmethod
    def zero(n: int) -> "OneForm":
        return OneForm(n, Matrix.zeros(n, n))

    def at(self, x) -> Vector:
        """Covector of alpha at the point x."""
        return tuple(a + c for a, c in zip(self.coeff.apply(x), self.const))

    def evaluate(self, x, dx) -> Fraction:
        return sum((a * b for a, b in zip(self.at(x), dx)), Fraction(0))

    def d(self) -> Matrix:
        return d_of_coeff(self.coeff)


@dataclass(frozen=True)
class ClassificationResult:
    is_isotropic: bool
    is_coisotropic: bool

    @property
    def is_lagrangian(self) -> bool:
        return self.is_isotropic and self.is_coisotropic


def omega_complement(v: PresymplecticSpace, l: Subspace) -> Subspace:
    """The omega-orthogonal {w : omega(w, u) = 0 for all u in l}."""
    if l.ambient_dim != v.dim:
        raise ValueError("subspace does not live in the given space")
    if l.dim == 0:
        return Subspace.full(v.dim)
    constraints = l.matrix() @ v.omega.transpose()
    return kernel(constraints)


def classify(v: PresymplecticSpace, l: Subspace) -> ClassificationResult:
    perp = omega_complement(v, l)
    return ClassificationResult(
        is_isotropic=perp.contains_subspace(l),
        is_coisotropic=l.contains_subspace(perp),
    )


@dataclass(frozen=True)
class Reduction:
    """A presymplectic space together with the projection that produced it."""

    space: PresymplecticSpace
    projection: Matrix
    section: Matrix = field(compare=False)


def presymplectic_reduce(v: PresymplecticSpace) -> Reduction:
    """Quotient by ker(omega); the induced form is nondegenerate and
    satisfies projection^T @ omega_red @ projection = omega."""
    ker = v.kernel_subspace()
    dim_red, proj = quotient(v.dim, ker)
    sec = section_of(proj)
    omega_red = sec.transpose() @ v.omega @ sec
    reduced = PresymplecticSpace(dim_red, omega_red)
    assert proj.transpose() @ omega_red @ proj == v.omega
    return Reduction(reduced, proj, sec)


class NotCoisotropic(ValueError):
    pass


def coisotropic_reduce(v: PresymplecticSpace, c: Subspace) -> Reduction:
    """Symplectic reduction c / c^perp of a coisotropic c in nondegenerate v.

    The returned projection maps coordinate vectors with respect to c's
    RREF basis to reduced coordinates.
    """
    if not v.is_nondegenerate():
        raise NotCoisotropic("ambient form must be nondegenerate")
    if not classify(v, c).is_coisotropic:
        raise NotCoisotropic("subspace is not coisotropic")
    b = c.matrix()
    restricted = PresymplecticSpace(c.dim, b @ v.omega @ b.transpose())
    return presymplectic_reduce(restricted)


@dataclass(frozen=True)
class GotayEmbedding:
    space: PresymplecticSpace          # symplectic thickening F
    embedding: Matrix                  # C -> F, image coisotropic
    image: Subspace


def gotay_embed(c: PresymplecticSpace) -> GotayEmbedding:
    """Coisotropic embedding of (C, omega) into a symplectic F = C + D*.

    D = ker(omega); the extra coordinates pair with the pivot coordinates
    of D's RREF basis, a deterministic choice of splitting.
    """
    ker = c.kernel_subspace()
    k = ker.dim
    n = c.dim
    if k == 0:
        return GotayEmbedding(c, Matrix.identity(n), Subspace.full(n))
    _, pivots = _kernel_pivots(ker)
    # selector P with P[i, pivots[i]] = 1; K in RREF makes P k_j = e_j
    sel = Matrix.from_rows([
        [Fraction(1 if j == pivots[i] else 0) for j in range(n)]
        for i in range(k)])
    top = c.omega.hstack(sel.transpose())
    bottom = (-sel).hstack(Matrix.zeros(k, k))
    omega_f = top.vstack(bottom)
    space = PresymplecticSpace(n + k, omega_f)
    emb = Matrix.identity(n).vstack(Matrix.zeros(k, n))
    image = Subspace.from_span(n + k, [tuple(row) + (Fraction(0),) * k
                                       for row in Matrix.identity(n).entries])
    return GotayEmbedding(space, emb, image)


def _kernel_pivots(ker: Subspace) -> tuple[Matrix, list[int]]:
    from .numkit import rref

    return rref(ker.matrix())


class NotBasic(Exception):
    """The one-form does not descend to the kernel reduction.

    The nonlinear story continues via line bundles, which this package
    does not model; callers treat this as a terminal outcome.
    """


def reduce_one_form(v: PresymplecticSpace, a: OneForm) -> OneForm:
    """Push a one-form with d(a) = omega down the kernel reduction.

    Raises NotBasic when a fails horizontality (coeff@k != 0 or const.k != 0)
    or invariance (k^T coeff != 0) along a kernel vector k.
    """
    if a.d() != v.omega:
        raise ValueError("one-form is not a primitive of omega")
    red = presymplectic_reduce(v)
    ker = v.kernel_subspace()
    for kv in ker.basis:
        if any(x != 0 for x in a.coeff.apply(kv)):
            raise NotBasic("one-form is not invariant along the kernel")
        if any(x != 0 for x in a.coeff.transpose().apply(kv)):
            raise NotBasic("one-form is not invariant along the kernel")
        if sum((x * y for x, y in zip(a.const, kv)), Fraction(0)) != 0:
            raise NotBasic("one-form is not horizontal on the kernel")
    sec = red.section
    coeff_red = sec.transpose() @ a.coeff @ sec
    const_red = sec.transpose().apply(a.const)
    assert red.projection.transpose() @ coeff_red @ red.projection == a.coeff
    return OneForm(red.space.dim, coeff_red, const_red)


def twisted_product(source: PresymplecticSpace,
                    target: PresymplecticSpace) -> PresymplecticSpace:
    """Source-sign-reversed product carrying (-omega_src) + omega_tgt."""
    from .numkit import block_diag

    return PresymplecticSpace(source.dim + target.dim,
                              block_diag(-source.omega, target.omega))
