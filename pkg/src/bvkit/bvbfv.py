"""Ghost resolutions of linear constraint sets, graded symplectic
packages for discrete electrodynamics and abelian BF theory, the five
structural identities coupling bulk and boundary data, moduli of vacua,
boundary function cohomology, and corner data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from .collar import BoundaryPackage, preboundary_reduce, project_vector_field
from .complexes import CellComplex, coboundary, hodge_star
from .graded import (
    GradedSymplecticSpace,
    GradedVectorSpace,
    Monomial,
    Polynomial,
    TruncatedPolynomialAlgebra,
    derivation_apply,
    poisson_bracket,
)
from .numkit import (
    Matrix,
    Subspace,
    block_diag,
    image,
    intersect,
    kernel,
    sum_spaces,
    unit_vec,
)
from .symplect import OneForm

__all__ = [
    "GradedVectorSpace", "GradedSymplecticSpace",
    "TruncatedPolynomialAlgebra", "poisson_bracket",
    "LinearCohomologicalField", "ConstraintSet", "BVBFVPackage",
    "DependentConstraints", "NonAbelianBrackets", "NotSymplecticField",
    "bfv_resolve", "bfv_cohomology", "hamiltonian_of",
    "field_from_hamiltonian", "build_ed_package", "check_bvbfv",
    "moduli_of_vacua", "corner_extend", "boundary_bfv_reduction",
]


class DependentConstraints(ValueError):
    pass


class NonAbelianBrackets(ValueError):
    pass


class NotSymplecticField(ValueError):
    pass


@dataclass(frozen=True)
class LinearCohomologicalField:
    """Linear vector field Q with Q(x_a) = sum_b matrix[a, b] x_b,
    squaring to zero and raising the coordinate function degree by one
    (so matrix[a, b] != 0 requires deg b = deg a + 1)."""

    space: GradedVectorSpace
    matrix: Matrix

    def __post_init__(self):
        n = self.space.dim
        if self.matrix.shape != (n, n):
            raise ValueError("field matrix size mismatch")
        for a in range(n):
            for b in range(n):
                if self.matrix[a, b] != 0 and \
                        self.space.degree(b) != self.space.degree(a) + 1:
                    raise ValueError("field must raise degree by one")
        if not (self.matrix @ self.matrix).is_zero():
            raise ValueError("field must square to zero")

    def images(self) -> list[Polynomial]:
        return [Polynomial.build(self.space, [
            ((b,), self.matrix[a, b]) for b in range(self.space.dim)])
            for a in range(self.space.dim)]

    def apply(self, p: Polynomial) -> Polynomial:
        return derivation_apply(self.space, self.images(), p)


@dataclass(frozen=True)
class ConstraintSet:
    """Independent commuting linear functionals on an even degree-0
    symplectic space."""

    ambient: GradedSymplecticSpace
    constraints: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.ambient.form_degree != 0:
            raise ValueError("constraints live on a degree-0 space")
        if any(d != 0 for _, d in self.ambient.base.labels):
            raise ValueError("ambient must be purely even of degree zero")


def bfv_resolve(c: ConstraintSet) -> tuple[GradedSymplecticSpace, Polynomial,
                                           LinearCohomologicalField]:
    """Adjoin a ghost pair (b_i, c^i) per constraint and return the
    extended space, the resolution generator S = sum c^i phi_i, and its
    bracket derivation Q = {S, .}."""
    k = len(c.constraints)
    n = c.ambient.base.dim
    if k:
        if Subspace.from_span(n, list(c.constraints)).dim < k:
            raise DependentConstraints("constraints are linearly dependent")
        lam = c.ambient.bracket_matrix()
        for i in range(k):
            for j in range(k):
                br = sum(c.constraints[i][a] * lam[a, b] * c.constraints[j][b]
                         for a in range(n) for b in range(n))
                if br != 0:
                    raise NonAbelianBrackets(
                        "constraint brackets do not vanish")
    labels = list(c.ambient.base.labels)
    labels += [(f"gh_b{i}", -1) for i in range(k)]
    labels += [(f"gh_c{i}", 1) for i in range(k)]
    gv = GradedVectorSpace.make(labels)
    pair = Matrix.zeros(2 * k, 2 * k)
    rows = [list(r) for r in pair.entries]
    for i in range(k):
        rows[i][k + i] = Fraction(1)
        rows[k + i][i] = Fraction(1)
    ext = GradedSymplecticSpace(gv, block_diag(c.ambient.omega,
                                               Matrix.from_rows(rows)), 0)
    s = Polynomial.build(gv, [
        ((n + k + i, a), c.constraints[i][a])
        for i in range(k) for a in range(n)])
    q = field_from_hamiltonian(s, ext)
    return ext, s, q


def field_from_hamiltonian(s: Polynomial,
                           space: GradedSymplecticSpace) -> LinearCohomologicalField:
    """The linear field {s, .} of a quadratic generator s."""
    n = space.base.dim
    cols = []
    for a in range(n):
        img = poisson_bracket(s, Polynomial.generator(space.base, a), space)
        col = [Fraction(0)] * n
        for mono, coeff in img.terms:
            if len(mono) != 1:
                raise ValueError("generator is not quadratic")
            col[mono[0]] = coeff
        cols.append(col)
    return LinearCohomologicalField(space.base, Matrix.from_rows(cols))


def hamiltonian_of(q: LinearCohomologicalField,
                   space: GradedSymplecticSpace) -> Polynomial:
    """The quadratic S with {S, x_a} = Q(x_a), of degree form_degree + 1.

    For a linear field the candidate coefficient matrix is (1/2) Q^T
    omega; only its graded-symmetric part contributes, and the bracket
    relations are verified afterwards, so a field that is not graded
    Hamiltonian is rejected.
    """
    gv = space.base
    n = gv.dim
    m = (q.matrix.transpose() @ space.omega).scale(Fraction(1, 2))
    terms = []
    for a in range(n):
        for b in range(n):
            koszul = -1 if (gv.parity(a) and gv.parity(b)) else 1
            sym = (m[a, b] + koszul * m[b, a]) / 2
            if sym != 0:
                terms.append(((a, b), sym))
    s = Polynomial.build(gv, terms)
    for a in range(n):
        br = poisson_bracket(s, Polynomial.generator(gv, a), space)
        want = Polynomial.build(gv, [((b,), q.matrix[a, b])
                                     for b in range(n)])
        if not (br - want).is_zero():
            raise NotSymplecticField("field has no quadratic generator")
    return s


def bfv_cohomology(q: LinearCohomologicalField,
                   algebra: TruncatedPolynomialAlgebra, degree: int) -> int:
    """dim ker/im of the derivation on the truncated polynomial algebra
    at the given ghost degree."""
    gv = algebra.generators
    here = algebra.monomials_of_ghost_degree(degree)
    above = algebra.monomials_of_ghost_degree(degree + 1)
    below = algebra.monomials_of_ghost_degree(degree - 1)
    idx_here = {m: i for i, m in enumerate(here)}
    idx_above = {m: i for i, m in enumerate(above)}

    def q_matrix(src, tgt_idx, tgt_len):
        cols = []
        for m in src:
            p = q.apply(Polynomial.build(gv, [(m, Fraction(1))]))
            col = [Fraction(0)] * tgt_len
            for mono, cf in p.terms:
                col[tgt_idx[mono]] = cf
            cols.append(col)
        if not cols:
            return Matrix.zeros(tgt_len, 0)
        return Matrix.from_rows(cols).transpose()

    d_here = q_matrix(here, idx_above, len(above))
    d_below = q_matrix(below, idx_here, len(here))
    cocycles = kernel(d_here) if here else Subspace.zero(0)
    return cocycles.dim - image(d_below).dim


@dataclass(frozen=True)
class BVBFVPackage:
    bulk: GradedSymplecticSpace          # odd form of degree -1
    action: Polynomial                   # degree-0 generator
    action_hessian: Matrix               # same data as a plain quadratic form
    q_bulk: LinearCohomologicalField
    boundary: GradedSymplecticSpace      # even form of degree 0
    alpha_boundary: OneForm
    q_boundary: LinearCohomologicalField
    s_boundary: Polynomial
    pi: Matrix
    boundary_package: BoundaryPackage = field(compare=False)
    # bulk antifield coordinates sitting on boundary cells; vacuum
    # classes are taken modulo these directions (the antifield sector
    # lives on the dual complex relative to the boundary)
    boundary_antifields: tuple[int, ...] = ()
    # bulk field coordinates sitting on boundary cells; the fiber over
    # the trivial boundary point pins these directly, even where the
    # reduced pairing cannot see them
    boundary_fields: tuple[int, ...] = ()


def _graded_from_antisymmetric(plain: Matrix,
                               gv: GradedVectorSpace) -> Matrix:
    """Reinterpret a plainly antisymmetric coefficient matrix in the
    graded convention: entries above the diagonal are kept, the mirror
    entry follows graded antisymmetry (symmetric on odd-odd pairs)."""
    n = plain.rows
    out = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            out[a][b] = plain[a, b]
            s = -1 if (gv.parity(a) and gv.parity(b)) else 1
            out[b][a] = -s * plain[a, b]
    return Matrix.from_rows(out)


def _infer_boundary_degrees(projection: Matrix,
                            bulk: GradedVectorSpace) -> list[int]:
    degs = []
    for i in range(projection.rows):
        support = {bulk.degree(j) for j in range(projection.cols)
                   if projection[i, j] != 0}
        if len(support) != 1:
            raise ValueError("reduced coordinate mixes degrees")
        degs.append(next(iter(support)))
    return degs


def build_ed_package(m: CellComplex, d: int = 2,
                     bf: bool = False) -> BVBFVPackage:
    """Assemble the gauge theory package on a two-dimensional complex:
    ghosts on vertices, gauge field on edges, a dual-face field B, and
    their antifields; `bf` drops the B^2 metric term."""
    if d < 2:
        raise ValueError("the B field needs dimension at least 2")
    if m.dim != 2 or d != 2:
        raise ValueError("only two-dimensional bulk complexes are supported")
    if bf is False and (m.weights is None or not m.cubical):
        raise ValueError("the metric term needs a weighted cubical complex")
    nv, ne, nf = m.n_cells(0), m.n_cells(1), m.n_cells(2)
    n = 2 * nv + 2 * ne + 2 * nf
    # variable blocks: c, A, B, B+, A+, c+
    off_c, off_a, off_b = 0, nv, nv + ne
    off_bp, off_ap, off_cp = nv + ne + nf, nv + ne + 2 * nf, nv + 2 * ne + 2 * nf
    labels = [(f"c.{x}", 1) for x in m.cells[0]]
    labels += [(f"A.{x}", 0) for x in m.cells[1]]
    labels += [(f"B.{x}", 0) for x in m.cells[2]]
    labels += [(f"Bp.{x}", -1) for x in m.cells[2]]
    labels += [(f"Ap.{x}", -1) for x in m.cells[1]]
    labels += [(f"cp.{x}", -2) for x in m.cells[0]]
    gv = GradedVectorSpace.make(labels)

    d0 = coboundary(m, 0)
    d1 = coboundary(m, 1)
    star = hodge_star(m, 2) if not bf else None
    bd_e = set(m.boundary_indices(1))
    bd_v = set(m.boundary_indices(0))

    # bulk pairing: each field against its antifield
    omega = [[Fraction(0)] * n for _ in range(n)]
    for i in range(ne):
        omega[off_a + i][off_ap + i] = Fraction(1)
        omega[off_ap + i][off_a + i] = Fraction(-1)
    for i in range(nf):
        omega[off_b + i][off_bp + i] = Fraction(-1)
        omega[off_bp + i][off_b + i] = Fraction(1)
    for i in range(nv):
        omega[off_c + i][off_cp + i] = Fraction(-1)
        omega[off_cp + i][off_c + i] = Fraction(1)
    bulk = GradedSymplecticSpace(gv, Matrix.from_rows(omega), -1)

    # action Hessian: S = B.dA + (half) B*B + A+.(dc), commuting picture
    g = [[Fraction(0)] * n for _ in range(n)]
    for f in range(nf):
        for e in range(ne):
            g[off_b + f][off_a + e] += d1[f, e]
            g[off_a + e][off_b + f] += d1[f, e]
        if star is not None:
            g[off_b + f][off_b + f] += star[f, f]
    for e in range(ne):
        for v in range(nv):
            g[off_ap + e][off_c + v] += d0[e, v]
            g[off_c + v][off_ap + e] += d0[e, v]
    hessian = Matrix.from_rows(g)

    # graded action polynomial, factors ordered as written
    terms = []
    for f in range(nf):
        for e in range(ne):
            if d1[f, e] != 0:
                terms.append(((off_b + f, off_a + e), d1[f, e]))
        if star is not None:
            terms.append(((off_b + f, off_b + f), star[f, f] / 2))
    for e in range(ne):
        for v in range(nv):
            if d0[e, v] != 0:
                terms.append(((off_ap + e, off_c + v), d0[e, v]))
    action = Polynomial.build(gv, terms)

    # cohomological field; antifield rows conjugate to boundary cells are
    # dropped so that the boundary term survives in the variational split
    q = [[Fraction(0)] * n for _ in range(n)]
    for e in range(ne):
        for v in range(nv):
            q[off_a + e][off_c + v] = d0[e, v]
    for f in range(nf):
        for e in range(ne):
            q[off_bp + f][off_a + e] = d1[f, e]
        if star is not None:
            q[off_bp + f][off_b + f] = star[f, f]
    for e in range(ne):
        if e in bd_e:
            continue
        for f in range(nf):
            q[off_ap + e][off_b + f] = -d1[f, e]
    for v in range(nv):
        if v in bd_v:
            continue
        for e in range(ne):
            q[off_cp + v][off_ap + e] = d0[e, v]
    q_bulk = LinearCohomologicalField(gv, Matrix.from_rows(q))

    # variational boundary term: rows of the fields whose conjugates are
    # differentiated in S, at boundary cells; antifield rows stay bulk
    bset = set([off_a + e for e in bd_e] + [off_c + v for v in bd_v])
    alpha_tilde = OneForm(n, Matrix.from_rows([
        list(hessian.row(a)) if a in bset else [Fraction(0)] * n
        for a in range(n)]))
    pkg = preboundary_reduce(alpha_tilde)
    if not pkg.basic:
        raise ValueError("boundary one-form failed to descend")
    pi = pkg.projection
    bdegs = _infer_boundary_degrees(pi, gv)
    blabels = [(f"y{i}", bdegs[i]) for i in range(pi.rows)]
    bgv = GradedVectorSpace.make(blabels)
    # the graded reading of the reduced two-form takes the opposite
    # orientation; this makes the quadratic boundary generator satisfy
    # the master identity in its standard shape
    boundary = GradedSymplecticSpace(
        bgv, _graded_from_antisymmetric(pkg.boundary_space.omega.scale(-1),
                                        bgv), 0)
    q_b = project_vector_field(q_bulk.matrix, pkg)
    q_boundary = LinearCohomologicalField(bgv, q_b)
    s_boundary = hamiltonian_of(q_boundary, boundary)
    bd_anti = tuple(sorted([off_ap + e for e in bd_e]
                           + [off_cp + v for v in bd_v]))
    bd_fields = tuple(sorted(bset))
    return BVBFVPackage(bulk, action, hessian, q_bulk, boundary, pkg.alpha,
                        q_boundary, s_boundary, pi, pkg, bd_anti, bd_fields)


def _pullback(p: Polynomial, pi: Matrix,
              bulk: GradedVectorSpace) -> Polynomial:
    """Substitute each boundary generator by its linear expression in
    bulk coordinates."""
    images = [Polynomial.build(bulk, [((j,), pi[i, j])
                                      for j in range(pi.cols)])
              for i in range(pi.rows)]
    out_terms: list[tuple[Monomial, Fraction]] = []
    for mono, coeff in p.terms:
        prod = Polynomial.constant(bulk, coeff)
        for i in mono:
            prod = prod * images[i]
        out_terms.extend(prod.terms)
    return Polynomial.build(bulk, out_terms)


def _contract(alpha: OneForm, q: Matrix,
              gv: GradedVectorSpace) -> Polynomial:
    """iota of a linear field into a linear one-form: coefficient times
    inserted component, in that order."""
    n = alpha.ambient_dim
    terms = []
    for a in range(n):
        for i in range(n):
            if alpha.coeff[a, i] == 0:
                continue
            for j in range(n):
                if q[a, j] != 0:
                    terms.append(((i, j), alpha.coeff[a, i] * q[a, j]))
    return Polynomial.build(gv, terms)


@dataclass(frozen=True)
class CheckReport:
    residuals: dict
    passed: bool


def check_bvbfv(p: BVBFVPackage) -> CheckReport:
    """Verify the five structural identities exactly; residuals are the
    offending matrices or polynomials, zero when the identity holds.

    (i)   contraction of Q into omega equals dS minus the pulled-back
          boundary one-form;
    (ii)  the restriction intertwines Q and the boundary field;
    (iii) both fields square to zero;
    (iv)  Q(S) equals the pullback of twice the boundary generator minus
          the contraction of the boundary field into the boundary
          one-form;
    (v)   the Lie derivative of omega along Q equals minus the
          pulled-back boundary two-form (the transpose of (i)).
    """
    omega = p.bulk.omega
    q = p.q_bulk.matrix
    g = p.action_hessian
    pi = p.pi
    c_bd = p.alpha_boundary.coeff
    res = {}

    res["fundamental"] = (q.transpose() @ omega) - g \
        + pi.transpose() @ c_bd.transpose() @ pi
    res["restriction"] = pi @ q - p.q_boundary.matrix @ pi
    res["nilpotency_bulk"] = q @ q
    res["nilpotency_boundary"] = p.q_boundary.matrix @ p.q_boundary.matrix

    qs = p.q_bulk.apply(p.action)
    rhs = p.s_boundary.scale(2) - _contract(p.alpha_boundary,
                                            p.q_boundary.matrix,
                                            p.boundary.base)
    res["master"] = qs - _pullback(rhs, pi, p.bulk.base)

    res["lie_derivative"] = (q.transpose() @ omega + omega @ q) \
        + pi.transpose() @ p.boundary_package.boundary_space.omega @ pi

    passed = all(r.is_zero() for r in res.values())
    return CheckReport(res, passed)


def moduli_of_vacua(p: BVBFVPackage) -> dict[int, int]:
    """Graded dimensions of the zero locus of Q over the trivial
    classical boundary point, modulo gauge directions.

    The fiber pins the degree-0 reduced boundary coordinates and the
    field traces on boundary cells; antifield traces are quotiented out
    instead (the antifield sector is relative to the boundary). Gauge
    directions have vanishing field traces and flow inside the fiber.
    """
    gv = p.bulk.base
    n = gv.dim
    q = p.q_bulk.matrix
    bdeg = p.boundary.base
    pi0 = Matrix.from_rows(
        [list(p.pi.row(i)) for i in range(p.pi.rows)
         if bdeg.degree(i) == 0]) if p.pi.rows else Matrix.zeros(0, n)
    if pi0.rows == 0:
        pi0 = Matrix.zeros(0, n)
    trace = Matrix.from_rows([unit_vec(n, i) for i in p.boundary_fields]) \
        if p.boundary_fields else Matrix.zeros(0, n)
    locus = kernel(q.vstack(pi0).vstack(trace))
    w = kernel((pi0 @ q).vstack(trace @ q).vstack(trace))
    out = {}
    for d in sorted(set(deg for _, deg in gv.labels)):
        coords = Subspace.from_span(n, [unit_vec(n, i)
                                        for i in gv.indices_of_degree(d)])
        rel = [unit_vec(n, i) for i in p.boundary_antifields
               if gv.degree(i) == d]
        locus_d = intersect(locus, coords)
        gauge_src = intersect(w, Subspace.from_span(
            n, [unit_vec(n, i) for i in gv.indices_of_degree(d + 1)]))
        moved = Subspace.from_span(
            n, [q.apply(b) for b in gauge_src.basis] + rel)
        out[d] = sum_spaces(locus_d,
                            Subspace.from_span(n, rel)).dim - moved.dim
    return out


@dataclass(frozen=True)
class CornerData:
    space: GradedVectorSpace
    q_corner: Matrix
    package: BoundaryPackage


def corner_extend(sigma: CellComplex) -> CornerData:
    """Reduce the boundary generator pairing ghosts with the dual-field
    divergence on a piece Sigma with corners: one (ghost, field) pair per
    corner cell survives and the corner field vanishes."""
    if not any(sigma.boundary_indices(k) for k in range(sigma.dim + 1)):
        empty = GradedVectorSpace.make([])
        pkg = preboundary_reduce(OneForm.zero(0))
        empty_pkg = preboundary_reduce(OneForm(0, Matrix.zeros(0, 0)))
        return CornerData(empty, Matrix.zeros(0, 0), empty_pkg)
    nv, ne = sigma.n_cells(0), sigma.n_cells(1)
    n = nv + ne  # ghosts on vertices, dual field on edges
    dd = sigma.boundary_op(1)
    g = [[Fraction(0)] * n for _ in range(n)]
    for v in range(nv):
        for e in range(ne):
            g[v][nv + e] += dd[v, e]
            g[nv + e][v] += dd[v, e]
    corner_v = set(sigma.boundary_indices(0))
    coeff = Matrix.from_rows([
        g[a] if a in corner_v else [Fraction(0)] * n for a in range(n)])
    pkg = preboundary_reduce(OneForm(n, coeff))
    degs = []
    for i in range(pkg.projection.rows):
        support = {0 if j >= nv else 1 for j in range(n)
                   if pkg.projection[i, j] != 0}
        degs.append(next(iter(support)))
    gv = GradedVectorSpace.make([(f"z{i}", degs[i]) for i in range(len(degs))])
    q_corner = project_vector_field(Matrix.zeros(n, n), pkg)
    return CornerData(gv, q_corner, pkg)


def boundary_bfv_reduction(sigma: CellComplex, d: int) -> dict[int, int]:
    """Cohomology of the boundary field on linear functionals, per ghost
    degree, for the gauge theory on a closed Sigma of dimension d - 1."""
    for k in range(sigma.dim + 1):
        if sigma.boundary_indices(k):
            raise ValueError("sigma must be closed")
    nv, ne = sigma.n_cells(0), sigma.n_cells(1)
    n = nv + 2 * ne + nv  # c, A, B (dual), A+ (dual top)
    off_c, off_a, off_b, off_ap = 0, nv, nv + ne, nv + 2 * ne
    degs = [1] * nv + [0] * ne + [0] * ne + [-1] * nv
    d0 = coboundary(sigma, 0)
    dd = sigma.boundary_op(1)
    q = [[Fraction(0)] * n for _ in range(n)]
    for e in range(ne):
        for v in range(nv):
            q[off_a + e][off_c + v] = d0[e, v]
    for v in range(nv):
        for e in range(ne):
            q[off_ap + v][off_b + e] = dd[v, e]
    qm = Matrix.from_rows(q)
    # differential on linear functionals is the transpose, raising degree
    out = {}
    for g in sorted(set(degs)):
        here = [i for i in range(n) if degs[i] == g]
        above = [i for i in range(n) if degs[i] == g + 1]
        below = [i for i in range(n) if degs[i] == g - 1]
        d_here = qm.transpose().submatrix(above, here)
        d_below = qm.transpose().submatrix(here, below)
        out[g] = kernel(d_here).dim - image(d_below).dim
    return out
