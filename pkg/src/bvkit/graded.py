"""Graded-commutative polynomial algebra over Q with Koszul signs,
graded derivatives, and the Poisson bracket of a graded symplectic form.

Monomials are tuples of generator indices kept in nondecreasing index
order; reordering odd generators tracks the Koszul sign and repeated odd
generators annihilate the monomial. Variations and derivatives act from
the left unless named otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .numkit import Matrix, frac, invert

Monomial = tuple[int, ...]


class TruncationOverflow(ValueError):
    pass


@dataclass(frozen=True)
class GradedVectorSpace:
    """Ordered coordinate list with integer degrees; parity = degree mod 2."""

    labels: tuple[tuple[str, int], ...]

    @staticmethod
    def make(labels: Iterable[tuple[str, int]]) -> "GradedVectorSpace":
        return GradedVectorSpace(tuple((str(n), int(d)) for n, d in labels))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def degree(self, i: int) -> int:
        return self.labels[i][1]

    def parity(self, i: int) -> int:
        return self.labels[i][1] % 2

    def name(self, i: int) -> str:
        return self.labels[i][0]

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.labels):
            if n == name:
                return i
        raise KeyError(name)

    def components(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for _, d in self.labels:
            out[d] = out.get(d, 0) + 1
        return out

    def indices_of_degree(self, d: int) -> list[int]:
        return [i for i, (_, deg) in enumerate(self.labels) if deg == d]


def normalize_monomial(space: GradedVectorSpace,
                       word: Iterable[int]) -> tuple[Optional[Monomial], int]:
    """Sort a generator word; returns (monomial, Koszul sign) or (None, 0)
    when a repeated odd generator kills it."""
    w = list(word)
    sign = 1
    # insertion sort, counting odd-odd transpositions
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            if space.parity(w[j - 1]) and space.parity(w[j]):
                sign = -sign
            w[j - 1], w[j] = w[j], w[j - 1]
            j -= 1
    for a, b in zip(w, w[1:]):
        if a == b and space.parity(a):
            return None, 0
    return tuple(w), sign


@dataclass(frozen=True)
class Polynomial:
    space: GradedVectorSpace
    terms: tuple[tuple[Monomial, Fraction], ...]

    @staticmethod
    def build(space: GradedVectorSpace,
              terms: Iterable[tuple[Iterable[int], Fraction]]) -> "Polynomial":
        acc: dict[Monomial, Fraction] = {}
        for word, coeff in terms:
            mono, sign = normalize_monomial(space, word)
            if mono is None or coeff == 0:
                continue
            acc[mono] = acc.get(mono, Fraction(0)) + sign * frac(coeff)
        cleaned = tuple(sorted((m, c) for m, c in acc.items() if c != 0))
        return Polynomial(space, cleaned)

    @staticmethod
    def zero(space: GradedVectorSpace) -> "Polynomial":
        return Polynomial(space, ())

    @staticmethod
    def constant(space: GradedVectorSpace, c) -> "Polynomial":
        return Polynomial.build(space, [((), frac(c))])

    @staticmethod
    def generator(space: GradedVectorSpace, i: int) -> "Polynomial":
        return Polynomial.build(space, [((i,), Fraction(1))])

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial.build(self.space,
                                list(self.terms) + list(other.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "Polynomial":
        c = frac(c)
        return Polynomial(self.space, tuple(
            (m, c * x) for m, x in self.terms)) if c else Polynomial.zero(self.space)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        terms = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                terms.append((m1 + m2, c1 * c2))
        return Polynomial.build(self.space, terms)

    def monomial_degree(self, m: Monomial) -> int:
        return sum(self.space.degree(i) for i in m)

    def degrees(self) -> set[int]:
        return {self.monomial_degree(m) for m, _ in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> Optional[int]:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("polynomial is not homogeneous")
        return next(iter(ds)) if ds else None

    def max_word_length(self) -> int:
        return max((len(m) for m, _ in self.terms), default=0)


def left_derivative(p: Polynomial, gen: int) -> Polynomial:
    """d/dx_gen acting from the left (signs from factors passed over)."""
    space = p.space
    terms = []
    for mono, coeff in p.terms:
        for pos, g in enumerate(mono):
            if g != gen:
                continue
            sign = 1
            if space.parity(gen):
                passed = sum(space.parity(mono[t]) for t in range(pos))
                sign = -1 if passed % 2 else 1
            terms.append((mono[:pos] + mono[pos + 1:], sign * coeff))
    return Polynomial.build(space, terms)


def right_derivative(p: Polynomial, gen: int) -> Polynomial:
    """d/dx_gen acting from the right."""
    space = p.space
    terms = []
    for mono, coeff in p.terms:
        for pos, g in enumerate(mono):
            if g != gen:
                continue
            sign = 1
            if space.parity(gen):
                passed = sum(space.parity(mono[t])
                             for t in range(pos + 1, len(mono)))
                sign = -1 if passed % 2 else 1
            terms.append((mono[:pos] + mono[pos + 1:], sign * coeff))
    return Polynomial.build(space, terms)


def derivation_apply(space: GradedVectorSpace, images: list[Polynomial],
                     p: Polynomial) -> Polynomial:
    """Extend generator images x_i -> images[i] as a left derivation of
    the parity carried by the images."""
    out = Polynomial.zero(space)
    for i in range(space.dim):
        if not images[i].is_zero():
            out = out + images[i] * left_derivative(p, i)
    return out


@dataclass(frozen=True)
class GradedSymplecticSpace:
    """Graded coordinates with a constant-coefficient symplectic pairing.

    omega[a, b] is the pairing of the a-th and b-th coordinate directions;
    nonzero entries require deg a + deg b = form_degree and the graded
    antisymmetry omega[b, a] = -(-1)^(|a||b|) omega[a, b].
    """

    base: GradedVectorSpace
    omega: Matrix
    form_degree: int

    def __post_init__(self):
        n = self.base.dim
        if self.omega.shape != (n, n):
            raise ValueError("omega shape mismatch")
        for a in range(n):
            for b in range(n):
                x = self.omega[a, b]
                if x == 0:
                    continue
                if self.base.degree(a) + self.base.degree(b) != self.form_degree:
                    raise ValueError("omega pairs wrong degrees")
                s = -1 if (self.base.parity(a) and self.base.parity(b)) else 1
                if self.omega[b, a] != -s * x:
                    raise ValueError("omega is not graded antisymmetric")
        inv = invert(self.omega)
        if inv is None:
            raise ValueError("omega is degenerate")
        object.__setattr__(self, "_bracket_cache", inv)

    def bracket_matrix(self) -> Matrix:
        """Lambda with {x_a, x_b} = Lambda[a, b]."""
        return self._bracket_cache


def poisson_bracket(f: Polynomial, g: Polynomial,
                    space: GradedSymplecticSpace,
                    max_total_degree: Optional[int] = None) -> Polynomial:
    """{f, g} = sum_ab (right d f / d x_a) Lambda[a,b] (left d g / d x_b)."""
    lam = space.bracket_matrix()
    n = space.base.dim
    out = Polynomial.zero(space.base)
    for a in range(n):
        fa = right_derivative(f, a)
        if fa.is_zero():
            continue
        for b in range(n):
            if lam[a, b] == 0:
                continue
            gb = left_derivative(g, b)
            if gb.is_zero():
                continue
            out = out + (fa * gb).scale(lam[a, b])
    if max_total_degree is not None and out.max_word_length() > max_total_degree:
        raise TruncationOverflow("bracket exceeds the truncation degree")
    return out


@dataclass(frozen=True)
class TruncatedPolynomialAlgebra:
    """Monomial basis of total word length at most max_total_degree."""

    generators: GradedVectorSpace
    max_total_degree: int

    def monomials(self) -> list[Monomial]:
        out: list[Monomial] = [()]
        frontier: list[Monomial] = [()]
        for _ in range(self.max_total_degree):
            nxt = []
            for m in frontier:
                start = m[-1] if m else 0
                for i in range(start, self.generators.dim):
                    mono, sign = normalize_monomial(self.generators, m + (i,))
                    if mono is not None and sign == 1 and mono == m + (i,):
                        nxt.append(mono)
            out.extend(nxt)
            frontier = nxt
        return out

    def monomials_of_ghost_degree(self, d: int) -> list[Monomial]:
        gv = self.generators
        return [m for m in self.monomials()
                if sum(gv.degree(i) for i in m) == d]
