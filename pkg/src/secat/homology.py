"""Cohomology of finitely presented cdgas, induced maps, and ideal nilpotency.

Degree conventions: for a presentation with relations the graded pieces are
faithful only up to the cap, and computing H^d needs the differential into
degree d+1, so a homology request must satisfy hi + 1 <= cap.  Free
presentations are exact in every degree and carry no such restriction.

Representatives are canonical: cycles are reduced against the reduced-echelon
basis of the boundaries, and the surviving reduced cycles are echelonized
again, so the chosen basis of H^d does not depend on enumeration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import ZERO, Echelon, kernel_combos, zero_vector
from .core import (AlgebraElement, CdgaError, CdgaMorphism, DegreeMismatch,
                   Presentation, PresentationMismatch, RangeExceedsCap)

_F0 = Fraction(0)
_F1 = Fraction(1)


class HomologyReport:
    """Cohomology of a presentation over a degree range [lo, hi]."""

    def __init__(self, pres: Presentation, lo: int, hi: int):
        if lo < 0 or hi < lo:
            raise CdgaError(f"bad homology range [{lo}, {hi}]")
        if not pres.is_free and hi + 1 > pres.cap:
            raise RangeExceedsCap(
                f"homology up to degree {hi} needs cap >= {hi + 1}, have {pres.cap}")
        self.pres = pres
        self.lo = lo
        self.hi = hi
        self._boundaries: dict[int, Echelon] = {}
        self._classes: dict[int, Echelon] = {}
        self._reps: dict[int, list[AlgebraElement]] = {}
        for d in range(lo, hi + 1):
            self._compute_degree(d)

    def _differential_vectors(self, d: int):
        """Images under d of the degree-d basis, as degree-(d+1) vectors."""
        P = self.pres
        out = []
        for mono in P.basis(d):
            img = P.d(AlgebraElement(P, {mono: _F1}))
            out.append(P.to_vector(img, d + 1))
        return out

    def _boundary_echelon(self, d: int) -> Echelon:
        ech = self._boundaries.get(d)
        if ech is not None:
            return ech
        P = self.pres
        ech = Echelon(P.dim(d))
        if d >= 1:
            for v in self._differential_vectors(d - 1):
                ech.add(v)
        self._boundaries[d] = ech
        return ech

    def _compute_degree(self, d: int):
        P = self.pres
        n = P.dim(d)
        if n == 0:
            self._classes[d] = Echelon(0)
            self._reps[d] = []
            return
        cycles = kernel_combos(self._differential_vectors(d), P.dim(d + 1))
        bech = self._boundary_echelon(d)
        hech = Echelon(n)
        for v in cycles:
            hech.add(bech.reduce(v))
        self._classes[d] = hech
        self._reps[d] = [P.from_vector(d, row) for row in hech.basis()]

    def _check_range(self, d: int):
        if d < self.lo or d > self.hi:
            raise RangeExceedsCap(
                f"degree {d} outside computed homology range [{self.lo}, {self.hi}]")

    def betti(self, d: int) -> int:
        self._check_range(d)
        return self._classes[d].rank

    def betti_table(self) -> dict[int, int]:
        return {d: self._classes[d].rank for d in range(self.lo, self.hi + 1)}

    def representatives(self, d: int) -> list[AlgebraElement]:
        self._check_range(d)
        return list(self._reps[d])

    def _cycle_vector(self, el: AlgebraElement, d: int):
        P = self.pres
        if el.pres is not P:
            raise PresentationMismatch("element belongs to a different presentation")
        v = P.to_vector(el, d)
        img = P.d(el)
        if img.terms:
            raise CdgaError(f"element {el} is not a cycle: d gives {img}")
        return v

    def reduce(self, el: AlgebraElement, d: int | None = None) -> AlgebraElement:
        """Canonical representative of the class of a cycle."""
        if not el.terms:
            return el
        d = el.degree() if d is None else d
        self._check_range(d)
        v = self._cycle_vector(el, d)
        return self.pres.from_vector(d, self._boundary_echelon(d).reduce(v))

    def class_coords(self, el: AlgebraElement, d: int | None = None) -> list[Fraction]:
        """Coordinates of the class of a cycle in the canonical basis of H^d."""
        d = el.degree() if d is None and el.terms else d
        if d is None:
            raise DegreeMismatch("zero element needs an explicit degree")
        self._check_range(d)
        if not el.terms:
            return zero_vector(self._classes[d].rank)
        v = self._boundary_echelon(d).reduce(self._cycle_vector(el, d))
        coords = self._classes[d].coordinates(v)
        if coords is None:
            raise CdgaError("cycle does not reduce into the computed class space")
        return coords

    def is_zero_class(self, el: AlgebraElement, d: int | None = None) -> bool:
        return not self.reduce(el, d).terms

    def total_dim(self, positive_only: bool = False) -> int:
        return sum(self._classes[d].rank
                   for d in range(self.lo, self.hi + 1)
                   if not (positive_only and d == 0))

    def __repr__(self):
        return f"HomologyReport({self.pres!r}, betti={self.betti_table()})"


def homology(P: Presentation, lo: int = 0, hi: int | None = None) -> HomologyReport:
    if hi is None:
        hi = P.cap - 1 if not P.is_free else P.cap
    return HomologyReport(P, lo, hi)


# ---------------------------------------------------------------------------
# induced maps


def induced_matrix(phi: CdgaMorphism, H_src: HomologyReport, H_tgt: HomologyReport,
                   d: int) -> list[list[Fraction]]:
    """Columns are the coordinates of H(phi) of the source basis classes."""
    cols = []
    for rep in H_src.representatives(d):
        cols.append(H_tgt.class_coords(phi.apply(rep), d))
    return cols


def quasi_iso_failure(phi: CdgaMorphism, lo: int, hi: int,
                      H_src: HomologyReport | None = None,
                      H_tgt: HomologyReport | None = None):
    """None when H(phi) is bijective in [lo, hi]; else (degree, reason)."""
    H_src = H_src or homology(phi.source, lo, hi)
    H_tgt = H_tgt or homology(phi.target, lo, hi)
    for d in range(lo, hi + 1):
        bs, bt = H_src.betti(d), H_tgt.betti(d)
        if bs != bt:
            return d, f"betti mismatch in degree {d}: {bs} vs {bt}"
        if bs == 0:
            continue
        ech = Echelon(bt)
        for col in induced_matrix(phi, H_src, H_tgt, d):
            ech.add(col)
        if ech.rank != bs:
            return d, f"induced map not injective in degree {d}"
    return None


def is_quasi_iso(phi: CdgaMorphism, lo: int, hi: int, **kw) -> bool:
    return quasi_iso_failure(phi, lo, hi, **kw) is None


# ---------------------------------------------------------------------------
# kernels of surjections


def surjectivity_failure(phi: CdgaMorphism, hi: int) -> int | None:
    return phi.is_surjective_up_to(hi)


def kernel_basis(phi: CdgaMorphism, d: int) -> list[AlgebraElement]:
    """Basis of the degree-d piece of ker phi (echelonized, canonical)."""
    P, B = phi.source, phi.target
    monos = P.basis(d)
    if d > (B.cap if B.is_free else B.cap - 1):
        # beyond the target's evaluable range the kernel is only computable
        # when the target provably vanishes there; then it is everything
        btop = B.top_degree_if_finite()
        if btop is not None and d > btop:
            return [AlgebraElement(P, {m: _F1}) for m in monos]
        raise RangeExceedsCap(
            f"kernel in degree {d} needs the target evaluable there")
    images = [B.to_vector(phi.apply_raw({m: _F1}), d) for m in monos]
    return [P.from_vector(d, combo) for combo in kernel_combos(images, B.dim(d))]


def kernel_ideal_generators(phi: CdgaMorphism, hi: int) -> list[AlgebraElement]:
    """A finite ideal generating set for ker phi in degrees <= hi.

    Degrees ascend; in each degree the span of products of the generators
    found so far is eliminated first, so only genuinely new kernel directions
    become generators.  Every returned element is verified to map to zero.
    """
    P, B = phi.source, phi.target
    b_hi = B.cap if B.is_free else B.cap - 1
    gens: list[AlgebraElement] = []
    for d in range(1, hi + 1):
        n = P.dim(d)
        if n == 0:
            continue
        span = Echelon(n)
        for g in gens:
            e = g.degree()
            if e is None or e > d:
                continue
            for mono in P.basis(d - e):
                prod = g * AlgebraElement(P, {mono: _F1})
                if prod.terms:
                    span.add(P.to_vector(prod, d))
        for el in kernel_basis(phi, d):
            v = span.reduce(P.to_vector(el, d))
            red = P.from_vector(d, v)
            if red.terms:
                # beyond b_hi the target vanishes (kernel_basis checked), so
                # re-applying phi there is neither possible nor needed
                if d <= b_hi and phi.apply(red).terms:
                    raise CdgaError("kernel reduction produced a non-kernel element")
                gens.append(red)
                span.add(P.to_vector(red, d))
    return gens


# ---------------------------------------------------------------------------
# graded views: a common face for "the algebra itself" and "its homology"


class GradedView:
    """Graded vector-space access with multiplication, degrees 0..hi."""

    hi: int

    def dim(self, d: int) -> int:
        raise NotImplementedError

    def basis_elements(self, d: int) -> list[AlgebraElement]:
        raise NotImplementedError

    def to_coords(self, el: AlgebraElement, d: int) -> list[Fraction]:
        raise NotImplementedError

    def mul(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        raise NotImplementedError

    def one(self) -> AlgebraElement:
        raise NotImplementedError


class PresentationView(GradedView):
    def __init__(self, P: Presentation, hi: int | None = None):
        self.pres = P
        self.hi = P.cap if hi is None else hi
        if not P.is_free and self.hi > P.cap:
            raise RangeExceedsCap("view range exceeds presentation cap")

    def dim(self, d: int) -> int:
        return self.pres.dim(d)

    def basis_elements(self, d: int) -> list[AlgebraElement]:
        return [AlgebraElement(self.pres, {m: _F1}) for m in self.pres.basis(d)]

    def to_coords(self, el, d):
        return self.pres.to_vector(el, d)

    def mul(self, a, b):
        return a * b

    def one(self):
        return self.pres.one()


class HomologyView(GradedView):
    """Homology as a graded algebra; products reduce to canonical cycles."""

    def __init__(self, H: HomologyReport):
        self.H = H
        self.pres = H.pres
        self.hi = H.hi

    def dim(self, d: int) -> int:
        return self.H.betti(d)

    def basis_elements(self, d: int) -> list[AlgebraElement]:
        return self.H.representatives(d)

    def to_coords(self, el, d):
        return self.H.class_coords(el, d)

    def mul(self, a, b):
        prod = a * b
        if not prod.terms:
            return prod
        return self.H.reduce(prod)

    def one(self):
        return self.H.reduce(self.pres.one(), 0)


# ---------------------------------------------------------------------------
# ideal powers and nilpotency inside a view


@dataclass
class SpanningProduct:
    element: AlgebraElement
    degree: int
    factors: tuple[int, ...]  # indices into the generating set


class IdealPowers:
    """Incremental spanning data for powers of an ideal inside a view.

    Level m keeps a pruned list of m-fold products of the generators; the
    degree-d piece of the m-th power is spanned by (product * basis element)
    over the lower-degree view basis.  Pruning keeps only products that grow
    the echelon of the products themselves, which never shrinks the module
    span.  Every kept product carries its factor chain for witnesses.
    """

    def __init__(self, view: GradedView, generators: list[AlgebraElement]):
        self.view = view
        self.generators = []
        self.gen_degrees = []
        for g in generators:
            if not g.terms:
                continue
            d = g.degree()
            if d is None or d < 1:
                raise CdgaError("ideal generators must be homogeneous of positive degree")
            if d > view.hi:
                continue
            self.generators.append(g)
            self.gen_degrees.append(d)
        self.levels: list[list[SpanningProduct]] = []

    def _prune(self, products: list[SpanningProduct]) -> list[SpanningProduct]:
        echs: dict[int, Echelon] = {}
        kept = []
        for p in products:
            ech = echs.get(p.degree)
            if ech is None:
                ech = Echelon(self.view.dim(p.degree))
                echs[p.degree] = ech
            if ech.add(self.view.to_coords(p.element, p.degree)) is not None:
                kept.append(p)
        return kept

    def level(self, m: int) -> list[SpanningProduct]:
        """Pruned spanning products for the m-th power (m >= 1)."""
        if m < 1:
            raise CdgaError("ideal power level must be >= 1")
        while len(self.levels) < m:
            if not self.levels:
                first = [SpanningProduct(g, dg, (i,))
                         for i, (g, dg) in enumerate(zip(self.generators,
                                                         self.gen_degrees))]
                self.levels.append(self._prune(first))
                continue
            prev = self.levels[-1]
            nxt = []
            for p in prev:
                for i, (g, dg) in enumerate(zip(self.generators, self.gen_degrees)):
                    if i < p.factors[-1]:
                        continue  # commutative up to sign: ordered factor chains suffice
                    nd = p.degree + dg
                    if nd > self.view.hi:
                        continue
                    el = self.view.mul(p.element, g)
                    if el.terms:
                        nxt.append(SpanningProduct(el, nd, p.factors + (i,)))
            self.levels.append(self._prune(nxt))
        return self.levels[m - 1]

    def span_echelon(self, m: int, d: int) -> Echelon:
        """Echelon of the degree-d piece of the m-th power."""
        ech = Echelon(self.view.dim(d))
        for p in self.level(m):
            if p.degree > d:
                continue
            for b in self.view.basis_elements(d - p.degree):
                el = self.view.mul(p.element, b)
                if el.terms:
                    ech.add(self.view.to_coords(el, d))
        return ech

    def is_zero(self, m: int) -> bool:
        return not self.level(m)

    def contains(self, m: int, el: AlgebraElement, d: int) -> bool:
        return self.span_echelon(m, d).contains(self.view.to_coords(el, d))


@dataclass
class NilpotencyResult:
    """nil = largest m with I^m != 0 inside degrees <= range_hi.

    `range_relative` is False only when the ambient graded space is certified
    to vanish above range_hi, making the value absolute.
    """
    nil: int
    range_hi: int
    range_relative: bool
    witness: AlgebraElement | None = None
    witness_factors: tuple[int, ...] = ()
    generators: list = field(default_factory=list)


def nil_ideal(view: GradedView, generators: list[AlgebraElement],
              *, range_relative: bool = True) -> NilpotencyResult:
    powers = IdealPowers(view, generators)
    if not powers.generators:
        return NilpotencyResult(0, view.hi, range_relative, generators=[])
    m = 1
    witness = None
    while True:
        lvl = powers.level(m)
        if not lvl:
            break
        witness = lvl[0]
        m += 1
    return NilpotencyResult(m - 1, view.hi, range_relative,
                            witness=witness.element if witness else None,
                            witness_factors=witness.factors if witness else (),
                            generators=list(powers.generators))


def positive_part_generators(view: GradedView) -> list[AlgebraElement]:
    """Basis elements of all positive degrees up to the view range."""
    out = []
    for d in range(1, view.hi + 1):
        out.extend(view.basis_elements(d))
    return out


# ---------------------------------------------------------------------------
# Poincare duality


@dataclass
class DualityResult:
    satisfied: bool
    top: int
    reason: str = ""


def poincare_duality_check(H: HomologyReport, top: int) -> DualityResult:
    """Does the cup pairing H^k x H^{top-k} -> H^{top} stay nondegenerate?

    `top` must be a certified top degree: the caller is responsible for
    knowing that H vanishes above it.  The check needs the full range [0, top]
    inside the report.
    """
    if top > H.hi:
        raise RangeExceedsCap("duality check needs homology up to the top degree")
    if H.betti(top) != 1:
        return DualityResult(False, top, f"dim H^{top} = {H.betti(top)} != 1")
    for k in range(0, top + 1):
        bk, bo = H.betti(k), H.betti(top - k)
        if bk != bo:
            return DualityResult(False, top,
                                 f"betti {bk} in degree {k} vs {bo} opposite")
        if bk == 0:
            continue
        ech = Echelon(bk)
        for r in H.representatives(k):
            row = []
            for s in H.representatives(top - k):
                prod = r * s
                row.append(H.class_coords(prod, top)[0] if prod.terms else ZERO)
            ech.add(row)
        if ech.rank != bk:
            return DualityResult(False, top,
                                 f"degenerate pairing in degree {k}")
    return DualityResult(True, top)


# ---------------------------------------------------------------------------
# subcomplexes spanned inside a presentation


def span_complex_homology(P: Presentation, spans: dict[int, Echelon],
                          lo: int, hi: int) -> dict[int, int]:
    """Betti numbers of a d-stable span inside P, degrees lo..hi.

    `spans[d]` is an echelon of degree-d coordinate vectors.  Raises when the
    differential leaves the span, since then it is not a subcomplex.
    """
    betti = {}
    for d in range(lo, hi + 1):
        sp = spans.get(d, Echelon(P.dim(d)))
        nxt = spans.get(d + 1, Echelon(P.dim(d + 1)))
        images = []
        for row in sp.basis():
            img = P.d(P.from_vector(d, row))
            v = P.to_vector(img, d + 1) if img.terms else zero_vector(P.dim(d + 1))
            if img.terms and not nxt.contains(v):
                raise CdgaError(f"differential leaves the span in degree {d}")
            images.append(v)
        cycle_count = len(kernel_combos(images, P.dim(d + 1)))
        prev = spans.get(d - 1, Echelon(P.dim(d - 1)))
        bech = Echelon(P.dim(d))
        for row in prev.basis():
            img = P.d(P.from_vector(d - 1, row))
            if img.terms:
                bech.add(P.to_vector(img, d))
        betti[d] = cycle_count - bech.rank
    return betti
