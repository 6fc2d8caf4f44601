"""Finitely presented graded-commutative differential algebras over Q.

Representation constraints:

* A monomial is a tuple ((name, exp), ...) with generators sorted by the
  canonical order (degree, name); odd generators carry exponent 1 and the
  Koszul sign of sorting a product is absorbed into the coefficient, so two
  equal elements always have literally equal term dictionaries.
* Elements are reduced eagerly modulo the relation ideal.  The ideal is
  handled degree by degree: for each degree up to the presentation cap a
  reduced row echelon basis of its graded piece is computed once and cached,
  and reduction is elimination against that basis.  No Groebner machinery.
* A presentation carries an explicit degree cap.  Graded pieces up to the cap
  are faithful; operations that would need information beyond the cap raise
  RangeExceedsCap instead of answering silently.

All coefficients are fractions.Fraction; floats never appear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .linalg import Echelon, zero_vector

Rational = Fraction
Monomial = tuple  # tuple[tuple[str, int], ...]

# ---------------------------------------------------------------------------
# errors


class CdgaError(Exception):
    """Base class for all algebra-level failures."""


class DegreeMismatch(CdgaError):
    pass


class Inhomogeneous(CdgaError):
    pass


class NotSquareZero(CdgaError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class IdealNotClosed(CdgaError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PresentationMismatch(CdgaError):
    pass


class NotFree(CdgaError):
    pass


class RangeExceedsCap(CdgaError):
    pass


class NotSimplyConnected(CdgaError):
    pass


class NotSurjective(CdgaError):
    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class NotQuasiIso(CdgaError):
    pass


class PedigreeMissing(CdgaError):
    pass


class SeriesNonterminating(CdgaError):
    pass


class TopDegreeMismatch(CdgaError):
    pass


# ---------------------------------------------------------------------------
# generators and the sign engine


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 1:
            raise DegreeMismatch(f"generator {self.name!r} must have degree >= 1")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class _SignEngine:
    """Monomial arithmetic bound to a fixed generator list."""

    def __init__(self, generators: tuple[Generator, ...]):
        self.generators = generators
        by_rank = sorted(generators, key=lambda g: (g.degree, g.name))
        self.by_rank = tuple(by_rank)
        self.rank = {g.name: i for i, g in enumerate(by_rank)}
        self.degree_of = {g.name: g.degree for g in generators}
        self.odd_of = {g.name: g.degree % 2 == 1 for g in generators}
        self._monomials: dict[int, tuple[Monomial, ...]] = {}

    # -- basic monomial data

    def mono_degree(self, m: Monomial) -> int:
        return sum(self.degree_of[n] * e for n, e in m)

    def word_length(self, m: Monomial) -> int:
        return sum(e for _, e in m)

    def mono_key(self, m: Monomial):
        return (self.word_length(m), tuple((self.rank[n], e) for n, e in m))

    def sort_terms(self, terms: Mapping[Monomial, Rational]):
        return sorted(terms.items(), key=lambda t: (self.mono_degree(t[0]), self.mono_key(t[0])))

    # -- multiplication with Koszul signs

    def mul_mono(self, m1: Monomial, m2: Monomial):
        """Product of normal-form monomials: (sign, monomial) or None if zero."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        odds1 = [self.rank[n] for n, _ in m1 if self.odd_of[n]]
        sign = 1
        if odds1:
            for n2, _ in m2:
                if self.odd_of[n2]:
                    r2 = self.rank[n2]
                    k = sum(1 for r1 in odds1 if r1 > r2)
                    if k & 1:
                        sign = -sign
        merged: dict[str, int] = dict(m1)
        for n, e in m2:
            if n in merged:
                if self.odd_of[n]:
                    return None
                merged[n] += e
            else:
                merged[n] = e
        mono = tuple(sorted(merged.items(), key=lambda p: self.rank[p[0]]))
        return sign, mono

    def raw_mul(self, t1: Mapping[Monomial, Rational], t2: Mapping[Monomial, Rational]):
        out: dict[Monomial, Rational] = {}
        for m1, c1 in t1.items():
            for m2, c2 in t2.items():
                sm = self.mul_mono(m1, m2)
                if sm is None:
                    continue
                sign, mono = sm
                c = out.get(mono, _F0) + sign * c1 * c2
                if c:
                    out[mono] = c
                elif mono in out:
                    del out[mono]
        return out

    # -- free monomial bases

    def free_monomials(self, d: int) -> tuple[Monomial, ...]:
        """All normal-form monomials of degree d, canonically ordered."""
        if d < 0:
            return ()
        cached = self._monomials.get(d)
        if cached is not None:
            return cached
        acc: list[Monomial] = []

        def rec(remaining: int, start: int, prefix: list):
            if remaining == 0:
                acc.append(tuple(prefix))
                return
            for r in range(start, len(self.by_rank)):
                g = self.by_rank[r]
                if g.degree > remaining:
                    break  # ranks are degree-sorted
                emax = 1 if g.odd else remaining // g.degree
                for e in range(1, emax + 1):
                    prefix.append((g.name, e))
                    rec(remaining - e * g.degree, r + 1, prefix)
                    prefix.pop()

        rec(d, 0, [])
        acc.sort(key=self.mono_key)
        result = tuple(acc)
        self._monomials[d] = result
        return result


_F0 = Fraction(0)
_F1 = Fraction(1)


def _coerce_coeff(c) -> Rational:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise CdgaError(f"coefficient {c!r} is not an exact rational")


# ---------------------------------------------------------------------------
# presentation


class Presentation:
    """A finitely presented cdga (Lambda(generators)/(relations), d).

    `relations` are homogeneous elements of the free algebra; `differentials`
    maps generator names to images (missing names mean zero).  `cap` bounds
    the degrees in which the presentation is faithful; validation (d*d = 0,
    ideal closure under d) is performed in all degrees it can reach below the
    cap and the outcome is recorded in `validated_notes`.
    """

    def __init__(self, generators, cap: int, *, relations=(), differentials=None,
                 simply_connected: bool = True, validate: bool = True,
                 extra_d_unknown=()):
        gens = tuple(g if isinstance(g, Generator) else Generator(*g) for g in generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise CdgaError("duplicate generator names")
        if cap < 1:
            raise CdgaError("cap must be >= 1")
        self.generators = gens
        self.cap = int(cap)
        self.simply_connected = bool(simply_connected)
        self._ctx = _SignEngine(gens)
        if simply_connected:
            low = [g.name for g in gens if g.degree < 2]
            if low:
                raise NotSimplyConnected(
                    f"degree-1 generators {low} require simply_connected=False")

        self.relations: tuple[dict, ...] = tuple(self._coerce_terms(r) for r in relations)
        for r in self.relations:
            d = self._homogeneous_degree(r)
            if d is None or d < 1:
                raise Inhomogeneous("relations must be homogeneous of positive degree")
            if d > self.cap:
                raise RangeExceedsCap(f"relation of degree {d} exceeds cap {self.cap}")

        self._ideal: dict[int, Echelon] = {}
        self._basis: dict[int, tuple[Monomial, ...]] = {}
        self._index: dict[int, dict[Monomial, int]] = {}

        diffs = dict(differentials or {})
        self.d_unknown: frozenset[str] = frozenset()
        self._diff_raw: dict[str, dict] = {}
        unknown = set()
        for name in extra_d_unknown:
            if name not in self._ctx.degree_of:
                raise CdgaError(f"unknown generator {name!r} in extra_d_unknown")
            unknown.add(name)
        for name, img in diffs.items():
            if name not in self._ctx.degree_of:
                raise CdgaError(f"differential given for unknown generator {name!r}")
            raw = self._coerce_terms(img)
            if not raw:
                continue
            deg = self._homogeneous_degree(raw)
            want = self._ctx.degree_of[name] + 1
            if deg != want:
                raise DegreeMismatch(
                    f"d({name}) must be homogeneous of degree {want}, got {deg}")
            if self.relations and deg > self.cap:
                unknown.add(name)
                self._diff_raw[name] = raw
            else:
                self._diff_raw[name] = self.reduce_raw(raw)
        self.d_unknown = frozenset(unknown)
        self.validated_notes: list[str] = []
        if validate:
            self._validate()

    # -- coercion helpers

    def _coerce_terms(self, x) -> dict:
        """Accept elements, raw dicts, or (monomial-spec, coeff) pairs."""
        if isinstance(x, AlgebraElement):
            return dict(x.terms)
        if isinstance(x, Mapping):
            out = {}
            for mono, c in x.items():
                sign, mono = self._coerce_mono(mono)
                c = sign * _coerce_coeff(c)
                if not c:
                    continue
                out[mono] = out.get(mono, _F0) + c
            return {m: c for m, c in out.items() if c}
        raise CdgaError(f"cannot interpret {x!r} as an algebra element")

    def _coerce_mono(self, mono) -> tuple[int, Monomial]:
        """Normalize a monomial spec; the sign pays for resorting odd factors."""
        if isinstance(mono, str):
            mono = ((mono, 1),)
        pairs = []
        for n, e in mono:
            if n not in self._ctx.degree_of:
                raise CdgaError(f"unknown generator {n!r}")
            if e < 0:
                raise CdgaError("negative exponent")
            if e == 0:
                continue
            if self._ctx.odd_of[n] and e > 1:
                raise CdgaError(f"odd generator {n!r} with exponent {e}")
            pairs.append((n, e))
        if len({n for n, _ in pairs}) != len(pairs):
            raise CdgaError("repeated generator in monomial spec")
        odd_seq = [self._ctx.rank[n] for n, _ in pairs if self._ctx.odd_of[n]]
        inv = sum(1 for i in range(len(odd_seq)) for j in range(i + 1, len(odd_seq))
                  if odd_seq[i] > odd_seq[j])
        pairs.sort(key=lambda p: self._ctx.rank[p[0]])
        return (-1 if inv % 2 else 1), tuple(pairs)

    def _homogeneous_degree(self, terms: Mapping) -> int | None:
        degs = {self._ctx.mono_degree(m) for m in terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise Inhomogeneous(f"element mixes degrees {sorted(degs)}")
        return degs.pop()

    # -- ideal reduction

    @property
    def is_free(self) -> bool:
        return not self.relations

    def free_monomials(self, d: int) -> tuple[Monomial, ...]:
        return self._ctx.free_monomials(d)

    def _ideal_echelon(self, d: int) -> Echelon:
        ech = self._ideal.get(d)
        if ech is not None:
            return ech
        monos = self._ctx.free_monomials(d)
        index = {m: i for i, m in enumerate(monos)}
        ech = Echelon(len(monos))
        for rel in self.relations:
            e = self._ctx.mono_degree(next(iter(rel)))
            if e > d:
                continue
            for m in self._ctx.free_monomials(d - e):
                prod = self._ctx.raw_mul({m: _F1}, rel)
                if not prod:
                    continue
                vec = zero_vector(len(monos))
                for mono, c in prod.items():
                    vec[index[mono]] = c
                ech.add(vec)
        self._ideal[d] = ech
        return ech

    def basis(self, d: int) -> tuple[Monomial, ...]:
        """Canonical monomial basis of the degree-d piece of the quotient."""
        cached = self._basis.get(d)
        if cached is not None:
            return cached
        if d < 0:
            result: tuple = ()
            self._basis[d] = result
            self._index[d] = {}
            return result
        if d == 0:
            result = ((),)
            self._basis[d] = result
            self._index[d] = {(): 0}
            return result
        monos = self._ctx.free_monomials(d)
        if self.is_free:
            result = monos
        else:
            if d > self.cap:
                raise RangeExceedsCap(
                    f"degree {d} exceeds cap {self.cap} of a presentation with relations")
            pivots = self._ideal_echelon(d).pivots
            result = tuple(m for i, m in enumerate(monos) if i not in pivots)
        self._basis[d] = result
        self._index[d] = {m: i for i, m in enumerate(result)}
        return result

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def reduce_raw(self, terms: Mapping[Monomial, Rational]) -> dict:
        """Canonical representative of a free-algebra element modulo the ideal."""
        if self.is_free or not terms:
            return dict(terms)
        by_degree: dict[int, dict] = {}
        for m, c in terms.items():
            by_degree.setdefault(self._ctx.mono_degree(m), {})[m] = c
        out: dict[Monomial, Rational] = {}
        for d, part in sorted(by_degree.items()):
            if d > self.cap:
                raise RangeExceedsCap(
                    f"degree {d} exceeds cap {self.cap} of a presentation with relations")
            monos = self._ctx.free_monomials(d)
            index = {m: i for i, m in enumerate(monos)}
            vec = zero_vector(len(monos))
            for m, c in part.items():
                vec[index[m]] = c
            vec = self._ideal_echelon(d).reduce(vec)
            for i, c in enumerate(vec):
                if c:
                    out[monos[i]] = c
        return out

    # -- element factory

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, {(): _F1})

    def gen(self, name: str) -> "AlgebraElement":
        if name not in self._ctx.degree_of:
            raise CdgaError(f"unknown generator {name!r}")
        return AlgebraElement(self, self.reduce_raw({((name, 1),): _F1}))

    def element(self, spec) -> "AlgebraElement":
        return AlgebraElement(self, self.reduce_raw(self._coerce_terms(spec)))

    def monomial(self, mono) -> "AlgebraElement":
        sign, m = self._coerce_mono(mono)
        return AlgebraElement(self, self.reduce_raw({m: Fraction(sign)}))

    def from_vector(self, d: int, vec) -> "AlgebraElement":
        basis = self.basis(d)
        terms = {basis[i]: _coerce_coeff(c) for i, c in enumerate(vec) if c}
        return AlgebraElement(self, terms)

    def to_vector(self, el: "AlgebraElement", d: int) -> list[Rational]:
        if el.pres is not self:
            raise PresentationMismatch("element belongs to a different presentation")
        self.basis(d)
        index = self._index[d]
        vec = zero_vector(len(index))
        for m, c in el.terms.items():
            if self._ctx.mono_degree(m) != d:
                raise DegreeMismatch(f"element is not concentrated in degree {d}")
            vec[index[m]] = c
        return vec

    # -- differential

    @property
    def differential(self) -> "Derivation":
        der = getattr(self, "_derivation", None)
        if der is None:
            values = {n: AlgebraElement(self, dict(t))
                      for n, t in self._diff_raw.items() if n not in self.d_unknown}
            der = Derivation(self, 1, values, check=False)
            self._derivation = der
        return der

    def d(self, el: "AlgebraElement") -> "AlgebraElement":
        bad = {n for m, _ in el.terms.items() for n, _e in m if n in self.d_unknown}
        if bad:
            raise RangeExceedsCap(
                f"differential of generators {sorted(bad)} is not representable under cap {self.cap}")
        return self.differential.apply(el)

    def d_raw(self, terms: Mapping) -> dict:
        """Leibniz expansion in the free algebra, no reduction (used for closure checks)."""
        out: dict[Monomial, Rational] = {}
        for m, c in terms.items():
            for mono, cc in self._leibniz_mono(m).items():
                v = out.get(mono, _F0) + c * cc
                if v:
                    out[mono] = v
                elif mono in out:
                    del out[mono]
        return out

    def _leibniz_mono(self, m: Monomial) -> dict:
        ctx = self._ctx
        out: dict[Monomial, Rational] = {}
        prefix_deg = 0
        for i, (name, exp) in enumerate(m):
            img = self._diff_raw.get(name)
            if img:
                sign = -1 if prefix_deg % 2 else 1
                coeff = Fraction(exp * sign)
                prefix = m[:i]
                hole = ((name, exp - 1),) if exp > 1 else ()
                suffix = hole + m[i + 1:]
                part = ctx.raw_mul({prefix: _F1}, img)
                part = ctx.raw_mul(part, {suffix: _F1})
                for mono, c in part.items():
                    v = out.get(mono, _F0) + coeff * c
                    if v:
                        out[mono] = v
                    elif mono in out:
                        del out[mono]
            prefix_deg += ctx.degree_of[name] * exp
        return out

    # -- validation

    def _validate(self):
        for name, raw in self._diff_raw.items():
            if name in self.d_unknown:
                self.validated_notes.append(f"d({name}) stored unreduced beyond cap")
                continue
            gdeg = self._ctx.degree_of[name]
            if not self.is_free and gdeg + 2 > self.cap:
                self.validated_notes.append(f"d*d({name}) unchecked beyond cap")
                continue
            dd = self.d_raw(raw)
            if not self.is_free:
                dd = self.reduce_raw(dd)
            if dd:
                raise NotSquareZero(f"d(d({name})) != 0", witness=name)
        for rel in self.relations:
            e = self._ctx.mono_degree(next(iter(rel)))
            if e + 1 > self.cap:
                self.validated_notes.append("relation differential unchecked beyond cap")
                continue
            if any(n in self.d_unknown for m in rel for n, _ in m):
                self.validated_notes.append(
                    "relation involves a generator with unrepresentable differential")
                continue
            image = self.d_raw(rel)
            if self.reduce_raw(image):
                raise IdealNotClosed(
                    "differential of a relation is not in the ideal", witness=rel)

    # -- structural predicates

    def sullivan_order(self) -> tuple[str, ...] | None:
        """A nilpotence ordering of the generators, or None if there is none."""
        if not self.is_free:
            return None
        placed: list[str] = []
        placed_set: set[str] = set()
        remaining = {g.name for g in self.generators}
        while remaining:
            progress = [n for n in sorted(remaining,
                                          key=lambda n: (self._ctx.degree_of[n], n))
                        if all(dep in placed_set
                               for m in self._diff_raw.get(n, {})
                               for dep, _ in m)]
            if not progress:
                return None
            for n in progress:
                placed.append(n)
                placed_set.add(n)
                remaining.remove(n)
        return tuple(placed)

    @property
    def is_sullivan(self) -> bool:
        return self.sullivan_order() is not None

    @property
    def is_minimal_sullivan(self) -> bool:
        if not self.is_free or not self.is_sullivan:
            return False
        for raw in self._diff_raw.values():
            for m in raw:
                if self._ctx.word_length(m) < 2:
                    return False
        return True

    def top_degree_if_finite(self) -> int | None:
        """Certified top nonzero degree, or None when finiteness is not certified.

        Free and all generators odd certifies top = sum of degrees.  Otherwise a
        window of empty graded pieces of length max generator degree, fully
        inside the cap, certifies that everything above the window vanishes.
        """
        if not self.generators:
            return 0
        degs = [g.degree for g in self.generators]
        if self.is_free:
            if all(g.odd for g in self.generators):
                return sum(degs)
            return None
        maxdeg = max(degs)
        top = 0
        run = 0
        for d in range(1, self.cap + 1):
            if self.dim(d):
                top = d
                run = 0
            else:
                run += 1
                if run >= maxdeg:
                    return top
        return None

    def __repr__(self):
        rel = f", {len(self.relations)} relations" if self.relations else ""
        return (f"Presentation({[g.name for g in self.generators]}, cap={self.cap}{rel})")


# ---------------------------------------------------------------------------
# elements


class AlgebraElement:
    """A reduced element of a presentation.  Immutable by convention."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: Presentation, terms: dict):
        self.pres = pres
        self.terms = terms

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            raise PresentationMismatch(f"cannot combine element with {other!r}")
        if other.pres is not self.pres:
            raise PresentationMismatch("elements belong to different presentations")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, _F0) + c
            if v:
                out[m] = v
            elif m in out:
                del out[m]
        return AlgebraElement(self.pres, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, _F0) - c
            if v:
                out[m] = v
            elif m in out:
                del out[m]
        return AlgebraElement(self.pres, out)

    def __neg__(self):
        return AlgebraElement(self.pres, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _coerce_coeff(other)
            if not c:
                return self.pres.zero()
            return AlgebraElement(self.pres, {m: c * v for m, v in self.terms.items()})
        self._check(other)
        raw = self.pres._ctx.raw_mul(self.terms, other.terms)
        return AlgebraElement(self.pres, self.pres.reduce_raw(raw))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise CdgaError("negative power")
        out = self.pres.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.pres is other.pres and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    __hash__ = None

    def degree(self) -> int | None:
        """Degree of a homogeneous element (None for 0)."""
        return self.pres._homogeneous_degree(self.terms)

    def is_homogeneous(self) -> bool:
        try:
            self.degree()
            return True
        except Inhomogeneous:
            return False

    def homogeneous_part(self, d: int) -> "AlgebraElement":
        ctx = self.pres._ctx
        return AlgebraElement(self.pres,
                              {m: c for m, c in self.terms.items()
                               if ctx.mono_degree(m) == d})

    def homogeneous_components(self) -> dict:
        ctx = self.pres._ctx
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            out.setdefault(ctx.mono_degree(m), {})[m] = c
        return {d: AlgebraElement(self.pres, t) for d, t in sorted(out.items())}

    def max_word_length(self) -> int:
        ctx = self.pres._ctx
        return max((ctx.word_length(m) for m in self.terms), default=0)

    def word_part(self, length_min: int) -> "AlgebraElement":
        ctx = self.pres._ctx
        return AlgebraElement(self.pres,
                              {m: c for m, c in self.terms.items()
                               if ctx.word_length(m) >= length_min})

    def d(self) -> "AlgebraElement":
        return self.pres.d(self)

    def __repr__(self):
        return format_element(self)


def format_element(el: AlgebraElement) -> str:
    """Render an element in the input-language expression syntax."""
    if not el.terms:
        return "0"
    parts = []
    for mono, coeff in el.pres._ctx.sort_terms(el.terms):
        factors = [f"{n}^{e}" if e > 1 else n for n, e in mono]
        body = "*".join(factors)
        mag = abs(coeff)
        if not body:
            piece = str(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{mag}*{body}"
        if not parts:
            parts.append(piece if coeff > 0 else f"-{piece}")
        else:
            parts.append(f"+ {piece}" if coeff > 0 else f"- {piece}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# derivations


class Derivation:
    """A degree-k derivation given by its values on generators.

    apply() expands theta(f1...fs) = sum_j +-(f1..f_{j-1}) theta(f_j) (f_{j+1}..fs)
    with the sign (-1)^{k * deg(prefix)}.
    """

    def __init__(self, pres: Presentation, degree: int, values: Mapping[str, AlgebraElement],
                 *, check: bool = True):
        self.pres = pres
        self.degree = int(degree)
        vals: dict[str, AlgebraElement] = {}
        for name, el in values.items():
            if name not in pres._ctx.degree_of:
                raise CdgaError(f"derivation value for unknown generator {name!r}")
            if el.pres is not pres:
                raise PresentationMismatch("derivation values must live in the presentation")
            if not el:
                continue
            if check:
                want = pres._ctx.degree_of[name] + self.degree
                if el.degree() != want:
                    raise DegreeMismatch(
                        f"derivation value for {name} must have degree {want}")
            vals[name] = el
        self.values = vals

    def apply(self, el: AlgebraElement) -> AlgebraElement:
        if el.pres is not self.pres:
            raise PresentationMismatch("element belongs to a different presentation")
        pres = self.pres
        ctx = pres._ctx
        out = pres.zero()
        for m, c in el.terms.items():
            prefix_deg = 0
            for i, (name, exp) in enumerate(m):
                img = self.values.get(name)
                if img is not None:
                    sign = -1 if (self.degree * prefix_deg) % 2 else 1
                    prefix = AlgebraElement(pres, pres.reduce_raw({m[:i]: _F1}))
                    hole = ((name, exp - 1),) if exp > 1 else ()
                    suffix = AlgebraElement(pres, pres.reduce_raw({hole + m[i + 1:]: _F1}))
                    term = prefix * img * suffix
                    out = out + term * Fraction(c * exp * sign)
                prefix_deg += ctx.degree_of[name] * exp
        return out


# ---------------------------------------------------------------------------
# morphisms


class CdgaMorphism:
    """An algebra map determined by generator images; missing images are zero."""

    def __init__(self, source: Presentation, target: Presentation,
                 images: Mapping[str, AlgebraElement], *, check: bool = True, name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        imgs: dict[str, AlgebraElement] = {}
        for n, el in images.items():
            if n not in source._ctx.degree_of:
                raise CdgaError(f"image given for unknown generator {n!r}")
            if isinstance(el, AlgebraElement):
                if el.pres is not target:
                    raise PresentationMismatch(f"image of {n} lives outside the target")
            else:
                el = target.element(el)
            if el:
                imgs[n] = el
        self.images = imgs
        self.checked_notes: list[str] = []
        if check:
            self._validate()

    def image_of(self, name: str) -> AlgebraElement:
        return self.images.get(name, self.target.zero())

    def apply_raw(self, terms: Mapping[Monomial, Rational]) -> AlgebraElement:
        out = self.target.zero()
        for m, c in terms.items():
            piece = self.target.one()
            for n, e in m:
                img = self.images.get(n)
                if img is None:
                    piece = self.target.zero()
                    break
                piece = piece * img ** e
            if piece:
                out = out + piece * c
        return out

    def apply(self, el: AlgebraElement) -> AlgebraElement:
        if el.pres is not self.source:
            raise PresentationMismatch("element is not in the source")
        return self.apply_raw(el.terms)

    def __call__(self, el: AlgebraElement) -> AlgebraElement:
        return self.apply(el)

    def compose(self, inner: "CdgaMorphism") -> "CdgaMorphism":
        """self o inner."""
        if inner.target is not self.source:
            raise PresentationMismatch("composition mismatch")
        images = {n: self.apply(inner.image_of(n))
                  for n in inner.source._ctx.degree_of}
        return CdgaMorphism(inner.source, self.target, images, check=False,
                            name=f"{self.name}o{inner.name}")

    def _validate(self):
        src, tgt = self.source, self.target
        for n, el in self.images.items():
            want = src._ctx.degree_of[n]
            if el.degree() != want:
                raise DegreeMismatch(f"image of {n} must have degree {want}")
        for rel in src.relations:
            d = src._ctx.mono_degree(next(iter(rel)))
            if d > tgt.cap and not tgt.is_free:
                self.checked_notes.append("relation image unchecked beyond target cap")
                continue
            if self.apply_raw(rel):
                raise CdgaError("morphism does not kill a source relation")
        for n in src._ctx.degree_of:
            gdeg = src._ctx.degree_of[n]
            if n in src.d_unknown:
                self.checked_notes.append(f"chain condition on {n} unchecked (source cap)")
                continue
            if gdeg + 1 > tgt.cap and not tgt.is_free:
                self.checked_notes.append(f"chain condition on {n} unchecked (target cap)")
                continue
            lhs = self.apply_raw(src._diff_raw.get(n, {}))
            img = self.image_of(n)
            bad = {nn for m in img.terms for nn, _ in m if nn in tgt.d_unknown}
            if bad:
                self.checked_notes.append(f"chain condition on {n} unchecked (target cap)")
                continue
            rhs = tgt.d(img)
            if lhs != rhs:
                raise CdgaError(
                    f"not a chain map on generator {n}: phi(d{n}) = {lhs}, d(phi {n}) = {rhs}")

    def is_surjective_up_to(self, hi: int) -> int | None:
        """First degree <= hi where the image misses the target, or None."""
        for d in range(0, hi + 1):
            tdim = self.target.dim(d)
            if tdim == 0:
                continue
            ech = Echelon(tdim)
            for m in self.source.basis(d):
                img = self.apply_raw({m: _F1})
                if img:
                    ech.add(self.target.to_vector(img, d))
                if ech.rank == tdim:
                    break
            if ech.rank < tdim:
                return d
        return None

    def __repr__(self):
        return f"CdgaMorphism({self.name or '?'}: {self.source!r} -> {self.target!r})"


def identity_morphism(P: Presentation) -> CdgaMorphism:
    return CdgaMorphism(P, P, {g.name: P.gen(g.name) for g in P.generators},
                        check=False, name="id")


def transport_element(el_terms, target: Presentation,
                      name_map: Mapping[str, AlgebraElement]) -> AlgebraElement:
    """Evaluate a raw term dict under generator substitutions (signs exact)."""
    out = target.zero()
    for m, c in (el_terms.terms.items() if isinstance(el_terms, AlgebraElement)
                 else el_terms.items()):
        piece = target.one()
        for n, e in m:
            piece = piece * name_map[n] ** e
            if not piece:
                break
        if piece:
            out = out + piece * c
    return out


# ---------------------------------------------------------------------------
# constructions on presentations


def _fresh_names(gens_a, gens_b, suffix_a: str, suffix_b: str):
    """Renaming maps that resolve collisions paper-style (a -> a1, a2)."""
    names_a = [g.name for g in gens_a]
    names_b = [g.name for g in gens_b]
    overlap = set(names_a) & set(names_b)
    used = set(names_a) | set(names_b)

    def fresh(base):
        cand = base
        while cand in used:
            cand += "_"
        used.add(cand)
        return cand

    map_a = {n: (fresh(n + suffix_a) if n in overlap else n) for n in names_a}
    for n in names_a:
        if n not in overlap:
            used.add(n)
    map_b = {n: (fresh(n + suffix_b) if n in overlap else n) for n in names_b}
    return map_a, map_b


@dataclass
class TensorResult:
    pres: Presentation
    include_left: CdgaMorphism
    include_right: CdgaMorphism
    rename_left: dict
    rename_right: dict


def _transport_presentation_data(P: Presentation, rename: Mapping[str, str]):
    gens = [Generator(rename[g.name], g.degree) for g in P.generators]
    return gens


def _build_combined(parts, cap, simply_connected, extra_relations=()):
    """Shared assembly for tensor-like constructions.

    `parts` is a list of (presentation, rename_map).  Relations and
    differentials are transported through the renaming with exact signs.
    """
    gens = []
    for P, rename in parts:
        gens.extend(_transport_presentation_data(P, rename))
    ctx = _SignEngine(tuple(gens))
    relations = []
    diffs = {}
    unknown = []
    for P, rename in parts:
        unknown.extend(rename[n] for n in P.d_unknown if n not in P._diff_raw)
        def subst(raw):
            out: dict[Monomial, Rational] = {}
            for m, c in raw.items():
                sign = 1
                renamed = tuple((rename[n], e) for n, e in m)
                resorted = tuple(sorted(renamed, key=lambda p: ctx.rank[p[0]]))
                # recompute the Koszul sign of the resort on odd generators
                odd_seq = [ctx.rank[n] for n, e in renamed if ctx.degree_of[n] % 2]
                inv = sum(1 for i in range(len(odd_seq)) for j in range(i + 1, len(odd_seq))
                          if odd_seq[i] > odd_seq[j])
                if inv % 2:
                    sign = -sign
                out[resorted] = out.get(resorted, _F0) + sign * c
            return {m: c for m, c in out.items() if c}

        for rel in P.relations:
            relations.append(subst(rel))
        for n, raw in P._diff_raw.items():
            diffs[rename[n]] = subst(raw)
    relations.extend(extra_relations)
    combined = Presentation(gens, cap, relations=relations, differentials=diffs,
                            simply_connected=simply_connected,
                            extra_d_unknown=unknown)
    return combined


def tensor(A: Presentation, B: Presentation, *,
           suffixes=("1", "2"), cap: int | None = None) -> TensorResult:
    """Tensor product; the free graded-commutative structure does the signs."""
    map_a, map_b = _fresh_names(A.generators, B.generators, suffixes[0], suffixes[1])
    cap = min(A.cap, B.cap) if cap is None else cap
    sc = A.simply_connected and B.simply_connected
    combined = _build_combined([(A, map_a), (B, map_b)], cap, sc)
    inc_a = CdgaMorphism(A, combined, {n: combined.gen(m) for n, m in map_a.items()},
                         check=False, name="inl")
    inc_b = CdgaMorphism(B, combined, {n: combined.gen(m) for n, m in map_b.items()},
                         check=False, name="inr")
    return TensorResult(combined, inc_a, inc_b, map_a, map_b)


@dataclass
class TensorPowerResult:
    pres: Presentation
    injections: tuple[CdgaMorphism, ...]
    renames: tuple[dict, ...]


def tensor_power(A: Presentation, n: int, *, cap: int | None = None) -> TensorPowerResult:
    """A^{tensor n}; copy i of generator g is named g{i}."""
    if n < 1:
        raise CdgaError("tensor power needs n >= 1")
    cap = A.cap if cap is None else cap
    used: set[str] = set()
    renames = []
    for i in range(1, n + 1):
        rn = {}
        for g in A.generators:
            cand = f"{g.name}{i}"
            while cand in used:
                cand += "_"
            used.add(cand)
            rn[g.name] = cand
        renames.append(rn)
    combined = _build_combined([(A, rn) for rn in renames], cap, A.simply_connected)
    injections = tuple(
        CdgaMorphism(A, combined, {g.name: combined.gen(rn[g.name]) for g in A.generators},
                     check=False, name=f"in{i+1}")
        for i, rn in enumerate(renames))
    return TensorPowerResult(combined, injections, tuple(renames))


def direct_sum(A: Presentation, B: Presentation, *, cap: int | None = None) -> TensorResult:
    """Direct sum amalgamated over Q: cross products of the two sides vanish."""
    map_a, map_b = _fresh_names(A.generators, B.generators, "1", "2")
    cap = min(A.cap, B.cap) if cap is None else cap
    sc = A.simply_connected and B.simply_connected
    gens = (_transport_presentation_data(A, map_a)
            + _transport_presentation_data(B, map_b))
    ctx = _SignEngine(tuple(gens))
    cross = []
    for ga in A.generators:
        for gb in B.generators:
            pair = [(map_a[ga.name], 1), (map_b[gb.name], 1)]
            pair.sort(key=lambda p: ctx.rank[p[0]])
            cross.append({tuple(pair): _F1})
    combined = _build_combined([(A, map_a), (B, map_b)], cap, sc,
                               extra_relations=cross)
    inc_a = CdgaMorphism(A, combined, {n: combined.gen(m) for n, m in map_a.items()},
                         check=False, name="inl")
    inc_b = CdgaMorphism(B, combined, {n: combined.gen(m) for n, m in map_b.items()},
                         check=False, name="inr")
    return TensorResult(combined, inc_a, inc_b, map_a, map_b)


def quotient_by_ideal(P: Presentation, ideal_gens: Iterable[AlgebraElement]):
    """Quotient presentation plus the projection morphism."""
    extra = []
    for el in ideal_gens:
        if isinstance(el, AlgebraElement):
            if el.pres is not P:
                raise PresentationMismatch("ideal generator outside the presentation")
            raw = dict(el.terms)
        else:
            raw = P._coerce_terms(el)
        if not raw:
            continue
        extra.append(raw)
    Q = Presentation(P.generators, P.cap,
                     relations=tuple(P.relations) + tuple(extra),
                     differentials=P._diff_raw,
                     simply_connected=P.simply_connected,
                     extra_d_unknown=sorted(n for n in P.d_unknown
                                            if n not in P._diff_raw))
    proj = CdgaMorphism(P, Q, {g.name: Q.gen(g.name) for g in P.generators},
                        check=False, name="proj")
    return Q, proj


def word_length_truncation(P: Presentation, m: int):
    """Quotient by all words of length > m (generated by length m+1 monomials)."""
    if m < 0:
        raise CdgaError("word length must be >= 0")
    gens = []
    for d in range(1, P.cap + 1):
        for mono in P.free_monomials(d):
            if P._ctx.word_length(mono) == m + 1:
                gens.append(P.element({mono: 1}))
    return quotient_by_ideal(P, gens)


def sub_presentation(P: Presentation, names):
    """The sub-cdga generated by the named generators, plus its inclusion.

    Only well defined when nothing ties the kept generators to the dropped
    ones: differentials of kept generators must stay inside the kept names,
    and every relation must either live purely on the kept names (it is
    kept), or have a dropped generator in every monomial (it cannot touch the
    sub and is skipped).  A relation mixing the two kinds of monomial is
    rejected.
    """
    keep = set(names)
    unknown = keep - {g.name for g in P.generators}
    if unknown:
        raise CdgaError(f"unknown generators {sorted(unknown)!r}")
    if any(n in keep for n in P.d_unknown):
        raise CdgaError("a kept generator has an unrepresentable differential")
    gens = [g for g in P.generators if g.name in keep]
    diffs = {}
    for g in gens:
        raw = P._diff_raw.get(g.name)
        if not raw:
            continue
        if any(n not in keep for mono in raw for n, _ in mono):
            raise CdgaError(f"d {g.name} leaves the sub-presentation")
        diffs[g.name] = raw
    rels = []
    for raw in P.relations:
        pure = [m for m in raw if all(n in keep for n, _ in m)]
        if len(pure) == len(raw):
            rels.append(raw)
        elif pure:
            raise CdgaError("a relation mixes kept and dropped generators")
    sub = Presentation(gens, P.cap, relations=tuple(rels), differentials=diffs,
                       simply_connected=P.simply_connected)
    incl = CdgaMorphism(sub, P, {g.name: P.gen(g.name) for g in gens},
                        check=True, name="sub")
    return sub, incl


@dataclass
class LinearPart:
    """Word-length-one data of a morphism between free presentations."""
    source: Presentation
    target: Presentation
    matrices: dict  # degree -> list over source gens of dicts {target gen: c}

    def matrix(self, d: int):
        return self.matrices.get(d, [])


def linear_part(phi: CdgaMorphism) -> LinearPart:
    src, tgt = phi.source, phi.target
    if not src.is_free or not tgt.is_free:
        raise NotFree("linear part needs free presentations on both sides")
    matrices: dict[int, list] = {}
    for g in src.generators:
        row = {}
        img = phi.image_of(g.name)
        for m, c in img.terms.items():
            if src._ctx.word_length(m) == 0:
                continue
            if tgt._ctx.word_length(m) == 1:
                row[m[0][0]] = c
        matrices.setdefault(g.degree, []).append(row)
    return LinearPart(src, tgt, matrices)
