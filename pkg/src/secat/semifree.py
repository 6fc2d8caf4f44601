"""Semifree differential modules over a presentation.

A module here is free over the algebra on a finite list of generators, one of
which is the unit (degree 0, zero differential).  Elements are dicts mapping
generator names to algebra coefficients; the differential acts by

    d(c . x) = d(c) . x + (-1)^{|c|} c . d(x)

with coefficients written on the left.  Three constructions live on top:

* resolve_quotient: a semifree resolution of A / ideal, built degreewise by
  the cocycle/kill-kernel steps, together with the quasi-iso onto the quotient.
* ganea_level: the m-th fiberwise-join module of a resolution of A / I; its
  generators are ordered (m+1)-tuples of the input generators, and its
  differential collapses all slots to the unit at once or moves one slot.
* find_module_retraction: one global exact linear solve for a module chain
  retraction onto the base, the decision procedure behind the m-invariants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import Echelon, kernel_combos, solve_combo, solve_sparse, zero_vector
from .core import (AlgebraElement, CdgaError, CdgaMorphism, DegreeMismatch,
                   Presentation, RangeExceedsCap, quotient_by_ideal)
from .homology import HomologyReport, homology

_F0 = Fraction(0)
_F1 = Fraction(1)

ModuleElement = dict  # generator name -> AlgebraElement coefficient

UNIT = "1"


def madd(m1: ModuleElement, m2: ModuleElement) -> ModuleElement:
    out = dict(m1)
    for g, c in m2.items():
        if g in out:
            s = out[g] + c
            if s.terms:
                out[g] = s
            else:
                del out[g]
        elif c.terms:
            out[g] = c
    return out


def mneg(mel: ModuleElement) -> ModuleElement:
    return {g: -c for g, c in mel.items()}


def mscale(c: AlgebraElement, mel: ModuleElement) -> ModuleElement:
    out = {}
    for g, a in mel.items():
        p = c * a
        if p.terms:
            out[g] = p
    return out


class SemiFreeModule:
    """Finitely generated semifree module over a presentation."""

    def __init__(self, base: Presentation, gens, diffs, *, check: bool = True):
        """gens: iterable of (name, degree), unit excluded (added automatically);
        diffs: name -> ModuleElement."""
        self.base = base
        self.gen_list: list[tuple[str, int]] = [(UNIT, 0)]
        seen = {UNIT}
        for name, deg in gens:
            if name in seen:
                raise CdgaError(f"duplicate module generator {name!r}")
            if deg < 0:
                raise DegreeMismatch("module generators need degree >= 0")
            seen.add(name)
            self.gen_list.append((name, deg))
        self.degree_of = dict(self.gen_list)
        self.d: dict[str, ModuleElement] = {}
        for name, mel in diffs.items():
            if name not in self.degree_of:
                raise CdgaError(f"differential for unknown module generator {name!r}")
            if name == UNIT:
                raise CdgaError("the unit generator must have zero differential")
            clean = {}
            for g, c in mel.items():
                if g not in self.degree_of:
                    raise CdgaError(f"unknown generator {g!r} in a differential")
                if not isinstance(c, AlgebraElement) or c.pres is not base:
                    raise CdgaError("module coefficients must live in the base")
                if not c.terms:
                    continue
                want = self.degree_of[name] + 1 - self.degree_of[g]
                if check and c.degree() != want:
                    raise DegreeMismatch(
                        f"coefficient of {g} in d({name}) must have degree {want}")
                clean[g] = c
            if clean:
                self.d[name] = clean

    # -- elements

    def zero(self) -> ModuleElement:
        return {}

    def unit_element(self) -> ModuleElement:
        return {UNIT: self.base.one()}

    def gen(self, name: str) -> ModuleElement:
        if name not in self.degree_of:
            raise CdgaError(f"unknown module generator {name!r}")
        return {name: self.base.one()}

    def element_degree(self, mel: ModuleElement) -> int | None:
        degs = set()
        for g, c in mel.items():
            base_deg = c.degree()
            if base_deg is None:
                continue
            degs.add(base_deg + self.degree_of[g])
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeMismatch(f"module element mixes degrees {sorted(degs)}")
        return degs.pop()

    def d_element(self, mel: ModuleElement) -> ModuleElement:
        out: ModuleElement = {}
        for g, coeff in mel.items():
            dc = self.base.d(coeff)
            if dc.terms:
                out = madd(out, {g: dc})
            dg = self.d.get(g)
            if dg:
                for deg, part in coeff.homogeneous_components().items():
                    scaled = mscale(part, dg)
                    out = madd(out, mneg(scaled) if deg % 2 else scaled)
        return out

    # -- graded pieces

    def basis(self, n: int) -> list[tuple[str, tuple]]:
        out = []
        for name, deg in self.gen_list:
            rem = n - deg
            if rem < 0:
                continue
            for mono in self.base.basis(rem):
                out.append((name, mono))
        return out

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    def to_vector(self, mel: ModuleElement, n: int):
        offsets = {}
        total = 0
        for name, deg in self.gen_list:
            rem = n - deg
            offsets[name] = total
            total += self.base.dim(rem) if rem >= 0 else 0
        vec = zero_vector(total)
        for g, c in mel.items():
            rem = n - self.degree_of[g]
            if not c.terms:
                continue
            sub = self.base.to_vector(c, rem)
            off = offsets[g]
            for i, val in enumerate(sub):
                if val:
                    vec[off + i] = val
        return vec

    def from_vector(self, n: int, vec) -> ModuleElement:
        out: ModuleElement = {}
        pos = 0
        for name, deg in self.gen_list:
            rem = n - deg
            if rem < 0:
                continue
            width = self.base.dim(rem)
            chunk = vec[pos:pos + width]
            pos += width
            if any(chunk):
                out[name] = self.base.from_vector(rem, chunk)
        return out

    def basis_element(self, name: str, mono) -> ModuleElement:
        return {name: AlgebraElement(self.base, {mono: _F1})}

    def d2_failure(self, up_to: int | None = None):
        """First generator with d(d(gen)) != 0, or None.  Adjudicates signs."""
        cap = self.base.cap
        for name, deg in self.gen_list:
            if name not in self.d:
                continue
            if not self.base.is_free and deg + 2 > cap:
                continue
            if up_to is not None and deg + 2 > up_to:
                continue
            dd = self.d_element(self.d[name])
            if dd:
                return name, dd
        return None

    def format(self, mel: ModuleElement) -> str:
        if not mel:
            return "0"
        parts = []
        for name, _ in self.gen_list:
            if name in mel:
                parts.append(f"({mel[name]}).{name}")
        return " + ".join(parts)


class ModuleHomology:
    """Homology of a semifree module over a degree range."""

    def __init__(self, module: SemiFreeModule, lo: int, hi: int):
        base = module.base
        if not base.is_free and hi + 1 > base.cap:
            raise RangeExceedsCap(
                f"module homology up to {hi} needs base cap >= {hi + 1}")
        self.module = module
        self.lo, self.hi = lo, hi
        self._boundaries: dict[int, Echelon] = {}
        self._classes: dict[int, Echelon] = {}
        self._reps: dict[int, list[ModuleElement]] = {}
        for n in range(lo, hi + 1):
            self._compute(n)

    def _dvectors(self, n: int):
        M = self.module
        out = []
        for name, mono in M.basis(n):
            img = M.d_element(M.basis_element(name, mono))
            out.append(M.to_vector(img, n + 1))
        return out

    def _bech(self, n: int) -> Echelon:
        ech = self._boundaries.get(n)
        if ech is not None:
            return ech
        ech = Echelon(self.module.dim(n))
        if n >= 1:
            for v in self._dvectors(n - 1):
                ech.add(v)
        self._boundaries[n] = ech
        return ech

    def _compute(self, n: int):
        M = self.module
        dim = M.dim(n)
        cycles = kernel_combos(self._dvectors(n), M.dim(n + 1))
        bech = self._bech(n)
        hech = Echelon(dim)
        for v in cycles:
            hech.add(bech.reduce(v))
        self._classes[n] = hech
        self._reps[n] = [M.from_vector(n, row) for row in hech.basis()]

    def betti(self, n: int) -> int:
        return self._classes[n].rank

    def betti_table(self) -> dict[int, int]:
        return {n: self._classes[n].rank for n in range(self.lo, self.hi + 1)}

    def representatives(self, n: int) -> list[ModuleElement]:
        return list(self._reps[n])

    def class_coords(self, mel: ModuleElement, n: int):
        M = self.module
        if not mel:
            return zero_vector(self._classes[n].rank)
        if M.d_element(mel):
            raise CdgaError("module element is not a cycle")
        v = self._bech(n).reduce(M.to_vector(mel, n))
        coords = self._classes[n].coordinates(v)
        if coords is None:
            raise CdgaError("cycle does not reduce into the class space")
        return coords

    def is_zero_class(self, mel: ModuleElement, n: int) -> bool:
        return not any(self.class_coords(mel, n))


# ---------------------------------------------------------------------------
# semifree resolution of A / ideal


@dataclass
class QuotientResolution:
    module: SemiFreeModule
    quotient: Presentation
    projection: CdgaMorphism             # A -> quotient
    eps: dict                            # module gen -> element of the quotient
    valid_up_to: int
    notes: list[str] = field(default_factory=list)

    def eps_apply(self, mel: ModuleElement) -> AlgebraElement:
        out = self.quotient.zero()
        for g, c in mel.items():
            img = self.eps.get(g)
            if img is None or not img.terms:
                continue
            out = out + self.projection.apply(c) * img
        return out


def resolve_quotient(A: Presentation, ideal_elements, E: int) -> QuotientResolution:
    """Semifree resolution of A/(ideal_elements), exact in degrees <= E.

    Built like a minimal model: in each degree first new generators with zero
    differential hit unreached quotient classes, then generators are added to
    kill module classes that die in the quotient.  Generator names are
    r{degree}_{i}.
    """
    if not A.is_free and E + 1 > A.cap:
        raise RangeExceedsCap(f"resolution up to {E} needs cap >= {E + 1}")
    Q, proj = quotient_by_ideal(A, ideal_elements)
    HQ = homology(Q, 0, E)

    gens: list[tuple[str, int]] = []
    diffs: dict[str, ModuleElement] = {}
    eps: dict[str, AlgebraElement] = {UNIT: Q.one()}
    counter: dict[int, int] = {}

    def build():
        return SemiFreeModule(A, gens, diffs, check=False)

    def fresh(n: int) -> str:
        i = counter.get(n, 0)
        counter[n] = i + 1
        return f"r{n}_{i}"

    M = build()
    res = QuotientResolution(M, Q, proj, eps, E)
    for n in range(1, E + 1):
        # surjectivity of H^n(eps)
        MH = ModuleHomology(M, n, n)
        hit = Echelon(HQ.betti(n))
        for rep in MH.representatives(n):
            img = res.eps_apply(rep)
            hit.add(HQ.class_coords(img, n))
        for qrep in HQ.representatives(n):
            if hit.contains(HQ.class_coords(qrep, n)):
                continue
            name = fresh(n)
            gens.append((name, n))
            eps[name] = qrep
            hit.add(HQ.class_coords(qrep, n))
        M = build()
        res.module = M

        # injectivity of H^{n+1}(eps)
        if n + 1 > E:
            break
        MH1 = ModuleHomology(M, n + 1, n + 1)
        reps = MH1.representatives(n + 1)
        img_coords = [HQ.class_coords(res.eps_apply(r), n + 1) for r in reps]
        kernel = kernel_combos(img_coords, HQ.betti(n + 1))
        if kernel:
            dvecs = []
            for mono in Q.basis(n):
                img = Q.d(AlgebraElement(Q, {mono: _F1}))
                dvecs.append(Q.to_vector(img, n + 1))
            for combo in kernel:
                z: ModuleElement = {}
                for c, r in zip(combo, reps):
                    if c:
                        z = madd(z, mscale(A.one() * c, r))
                target = Q.to_vector(res.eps_apply(z), n + 1)
                ucombo = solve_combo(dvecs, Q.dim(n + 1), target)
                if ucombo is None:
                    raise CdgaError("class killed in the quotient has no primitive")
                u = Q.zero()
                for c, mono in zip(ucombo, Q.basis(n)):
                    if c:
                        u = u + AlgebraElement(Q, {mono: c})
                name = fresh(n)
                gens.append((name, n))
                diffs[name] = z
                eps[name] = u
            M = build()
            res.module = M

    M = SemiFreeModule(A, gens, diffs, check=True)
    res.module = M
    bad = M.d2_failure(up_to=E + 1)
    if bad is not None:
        raise CdgaError(f"resolution differential fails d^2 = 0 on {bad[0]}")
    return res


# ---------------------------------------------------------------------------
# fiberwise join levels


def _tuple_name(names) -> str:
    return "(" + "|".join(names) + ")"


@dataclass
class GaneaLevel:
    module: SemiFreeModule
    level: int
    tuples: dict                        # tuple gen name -> tuple of input names
    input_gens: list


def ganea_level(res_module: SemiFreeModule, m: int, *, cap: int | None = None) -> GaneaLevel:
    """Level-m join module of a resolution of A/I.

    Input generators x (unit excluded) with d(x) = d0(x).unit + sum a_j x_j.
    Level m has a generator per ordered (m+1)-tuple; writing |x| for degrees,

      deg (x_0|...|x_m)  =  sum |x_i|  +  m
      d   (x_0|...|x_m)  =  (-1)^{sum_{k=1}^{m} (k |x_{m-k}| + k - 1)}
                              d0(x_0) ... d0(x_m) . unit
                          + sum_{i,j} (-1)^{(|a_ij|+1)(|x_0|+...+|x_{i-1}|+m)}
                              a_ij . (x_0|...|x_ij|...|x_m)

    d^2 = 0 is checked on every generator.  Level 0 reproduces the input.
    """
    if m < 0:
        raise CdgaError("join level must be >= 0")
    base = res_module.base
    cap = base.cap if cap is None else cap
    inputs = [(n, d) for n, d in res_module.gen_list if n != UNIT]
    d0: dict[str, AlgebraElement] = {}
    dmod: dict[str, list] = {}
    for n, _ in inputs:
        mel = res_module.d.get(n, {})
        d0[n] = mel.get(UNIT, base.zero())
        dmod[n] = [(g, c) for g, c in mel.items() if g != UNIT]

    tuples: dict[str, tuple] = {}
    gens: list[tuple[str, int]] = []

    def all_tuples(k):
        if k == 0:
            yield ()
            return
        for rest in all_tuples(k - 1):
            for n, _ in inputs:
                yield rest + (n,)

    for tup in all_tuples(m + 1):
        deg = sum(res_module.degree_of[n] for n in tup) + m
        if deg > cap:
            continue
        name = _tuple_name(tup)
        tuples[name] = tup
        gens.append((name, deg))

    diffs: dict[str, ModuleElement] = {}
    for name, tup in tuples.items():
        mel: ModuleElement = {}
        # collapse term: all slots to their unit coefficients at once
        exp = sum(k * res_module.degree_of[tup[m - k]] + (k - 1)
                  for k in range(1, m + 1))
        coeff = base.one() * (-1 if exp % 2 else 1)
        for n in tup:
            coeff = coeff * d0[n]
            if not coeff.terms:
                break
        if coeff.terms:
            mel = madd(mel, {UNIT: coeff})
        # slot moves
        prefix_deg = 0
        for i, n in enumerate(tup):
            for g, a in dmod[n]:
                new_tup = tup[:i] + (g,) + tup[i + 1:]
                new_name = _tuple_name(new_tup)
                if new_name not in tuples:
                    continue  # degree fell outside cap
                adeg = a.degree()
                sign = -1 if ((adeg + 1) * (prefix_deg + m)) % 2 else 1
                mel = madd(mel, {new_name: a * sign})
            prefix_deg += res_module.degree_of[n]
        if mel:
            diffs[name] = mel

    module = SemiFreeModule(base, gens, diffs, check=True)
    # tuples of degree cap carry truncated differentials (targets beyond the
    # cap were dropped), so the square-zero check stops short of them
    bad = module.d2_failure(up_to=cap)
    if bad is not None:
        raise CdgaError(
            f"join differential fails d^2 = 0 on {bad[0]}: "
            f"{module.format(bad[1])}")
    return GaneaLevel(module, m, tuples, inputs)


# ---------------------------------------------------------------------------
# module retraction: the decision procedure for the m-invariants


@dataclass
class RetractionResult:
    values: dict                        # gen name -> AlgebraElement in the base
    free_unknowns: int
    equations: int
    checked_up_to: int


def find_module_retraction(module: SemiFreeModule, E: int) -> RetractionResult | None:
    """A module chain map r: module -> base with r(unit) = 1, or None.

    Unknowns are the coefficients of r(x) over the degree-|x| basis of the
    base for every generator of degree <= E; the chain equations r(d x) =
    d(r(x)) are imposed for every generator with |x| + 1 <= E.  Free unknowns
    are pinned to zero, so the answer is deterministic.
    """
    base = module.base
    if not base.is_free:
        E = min(E, base.cap - 1)
    index: dict[tuple[str, int], int] = {}
    slots: dict[str, tuple[int, int]] = {}
    n_unknowns = 0
    for name, deg in module.gen_list:
        if name == UNIT or deg > E:
            continue
        width = base.dim(deg)
        slots[name] = (n_unknowns, width)
        for i in range(width):
            index[(name, i)] = n_unknowns + i
        n_unknowns += width

    equations = []
    for name, deg in module.gen_list:
        if name == UNIT or deg + 1 > E:
            continue
        tdeg = deg + 1
        width_t = base.dim(tdeg)
        rows: list[dict] = [dict() for _ in range(width_t)]
        rhs = zero_vector(width_t)
        # d(r(x)): coefficients of the unknowns of x through the differential
        off, width = slots[name]
        for i, mono in enumerate(base.basis(deg)):
            img = base.d(AlgebraElement(base, {mono: _F1}))
            if not img.terms:
                continue
            for j, val in enumerate(base.to_vector(img, tdeg)):
                if val:
                    rows[j][off + i] = rows[j].get(off + i, _F0) - val
        # r(d x) = sum over d(x) entries
        for g, c in module.d.get(name, {}).items():
            if g == UNIT:
                # r(c . unit) = c, a known contribution
                for j, val in enumerate(base.to_vector(c, tdeg)):
                    if val:
                        rhs[j] -= val
                continue
            gdeg = module.degree_of[g]
            if gdeg > E:
                raise RangeExceedsCap(
                    f"retraction system reaches generator {g} beyond degree {E}")
            goff, gwidth = slots[g]
            for i, mono in enumerate(base.basis(gdeg)):
                prod = c * AlgebraElement(base, {mono: _F1})
                if not prod.terms:
                    continue
                for j, val in enumerate(base.to_vector(prod, tdeg)):
                    if val:
                        rows[j][goff + i] = rows[j].get(goff + i, _F0) + val
        for j in range(width_t):
            if rows[j] or rhs[j]:
                equations.append((rows[j], rhs[j]))

    solved = solve_sparse(equations, n_unknowns)
    if solved is None:
        return None
    solution, free = solved
    values = {UNIT: base.one()}
    for name, (off, width) in slots.items():
        deg = module.degree_of[name]
        vec = [solution.get(off + i, _F0) for i in range(width)]
        values[name] = base.from_vector(deg, vec)
    return RetractionResult(values, len(free), len(equations), E)


def verify_module_retraction(module: SemiFreeModule, values: dict, E: int):
    """Independent re-check of the retraction equations; returns None or a
    (generator, discrepancy) pair."""
    base = module.base
    unit_val = values.get(UNIT)
    if unit_val is None or unit_val != base.one():
        return UNIT, "unit is not sent to 1"

    def apply(mel: ModuleElement) -> AlgebraElement:
        out = base.zero()
        for g, c in mel.items():
            rg = values.get(g)
            if rg is None:
                gdeg = module.degree_of[g]
                if gdeg > E:
                    continue
                return None
            out = out + c * rg
        return out

    for name, deg in module.gen_list:
        if name == UNIT or deg + 1 > E:
            continue
        rx = values.get(name)
        if rx is None:
            return name, "no value assigned"
        if rx.terms and rx.degree() != deg:
            return name, "value has the wrong degree"
        lhs = apply(module.d.get(name, {}))
        if lhs is None:
            return name, "differential reaches an unassigned generator"
        rhs = base.d(rx)
        if lhs != rhs:
            return name, f"r(dx) = {lhs} but d(r(x)) = {rhs}"
    return None


# ---------------------------------------------------------------------------
# relative models as semifree modules over their base


def semifree_from_relative(total: Presentation, base_names, hat_names,
                           base: Presentation, *, cap: int | None = None) -> SemiFreeModule:
    """View (base ox Lambda(hats), D) as a semifree base-module.

    Module generators are the hat monomials up to the cap; the unit is the
    empty monomial.  Splitting a total monomial into base part times hat part
    costs the parity of odd hat factors moved across odd base factors.
    """
    cap = total.cap if cap is None else cap
    base_set = set(base_names)
    hat_set = set(hat_names)

    def split(mono):
        """monomial of total -> (sign, base monomial, hat monomial)."""
        base_part, hat_part = [], []
        odd_hats_seen = 0
        parity = 0
        for n, e in mono:
            if n in hat_set:
                if total._ctx.odd_of[n]:
                    odd_hats_seen += e
                hat_part.append((n, e))
            else:
                if total._ctx.odd_of[n]:
                    parity += odd_hats_seen * e
                base_part.append((n, e))
        sign = -1 if parity % 2 else 1
        return sign, tuple(base_part), tuple(hat_part)

    def hat_monomials():
        out = {(): 0}
        for d in range(1, cap + 1):
            for mono in total.free_monomials(d):
                if mono and all(n in hat_set for n, _ in mono):
                    out[mono] = d
        return out

    hat_gens = hat_monomials()

    def hat_gen_name(mono):
        if not mono:
            return UNIT
        return "*".join(f"{n}^{e}" if e > 1 else n for n, e in mono)

    gens = [(hat_gen_name(mono), d) for mono, d in hat_gens.items() if mono]
    name_of = {mono: hat_gen_name(mono) for mono in hat_gens}

    def to_module(el: AlgebraElement) -> ModuleElement:
        out: ModuleElement = {}
        for mono, c in el.terms.items():
            sign, bpart, hpart = split(mono)
            if hpart not in name_of:
                raise RangeExceedsCap("hat monomial beyond the module cap")
            coeff = AlgebraElement(base, base.reduce_raw({bpart: sign * c}))
            out = madd(out, {name_of[hpart]: coeff})
        return out

    diffs = {}
    for mono, d in hat_gens.items():
        if not mono:
            continue
        if d + 1 > cap:
            continue  # the image would need hat monomials beyond the cap
        el = AlgebraElement(total, {mono: _F1})
        img = total.d(el)
        if img.terms:
            diffs[hat_gen_name(mono)] = to_module(img)
    return SemiFreeModule(base, gens, diffs, check=True)
