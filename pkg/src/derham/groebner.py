"""Groebner bases for submodules of free modules over the Weyl algebra.

Orders that refine the shifted V-degree are not well-orders on D_n, so
every Buchberger loop runs in the homogenized Weyl algebra (a central
variable h with d_i x_i = x_i d_i + h^2) under a genuine term order and
the result is dehomogenized.  Division against a finished basis happens
directly in D_n with a step budget guarding the (pathological) inputs
whose cosets have no V-minimal member.

The flat internal format keys a term by (position, exponents, h-power);
the public surface speaks ModuleElement / OperatorMatrix.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import comb, factorial, gcd
from typing import Callable, Optional, Sequence

from .errors import (DimensionMismatchError, InvalidInputError,
                     ReductionLimitError)
from .weyl import NEG_INF, FiltrationSpec, WeylElement, term_v_degree, weyl_mul

log = logging.getLogger("derham.groebner")

DEFAULT_REDUCTION_LIMIT = 1_000_000

Mono = tuple  # (pos, exps, h)
FlatVec = dict


# ---------------------------------------------------------------------------
# public element types
# ---------------------------------------------------------------------------

class ModuleElement:
    """An element of a free module D_n^rank, one WeylElement per component."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: Sequence[WeylElement]):
        self.n = n
        comps = tuple(components)
        for c in comps:
            if c.n != n:
                raise DimensionMismatchError("mixed variable counts in module element")
        self.components = comps

    @classmethod
    def zero(cls, n: int, rank: int) -> "ModuleElement":
        return cls(n, [WeylElement.zero(n)] * rank)

    @classmethod
    def unit(cls, n: int, rank: int, pos: int) -> "ModuleElement":
        comps = [WeylElement.zero(n)] * rank
        comps[pos] = WeylElement.one(n)
        return cls(n, comps)

    @property
    def rank(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other):
        return ModuleElement(self.n, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        return ModuleElement(self.n, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return ModuleElement(self.n, [-c for c in self.components])

    def scale(self, c) -> "ModuleElement":
        return ModuleElement(self.n, [comp.scale(c) for comp in self.components])

    def left_mul(self, op: WeylElement) -> "ModuleElement":
        return ModuleElement(self.n, [weyl_mul(op, c) for c in self.components])

    def v_degree(self, spec: FiltrationSpec, shift: Optional[Sequence[int]] = None):
        """Shifted V-degree: max over components of v_degree + shift."""
        if shift is None:
            shift = (0,) * self.rank
        best = NEG_INF
        for j, c in enumerate(self.components):
            if c.is_zero():
                continue
            vd = max(term_v_degree(e, spec.n, spec.d) for e in c.terms) + shift[j]
            if vd > best:
                best = vd
        return best

    def __eq__(self, other):
        return (isinstance(other, ModuleElement) and self.n == other.n
                and self.components == other.components)

    def __hash__(self):
        return hash((self.n, self.components))

    def __repr__(self):
        return "ModuleElement(" + ", ".join(str(c) for c in self.components) + ")"


class OperatorMatrix:
    """A left-module map by right multiplication of row vectors.

    rows[i] is the image of the i-th source generator, an element of the
    target free module, so (v . M)_j = sum_i v_i * rows[i][j].
    """

    __slots__ = ("n", "source_rank", "target_rank", "rows", "source_shift", "target_shift")

    def __init__(self, n: int, target_rank: int, rows: Sequence[ModuleElement],
                 source_shift=None, target_shift=None):
        self.n = n
        self.rows = tuple(rows)
        self.source_rank = len(self.rows)
        self.target_rank = target_rank
        for r in self.rows:
            if r.rank != target_rank:
                raise DimensionMismatchError("row rank does not match target rank")
        self.source_shift = None if source_shift is None else tuple(source_shift)
        self.target_shift = None if target_shift is None else tuple(target_shift)

    @classmethod
    def zero(cls, n: int, source_rank: int, target_rank: int) -> "OperatorMatrix":
        rows = [ModuleElement.zero(n, target_rank) for _ in range(source_rank)]
        return cls(n, target_rank, rows)

    @classmethod
    def identity(cls, n: int, rank: int) -> "OperatorMatrix":
        return cls(n, rank, [ModuleElement.unit(n, rank, i) for i in range(rank)])

    @classmethod
    def from_entries(cls, n: int, entries: Sequence[Sequence[WeylElement]],
                     target_rank: Optional[int] = None, **kw) -> "OperatorMatrix":
        rows = [ModuleElement(n, row) for row in entries]
        tr = target_rank if target_rank is not None else (rows[0].rank if rows else 0)
        return cls(n, tr, rows, **kw)

    def entry(self, i: int, j: int) -> WeylElement:
        return self.rows[i].components[j]

    def apply(self, v: ModuleElement) -> ModuleElement:
        """v . M for a source row vector v."""
        out = ModuleElement.zero(self.n, self.target_rank)
        for vi, row in zip(v.components, self.rows):
            if not vi.is_zero():
                out = out + row.left_mul(vi)
        return out

    def compose(self, other: "OperatorMatrix") -> "OperatorMatrix":
        """self followed by other (source of other = target of self)."""
        if self.target_rank != other.source_rank:
            raise DimensionMismatchError("composition rank mismatch")
        return OperatorMatrix(self.n, other.target_rank,
                              [other.apply(row) for row in self.rows],
                              source_shift=self.source_shift,
                              target_shift=other.target_shift)

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.rows)

    def is_v_adapted(self, spec: FiltrationSpec) -> bool:
        """Each row's shifted V-degree stays within the declared source
        shift, so the map carries F^j into F^j."""
        if self.source_shift is None or self.target_shift is None:
            raise InvalidInputError("adaptedness needs both shift vectors")
        for i, row in enumerate(self.rows):
            vd = row.v_degree(spec, self.target_shift)
            if vd != NEG_INF and vd > self.source_shift[i]:
                return False
        return True

    def __repr__(self):
        return f"OperatorMatrix({self.source_rank}x{self.target_rank})"


class TermOrder:
    """Shifted V-degree first, then total degree, then graded reverse
    lexicographic on the exponents, then generator position."""

    __slots__ = ("spec", "shift", "tie_break")

    def __init__(self, spec: FiltrationSpec, shift: Sequence[int],
                 tie_break: str = "grevlex-position"):
        if tie_break != "grevlex-position":
            raise InvalidInputError(f"unsupported tie break {tie_break!r}")
        self.spec = spec
        self.shift = tuple(shift)
        self.tie_break = tie_break

    @property
    def rank(self) -> int:
        return len(self.shift)

    def describe(self) -> str:
        return (f"shifted-V-degree(d={self.spec.d}) > total-degree > grevlex > position; "
                f"shift={list(self.shift)}")


# ---------------------------------------------------------------------------
# order keys on flat monomials
# ---------------------------------------------------------------------------

def v_order_key(n: int, d: int, shifts: Sequence[int], block_start: int) -> Callable:
    """Two-block module order: positions < block_start dominate; inside a
    block, shifted V-degree, total degree, grevlex, h, position."""
    shifts = tuple(shifts)

    def key(mono: Mono):
        pos, e, h = mono
        blk = 1 if pos < block_start else 0
        vd = sum(e[n:n + d]) - sum(e[:d]) + shifts[pos]
        return (blk, vd, sum(e), tuple(-v for v in reversed(e)), -h, -pos)

    return key


def elim_order_key(elim_alpha: Sequence[int]) -> Callable:
    """Term order eliminating the given alpha-indices (central helpers)."""
    elim = tuple(elim_alpha)

    def key(mono: Mono):
        pos, e, h = mono
        ed = sum(e[i] for i in elim)
        return (ed, sum(e) - ed, tuple(-v for v in reversed(e)), -pos)

    return key


def block_elim_key(block: Sequence[int]) -> Callable:
    """Term order whose first block is total degree over `block` indices."""
    block = tuple(block)

    def key(mono: Mono):
        pos, e, h = mono
        bd = sum(e[i] for i in block)
        return (bd, sum(e) - bd, tuple(-v for v in reversed(e)), -pos)

    return key


# ---------------------------------------------------------------------------
# flat arithmetic
# ---------------------------------------------------------------------------

def me_to_flat(v: ModuleElement, offset: int = 0) -> FlatVec:
    out = {}
    for j, comp in enumerate(v.components):
        for e, c in comp.terms.items():
            out[(offset + j, e, 0)] = c
    return out


def flat_to_me(vec: FlatVec, n: int, rank: int, offset: int = 0) -> ModuleElement:
    comps = [dict() for _ in range(rank)]
    for (pos, e, h), c in vec.items():
        if h:
            raise InvalidInputError("dehomogenize before converting to ModuleElement")
        comps[pos - offset][e] = c
    return ModuleElement(n, [WeylElement(n, t) for t in comps])


def _pair_contractions(b: int, c: int):
    top = min(b, c)
    return [(k, comb(b, k) * comb(c, k) * factorial(k)) for k in range(top + 1)]


def mono_mul_flat(n: int, coeff: Fraction, qe: tuple, qh: int, vec: FlatVec,
                  h_step: int) -> FlatVec:
    """Left-multiply a flat vector by the monomial coeff * x^qa d^qb h^qh."""
    qa, qb = qe[:n], qe[n:]
    out: FlatVec = {}
    for (pos, e, h), c in vec.items():
        a, b = e[:n], e[n:]
        partial = [((), (), 0, 1)]
        for i in range(n):
            bi, ai = qb[i], a[i]
            cons = _pair_contractions(bi, ai) if (bi and ai) else ((0, 1),)
            nxt = []
            for al, be, hk, m in partial:
                for k, mult in cons:
                    nxt.append((al + (qa[i] + ai - k,), be + (bi + b[i] - k,),
                                hk + h_step * k, m * mult))
            partial = nxt
        base = coeff * c
        for al, be, hk, m in partial:
            key = (pos, al + be, qh + h + hk)
            s = out.get(key, Fraction(0)) + base * m
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out


def flat_add_into(acc: FlatVec, other: FlatVec, scale: Fraction = Fraction(1)):
    for k, c in other.items():
        s = acc.get(k, Fraction(0)) + scale * c
        if s:
            acc[k] = s
        elif k in acc:
            del acc[k]


def normalize_flat(vec: FlatVec, key: Callable) -> FlatVec:
    """Scale to primitive integer coefficients with positive lead."""
    if not vec:
        return vec
    den = 1
    for c in vec.values():
        den = den * c.denominator // gcd(den, c.denominator)
    g = 0
    for c in vec.values():
        g = gcd(g, c.numerator * (den // c.denominator))
    scale = Fraction(den, g)
    lead = max(vec, key=key)
    if vec[lead] * scale < 0:
        scale = -scale
    return {m: c * scale for m, c in vec.items()}


def homogenize_flat(vec: FlatVec) -> FlatVec:
    if not vec:
        return vec
    deg = max(sum(e) + h for (_, e, h) in vec)
    out: FlatVec = {}
    for (pos, e, _h), c in vec.items():
        key = (pos, e, deg - sum(e))
        s = out.get(key, Fraction(0)) + c
        if s:
            out[key] = s
        elif key in out:
            del out[key]
    return out


def dehomogenize_flat(vec: FlatVec) -> FlatVec:
    out: FlatVec = {}
    for (pos, e, _h), c in vec.items():
        key = (pos, e, 0)
        s = out.get(key, Fraction(0)) + c
        if s:
            out[key] = s
        elif key in out:
            del out[key]
    return out


def _mono_divides(m1: Mono, m2: Mono) -> bool:
    if m1[0] != m2[0] or m1[2] > m2[2]:
        return False
    return all(a <= b for a, b in zip(m1[1], m2[1]))


def _minimalize_entries(entries: list) -> list:
    """Drop entries whose lead is properly divisible by another lead, and
    all but the first copy of a duplicated lead.  Preserves the basis
    property; used after dehomogenizing."""
    first = {}
    for i, (lead, _, _) in enumerate(entries):
        first.setdefault(lead, i)
    out = []
    for i, (lead, lc, vec) in enumerate(entries):
        if first[lead] != i:
            continue
        if any(_mono_divides(l2, lead) and l2 != lead for l2, _, _ in entries):
            continue
        out.append((lead, lc, vec))
    return out


# ---------------------------------------------------------------------------
# the engine
# ---------------------------------------------------------------------------

class GBEngine:
    """Buchberger machinery over one flat monomial order.

    h_step = 2 gives the homogenized Weyl algebra; h_step = 0 the plain
    algebra (for genuine term orders that need no homogenization).
    """

    def __init__(self, n: int, key: Callable, h_step: int,
                 reduction_limit: int = DEFAULT_REDUCTION_LIMIT):
        self.n = n
        self.key = key
        self.h_step = h_step
        self.limit = reduction_limit

    # division ---------------------------------------------------------

    def reduce(self, vec: FlatVec, reducers, mode: str = "full",
               pred: Optional[Callable] = None) -> FlatVec:
        """Division remainder of vec by reducers (list of (lead, lc, vec)).

        mode "full": every term gets reduced; "top": stop at the first
        irreducible lead.  pred filters which monomials are reduction
        candidates (others pass through to the remainder untouched).
        """
        work = dict(vec)
        remainder: FlatVec = {}
        steps = 0
        key = self.key
        while work:
            m = max(work, key=key)
            c = work[m]
            if pred is not None and not pred(m):
                # everything at or below m in this block passes through
                del work[m]
                remainder[m] = c
                continue
            hit = None
            for lead, lc, rvec in reducers:
                if _mono_divides(lead, m):
                    hit = (lead, lc, rvec)
                    break
            if hit is None:
                del work[m]
                remainder[m] = c
                if mode == "top":
                    flat_add_into(remainder, work)
                    return remainder
                continue
            lead, lc, rvec = hit
            q = tuple(a - b for a, b in zip(m[1], lead[1]))
            prod = mono_mul_flat(self.n, c / lc, q, m[2] - lead[2], rvec, self.h_step)
            flat_add_into(work, prod, Fraction(-1))
            steps += 1
            if steps > self.limit:
                raise ReductionLimitError(
                    "division step budget exhausted; the coset may have no "
                    "V-minimal representative")
        return remainder

    # Buchberger ---------------------------------------------------------

    def buchberger(self, gens: Sequence[FlatVec]) -> list:
        """Unique reduced basis of the module generated by gens."""
        key = self.key
        basis = []
        for g in gens:
            if self.h_step:
                g = homogenize_flat(g)
            g = normalize_flat(g, key)
            if g:
                basis.append(g)
        entries = []  # (lead, lc, vec)
        for g in basis:
            lead = max(g, key=key)
            entries.append((lead, g[lead], g))

        import heapq
        pending = []
        in_queue = set()
        counter = 0

        def lcm_mono(m1: Mono, m2: Mono) -> Mono:
            return (m1[0], tuple(max(a, b) for a, b in zip(m1[1], m2[1])),
                    max(m1[2], m2[2]))

        def push(i, j):
            nonlocal counter
            li, lj = entries[i][0], entries[j][0]
            if li[0] != lj[0]:
                return
            l = lcm_mono(li, lj)
            heapq.heappush(pending, (sum(l[1]) + l[2], counter, i, j))
            in_queue.add((i, j))
            counter += 1

        for i in range(len(entries)):
            for j in range(i + 1, len(entries)):
                push(i, j)

        treated = set()
        while pending:
            _, _, i, j = heapq.heappop(pending)
            in_queue.discard((i, j))
            treated.add((i, j))
            li, lci, vi = entries[i]
            lj, lcj, vj = entries[j]
            l = lcm_mono(li, lj)
            # chain criterion
            skip = False
            for k in range(len(entries)):
                if k in (i, j) or not _mono_divides(entries[k][0], l):
                    continue
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik not in in_queue and pjk not in in_queue and \
                        pik in treated and pjk in treated:
                    skip = True
                    break
            if skip:
                continue
            qi = tuple(a - b for a, b in zip(l[1], li[1]))
            qj = tuple(a - b for a, b in zip(l[1], lj[1]))
            s = mono_mul_flat(self.n, Fraction(lcj), qi, l[2] - li[2], vi, self.h_step)
            flat_add_into(s, mono_mul_flat(self.n, Fraction(lci), qj, l[2] - lj[2],
                                           vj, self.h_step), Fraction(-1))
            r = self.reduce(s, entries, mode="top")
            r = normalize_flat(r, key)
            if not r:
                continue
            lead = max(r, key=key)
            entries.append((lead, r[lead], r))
            new = len(entries) - 1
            for k in range(new):
                push(k, new)

        return self._interreduce(entries)

    def _interreduce(self, entries) -> list:
        # survivors: leads minimal under proper divisibility, one copy per lead
        key = self.key
        order = sorted(range(len(entries)), key=lambda i: (key(entries[i][0]), i))
        first_with_lead = {}
        for i in order:
            first_with_lead.setdefault(entries[i][0], i)
        kept = []
        for i in order:
            lead = entries[i][0]
            if first_with_lead[lead] != i:
                continue
            if any(_mono_divides(entries[j][0], lead) and entries[j][0] != lead
                   for j in order):
                continue
            kept.append(entries[i])
        final = []
        for pos, (lead, lc, vec) in enumerate(kept):
            others = [kept[q] for q in range(len(kept)) if q != pos]
            red = self.reduce(vec, others, mode="full")
            red = normalize_flat(red, key)
            lead2 = max(red, key=key)
            final.append((lead2, red[lead2], red))
        final.sort(key=lambda t: key(t[0]))
        return final


# ---------------------------------------------------------------------------
# submodule solver: basis, cofactors, syzygies, witnesses in one run
# ---------------------------------------------------------------------------

class SubmoduleSolver:
    """All Groebner data for one generating set of a submodule of D_n^rank.

    The augmented module {(g_i, e_i)} is computed once; its reduced basis
    yields the V-adapted basis of <g_i> with cofactors (elements whose
    lead sits in the main block) and a basis of the syzygy module (elements
    supported entirely in the cofactor block).
    """

    def __init__(self, spec: FiltrationSpec, rank: int,
                 gens: Sequence[ModuleElement], ambient_shift=None,
                 cofactor_shift=None):
        self.spec = spec
        self.rank = rank
        self.gens = list(gens)
        n = spec.n
        self.n = n
        self.ambient_shift = tuple(ambient_shift) if ambient_shift is not None \
            else (0,) * rank
        if len(self.ambient_shift) != rank:
            raise InvalidInputError("ambient shift length != rank")
        if cofactor_shift is None:
            cofactor_shift = []
            for g in self.gens:
                vd = g.v_degree(spec, self.ambient_shift)
                cofactor_shift.append(0 if vd == NEG_INF else int(vd))
        self.cofactor_shift = tuple(cofactor_shift)
        if len(self.cofactor_shift) != len(self.gens):
            raise InvalidInputError("cofactor shift length != number of generators")

        p = len(self.gens)
        shifts = self.ambient_shift + self.cofactor_shift
        self.key = v_order_key(n, spec.d, shifts, rank)
        self.engine = GBEngine(n, self.key, h_step=2)
        aug = []
        for i, g in enumerate(self.gens):
            if g.rank != rank:
                raise DimensionMismatchError("generator rank mismatch")
            flat = me_to_flat(g)
            flat[(rank + i, (0,) * (2 * n), 0)] = Fraction(1)
            aug.append(flat)

        # saturate with respect to h: orders refining the V-degree are not
        # well-orders, so membership is only decidable against a basis of
        # the h-saturation (reduction then stays in the homogenized world)
        reduced = self.engine.buchberger(aug)
        for _ in range(64):
            stripped = []
            changed = False
            for _lead, _lc, vec in reduced:
                content = min(h for (_, _, h) in vec)
                if content:
                    changed = True
                    vec = {(pos, e, h - content): c for (pos, e, h), c in vec.items()}
                stripped.append(vec)
            if not changed:
                break
            reduced = self.engine.buchberger(stripped)
        else:
            raise InternalError("h-saturation did not stabilize")
        self._h_entries = reduced

        main_entries = []      # main-block leads, dehomogenized, with tails
        syz_entries = []       # cofactor-block leads, dehomogenized
        for lead, lc, vec in reduced:
            d = dehomogenize_flat(vec)
            d = normalize_flat(d, self.key)
            if not d:
                continue
            dl = max(d, key=self.key)
            if dl[0] < rank:
                main_entries.append((dl, d[dl], d))
            else:
                syz_entries.append((dl, d[dl], d))
        self._deh_entries = _minimalize_entries(main_entries)
        self._syz_entries = _minimalize_entries(syz_entries)

        # divider engine for D_n (h never appears after dehomogenization)
        self.divider = GBEngine(n, self.key, h_step=0)

    # -- derived data ---------------------------------------------------

    def basis_with_cofactors(self):
        """[(basis element over rank, cofactor vector over gens)] pairs."""
        out = []
        for _, _, vec in self._deh_entries:
            main = {k: c for k, c in vec.items() if k[0] < self.rank}
            cof = {(k[0] - self.rank, k[1], k[2]): c
                   for k, c in vec.items() if k[0] >= self.rank}
            out.append((flat_to_me(main, self.n, self.rank),
                        flat_to_me(cof, self.n, len(self.gens))))
        return out

    @property
    def basis(self):
        return [b for b, _ in self.basis_with_cofactors()]

    @property
    def syzygy_basis(self):
        """V-adapted basis of {w : w . gens = 0} under the cofactor shift."""
        out = []
        for _, _, vec in self._syz_entries:
            shifted = {(k[0] - self.rank, k[1], k[2]): c for k, c in vec.items()}
            out.append(flat_to_me(shifted, self.n, len(self.gens)))
        return out

    # -- queries ---------------------------------------------------------

    def _homogeneous_remainder(self, e: ModuleElement):
        """Reduce the homogenization of e against the saturated basis.

        Always terminates; the main block vanishes exactly when e lies in
        the submodule (completeness is what the h-saturation buys).
        """
        rank = self.rank
        flat = homogenize_flat(me_to_flat(e))
        rem = self.engine.reduce(flat, self._h_entries, mode="full",
                                 pred=lambda m: m[0] < rank)
        main = {k: c for k, c in rem.items() if k[0] < rank}
        cof = {(k[0] - rank, k[1], k[2]): -c
               for k, c in rem.items() if k[0] >= rank}
        return main, cof

    def normal_form_with_cofactor(self, e: ModuleElement):
        """(r, w) with e = r + w . gens and no term of r lead-divisible.

        Membership is decided in the homogenized world; only a nonzero
        remainder continues with direct division in D_n, where the
        V-minimal representative may require the step budget.
        """
        if e.rank != self.rank:
            raise DimensionMismatchError("element rank mismatch")
        rank = self.rank
        main_h, cof_h = self._homogeneous_remainder(e)
        cof = flat_to_me(dehomogenize_flat(cof_h), self.n, len(self.gens))
        if not main_h:
            return ModuleElement.zero(self.n, rank), cof
        start = dehomogenize_flat(main_h)
        rem = self.divider.reduce(start, self._deh_entries, mode="full",
                                  pred=lambda m: m[0] < rank)
        main = {k: c for k, c in rem.items() if k[0] < rank}
        extra = {(k[0] - rank, k[1], k[2]): -c
                 for k, c in rem.items() if k[0] >= rank}
        cof = cof + flat_to_me(extra, self.n, len(self.gens))
        return flat_to_me(main, self.n, rank), cof

    def normal_form(self, e: ModuleElement) -> ModuleElement:
        return self.normal_form_with_cofactor(e)[0]

    def contains(self, e: ModuleElement) -> bool:
        """Exact membership: the homogenized reduction decides most cases
        and always terminates; a leftover remainder falls back to direct
        division, whose fully reduced remainder is zero exactly for
        members."""
        if e.rank != self.rank:
            raise DimensionMismatchError("element rank mismatch")
        main_h, _ = self._homogeneous_remainder(e)
        if not main_h:
            return True
        rank = self.rank
        rem = self.divider.reduce(dehomogenize_flat(main_h), self._deh_entries,
                                  mode="full", pred=lambda m: m[0] < rank)
        return not any(k[0] < rank for k in rem)

    def reduce_cofactor(self, w: ModuleElement) -> ModuleElement:
        """Normal form of w against the syzygy basis: the V-minimal element
        of the coset w + Syz(gens) under the cofactor shift."""
        p = len(self.gens)
        key = v_order_key(self.n, self.spec.d, self.cofactor_shift, p)
        eng = GBEngine(self.n, key, h_step=0)
        entries = []
        for _, _, vec in self._syz_entries:
            shifted = {(k[0] - self.rank, k[1], k[2]): c for k, c in vec.items()}
            lead = max(shifted, key=key)
            entries.append((lead, shifted[lead], shifted))
        rem = eng.reduce(me_to_flat(w), entries, mode="full")
        return flat_to_me(rem, self.n, p)

    def min_degree_witness(self, target: ModuleElement):
        """A w with w . gens = target of minimal shifted V-degree, or None."""
        nf, w = self.normal_form_with_cofactor(target)
        if not nf.is_zero():
            return None
        return self.reduce_cofactor(w)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

class GroebnerBasis:
    """A V-adapted Groebner basis with its generating order and cofactors."""

    __slots__ = ("elements", "order", "rank", "cofactors", "_solver")

    def __init__(self, elements, order: TermOrder, rank: int, cofactors=None,
                 solver: Optional[SubmoduleSolver] = None):
        self.elements = tuple(elements)
        self.order = order
        self.rank = rank
        self.cofactors = None if cofactors is None else tuple(cofactors)
        self._solver = solver

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def solver(self) -> SubmoduleSolver:
        if self._solver is None:
            self._solver = SubmoduleSolver(self.order.spec, self.rank,
                                           list(self.elements),
                                           ambient_shift=self.order.shift)
        return self._solver


def groebner_basis(gens: Sequence[ModuleElement], order: TermOrder,
                   rank: Optional[int] = None) -> GroebnerBasis:
    """V-adapted Groebner basis of the submodule generated by gens."""
    gens = [g for g in gens if not g.is_zero()]
    if rank is None:
        rank = gens[0].rank if gens else len(order.shift)
    solver = SubmoduleSolver(order.spec, rank, gens, ambient_shift=order.shift)
    pairs = solver.basis_with_cofactors()
    return GroebnerBasis([b for b, _ in pairs], order, rank,
                         cofactors=[c for _, c in pairs], solver=solver)


def normal_form(e: ModuleElement, gb: GroebnerBasis) -> ModuleElement:
    """Remainder of e with no term divisible by a lead monomial of gb."""
    if e.rank != gb.rank:
        raise DimensionMismatchError("rank mismatch in normal form")
    return gb.solver().normal_form(e)


def submodule_membership(e: ModuleElement, gb: GroebnerBasis) -> bool:
    if e.rank != gb.rank:
        raise DimensionMismatchError("rank mismatch in membership test")
    return gb.solver().contains(e)


def syzygies(gb: GroebnerBasis):
    """Generators (a V-adapted basis) of {w : w . gb.elements = 0}."""
    return gb.solver().syzygy_basis


def kernel_of_map(phi: OperatorMatrix, spec: Optional[FiltrationSpec] = None):
    """Generators of {v : v . phi = 0}, a V-adapted basis of the kernel.

    The order on the source uses phi.source_shift when present, else the
    obvious shifts of the rows under phi.target_shift.
    """
    if spec is None:
        spec = FiltrationSpec.full(phi.n)
    tgt = phi.target_shift if phi.target_shift is not None else (0,) * phi.target_rank
    solver = SubmoduleSolver(spec, phi.target_rank, list(phi.rows),
                             ambient_shift=tgt, cofactor_shift=phi.source_shift)
    return solver.syzygy_basis


def obvious_shift(phi: OperatorMatrix, target_shift: Sequence[int],
                  spec: FiltrationSpec):
    """Per-generator shifts: the shifted V-degree of each row image.

    A zero row has no meaningful degree; it gets shift 0 with a warning so
    degenerate complexes stay usable.
    """
    out = []
    for i, row in enumerate(phi.rows):
        vd = row.v_degree(spec, tuple(target_shift))
        if vd == NEG_INF:
            log.warning("obvious shift of a zero column at position %d; using 0", i)
            out.append(0)
        else:
            out.append(int(vd))
    return tuple(out)
