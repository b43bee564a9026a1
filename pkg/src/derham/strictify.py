"""Replacing a bounded complex by a quasi-isomorphic V-strict free complex.

The construction runs in two phases.  Phase one walks the complex from the
top degree down, rewriting each C^i over the direct sum of covers of the
boundary, homology and next-boundary modules and choosing shift vectors so
that the short exact sequences of relation submodules become V-strict.
Phase two walks back up, building compatible free covers level by level:
each level's cover of the cycle column is (B-cover) + (H-cover) and the
full column is that plus the next boundary cover, with lifts chosen of
minimal V-degree.  The total complex of the resulting double complex is
V-strict and quasi-isomorphic to the input; the comparison map reads off
the level-zero block.
"""

from __future__ import annotations

import logging
from typing import Optional

from .errors import InconsistencyError, InternalError, InvalidInputError
from .groebner import (ModuleElement, OperatorMatrix, SubmoduleSolver)
from .presentations import ChainComplexPres, DModPresentation, cycle_generators
from .weyl import (NEG_INF, FiltrationSpec, WeylElement, format_operator,
                   term_v_degree)

log = logging.getLogger("derham.strictify")


# ---------------------------------------------------------------------------
# small data carriers
# ---------------------------------------------------------------------------

class QuotientSES:
    """0 -> A -> B -> C -> 0 of presented modules, maps on the covers."""

    __slots__ = ("a", "b", "c", "a_to_b", "b_to_c")

    def __init__(self, a: DModPresentation, b: DModPresentation,
                 c: DModPresentation, a_to_b: OperatorMatrix, b_to_c: OperatorMatrix):
        self.a, self.b, self.c = a, b, c
        self.a_to_b = a_to_b
        self.b_to_c = b_to_c


class SubmoduleSES:
    """0 -> A -> B -> C -> 0 of submodules of free modules with shifts."""

    __slots__ = ("spec", "rank_a", "rank_b", "rank_c", "shift_a", "shift_b",
                 "shift_c", "gens_a", "gens_b", "gens_c", "incl", "proj")

    def __init__(self, spec: FiltrationSpec, rank_a, shift_a, gens_a,
                 rank_b, shift_b, gens_b, rank_c, shift_c, gens_c,
                 incl: OperatorMatrix, proj: OperatorMatrix):
        self.spec = spec
        self.rank_a, self.shift_a, self.gens_a = rank_a, tuple(shift_a), list(gens_a)
        self.rank_b, self.shift_b, self.gens_b = rank_b, tuple(shift_b), list(gens_b)
        self.rank_c, self.shift_c, self.gens_c = rank_c, tuple(shift_c), list(gens_c)
        self.incl = incl
        self.proj = proj


class ResolutionStep:
    """One step 0 -> K -> P[shift] -> M -> 0; the rows map the generators
    of P onto a Groebner basis of M inside its ambient free module."""

    __slots__ = ("shift", "rows", "kernel")

    def __init__(self, shift, rows, kernel):
        self.shift = tuple(shift)
        self.rows = list(rows)
        self.kernel = list(kernel)

    @property
    def rank(self):
        return len(self.rows)

    @classmethod
    def trivial(cls, n: int):
        return cls((), [], [])


class FreeCoverDiagram:
    """A commutative free-cover diagram over a strict SES of submodules."""

    __slots__ = ("ses", "cover_a", "cover_b", "cover_c", "kernel_ses")

    def __init__(self, ses, cover_a, cover_b, cover_c, kernel_ses):
        self.ses = ses
        self.cover_a = cover_a
        self.cover_b = cover_b
        self.cover_c = cover_c
        self.kernel_ses = kernel_ses


class StrictSESWitness:
    """The rewritten middle presentation with the chosen shift vectors."""

    __slots__ = ("middle", "shift_a", "shift_b", "incl", "proj", "pairs")

    def __init__(self, middle: DModPresentation, shift_a, shift_b,
                 incl: OperatorMatrix, proj: OperatorMatrix, pairs):
        self.middle = middle
        self.shift_a = tuple(shift_a)
        self.shift_b = tuple(shift_b)
        self.incl = incl
        self.proj = proj
        self.pairs = pairs  # [(basis element of I_C, paired lift)]


# ---------------------------------------------------------------------------
# shared solving helpers
# ---------------------------------------------------------------------------

def _gb_of(spec, rank, gens, shift):
    if rank == 0 or not gens:
        return []
    return SubmoduleSolver(spec, rank, gens, ambient_shift=shift).basis


def _vdeg(e: ModuleElement, spec, shift):
    return e.v_degree(spec, shift)


def _solve_in(spec, rank, gens, shift, target, context: str) -> ModuleElement:
    """Cofactors expressing target over gens, or an inconsistency error."""
    if target.is_zero():
        return ModuleElement.zero(spec.n, len(gens))
    solver = SubmoduleSolver(spec, rank, gens, ambient_shift=shift)
    nf, cof = solver.normal_form_with_cofactor(target)
    if not nf.is_zero():
        raise InconsistencyError(f"{context}: element is not in the submodule")
    return cof


def _syzygies_of(spec, rank, rows, ambient_shift, cofactor_shift):
    if not rows:
        return []
    solver = SubmoduleSolver(spec, rank, rows, ambient_shift=ambient_shift,
                             cofactor_shift=cofactor_shift)
    return solver.syzygy_basis


def _obvious(rows, spec, shift):
    out = []
    for r in rows:
        v = _vdeg(r, spec, shift)
        out.append(0 if v == NEG_INF else int(v))
    return tuple(out)


def _heads(vectors, count, n):
    out = []
    for v in vectors:
        head = ModuleElement(n, v.components[:count])
        if not head.is_zero():
            out.append(head)
    return out


def _embed(v: ModuleElement, rank: int, offset: int, n: int) -> ModuleElement:
    comps = [WeylElement.zero(n)] * rank
    for j, c in enumerate(v.components):
        comps[offset + j] = c
    return ModuleElement(n, comps)


def _block_incl(n, rank_small, rank_big, offset):
    rows = [ModuleElement.unit(n, rank_big, offset + i) for i in range(rank_small)]
    return OperatorMatrix(n, rank_big, rows)


def _block_proj(n, rank_big, rank_small, offset):
    rows = []
    for i in range(rank_big):
        if offset <= i < offset + rank_small:
            rows.append(ModuleElement.unit(n, rank_small, i - offset))
        else:
            rows.append(ModuleElement.zero(n, rank_small))
    return OperatorMatrix(n, rank_small, rows)


# ---------------------------------------------------------------------------
# the middle-rewriting step (used once per short exact sequence pair)
# ---------------------------------------------------------------------------

class _RewriteResult:
    __slots__ = ("shift_d", "shift_f", "qa_rows", "rels_qa", "qb_rows",
                 "rels_qb", "pairs_c", "pairs_f")

    def __init__(self, **kw):
        for k, v in kw.items():
            setattr(self, k, v)


def _rewrite_pair(spec: FiltrationSpec, d_pres: DModPresentation,
                  a_pres: DModPresentation, f_pres: DModPresentation,
                  c_pres: DModPresentation, b_pres: DModPresentation,
                  map_da: OperatorMatrix, map_af: OperatorMatrix,
                  map_ab: OperatorMatrix, map_bc: OperatorMatrix,
                  shift_c) -> _RewriteResult:
    """Rewrite A over (D, F) and B over (D, F, C) with strict shifts.

    Implements the four-step shift recipe: bound the F-shifts against a
    basis of the C-relations through paired lifts, then bound the D-shifts
    against bases of both the F-relations and the C-relations.
    """
    n = spec.n
    rank_d, rank_f, rank_c = d_pres.rank, f_pres.rank, c_pres.rank
    shift_c = tuple(shift_c)

    # lift the F-generators through A -> F
    lift_f_rows = []
    gens_af = list(map_af.rows) + list(f_pres.relations)
    for j in range(rank_f):
        cof = _solve_in(spec, rank_f, gens_af, (0,) * rank_f,
                        ModuleElement.unit(n, rank_f, j),
                        "lifting a generator through A -> F (exactness)")
        lift_f_rows.append(ModuleElement(n, cof.components[:a_pres.rank]))
    lift_f = OperatorMatrix(n, a_pres.rank, lift_f_rows)

    # Q_A = P_D + P_F covering A
    qa_rows = [r for r in map_da.rows] + lift_f_rows
    rels_qa = _heads(_syzygies_of(spec, a_pres.rank,
                                  qa_rows + list(a_pres.relations),
                                  a_pres.shift_or_zero(),
                                  None),
                     rank_d + rank_f, n)

    # lift the C-generators through B -> C
    lift_c_rows = []
    gens_bc = list(map_bc.rows) + list(c_pres.relations)
    for j in range(rank_c):
        cof = _solve_in(spec, rank_c, gens_bc, (0,) * rank_c,
                        ModuleElement.unit(n, rank_c, j),
                        "lifting a generator through B -> C (exactness)")
        lift_c_rows.append(ModuleElement(n, cof.components[:b_pres.rank]))
    lift_c = OperatorMatrix(n, b_pres.rank, lift_c_rows)

    # Q_B = Q_A + P_C covering B
    qa_to_b = [map_ab.apply(r) for r in qa_rows]
    qb_rows = qa_to_b + lift_c_rows
    rels_qb = _heads(_syzygies_of(spec, b_pres.rank,
                                  qb_rows + list(b_pres.relations),
                                  b_pres.shift_or_zero(), None),
                     rank_d + rank_f + rank_c, n)

    # step 1: basis of the C-relations and paired lifts (d', f')
    basis_c = _gb_of(spec, rank_c, list(c_pres.relations), shift_c)
    pairs_c = []
    solve_gens_b = qa_to_b + list(b_pres.relations)
    for ct in basis_c:
        target = -lift_c.apply(ct)
        cof = _solve_in(spec, b_pres.rank, solve_gens_b, b_pres.shift_or_zero(),
                        target, "pairing a C-relation into the middle kernel")
        pairs_c.append((ct, ModuleElement(n, cof.components[:rank_d + rank_f])))

    # step 2: F-shifts from the paired lifts
    shift_f = _bound_shifts(spec, rank_f,
                            [(p.components[rank_d:rank_d + rank_f],
                              _vdeg(ct, spec, shift_c))
                             for ct, p in pairs_c])

    # step 3: basis of the F-relations and paired lifts d
    basis_f = _gb_of(spec, rank_f, list(f_pres.relations), shift_f)
    pairs_f = []
    solve_gens_a = list(map_da.rows) + list(a_pres.relations)
    for fu in basis_f:
        target = -lift_f.apply(fu)
        cof = _solve_in(spec, a_pres.rank, solve_gens_a, a_pres.shift_or_zero(),
                        target, "pairing an F-relation into the A kernel")
        pairs_f.append((fu, ModuleElement(n, cof.components[:rank_d])))

    # step 4: D-shifts from both families
    constraints = [(p.components[:rank_d], _vdeg(ct, spec, shift_c))
                   for ct, p in pairs_c]
    constraints += [(p.components, _vdeg(fu, spec, shift_f))
                    for fu, p in pairs_f]
    shift_d = _bound_shifts(spec, rank_d, constraints)

    return _RewriteResult(shift_d=shift_d, shift_f=shift_f, qa_rows=qa_rows,
                          rels_qa=rels_qa, qb_rows=qb_rows, rels_qb=rels_qb,
                          pairs_c=pairs_c, pairs_f=pairs_f)


def _bound_shifts(spec, rank, constraints):
    """Componentwise largest shifts with vdeg(witness) <= vdeg(bound)."""
    shift = [0] * rank
    bounded = [False] * rank
    for comps, bound in constraints:
        if bound == NEG_INF:
            continue
        for j, op in enumerate(comps):
            if op.is_zero():
                continue
            cap = int(bound) - _vdeg0_op(op, spec)
            if not bounded[j] or cap < shift[j]:
                shift[j] = cap
                bounded[j] = True
    return tuple(shift)


def _vdeg0_op(op: WeylElement, spec) -> int:
    return max(term_v_degree(e, spec.n, spec.d) for e in op.terms)


# ---------------------------------------------------------------------------
# public single-sequence operations
# ---------------------------------------------------------------------------

def _spot_check_ses(ses: QuotientSES):
    comp = ses.a_to_b.compose(ses.b_to_c)
    for row in comp.rows:
        if not row.is_zero() and not ses.c.contains_relation(row):
            raise InconsistencyError("A -> B -> C does not compose to zero")


def strictify_ses(ses: QuotientSES, shift_c, spec: FiltrationSpec) -> StrictSESWitness:
    """Rewrite the middle of an exact 0 -> A -> B -> C -> 0 so that shift
    vectors exist making the sequence V-strict (shift on C given)."""
    _spot_check_ses(ses)
    n = spec.n
    zero = DModPresentation.zero(n)
    res = _rewrite_pair(spec, zero, ses.a, ses.a, ses.c, ses.b,
                        OperatorMatrix.zero(n, 0, ses.a.rank),
                        OperatorMatrix.identity(n, ses.a.rank),
                        ses.a_to_b, ses.b_to_c, shift_c)
    rank_mid = ses.a.rank + ses.c.rank
    shift_b = res.shift_f + tuple(shift_c)
    middle = DModPresentation(n, rank_mid, res.rels_qb, shift_b)
    incl = _block_incl(n, ses.a.rank, rank_mid, 0)
    proj = _block_proj(n, rank_mid, ses.c.rank, ses.a.rank)
    pairs = [(ct, lift) for ct, lift in res.pairs_c]
    return StrictSESWitness(middle, res.shift_f, shift_b, incl, proj, pairs)


def strictify_two_ses(seq1: QuotientSES, seq2: QuotientSES, shift_c,
                      spec: FiltrationSpec):
    """Lemma-2-style rewrite of two chained sequences 0 -> A -> B -> C -> 0
    and 0 -> D -> A -> F -> 0 sharing A; returns witnesses for both."""
    _spot_check_ses(seq1)
    _spot_check_ses(seq2)
    if seq2.b is not seq1.a:
        raise InvalidInputError("the sequences must share the module A")
    n = spec.n
    res = _rewrite_pair(spec, seq2.a, seq1.a, seq2.c, seq1.c, seq1.b,
                        seq2.a_to_b, seq2.b_to_c, seq1.a_to_b, seq1.b_to_c,
                        shift_c)
    rank_d, rank_f, rank_c = seq2.a.rank, seq2.c.rank, seq1.c.rank
    shift_a = res.shift_d + res.shift_f
    shift_b = shift_a + tuple(shift_c)
    middle_a = DModPresentation(n, rank_d + rank_f, res.rels_qa, shift_a)
    middle_b = DModPresentation(n, rank_d + rank_f + rank_c, res.rels_qb, shift_b)
    wit2 = StrictSESWitness(middle_a, res.shift_d, shift_a,
                            _block_incl(n, rank_d, rank_d + rank_f, 0),
                            _block_proj(n, rank_d + rank_f, rank_f, rank_d),
                            res.pairs_f)
    wit1 = StrictSESWitness(middle_b, shift_a, shift_b,
                            _block_incl(n, rank_d + rank_f, middle_b.rank, 0),
                            _block_proj(n, middle_b.rank, rank_c, rank_d + rank_f),
                            res.pairs_c)
    return wit1, wit2


# ---------------------------------------------------------------------------
# free covers of strict sequences of submodules
# ---------------------------------------------------------------------------

def _fresh_step(spec, rank, gens, shift) -> ResolutionStep:
    basis = _gb_of(spec, rank, gens, shift)
    shifts = _obvious(basis, spec, shift)
    kernel = _syzygies_of(spec, rank, basis, shift, shifts)
    return ResolutionStep(shifts, basis, kernel)


def _min_preimage(spec, rank_tgt, shift_tgt, sources, source_degrees, target,
                  context: str):
    """Minimal-V-degree combination of `sources` mapping onto `target`.

    sources are the images (in the target ambient); the returned cofactor
    has one entry per source, V-degree measured against source_degrees.
    """
    solver = SubmoduleSolver(spec, rank_tgt, sources, ambient_shift=shift_tgt,
                             cofactor_shift=source_degrees)
    w = solver.min_degree_witness(target)
    if w is None:
        raise InconsistencyError(f"{context}: no preimage exists")
    return w


def _proportional(v: ModuleElement, w: ModuleElement) -> bool:
    """True when v = c w for a nonzero rational c."""
    if v.is_zero() or w.is_zero():
        return v.is_zero() and w.is_zero()
    ratio = None
    for cv, cw in zip(v.components, w.components):
        if cv.is_zero() != cw.is_zero():
            return False
        if cv.is_zero():
            continue
        if set(cv.terms) != set(cw.terms):
            return False
        for e, c in cv.terms.items():
            r = c / cw.terms[e]
            if ratio is None:
                ratio = r
            elif r != ratio:
                return False
    return True


def free_cover_ses(ses: SubmoduleSES,
                   cover_a: Optional[ResolutionStep] = None) -> FreeCoverDiagram:
    """Free covers P_B = P_A + P_C over a strict SES of submodules.

    The C-cover generators are the nonzero projections of a basis of B at
    their B-side degrees together with a fresh basis of C; the middle lift
    of a fresh C-basis element is a minimal-degree preimage, which the
    strictness of the input keeps at or below the C-side degree.
    """
    spec = ses.spec
    n = spec.n
    if cover_a is None:
        cover_a = _fresh_step(spec, ses.rank_a, ses.gens_a, ses.shift_a)
    gb_b = _gb_of(spec, ses.rank_b, ses.gens_b, ses.shift_b)
    gb_c = _gb_of(spec, ses.rank_c, ses.gens_c, ses.shift_c)

    proj_pairs = []
    for b in gb_b:
        pb = ses.proj.apply(b)
        if pb.is_zero():
            continue
        if any(_proportional(pb, c) for c in gb_c):
            continue  # the fresh basis copy keeps the tighter shift
        proj_pairs.append((b, pb))

    proj_images = [ses.proj.apply(b) for b in gb_b]
    b_degrees = _obvious(gb_b, spec, ses.shift_b)

    c_rows = [pb for _, pb in proj_pairs] + gb_c
    c_shift = tuple(int(_vdeg(b, spec, ses.shift_b)) for b, _ in proj_pairs) \
        + _obvious(gb_c, spec, ses.shift_c)
    lifts = [b for b, _ in proj_pairs]
    for c in gb_c:
        w = _min_preimage(spec, ses.rank_c, ses.shift_c, proj_images, b_degrees,
                          c, "lifting a C-basis element through B -> C")
        psi = ModuleElement.zero(n, ses.rank_b)
        for wi, b in zip(w.components, gb_b):
            if not wi.is_zero():
                psi = psi + b.left_mul(wi)
        need = _vdeg(c, spec, ses.shift_c)
        got = _vdeg(psi, spec, ses.shift_b)
        if got != NEG_INF and need != NEG_INF and got > need:
            raise InternalError(
                "lift of the required V-degree not found; the input sequence "
                "is not V-strict")
        lifts.append(psi)

    kernel_c = _syzygies_of(spec, ses.rank_c, c_rows, ses.shift_c, c_shift)
    cover_c = ResolutionStep(c_shift, c_rows, kernel_c)

    b_rows = [ses.incl.apply(r) for r in cover_a.rows] + lifts
    b_shift = cover_a.shift + c_shift
    kernel_b = _syzygies_of(spec, ses.rank_b, b_rows, ses.shift_b, b_shift)
    cover_b = ResolutionStep(b_shift, b_rows, kernel_b)

    rank_pa, rank_pc = cover_a.rank, cover_c.rank
    rank_pb = rank_pa + rank_pc
    kses = SubmoduleSES(
        spec,
        rank_pa, cover_a.shift, cover_a.kernel,
        rank_pb, b_shift, kernel_b,
        rank_pc, c_shift, kernel_c,
        _block_incl(n, rank_pa, rank_pb, 0),
        _block_proj(n, rank_pb, rank_pc, rank_pa),
    )
    return FreeCoverDiagram(ses, cover_a, cover_b, cover_c, kses)


def free_cover_two_ses(t1: SubmoduleSES, t2: SubmoduleSES,
                       d_step: ResolutionStep):
    """Covers over two linked strict sequences 0 -> A -> B -> C -> 0 (t1)
    and 0 -> D -> A -> F -> 0 (t2), with a given resolution step of D.

    Returns (diagram over t2, diagram over t1); the A-cover P_D + P_F is
    shared, with preimages of the F-basis taken at minimal V-degree.
    """
    spec = t1.spec
    n = spec.n
    gb_a = _gb_of(spec, t2.rank_b, t2.gens_b, t2.shift_b)
    gb_f = _gb_of(spec, t2.rank_c, t2.gens_c, t2.shift_c)

    proj_pairs = []
    for a in gb_a:
        fa = t2.proj.apply(a)
        if fa.is_zero():
            continue
        if any(_proportional(fa, f) for f in gb_f):
            continue
        proj_pairs.append((a, fa))
    a_degrees = _obvious(gb_a, spec, t2.shift_b)
    proj_images = [t2.proj.apply(a) for a in gb_a]

    f_rows = [fa for _, fa in proj_pairs] + gb_f
    f_shift = tuple(int(_vdeg(a, spec, t2.shift_b)) for a, _ in proj_pairs) \
        + _obvious(gb_f, spec, t2.shift_c)
    a_lifts = [a for a, _ in proj_pairs]
    for f in gb_f:
        w = _min_preimage(spec, t2.rank_c, t2.shift_c, proj_images, a_degrees,
                          f, "lifting an F-basis element through A -> F")
        g = ModuleElement.zero(n, t2.rank_b)
        for wi, a in zip(w.components, gb_a):
            if not wi.is_zero():
                g = g + a.left_mul(wi)
        need = _vdeg(f, spec, t2.shift_c)
        got = _vdeg(g, spec, t2.shift_b)
        if got != NEG_INF and need != NEG_INF and got > need:
            raise InternalError(
                "preimage of the required V-degree not found; the input "
                "sequence is not V-strict")
        a_lifts.append(g)

    kernel_f = _syzygies_of(spec, t2.rank_c, f_rows, t2.shift_c, f_shift)
    cover_f = ResolutionStep(f_shift, f_rows, kernel_f)

    a_rows = [t2.incl.apply(r) for r in d_step.rows] + a_lifts
    a_shift = d_step.shift + f_shift
    kernel_a = _syzygies_of(spec, t2.rank_b, a_rows, t2.shift_b, a_shift)
    cover_a = ResolutionStep(a_shift, a_rows, kernel_a)

    rank_pd, rank_pf = d_step.rank, cover_f.rank
    rank_pa = rank_pd + rank_pf
    kses2 = SubmoduleSES(
        spec,
        rank_pd, d_step.shift, d_step.kernel,
        rank_pa, a_shift, kernel_a,
        rank_pf, f_shift, kernel_f,
        _block_incl(n, rank_pd, rank_pa, 0),
        _block_proj(n, rank_pa, rank_pf, rank_pd),
    )
    diag2 = FreeCoverDiagram(t2, d_step, cover_a, cover_f, kses2)
    diag1 = free_cover_ses(t1, cover_a=cover_a)
    return diag2, diag1


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

class VStrictFailure:
    __slots__ = ("position", "level", "witness", "witness_degree", "kind")

    def __init__(self, position, level, witness, witness_degree, kind):
        self.position = position
        self.level = level
        self.witness = witness
        self.witness_degree = witness_degree
        self.kind = kind

    def __repr__(self):
        w = "; ".join(format_operator(c) for c in self.witness.components
                      if not c.is_zero()) if self.witness is not None else ""
        return (f"VStrictFailure({self.kind} at position {self.position}, "
                f"level {self.level}, witness [{w}])")


class VStrictReport:
    __slots__ = ("passed", "failures", "checked")

    def __init__(self, passed, failures, checked):
        self.passed = passed
        self.failures = failures
        self.checked = checked


def verify_v_strict(c: ChainComplexPres, spec: Optional[FiltrationSpec] = None,
                    window=None, budget: Optional[int] = None) -> VStrictReport:
    """Check V-adaptedness exactly and V-strictness via minimal witnesses.

    For each differential, every element g of a V-adapted basis of its
    image must admit a preimage of shifted V-degree at most vdeg(g); the
    normal form of any particular preimage against the syzygies of the
    rows realizes the minimal degree, so the check is a decision, not a
    search.  `window` restricts which levels j are reported; `budget`
    caps the number of witness computations.
    """
    if not c.is_free():
        raise InvalidInputError("verify_v_strict needs a free complex with shifts")
    if spec is None:
        spec = FiltrationSpec.full(c.n)
    failures = []
    checked = 0
    for k in range(c.lo, c.hi):
        dmat = c.differential(k)
        src_shift = c.module(k).shift_or_zero()
        tgt_shift = c.module(k + 1).shift_or_zero()
        for i, row in enumerate(dmat.rows):
            vd = row.v_degree(spec, tgt_shift)
            if vd != NEG_INF and vd > src_shift[i]:
                failures.append(VStrictFailure(k, int(vd), row, int(vd),
                                               "not-V-adapted"))
        if dmat.source_rank == 0 or dmat.is_zero():
            continue
        solver = SubmoduleSolver(spec, dmat.target_rank, list(dmat.rows),
                                 ambient_shift=tgt_shift, cofactor_shift=src_shift)
        for g in solver.basis:
            j = g.v_degree(spec, tgt_shift)
            if j == NEG_INF:
                continue
            j = int(j)
            if window is not None and not window[0] <= j <= window[1]:
                continue
            if budget is not None and checked >= budget:
                break
            checked += 1
            w = solver.min_degree_witness(g)
            if w is None:
                raise InternalError("image basis element without preimage")
            wd = w.v_degree(spec, src_shift)
            wd = int(wd) if wd != NEG_INF else None
            if wd is not None and wd > j:
                failures.append(VStrictFailure(k + 1, j, g, wd, "not-strict"))
    return VStrictReport(not failures, failures, checked)


def verify_strict_ses(ses: QuotientSES, spec: FiltrationSpec,
                      levels=None) -> bool:
    """Spot-check strictness of a quotient-module SES at the generators.

    Checks V-adaptedness of both maps, surjectivity of B -> C level by
    level on the C-generators, and that kernel elements of B -> C lift
    through A at their own V-degree.
    """
    n = spec.n
    sa = ses.a.shift_or_zero()
    sb = ses.b.shift_or_zero()
    sc = ses.c.shift_or_zero()
    for i, row in enumerate(ses.a_to_b.rows):
        vd = row.v_degree(spec, sb)
        if vd != NEG_INF and vd > sa[i]:
            return False
    for i, row in enumerate(ses.b_to_c.rows):
        vd = row.v_degree(spec, sc)
        if vd != NEG_INF and vd > sb[i]:
            return False
    # level surjectivity at C: generator e_j needs a preimage of degree <= sc[j]
    bc_images = list(ses.b_to_c.rows)
    b_degrees = [sb[i] for i in range(ses.b.rank)]
    units = [ModuleElement.unit(n, ses.b.rank, i) for i in range(ses.b.rank)]
    solver = SubmoduleSolver(spec, ses.c.rank,
                             bc_images + list(ses.c.relations),
                             ambient_shift=sc,
                             cofactor_shift=tuple(b_degrees) + _obvious(
                                 list(ses.c.relations), spec, sc))
    for j in range(ses.c.rank):
        w = solver.min_degree_witness(ModuleElement.unit(n, ses.c.rank, j))
        if w is None:
            return False
        wd = w.v_degree(spec, tuple(b_degrees) + _obvious(list(ses.c.relations),
                                                          spec, sc))
        if wd != NEG_INF and wd > sc[j]:
            return False
    # strictness at A: kernel generators of B -> C lift at their degree
    ker_heads = _heads(_syzygies_of(spec, ses.c.rank,
                                    bc_images + list(ses.c.relations), sc, None),
                       ses.b.rank, n)
    asolver = SubmoduleSolver(spec, ses.b.rank,
                              list(ses.a_to_b.rows) + list(ses.b.relations),
                              ambient_shift=sb,
                              cofactor_shift=tuple(sa) + _obvious(
                                  list(ses.b.relations), spec, sb))
    for g in ker_heads:
        w = asolver.min_degree_witness(g)
        if w is None:
            return False
        wd = w.v_degree(spec, tuple(sa) + _obvious(list(ses.b.relations), spec, sb))
        gd = g.v_degree(spec, sb)
        if wd != NEG_INF and gd != NEG_INF and wd > gd:
            return False
    return True


# ---------------------------------------------------------------------------
# the full complex driver
# ---------------------------------------------------------------------------

class _LevelData:
    __slots__ = ("ranks", "shift", "vertical")

    def __init__(self, ranks, shift, vertical):
        self.ranks = ranks            # (boundary, homology, next-boundary)
        self.shift = tuple(shift)
        self.vertical = vertical      # rows into the previous level, k >= 1

    @property
    def rank(self):
        return sum(self.ranks)


class _SpotResolution:
    __slots__ = ("spot", "levels", "realization", "complete")

    def __init__(self, spot, levels, realization, complete):
        self.spot = spot
        self.levels = levels
        self.realization = realization
        self.complete = complete


class StrictDoubleComplex:
    """Serializable description of the double complex behind the total."""

    def __init__(self, spots: dict):
        self.spots = spots

    def to_json(self):
        out = {"schema": "derham.double-complex/1", "spots": []}
        for i in sorted(self.spots):
            sr = self.spots[i]
            levels = []
            for k, lv in enumerate(sr.levels):
                entry = {
                    "level": k,
                    "block_ranks": list(lv.ranks),
                    "shift": list(lv.shift),
                }
                if lv.vertical is not None:
                    entry["vertical"] = [[format_operator(c) for c in row.components]
                                         for row in lv.vertical]
                levels.append(entry)
            out["spots"].append({
                "degree": i,
                "levels": levels,
                "horizontal_sign": "(-1)^level",
                "realization": [[format_operator(c) for c in row.components]
                                for row in sr.realization],
            })
        return out


class StrictificationResult:
    __slots__ = ("total", "comparison", "double", "lo", "hi", "edge", "complete")

    def __init__(self, total, comparison, double, lo, hi, edge, complete):
        self.total = total
        self.comparison = comparison
        self.double = double
        self.lo = lo
        self.hi = hi
        self.edge = edge
        self.complete = complete


def _phase_one(c: ChainComplexPres, spec: FiltrationSpec):
    """Rewrites every C^i over boundary/homology/next-boundary covers,
    choosing shift vectors top-down; returns per-spot data."""
    n = c.n
    ztilde = {k: cycle_generators(c, k) for k in c.degrees()}
    data = {}
    shift_next = ()
    for i in range(c.hi, c.lo - 1, -1):
        orig = c.module(i)
        zgens = ztilde[i]
        p = len(zgens)
        prev = c.differential(i - 1)
        rank_d = prev.source_rank if prev is not None else 0
        rels_d = ztilde[i - 1] if i - 1 >= c.lo else []

        # presentation of the cycles on zgens, and the boundary map into it
        rels_zin = _heads(_syzygies_of(spec, orig.rank,
                                       zgens + list(orig.relations),
                                       orig.shift_or_zero(), None), p, n)
        map_da_rows = []
        if prev is not None:
            for row in prev.rows:
                cof = _solve_in(spec, orig.rank, zgens + list(orig.relations),
                                orig.shift_or_zero(), row,
                                "boundary row is not a cycle")
                map_da_rows.append(ModuleElement(n, cof.components[:p]))

        d_pres = DModPresentation(n, rank_d, rels_d)
        a_pres = DModPresentation(n, p, rels_zin)
        f_pres = DModPresentation(n, p, list(rels_zin) + map_da_rows)
        if i == c.hi:
            rank_c = 0
            c_pres = DModPresentation.zero(n)
            map_bc = OperatorMatrix.zero(n, orig.rank, 0)
        else:
            rank_c = orig.rank
            c_pres = DModPresentation(n, rank_c, ztilde[i])
            map_bc = OperatorMatrix.identity(n, orig.rank)

        res = _rewrite_pair(
            spec, d_pres, a_pres, f_pres, c_pres, orig,
            OperatorMatrix(n, p, map_da_rows),
            OperatorMatrix.identity(n, p),
            OperatorMatrix(n, orig.rank, zgens),
            map_bc, shift_next)

        data[i] = {
            "ranks": (rank_d, p, rank_c),
            "shift_d": res.shift_d,
            "shift_f": res.shift_f,
            "shift_bnext": tuple(shift_next),
            "rels_d": rels_d,
            "rels_qz": res.rels_qa,
            "rels_f": list(rels_zin) + map_da_rows,
            "rels_qc": res.rels_qb,
            "rels_bnext": ztilde[i] if i < c.hi else [],
            "realization": res.qb_rows,
        }
        shift_next = res.shift_d
    return data


def _phase_two(c: ChainComplexPres, spec: FiltrationSpec, phase1: dict, edge: int):
    """Builds compatible free resolutions spot by spot, level by level."""
    n = c.n
    spots = {}
    res_b: list = []
    complete_all = True
    for i in range(c.lo, c.hi + 1):
        d1 = phase1[i]
        rank_d, rank_f, rank_c = d1["ranks"]
        shift_d, shift_f, shift_bn = d1["shift_d"], d1["shift_f"], d1["shift_bnext"]
        shift0 = shift_d + shift_f + shift_bn
        depth = i - edge

        gb_ib = _gb_of(spec, rank_d, d1["rels_d"], shift_d)
        gb_iz = _gb_of(spec, rank_d + rank_f, d1["rels_qz"], shift_d + shift_f)
        gb_ih = _gb_of(spec, rank_f, d1["rels_f"], shift_f)
        gb_ic = _gb_of(spec, rank_d + rank_f + rank_c, d1["rels_qc"], shift0)
        gb_ibn = _gb_of(spec, rank_c, d1["rels_bnext"], shift_bn)

        # extend the carried boundary resolution to the needed depth
        while len(res_b) < depth:
            if not res_b:
                prev_rank, prev_shift, prev_kernel = rank_d, shift_d, gb_ib
            else:
                st = res_b[-1]
                prev_rank, prev_shift, prev_kernel = st.rank, st.shift, st.kernel
            sh = _obvious(prev_kernel, spec, prev_shift)
            ker = _syzygies_of(spec, prev_rank, prev_kernel, prev_shift, sh)
            res_b.append(ResolutionStep(sh, prev_kernel, ker))

        levels = [_LevelData((rank_d, rank_f, rank_c), shift0, None)]
        kb, kz, kh, kc, kbn = gb_ib, gb_iz, gb_ih, gb_ic, gb_ibn
        prb, prh, prbn = rank_d, rank_f, rank_c
        psh = shift0
        res_bnext = []
        complete = False
        for k in range(1, depth + 1):
            if not (kb or kz or kh or kc or kbn):
                complete = True
                break
            d_step = res_b[k - 1]
            s_z = psh[:prb + prh]
            s_b = psh[:prb]
            s_h = psh[prb:prb + prh]
            s_bn = psh[prb + prh:]
            t2 = SubmoduleSES(spec, prb, s_b, kb, prb + prh, s_z, kz,
                              prh, s_h, kh,
                              _block_incl(n, prb, prb + prh, 0),
                              _block_proj(n, prb + prh, prh, prb))
            t1 = SubmoduleSES(spec, prb + prh, s_z, kz,
                              prb + prh + prbn, psh, kc,
                              prbn, s_bn, kbn,
                              _block_incl(n, prb + prh, prb + prh + prbn, 0),
                              _block_proj(n, prb + prh + prbn, prbn, prb + prh))
            diag2, diag1 = free_cover_two_ses(t1, t2, d_step)
            ranks_k = (d_step.rank, diag2.cover_c.rank, diag1.cover_c.rank)
            _assert_triangular(diag1.cover_b.rows, ranks_k, (prb, prh, prbn))
            levels.append(_LevelData(ranks_k, diag1.cover_b.shift,
                                     diag1.cover_b.rows))
            res_bnext.append(diag1.cover_c)
            kb = d_step.kernel
            kz = diag2.cover_b.kernel
            kh = diag2.cover_c.kernel
            kc = diag1.cover_b.kernel
            kbn = diag1.cover_c.kernel
            prb, prh, prbn = ranks_k
            psh = diag1.cover_b.shift
        else:
            complete = not (kb or kz or kh or kc or kbn)
        complete_all = complete_all and complete
        spots[i] = _SpotResolution(i, levels, d1["realization"], complete)
        res_b = res_bnext
    return spots, complete_all


def _assert_triangular(rows, ranks, prev_ranks):
    rb, rh, rbn = ranks
    prb, prh, prbn = prev_ranks
    for idx, row in enumerate(rows):
        comps = row.components
        if idx < rb:
            bad = any(not c.is_zero() for c in comps[prb:])
        elif idx < rb + rh:
            bad = any(not c.is_zero() for c in comps[prb + prh:])
        else:
            bad = False
        if bad:
            raise InternalError("vertical differential lost its triangular shape")


def strictify_complex(c: ChainComplexPres, depth_margin: int = 2) -> StrictificationResult:
    """A V-strict free complex quasi-isomorphic to c, with its witnesses.

    Vertical resolutions reach down to edge = lo - (n + depth_margin); the
    total complex is reliable at positions strictly above the edge.
    """
    spec = FiltrationSpec.full(c.n)
    n = c.n
    edge = c.lo - (n + depth_margin)
    log.info("strictifying complex over degrees [%d, %d], edge %d",
             c.lo, c.hi, edge)
    phase1 = _phase_one(c, spec)
    spots, complete = _phase_two(c, spec, phase1, edge)

    # assemble the total complex
    blocks = {}
    for m in range(edge, c.hi + 1):
        blk = []
        for i in range(max(c.lo, m), c.hi + 1):
            k = i - m
            if k < len(spots[i].levels):
                blk.append((k, i))
        blocks[m] = blk

    modules = []
    offsets = {}
    for m in range(edge, c.hi + 1):
        shift = ()
        off = {}
        total = 0
        for k, i in blocks[m]:
            lv = spots[i].levels[k]
            off[(k, i)] = total
            total += lv.rank
            shift = shift + lv.shift
        offsets[m] = off
        modules.append(DModPresentation.free(n, total, shift))

    diffs = []
    for m in range(edge, c.hi):
        tgt_rank = modules[m + 1 - edge].rank
        rows = []
        for k, i in blocks[m]:
            lv = spots[i].levels[k]
            rb, rh, rbn = lv.ranks
            for g in range(lv.rank):
                row = ModuleElement.zero(n, tgt_rank)
                if k >= 1 and (k - 1, i) in offsets[m + 1]:
                    row = row + _embed(lv.vertical[g], tgt_rank,
                                       offsets[m + 1][(k - 1, i)], n)
                if g >= rb + rh and (k, i + 1) in offsets[m + 1]:
                    sign = (-1) ** k
                    unit = ModuleElement.unit(
                        n, tgt_rank, offsets[m + 1][(k, i + 1)] + (g - rb - rh))
                    row = row + unit.scale(sign)
                rows.append(row)
        diffs.append(OperatorMatrix(n, tgt_rank, rows,
                                    source_shift=modules[m - edge].shift,
                                    target_shift=modules[m + 1 - edge].shift))

    total = ChainComplexPres(n, edge, modules, diffs)
    comparison = {}
    for m in range(max(edge, c.lo), c.hi + 1):
        orig_rank = c.module(m).rank
        rows = []
        for k, i in blocks[m]:
            lv = spots[i].levels[k]
            for g in range(lv.rank):
                if k == 0:
                    rows.append(spots[i].realization[g])
                else:
                    rows.append(ModuleElement.zero(n, orig_rank))
        comparison[m] = OperatorMatrix(n, orig_rank, rows)

    return StrictificationResult(total, comparison, StrictDoubleComplex(spots),
                                 c.lo, c.hi, edge, complete)


def v_strict_complex(c: ChainComplexPres, depth_margin: int = 2) -> ChainComplexPres:
    """The V-strict free complex quasi-isomorphic to c (total complex)."""
    return strictify_complex(c, depth_margin).total
