"""Mayer-Vietoris and Cech complexes of localizations.

MV(F) places the direct sum of the R_(f_I) over the size-(i+1) subsets I
in degree i, with signed natural localization maps; C(G) is the tensor
product of the two-step complexes R -> R_g; their degreewise tensor
product computes cohomology with support.  All natural maps are
polynomial multipliers thanks to the family-wide generator exponent, and
both well-definedness and the chain property are verified by Groebner
membership.
"""

from __future__ import annotations

import itertools
import logging
from typing import Sequence

from .errors import InconsistencyError, InvalidInputError
from .groebner import ModuleElement, OperatorMatrix
from .localization import LocalizationFamily
from .presentations import ChainComplexPres, DModPresentation
from .weyl import WeylElement

log = logging.getLogger("derham.mv")


class MVIndex:
    """A strictly increasing index subset with its sign bookkeeping."""

    __slots__ = ("indices",)

    def __init__(self, indices):
        idx = tuple(indices)
        if list(idx) != sorted(set(idx)):
            raise InvalidInputError("index set must be strictly increasing")
        self.indices = idx

    def sgn(self, j: int) -> int:
        """Number of elementary permutations needed to sort (indices, j)."""
        if j in self.indices:
            raise InvalidInputError(f"{j} already present in {self.indices}")
        return sum(1 for i in self.indices if i > j)

    def insert(self, j: int) -> "MVIndex":
        return MVIndex(tuple(sorted(self.indices + (j,))))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other):
        return isinstance(other, MVIndex) and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __repr__(self):
        return f"MVIndex{self.indices}"


def _direct_sum(n: int, blocks: Sequence[DModPresentation]) -> DModPresentation:
    rank = sum(b.rank for b in blocks)
    rels = []
    offset = 0
    for b in blocks:
        for r in b.relations:
            comps = [WeylElement.zero(n)] * rank
            for j, c in enumerate(r.components):
                comps[offset + j] = c
            rels.append(ModuleElement(n, comps))
        offset += b.rank
    return DModPresentation(n, rank, rels)


def _assemble(n: int, layers: list, maps: dict, family: LocalizationFamily,
              verify: bool) -> ChainComplexPres:
    """layers: per degree, ordered list of block keys; maps: (src_key,
    dst_key) -> multiplier operator (signed)."""
    modules = []
    offsets = []
    for layer in layers:
        blocks = [family.modules[key].presentation for key in layer]
        modules.append(_direct_sum(n, blocks))
        off = {}
        total = 0
        for key, b in zip(layer, blocks):
            off[key] = total
            total += b.rank
        offsets.append(off)

    diffs = []
    for t in range(len(layers) - 1):
        src_layer, dst_layer = layers[t], layers[t + 1]
        tgt_rank = modules[t + 1].rank
        rows = []
        for key in src_layer:
            comps = [WeylElement.zero(n)] * tgt_rank
            for dst in dst_layer:
                mult = maps.get((key, dst))
                if mult is not None:
                    comps[offsets[t + 1][dst]] = mult
            rows.append(ModuleElement(n, comps))
        diffs.append(OperatorMatrix(n, tgt_rank, rows))

    cplx = ChainComplexPres(n, 0, modules, diffs)
    if verify:
        _verify_natural_maps(family, maps)
        cplx.check_chain()
    return cplx


def _verify_natural_maps(family: LocalizationFamily, maps: dict):
    """Each source relation must land in the target relations."""
    for (src, dst), mult in maps.items():
        source = family.modules[src].presentation
        target = family.modules[dst].presentation
        for rel in source.relations:
            img = ModuleElement(family.n, [rel.components[0] * mult])
            if not target.contains_relation(img):
                raise InconsistencyError(
                    f"natural localization map {src} -> {dst} is not well defined")


def mv_complex(family: LocalizationFamily, r: int, verify: bool = True) -> ChainComplexPres:
    """MV^i = direct sum of R_(f_I) over |I| = i+1, for 0 <= i <= r-1."""
    if r < 1:
        raise InvalidInputError("Mayer-Vietoris complex needs at least one polynomial")
    n = family.n
    layers = []
    for size in range(1, r + 1):
        layers.append([tuple(c) for c in itertools.combinations(range(r), size)])
    maps = {}
    for t in range(r - 1):
        for key in layers[t]:
            idx = MVIndex(key)
            for j in range(r):
                if j in key:
                    continue
                dst = tuple(sorted(key + (j,)))
                sign = (-1) ** idx.sgn(j)
                maps[(key, dst)] = family.multiplier(key, dst).scale(sign)
    return _assemble(n, layers, maps, family, verify)


def cech_complex(family, s: int = None, offset: int = 0,
                 verify: bool = True) -> ChainComplexPres:
    """C^j = direct sum of R_(G_J) over |J| = j, 0 <= j <= s (G_empty = 1).

    Accepts either a prepared LocalizationFamily (with `s` factors starting
    at `offset`) or a plain list of polynomials.  offset shifts the factor
    indices inside the family (used when the family also holds the
    Mayer-Vietoris factors).
    """
    if not isinstance(family, LocalizationFamily):
        polys = list(family)
        if not polys:
            raise InvalidInputError("Cech complex needs at least one polynomial")
        family = family_for_cech(polys[0].n, polys, verify=verify)
        s = len(polys)
    if s is None or s < 1:
        raise InvalidInputError("Cech complex needs at least one polynomial")
    n = family.n
    layers = []
    for size in range(0, s + 1):
        layers.append([tuple(offset + i for i in c)
                       for c in itertools.combinations(range(s), size)])
    maps = {}
    for t in range(s):
        for key in layers[t]:
            for j in range(offset, offset + s):
                if j in key:
                    continue
                dst = tuple(sorted(key + (j,)))
                sign = (-1) ** sum(1 for i in key if i < j)
                maps[(key, dst)] = family.multiplier(key, dst).scale(sign)
    return _assemble(n, layers, maps, family, verify)


def mv_tensor_cech(family, r=None, s: int = None,
                   verify: bool = True) -> ChainComplexPres:
    """Total complex of MV(F) tensor C(G): blocks R_(f_I g_J) in total
    degree (|I| - 1) + |J|, Cech maps signed by the Mayer-Vietoris degree.

    Accepts a prepared LocalizationFamily (F on factor indices 0..r-1 and
    G on r..r+s-1) or two plain polynomial lists (F, G).
    """
    if not isinstance(family, LocalizationFamily):
        F, G = list(family), list(r)
        if not F or not G:
            raise InvalidInputError("support computation needs nonempty F and G")
        family = family_for_support(F[0].n, F, G, verify=verify)
        r, s = len(F), len(G)
    if r is None or s is None or r < 1 or s < 1:
        raise InvalidInputError("support computation needs nonempty F and G")
    n = family.n
    top = (r - 1) + s
    layers = []
    blocks_by_degree = {}
    for isize in range(1, r + 1):
        for jsize in range(0, s + 1):
            t = (isize - 1) + jsize
            for I in itertools.combinations(range(r), isize):
                for J in itertools.combinations(range(r, r + s), jsize):
                    blocks_by_degree.setdefault(t, []).append((I, J))
    for t in range(top + 1):
        layer = sorted(blocks_by_degree.get(t, []))
        layers.append([tuple(sorted(I + J)) for I, J in layer])
    # keys must stay unambiguous: record the (I, J) split per flattened key
    split = {}
    for t in range(top + 1):
        for I, J in sorted(blocks_by_degree.get(t, [])):
            split[tuple(sorted(I + J))] = (I, J)

    maps = {}
    for t in range(top):
        for key in layers[t]:
            I, J = split[key]
            idx = MVIndex(I)
            for i in range(r):
                if i in I:
                    continue
                dst = tuple(sorted(key + (i,)))
                sign = (-1) ** idx.sgn(i)
                maps[(key, dst)] = family.multiplier(key, dst).scale(sign)
            for j in range(r, r + s):
                if j in J:
                    continue
                dst = tuple(sorted(key + (j,)))
                sign = (-1) ** ((len(I) - 1) + sum(1 for q in J if q < j))
                maps[(key, dst)] = family.multiplier(key, dst).scale(sign)
    return _assemble(n, layers, maps, family, verify)


def family_for_mv(n: int, polys: Sequence[WeylElement], overrides=None,
                  verify: bool = True) -> LocalizationFamily:
    r = len(polys)
    index_sets = []
    for size in range(1, r + 1):
        index_sets.extend(itertools.combinations(range(r), size))
    return LocalizationFamily(n, polys, index_sets, overrides, verify=verify)


def family_for_cech(n: int, polys: Sequence[WeylElement], overrides=None,
                    verify: bool = True) -> LocalizationFamily:
    s = len(polys)
    index_sets = [()]
    for size in range(1, s + 1):
        index_sets.extend(itertools.combinations(range(s), size))
    return LocalizationFamily(n, polys, index_sets, overrides, verify=verify)


def family_for_support(n: int, polys: Sequence[WeylElement],
                       support_polys: Sequence[WeylElement], overrides=None,
                       verify: bool = True) -> LocalizationFamily:
    r, s = len(polys), len(support_polys)
    index_sets = []
    for isize in range(1, r + 1):
        for jsize in range(0, s + 1):
            for I in itertools.combinations(range(r), isize):
                for J in itertools.combinations(range(r, r + s), jsize):
                    index_sets.append(I + J)
    return LocalizationFamily(n, list(polys) + list(support_polys), index_sets,
                              overrides, verify=verify)
