"""System-level relations: equivalence, embedding and covering.

Each relation searches maps between generator indices and hands the
reordered families to the classifier of the common space.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .complex_linear import classify_complex_linear
from .core import (DEFAULT_TOL, Category, GeneratorSet, ResidualReport, SpaceKind,
                   SpaceMismatch, Status, ToleranceConfig, Verdict)
from .mobius import classify_real_mobius
from .projective import classify_projective
from .real_linear import classify_real_linear
from .witness import IndexMap, LinearMap

_CLASSIFIERS = {
    SpaceKind.COMPLEX_LINEAR: classify_complex_linear,
    SpaceKind.COMPLEX_PROJECTIVE: classify_projective,
    SpaceKind.REAL_LINEAR: classify_real_linear,
    SpaceKind.REAL_MOBIUS: classify_real_mobius,
}


def classify(g1: GeneratorSet, g2: GeneratorSet, category,
             tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Classify two families with the generator correspondence fixed (i -> i)."""
    if g1.space != g2.space:
        raise SpaceMismatch(f"{g1.space} vs {g2.space}")
    return _CLASSIFIERS[g1.space.kind](g1, g2, Category(category), tol)


def _arrange(g: GeneratorSet, indices, inverted=None) -> GeneratorSet:
    mats = []
    for k, i in enumerate(indices):
        m = g[i]
        if inverted is not None and inverted[k]:
            m = np.linalg.inv(m)
        mats.append(m)
    return GeneratorSet(g.space, mats)


def _compatibility(g1, g2, category, tol, inversion):
    """ok[i][j][flip]: may source generator i (inverted if flip) match target j?

    A conjugacy of families conjugates each matched pair of generators, so
    a NotEquivalent single-generator verdict rules the pair out.
    """
    flips = (False, True) if inversion else (False,)
    ok = {}
    for i in range(len(g1)):
        for j in range(len(g2)):
            for flip in flips:
                src = _arrange(g1, [i], [flip])
                v = classify(src, g2.subset([j]), category, tol)
                ok[i, j, flip] = v.status is not Status.NOT_EQUIVALENT
    return ok


def _candidates(nu1, nu2, ok, inversion):
    flips_all = list(itertools.product((False, True), repeat=nu1)) if inversion else [
        (False,) * nu1]
    for image in itertools.permutations(range(nu2), nu1):
        for flips in flips_all:
            if all(ok[i, image[i], flips[i]] for i in range(nu1)):
                yield image, flips


def _search(g1, g2, category, tol, allow_inversion, relation):
    category = Category(category)
    if g1.space != g2.space:
        raise SpaceMismatch(f"{g1.space} vs {g2.space}")
    nu1, nu2 = len(g1), len(g2)
    if relation == "equivalence" and nu1 != nu2:
        return Verdict(Status.NOT_EQUIVALENT, category, reason="generator counts differ",
                       details={"counts": [nu1, nu2]}, relation=relation)
    if nu1 > nu2:
        return Verdict(Status.NOT_EQUIVALENT, category,
                       reason="source has more generators than target",
                       details={"counts": [nu1, nu2]}, relation=relation)
    if nu1 == 0:
        size = g1.space.matrix_size
        w = IndexMap((), LinearMap(np.eye(size), projective=g1.space.is_projective))
        return Verdict(Status.EQUIVALENT, category, w, "empty family",
                       ResidualReport(0.0, 0), {"index_map": []}, relation)
    ok = _compatibility(g1, g2, category, tol, allow_inversion)
    tried = 0
    inconclusive = None
    for image, flips in _candidates(nu1, nu2, ok, allow_inversion):
        tried += 1
        v = classify(_arrange(g1, range(nu1), flips), _arrange(g2, image), category, tol)
        if v.status is Status.EQUIVALENT:
            v.witness = IndexMap(image, v.witness, flips)
            v.relation = relation
            v.details["index_map"] = list(image)
            v.details["inverted"] = list(flips)
            v.details["candidates_tried"] = tried
            if relation == "covering":
                v.details["hit_targets"] = sorted(image)
            return v
        if v.status is Status.INCONCLUSIVE and inconclusive is None:
            inconclusive = v
    total = math.perm(nu2, nu1) * (2 ** nu1 if allow_inversion else 1)
    if inconclusive is not None:
        inconclusive.relation = relation
        inconclusive.details["candidates_tried"] = tried
        return inconclusive
    return Verdict(Status.NOT_EQUIVALENT, category,
                   reason="no generator correspondence yields a conjugacy",
                   details={"candidates_tried": tried, "candidates_total": total},
                   relation=relation)


def equivalence(g1: GeneratorSet, g2: GeneratorSet, category=Category.TOPOLOGICAL,
                tol: ToleranceConfig = DEFAULT_TOL, allow_inversion: bool = False) -> Verdict:
    """Equivalence of systems: a bijection of generators plus a conjugacy of
    the reordered families.  Bijections are tried in lexicographic order and
    the first Equivalent verdict wins."""
    return _search(g1, g2, category, tol, allow_inversion, "equivalence")


def embedding(g1: GeneratorSet, g2: GeneratorSet, category=Category.TOPOLOGICAL,
              tol: ToleranceConfig = DEFAULT_TOL, allow_inversion: bool = False) -> Verdict:
    """Embedding: an injection of G1's generators into G2's conjugated as a family."""
    return _search(g1, g2, category, tol, allow_inversion, "embedding")


def covering(g1: GeneratorSet, g2: GeneratorSet, category=Category.TOPOLOGICAL,
             tol: ToleranceConfig = DEFAULT_TOL, allow_inversion: bool = False) -> Verdict:
    """Covering: the same injective search, labeled with the target generators hit."""
    return _search(g1, g2, category, tol, allow_inversion, "covering")
