"""Oracle-equivalence checks shared by the CLI ``verify`` command and the tests.

An *answer table* holds everything the three queries can say about one
instance: the minimum sufficient / contrastive sizes with witnesses, the
contrastive and sufficient flag for every subset (which fixes every
``k``-decision), and the completion count of every subset.
"""

from __future__ import annotations

import random

import numpy as np

from .constructions import embed_misaligned, indicator_reduction, model_class, self_align
from .core import BitVector, ConstantOne, FeatureSubset
from .errors import ConstructionError
from .fbdd import Fbdd, path_audit
from .linear import Perceptron
from .queries import CubeOracle, cc_query, is_contrastive, is_sufficient, mcr_minimum

FULL_SUBSET_LIMIT = 8


def subsets_for(n: int, rng: random.Random | None = None, sample: int = 64) -> list[FeatureSubset]:
    """Every subset for small n, otherwise a seeded sample plus ∅ and the full set."""
    if n <= FULL_SUBSET_LIMIT:
        return [FeatureSubset.from_mask(m, n) for m in range(1 << n)]
    rng = rng or random.Random(0)
    out = {0, (1 << n) - 1}
    while len(out) < sample:
        out.add(rng.getrandbits(n))
    return [FeatureSubset.from_mask(m, n) for m in sorted(out)]


def answer_table(f, pi, x: BitVector, cap=None) -> dict:
    oracle = CubeOracle(f, pi, x, cap)
    contrastive = oracle.contrastive_table()
    sufficient = oracle.sufficient_table()
    mcr, _ = oracle.smallest(contrastive)
    msr, _ = oracle.smallest(sufficient)
    return {
        "msr": None if msr is None else (msr[0], str(msr[1])),
        "mcr": None if mcr is None else (mcr[0], str(mcr[1])),
        "contrastive": contrastive,
        "sufficient": sufficient,
        "cc": oracle.count_table(),
    }


def tables_equal(a: dict, b: dict) -> bool:
    return (
        a["msr"] == b["msr"]
        and a["mcr"] == b["mcr"]
        and np.array_equal(a["contrastive"], b["contrastive"])
        and np.array_equal(a["sufficient"], b["sufficient"])
        and np.array_equal(a["cc"], b["cc"])
    )


def fast_paths_agree(f, x: BitVector, subsets: list[FeatureSubset], cap=None) -> dict[str, bool]:
    """Each applicable misaligned fast path against the brute-force engine."""
    pi = ConstantOne(f.n)
    out = {}
    if not isinstance(f, (Perceptron, Fbdd)):
        return out
    fast = mcr_minimum(f, pi, x, mode="fast")
    brute = mcr_minimum(f, pi, x, mode="brute", cap=cap)
    out["mcr_minimum"] = (fast.answer, fast.witness) == (brute.answer, brute.witness)
    ok_c = ok_s = ok_cc = True
    for s in subsets:
        ok_c &= is_contrastive(f, pi, x, s, mode="fast") == is_contrastive(f, pi, x, s, mode="brute", cap=cap)
        ok_s &= is_sufficient(f, pi, x, s, mode="fast") == is_sufficient(f, pi, x, s, mode="brute", cap=cap)
        if isinstance(f, Fbdd):
            ok_cc &= cc_query(f, pi, x, s, mode="fast").answer == cc_query(f, pi, x, s, mode="brute", cap=cap).answer
    out["contrastive_check"] = ok_c
    out["sufficiency_check"] = ok_s
    if isinstance(f, Fbdd):
        out["completion_count"] = ok_cc
    return out


def verify_instance(f, pi, x: BitVector, cap=None, seed: int = 0) -> dict:
    """Run every check that applies to (f, pi, x); ``ok`` is their conjunction."""
    rng = random.Random(seed)
    subsets = subsets_for(x.n, rng)
    checks: dict[str, object] = {}
    one = ConstantOne(f.n)
    misaligned = answer_table(f, one, x, cap)

    for name, ok in fast_paths_agree(f, x, subsets, cap).items():
        checks[f"fast_vs_brute.{name}"] = ok

    aligned = answer_table(f, pi, x, cap)
    dual = np.array_equal(aligned["sufficient"], ~aligned["contrastive"][::-1])
    checks["duality"] = bool(dual)

    red = embed_misaligned(f, x)
    checks["embed_misaligned"] = tables_equal(misaligned, answer_table(red.model, red.indicator, x, cap))

    try:
        red = indicator_reduction(f, x)
        checks["indicator_reduction"] = tables_equal(
            misaligned, answer_table(red.model, red.indicator, x, cap)
        )
    except ConstructionError as exc:
        checks["indicator_reduction"] = f"skipped: {exc}"

    try:
        g = self_align(f, pi, x)
        checks["self_align"] = tables_equal(aligned, answer_table(g, ConstantOne(g.n), x, cap))
        if isinstance(g, Fbdd):
            checks["self_align.read_once"] = path_audit(g)
    except ConstructionError as exc:
        checks["self_align"] = f"skipped: {exc}"

    ok = all(v is True for v in checks.values() if isinstance(v, bool))
    return {
        "model_class": model_class(f),
        "n": f.n,
        "input": str(x),
        "subsets_checked": len(subsets),
        "checks": checks,
        "ok": ok,
    }
