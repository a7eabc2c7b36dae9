"""Sufficient / contrastive / completion-count queries, aligned by an indicator.

Two engines answer every query:

* the brute-force engine enumerates completions (per-subset checks) or the
  whole cube (minimum and bounded queries) and is the reference oracle;
* fast paths cover the misaligned (constant-one indicator) perceptron and
  FBDD cases listed as polynomial.

``mode`` selects between them: ``"brute"`` always enumerates, ``"fast"``
requires a fast path and raises ``FastPathUnavailable`` otherwise, ``"auto"``
uses a fast path when one exists.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import comb
from typing import Any

import numpy as np

from .core import (
    BitVector,
    Classifier,
    ConstantOne,
    FeatureSubset,
    check_cap,
    completion_codes,
    cube_values,
    xor_permute,
    evaluate,
    evaluate_codes,
)
from .errors import DimensionError, FastPathUnavailable
from .fbdd import (
    Fbdd,
    fbdd_count_completions_misaligned,
    fbdd_min_change_misaligned,
)
from .linear import (
    Perceptron,
    perceptron_contrastive_check,
    perceptron_min_change_misaligned,
    perceptron_sufficiency_check,
)

MODES = ("auto", "brute", "fast")


@dataclass
class QueryResult:
    query: str  # "msr" | "mcr" | "cc"
    kind: str  # "decision" | "count" | "minimum"
    answer: Any  # bool, int, or (minimum) size / None
    witness: FeatureSubset | None = None
    method: str = "brute"
    in_context_input: bool = True
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "query": self.query,
            "kind": self.kind,
            "answer": self.answer,
            "witness": None if self.witness is None else str(self.witness),
            "method": self.method,
            "in_context_input": self.in_context_input,
            "stats": self.stats,
        }


def is_misaligned(pi: Classifier) -> bool:
    """Whether ``pi`` is structurally the constant-one indicator."""
    if isinstance(pi, ConstantOne):
        return True
    if isinstance(pi, Perceptron):
        return pi.is_constant_one()
    if isinstance(pi, Fbdd):
        return pi.root == "leaf1"
    return False


def _check(f, pi, x, s=None):
    if not (f.n == pi.n == x.n):
        raise DimensionError(f"arities differ: model {f.n}, indicator {pi.n}, input {x.n}")
    if s is not None and s.n != x.n:
        raise DimensionError(f"subset arity {s.n} differs from input arity {x.n}")


def _use_fast(mode: str, available: bool, what: str) -> bool:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "fast" and not available:
        raise FastPathUnavailable(f"no polynomial algorithm for {what}")
    return available and mode != "brute"


# -- per-subset checks --------------------------------------------------------


def _flips(f, pi, x, codes, threads=1):
    fx = evaluate(f, x)
    fv = evaluate_codes(f, codes, threads)
    pv = evaluate_codes(pi, codes, threads)
    return pv & (fv != bool(fx))


def is_sufficient(f, pi, x: BitVector, s: FeatureSubset, *, mode="auto", cap=None) -> bool:
    """Every in-context completion of x restricted to ``s`` keeps f(x)."""
    _check(f, pi, x, s)
    misaligned = is_misaligned(pi)
    if _use_fast(mode, misaligned and isinstance(f, (Perceptron, Fbdd)), "sufficiency"):
        if isinstance(f, Perceptron):
            return perceptron_sufficiency_check(f, x, s)
        return fbdd_count_completions_misaligned(f, x, s.complement()) == 0
    codes = completion_codes(x, s, cap)
    return not _flips(f, pi, x, codes).any()


def is_contrastive(f, pi, x: BitVector, s: FeatureSubset, *, mode="auto", cap=None) -> bool:
    """Some in-context reassignment of the features in ``s`` flips f(x)."""
    _check(f, pi, x, s)
    misaligned = is_misaligned(pi)
    if _use_fast(mode, misaligned and isinstance(f, (Perceptron, Fbdd)), "contrastive check"):
        if isinstance(f, Perceptron):
            return perceptron_contrastive_check(f, x, s)
        return fbdd_count_completions_misaligned(f, x, s) > 0
    codes = completion_codes(x, s.complement(), cap)
    return bool(_flips(f, pi, x, codes).any())


def count_completions(f, pi, x: BitVector, s: FeatureSubset, *, mode="auto", cap=None) -> int:
    """Assignments to ``s`` that are in-context and flip f(x)."""
    return cc_query(f, pi, x, s, mode=mode, cap=cap).answer


def cc_query(f, pi, x, s, *, mode="auto", cap=None, threads=1) -> QueryResult:
    _check(f, pi, x, s)
    start = time.perf_counter()
    in_ctx = bool(evaluate(pi, x))
    if _use_fast(mode, is_misaligned(pi) and isinstance(f, Fbdd), "completion count"):
        count = fbdd_count_completions_misaligned(f, x, s)
        method, examined = "fast", 0
    else:
        codes = completion_codes(x, s.complement(), cap)
        count = int(_flips(f, pi, x, codes, threads).sum())
        method, examined = "brute", len(codes)
    return QueryResult(
        "cc", "count", count, None, method, in_ctx,
        {"completions": examined, "subsets": 1, "time": time.perf_counter() - start},
    )


# -- whole-cube engine --------------------------------------------------------


def _subset_closure(marks: np.ndarray, n: int) -> np.ndarray:
    """``out[S]`` is true iff ``marks[D]`` holds for some ``D ⊆ S`` (masks)."""
    out = marks.copy()
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] |= view[:, 0, :]
    return out


def _subset_sums(values: np.ndarray, n: int) -> np.ndarray:
    """``out[S] = sum(values[D] for D ⊆ S)`` (masks)."""
    out = values.astype(np.int64)
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return out


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.uint8)
    for i in range(n):
        pc.reshape(-1, 2, 1 << i)[:, 1, :] += 1
    return pc


class CubeOracle:
    """Exhaustive tables over {0,1}^n for one (f, pi, x) instance.

    Subset masks use the code convention (feature 1 is the top bit), so for
    sets of equal size the lexicographically smallest sorted index sequence
    is the numerically largest mask.
    """

    def __init__(self, f, pi, x: BitVector, cap=None, threads=1):
        _check(f, pi, x)
        n = x.n
        check_cap(1 << n, cap)
        self.n = n
        self.x = x
        fv = cube_values(f, cap, threads)
        pv = cube_values(pi, cap, threads)
        fx = bool(fv[x.code])
        bad = pv & (fv != fx)
        del fv, pv
        # index by difference mask d = z XOR x
        self.flip_diff = xor_permute(bad, n, x.code)
        self.completions = 1 << n
        self._pc = None

    @property
    def popcounts(self):
        if self._pc is None:
            self._pc = _popcounts(self.n)
        return self._pc

    def contrastive_table(self) -> np.ndarray:
        return _subset_closure(self.flip_diff, self.n)

    def count_table(self) -> np.ndarray:
        """Completion count of every subset at once: flips whose difference
        from x lies inside S."""
        return _subset_sums(self.flip_diff, self.n)

    def sufficient_table(self) -> np.ndarray:
        # S sufficient iff no flipping point agrees with x on S,
        # i.e. no flip difference inside the complement of S
        return ~_subset_closure(self.flip_diff, self.n)[::-1]

    def smallest(self, table: np.ndarray, limit: int | None = None):
        """(size, witness, subsets examined) of the first true subset in
        cardinality-then-lexicographic order, or ``None`` with the count of
        subsets examined up to ``limit``."""
        n = self.n
        pc = self.popcounts
        hits = pc[table]
        top = n if limit is None else min(limit, n)
        if hits.size == 0 or int(hits.min()) > top:
            return None, sum(comb(n, c) for c in range(top + 1))
        size = int(hits.min())
        mask = int(np.flatnonzero(table & (pc == size)).max())
        before = sum(comb(n, c) for c in range(size))
        rank = int(np.count_nonzero(pc[mask + 1 :] == size)) + 1
        return (size, FeatureSubset.from_mask(mask, n)), before + rank


def _result(query, kind, found, examined, completions, method, in_ctx, start, k=None):
    if kind == "minimum":
        answer = None if found is None else found[0]
    else:
        answer = found is not None and found[0] <= k
    witness = None if (found is None or (kind == "decision" and not answer)) else found[1]
    return QueryResult(
        query, kind, answer, witness, method, in_ctx,
        {"completions": completions, "subsets": examined, "time": time.perf_counter() - start},
    )


def _mcr_fast(f, x):
    if isinstance(f, Perceptron):
        return perceptron_min_change_misaligned(f, x)
    return fbdd_min_change_misaligned(f, x)


def _mcr(f, pi, x, k, kind, mode, cap, threads):
    _check(f, pi, x)
    start = time.perf_counter()
    in_ctx = bool(evaluate(pi, x))
    if k is not None and not 0 <= k <= x.n:
        raise ValueError(f"k must lie in 0..{x.n}")
    fast = _use_fast(mode, is_misaligned(pi) and isinstance(f, (Perceptron, Fbdd)), "MCR")
    if fast:
        found = _mcr_fast(f, x)
        return _result("mcr", kind, found, 0, 0, "fast", in_ctx, start, k)
    oracle = CubeOracle(f, pi, x, cap, threads)
    found, examined = oracle.smallest(oracle.contrastive_table(), k)
    return _result("mcr", kind, found, examined, oracle.completions, "brute", in_ctx, start, k)


def _msr(f, pi, x, k, kind, mode, cap, threads):
    _check(f, pi, x)
    start = time.perf_counter()
    in_ctx = bool(evaluate(pi, x))
    if k is not None and not 0 <= k <= x.n:
        raise ValueError(f"k must lie in 0..{x.n}")
    _use_fast(mode, False, "MSR")
    oracle = CubeOracle(f, pi, x, cap, threads)
    found, examined = oracle.smallest(oracle.sufficient_table(), k)
    return _result("msr", kind, found, examined, oracle.completions, "brute", in_ctx, start, k)


def mcr_decide(f, pi, x, k, *, mode="auto", cap=None, threads=1) -> QueryResult:
    """Is there a contrastive set of size at most ``k``?"""
    return _mcr(f, pi, x, k, "decision", mode, cap, threads)


def mcr_minimum(f, pi, x, *, mode="auto", cap=None, threads=1) -> QueryResult:
    return _mcr(f, pi, x, None, "minimum", mode, cap, threads)


def msr_decide(f, pi, x, k, *, mode="auto", cap=None, threads=1) -> QueryResult:
    """Is there a sufficient reason of size at most ``k``?"""
    return _msr(f, pi, x, k, "decision", mode, cap, threads)


def msr_minimum(f, pi, x, *, mode="auto", cap=None, threads=1) -> QueryResult:
    return _msr(f, pi, x, None, "minimum", mode, cap, threads)


def run_query(query, f, pi, x, *, k=None, subset=None, mode="auto", cap=None, threads=1):
    """Dispatch by query name; msr/mcr without ``k`` compute the minimum."""
    if query == "cc":
        if subset is None:
            raise ValueError("cc needs a subset")
        return cc_query(f, pi, x, subset, mode=mode, cap=cap, threads=threads)
    if query == "mcr":
        if k is None:
            return mcr_minimum(f, pi, x, mode=mode, cap=cap, threads=threads)
        return mcr_decide(f, pi, x, k, mode=mode, cap=cap, threads=threads)
    if query == "msr":
        if k is None:
            return msr_minimum(f, pi, x, mode=mode, cap=cap, threads=threads)
        return msr_decide(f, pi, x, k, mode=mode, cap=cap, threads=threads)
    raise ValueError(f"unknown query {query!r}")
