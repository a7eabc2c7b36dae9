"""Bit vectors, feature subsets and the splice/enumeration primitives.

Features are 1-indexed everywhere. A point of the cube {0,1}^n is also
addressed by an integer *code* in which feature 1 is the most significant
bit, so that numeric order of codes is the lexicographic order of the
bit strings.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Protocol, Sequence, runtime_checkable

import numpy as np

from .errors import DimensionError, EnumerationLimitError

DEFAULT_CAP = 1 << 24
CAP_ENV_VAR = "ALIGNED_XAI_CAP"
CHUNK = 1 << 18

_INT64_SAFE = 1 << 62


def default_cap() -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    if raw:
        return int(raw)
    return DEFAULT_CAP


def check_cap(required: int, cap: int | None) -> None:
    limit = default_cap() if cap is None else cap
    if required > limit:
        raise EnumerationLimitError(required, limit)


@dataclass(frozen=True)
class BitVector:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise DimensionError("a bit vector needs at least one feature")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bit vector entries must be 0 or 1: {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "BitVector":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_code(cls, code: int, n: int) -> "BitVector":
        return cls(tuple((code >> (n - i)) & 1 for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def code(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def bit(self, i: int) -> int:
        """Value of feature ``i`` (1-indexed)."""
        return self.bits[i - 1]

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __str__(self):
        return "".join(map(str, self.bits))


_SUBSET_RE = re.compile(r"^\{\s*(\d+(\s*,\s*\d+)*)?\s*\}$")


@dataclass(frozen=True)
class FeatureSubset:
    n: int
    members: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("subset arity must be positive")
        members = tuple(sorted(set(int(i) for i in self.members)))
        for i in members:
            if not 1 <= i <= self.n:
                raise DimensionError(f"feature {i} outside 1..{self.n}")
        object.__setattr__(self, "members", members)

    @classmethod
    def parse(cls, text: str, n: int) -> "FeatureSubset":
        if not _SUBSET_RE.match(text.strip()):
            raise ValueError(f"not a subset literal: {text!r}")
        inner = text.strip()[1:-1].strip()
        items = [int(t) for t in inner.split(",")] if inner else []
        if len(items) != len(set(items)):
            raise ValueError(f"duplicate feature index in {text!r}")
        return cls(n, tuple(items))

    @classmethod
    def full(cls, n: int) -> "FeatureSubset":
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def empty(cls, n: int) -> "FeatureSubset":
        return cls(n, ())

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "FeatureSubset":
        return cls(n, tuple(i for i in range(1, n + 1) if (mask >> (n - i)) & 1))

    @property
    def mask(self) -> int:
        out = 0
        for i in self.members:
            out |= 1 << (self.n - i)
        return out

    def complement(self) -> "FeatureSubset":
        inside = set(self.members)
        return FeatureSubset(self.n, tuple(i for i in range(1, self.n + 1) if i not in inside))

    def __contains__(self, i):
        return i in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __str__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


@runtime_checkable
class Classifier(Protocol):
    """Anything with an arity, a scalar evaluator and a batch evaluator.

    ``evaluate_batch`` receives an (m, n) uint8 matrix of points and returns a
    boolean vector; it must agree exactly with ``evaluate``.
    """

    n: int

    def evaluate(self, x: BitVector) -> int: ...

    def evaluate_batch(self, bits: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class ConstantOne:
    """The indicator that marks every point as in-context."""

    n: int

    def evaluate(self, x: BitVector) -> int:
        _check_arity(self.n, x)
        return 1

    def evaluate_batch(self, bits: np.ndarray) -> np.ndarray:
        return np.ones(bits.shape[0], dtype=bool)


def _check_arity(n: int, x: BitVector) -> None:
    if x.n != n:
        raise DimensionError(f"input has {x.n} features, model expects {n}")


def evaluate(f: Classifier, x: BitVector) -> int:
    _check_arity(f.n, x)
    return int(f.evaluate(x))


def splice(x: BitVector, z: BitVector, s: FeatureSubset) -> BitVector:
    """Take features in ``s`` from ``x`` and all others from ``z``."""
    if not (x.n == z.n == s.n):
        raise DimensionError(f"splice arities differ: {x.n}, {z.n}, {s.n}")
    return BitVector(tuple(x.bits[i - 1] if i in s else z.bits[i - 1] for i in range(1, x.n + 1)))


def enumerate_completions(
    x: BitVector, fixed: FeatureSubset, cap: int | None = None
) -> Iterator[BitVector]:
    """Yield every point that agrees with ``x`` on ``fixed``, lexicographically."""
    if x.n != fixed.n:
        raise DimensionError(f"input has {x.n} features, subset has {fixed.n}")
    free = fixed.complement().members
    check_cap(1 << len(free), cap)
    base = list(x.bits)
    for values in product((0, 1), repeat=len(free)):
        for i, v in zip(free, values):
            base[i - 1] = v
        yield BitVector(tuple(base))


def completion_codes(x: BitVector, fixed: FeatureSubset, cap: int | None = None) -> np.ndarray:
    """Codes of the points ``enumerate_completions`` yields, same order."""
    if x.n != fixed.n:
        raise DimensionError(f"input has {x.n} features, subset has {fixed.n}")
    n = x.n
    free = fixed.complement().members
    check_cap(1 << len(free), cap)
    codes = np.zeros(1, dtype=np.int64)
    base = x.code & fixed.mask
    # later (less significant) free features vary fastest
    for i in free:
        bit = np.int64(1 << (n - i))
        codes = np.stack([codes, codes | bit], axis=1).ravel()
    return codes | np.int64(base)


def codes_to_bits(codes: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.uint8)


def evaluate_codes(
    f: Classifier, codes: np.ndarray, threads: int = 1, chunk: int = CHUNK
) -> np.ndarray:
    """Batch-evaluate ``f`` at the given point codes, chunked."""
    n = f.n
    if isinstance(f, ConstantOne):
        return np.ones(len(codes), dtype=bool)
    starts = range(0, len(codes), chunk)

    def run(start):
        return f.evaluate_batch(codes_to_bits(codes[start : start + chunk], n))

    if threads > 1 and len(codes) > chunk:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    if not parts:
        return np.zeros(0, dtype=bool)
    return np.concatenate(parts)


def cube_values(f: Classifier, cap: int | None = None, threads: int = 1) -> np.ndarray:
    """Truth table of ``f`` indexed by point code."""
    check_cap(1 << f.n, cap)
    total = 1 << f.n
    if isinstance(f, ConstantOne):
        return np.ones(total, dtype=bool)
    out = np.empty(total, dtype=bool)
    starts = range(0, total, CHUNK)

    def run(start):
        codes = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        out[start : start + len(codes)] = f.evaluate_batch(codes_to_bits(codes, f.n))

    if threads > 1 and total > CHUNK:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, starts))
    else:
        for start in starts:
            run(start)
    return out


def xor_permute(table: np.ndarray, n: int, code: int) -> np.ndarray:
    """``out[d] = table[d ^ code]`` without materializing an index array."""
    out = table
    for i in range(n):
        if (code >> i) & 1:
            out = out.reshape(-1, 2, 1 << i)[:, ::-1, :].reshape(-1)
    return np.ascontiguousarray(out)


def int_affine(h: np.ndarray, weights: Sequence[Sequence[int]], bias: Sequence[int], bound: int):
    """Exact ``h @ W + b`` over integers.

    ``bound`` is an upper bound on ``max |h|``; int64 is used only when the
    result provably fits, otherwise Python integers (object arrays).
    """
    col_abs = [sum(abs(row[j]) for row in weights) for j in range(len(bias))]
    out_bound = bound * max(col_abs, default=0) + max((abs(b) for b in bias), default=0)
    if out_bound < _INT64_SAFE and h.dtype != object:
        w = np.array(weights, dtype=np.int64).reshape(len(weights), len(bias))
        return h.astype(np.int64) @ w + np.array(bias, dtype=np.int64), out_bound
    w = np.array([[int(v) for v in row] for row in weights], dtype=object).reshape(
        len(weights), len(bias)
    )
    return h.astype(object) @ w + np.array([int(b) for b in bias], dtype=object), out_bound
