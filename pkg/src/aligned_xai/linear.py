"""Perceptrons with exact rational weights.

``f(x) = 1`` iff ``<w, x> + b > 0``. Every comparison is done on
``fractions.Fraction`` values (or on integers after clearing denominators),
so inputs sitting exactly on the decision boundary are classified as 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .core import BitVector, FeatureSubset, _check_arity, int_affine
from .errors import DimensionError

HALF = Fraction(1, 2)


def to_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float weight {value!r}; pass a string or Fraction")
    return Fraction(value)


@dataclass(frozen=True)
class Perceptron:
    weights: tuple[Fraction, ...]
    bias: Fraction = Fraction(0)

    def __post_init__(self):
        weights = tuple(to_fraction(w) for w in self.weights)
        if not weights:
            raise DimensionError("a perceptron needs at least one input")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", to_fraction(self.bias))

    @property
    def n(self) -> int:
        return len(self.weights)

    def score(self, x: BitVector) -> Fraction:
        _check_arity(self.n, x)
        return sum((w for w, b in zip(self.weights, x.bits) if b), Fraction(0)) + self.bias

    def evaluate(self, x: BitVector) -> int:
        return int(self.score(x) > 0)

    def integer_form(self) -> tuple[list[int], int, int]:
        """Weights and bias scaled by the least common denominator."""
        scale = lcm(*(v.denominator for v in self.weights), self.bias.denominator)
        return [int(w * scale) for w in self.weights], int(self.bias * scale), scale

    def evaluate_batch(self, bits: np.ndarray) -> np.ndarray:
        if bits.shape[1] != self.n:
            raise DimensionError(f"batch has {bits.shape[1]} features, model expects {self.n}")
        w, b, _ = self.integer_form()
        scores, _ = int_affine(bits, [[v] for v in w], [b], 1)
        return np.asarray(scores[:, 0] > 0, dtype=bool)

    def is_constant_one(self) -> bool:
        return all(w == 0 for w in self.weights) and self.bias > 0


def perceptron_evaluate(f: Perceptron, x: BitVector) -> int:
    return f.evaluate(x)


def perceptron_negate(f: Perceptron) -> Perceptron:
    """Complement classifier: integer rescale, shift the bias by -1/2, negate."""
    w, b, _ = f.integer_form()
    shifted = Fraction(b) - HALF
    return Perceptron(tuple(Fraction(-v) for v in w), -shifted)


def perceptron_indicator(x: BitVector, wplus=1, wminus=-1) -> Perceptron:
    """Perceptron accepting exactly ``x``.

    Features set in ``x`` get ``wplus``, the others ``wminus``; the bias is
    ``-(sum of weights on x's ones) + margin``. The margin is 1/2 unless a
    weight magnitude is below 1, in which case half of the smallest magnitude
    is used so that every other point still scores below zero.
    """
    wplus, wminus = to_fraction(wplus), to_fraction(wminus)
    if wplus <= 0:
        raise ValueError(f"wplus must be positive, got {wplus}")
    if wminus >= 0:
        raise ValueError(f"wminus must be negative, got {wminus}")
    weights = tuple(wplus if b else wminus for b in x.bits)
    margin = min(HALF, wplus / 2, -wminus / 2)
    bias = -sum((w for w, b in zip(weights, x.bits) if b), Fraction(0)) + margin
    return Perceptron(weights, bias)


def perceptron_constant_one(n: int) -> Perceptron:
    if n < 1:
        raise DimensionError("arity must be positive")
    return Perceptron((Fraction(0),) * n, Fraction(1))


def _check(f: Perceptron, x: BitVector, s: FeatureSubset) -> None:
    if not (f.n == x.n == s.n):
        raise DimensionError(f"arities differ: model {f.n}, input {x.n}, subset {s.n}")


def _reachable_range(f: Perceptron, x: BitVector, varied: FeatureSubset) -> tuple[Fraction, Fraction]:
    fixed = sum(
        (w for i, (w, b) in enumerate(zip(f.weights, x.bits), 1) if b and i not in varied),
        Fraction(0),
    ) + f.bias
    hi = sum((max(f.weights[i - 1], 0) for i in varied), Fraction(0))
    lo = sum((min(f.weights[i - 1], 0) for i in varied), Fraction(0))
    return fixed + lo, fixed + hi


def perceptron_contrastive_check(f: Perceptron, x: BitVector, s: FeatureSubset) -> bool:
    """Can some reassignment of the features in ``s`` flip f(x)?

    Features outside ``s`` keep x's values. The set is contrastive iff the
    reachable score interval straddles the threshold: max > 0 and min <= 0.
    """
    _check(f, x, s)
    lo, hi = _reachable_range(f, x, s)
    return hi > 0 and lo <= 0


def perceptron_sufficiency_check(f: Perceptron, x: BitVector, s: FeatureSubset) -> bool:
    """Does fixing ``s`` to x's values force f(x) for every completion?"""
    _check(f, x, s)
    lo, hi = _reachable_range(f, x, s.complement())
    return not (hi > 0 and lo <= 0)


def _gains(f: Perceptron, x: BitVector, toward_one: bool) -> list[Fraction]:
    # score movement in the wanted direction obtained by flipping each feature alone
    out = []
    for w, b in zip(f.weights, x.bits):
        delta = -w if b else w
        out.append(max(delta if toward_one else -delta, Fraction(0)))
    return out


def perceptron_min_change_misaligned(
    f: Perceptron, x: BitVector
) -> tuple[int, FeatureSubset] | None:
    """Smallest set of features whose flip changes f(x), with the
    lexicographically smallest witness of that size; ``None`` if no flip exists.

    Flipping a feature moves the score by an amount independent of the other
    flips, so the largest movements taken first give the minimum size.
    """
    _check_arity(f.n, x)
    n = f.n
    score = f.score(x)
    toward_one = score <= 0
    gains = _gains(f, x, toward_one)

    def enough(total: Fraction) -> bool:
        return score + total > 0 if toward_one else score - total <= 0

    order = sorted(range(n), key=lambda i: (-gains[i], i))
    total = Fraction(0)
    size = None
    if enough(total):
        size = 0
    else:
        for count, i in enumerate(order, 1):
            total += gains[i]
            if enough(total):
                size = count
                break
    if size is None:
        return None

    # lexicographically smallest witness of that size: include each index
    # when the best completion from later indices still crosses the threshold
    chosen: list[int] = []
    picked = Fraction(0)
    for i in range(n):
        slots = size - len(chosen)
        if slots == 0:
            break
        rest = sorted((gains[j] for j in range(i + 1, n)), reverse=True)[: slots - 1]
        if len(rest) == slots - 1 and enough(picked + gains[i] + sum(rest, Fraction(0))):
            chosen.append(i + 1)
            picked += gains[i]
    return size, FeatureSubset(n, tuple(chosen))
