"""Naive itertools oracles, independent of the numpy cube engine."""

from itertools import combinations, product

from aligned_xai.core import BitVector, FeatureSubset
from aligned_xai.fbdd import LEAF0, LEAF1, Fbdd, Node


def cube(n):
    return [BitVector(bits) for bits in product((0, 1), repeat=n)]


def truth(f, n):
    return [f.evaluate(z) for z in cube(n)]


def _points_fixing(x, fixed):
    """Points that agree with x on ``fixed`` (a set of 1-based indices)."""
    for z in cube(x.n):
        if all(z.bits[i - 1] == x.bits[i - 1] for i in fixed):
            yield z


def naive_sufficient(f, pi, x, s):
    fx = f.evaluate(x)
    return all(f.evaluate(z) == fx for z in _points_fixing(x, set(s)) if pi.evaluate(z))


def naive_contrastive(f, pi, x, s):
    fx = f.evaluate(x)
    fixed = set(range(1, x.n + 1)) - set(s)
    return any(f.evaluate(z) != fx for z in _points_fixing(x, fixed) if pi.evaluate(z))


def naive_count(f, pi, x, s):
    fx = f.evaluate(x)
    fixed = set(range(1, x.n + 1)) - set(s)
    return sum(1 for z in _points_fixing(x, fixed) if pi.evaluate(z) and f.evaluate(z) != fx)


def naive_minimum(check, f, pi, x):
    """(size, witness) of the first subset passing ``check`` in
    cardinality-then-lexicographic order, or None."""
    n = x.n
    for size in range(n + 1):
        for combo in combinations(range(1, n + 1), size):
            s = FeatureSubset(n, combo)
            if check(f, pi, x, s):
                return size, s
    return None


def fbdd_and2(n=2):
    """x1 ∧ x2."""
    return Fbdd(n, {0: Node(1, LEAF0, 1), 1: Node(2, LEAF0, LEAF1)}, 0)


def fbdd_var(n, i):
    return Fbdd(n, {0: Node(i, LEAF0, LEAF1)}, 0)


def bv(text):
    return BitVector.parse(text)


def fs(text, n):
    return FeatureSubset.parse(text, n)
