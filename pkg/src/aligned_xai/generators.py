"""Seeded random instances for the test suites and the benchmark."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import BitVector, FeatureSubset
from .fbdd import LEAF0, LEAF1, Fbdd, Node
from .linear import Perceptron
from .mlp import AND, NOT, OR, RELU, STEP, BooleanCircuit, Gate, Layer, Mlp


def random_bits(rng: random.Random, n: int) -> BitVector:
    return BitVector(tuple(rng.randint(0, 1) for _ in range(n)))


def random_subset(rng: random.Random, n: int, p: float = 0.5) -> FeatureSubset:
    return FeatureSubset(n, tuple(i for i in range(1, n + 1) if rng.random() < p))


def random_rational(rng: random.Random, bound: int = 4, dens=(1, 2, 3, 4)) -> Fraction:
    d = rng.choice(dens)
    return Fraction(rng.randint(-bound * d, bound * d), d)


def random_perceptron(rng: random.Random, n: int, bound: int = 4, dens=(1, 2, 3, 4)) -> Perceptron:
    w = tuple(random_rational(rng, bound, dens) for _ in range(n))
    # keep the threshold inside the reachable score range most of the time
    lo = sum(min(v, 0) for v in w)
    hi = sum(max(v, 0) for v in w)
    span = int(hi - lo) + 1
    b = -(lo + Fraction(rng.randint(0, span * 4), 4))
    return Perceptron(w, b)


def random_fbdd(rng: random.Random, n: int, nodes: int | None = None) -> Fbdd:
    """Free BDD with shared subgraphs.

    Nodes are created bottom-up. A new node testing feature v only links to
    existing nodes whose support (features tested anywhere below) excludes v,
    so every path is read-once by construction.
    """
    nodes = nodes if nodes is not None else rng.randint(1, 3 * n)
    table: dict[int, Node] = {}
    support: dict = {LEAF0: 0, LEAF1: 0}
    refs: list = [LEAF0, LEAF1]
    for nid in range(nodes):
        v = rng.randint(1, n)
        bit = 1 << v
        allowed = [r for r in refs if not support[r] & bit]
        # favour recent nodes so the diagram gets some depth
        weights = [1.0 + (3.0 if isinstance(r, int) and r >= nid - 4 else 0.0) for r in allowed]
        lo, hi = rng.choices(allowed, weights, k=2)
        if lo == hi:
            hi = LEAF1 if lo == LEAF0 else LEAF0
        table[nid] = Node(v, lo, hi)
        support[nid] = bit | support[lo] | support[hi]
        refs.append(nid)
    if not table:
        return Fbdd(n, {}, rng.choice((LEAF0, LEAF1)))
    return Fbdd(n, table, nodes - 1)


def layered_fbdd(rng: random.Random, layers: int, width: int, block: int = 2) -> Fbdd:
    """Large read-once diagram: layer l tests features from its own block.

    Features are not globally ordered (each node picks any feature of its
    block), so the result is free rather than ordered. Edges go to the next
    layer or, rarely, to a leaf.
    """
    n = layers * block
    table: dict[int, Node] = {}
    below: list = [LEAF0, LEAF1]
    nid = 0
    for layer in range(layers - 1, -1, -1):
        current = []
        w = 1 if layer == 0 else width
        for _ in range(w):
            v = layer * block + rng.randint(1, block)

            def pick():
                if rng.random() < 0.05:
                    return rng.choice((LEAF0, LEAF1))
                return rng.choice(below)

            lo, hi = pick(), pick()
            if lo == hi:
                hi = LEAF1 if lo == LEAF0 else LEAF0
            table[nid] = Node(v, lo, hi)
            current.append(nid)
            nid += 1
        below = current
    return Fbdd(n, table, below[0])


def random_mlp(rng: random.Random, n: int, hidden: int | None = None, width: int = 3,
               bound: int = 2) -> Mlp:
    hidden = rng.randint(0, 2) if hidden is None else hidden
    layers = []
    prev = n
    for _ in range(hidden):
        w = rng.randint(1, width)
        layers.append(Layer(
            tuple(tuple(random_rational(rng, bound, (1, 2)) for _ in range(w)) for _ in range(prev)),
            tuple(random_rational(rng, bound, (1, 2)) for _ in range(w)),
            RELU,
        ))
        prev = w
    layers.append(Layer(
        tuple((random_rational(rng, bound, (1, 2)),) for _ in range(prev)),
        (random_rational(rng, bound, (1, 2)),),
        STEP,
    ))
    return Mlp(n, layers)


def random_circuit(rng: random.Random, n: int, gates: int | None = None) -> BooleanCircuit:
    gates = gates if gates is not None else rng.randint(1, 2 * n)
    out: list[Gate] = []
    for k in range(gates):
        refs = [("x", i) for i in range(1, n + 1)] + [("g", j) for j in range(k)]
        kind = rng.choice((AND, OR, NOT))
        if kind == NOT:
            ins = (rng.choice(refs),)
        else:
            ins = tuple(rng.sample(refs, min(len(refs), rng.randint(2, 3))))
        out.append(Gate(kind, ins))
    return BooleanCircuit(n, out, ("g", gates - 1))


def random_ssp(rng: random.Random, m_max: int = 12, v_max: int = 20):
    """SSP instance; about half the targets are sums of an actual k-subset."""
    from .constructions import SspInstance

    m = rng.randint(1, m_max)
    values = tuple(rng.randint(1, v_max) for _ in range(m))
    k = rng.randint(0, m)
    if rng.random() < 0.5:
        T = sum(rng.sample(values, k))
    else:
        T = rng.randint(0, sum(values) + 2)
    return SspInstance(values, k, T)
