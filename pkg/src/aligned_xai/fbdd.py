"""Free binary decision diagrams.

A diagram is a table of internal nodes ``id -> Node(var, low, high)`` plus a
root reference. References are node ids (ints) or one of the two leaf
markers ``LEAF0`` / ``LEAF1``. ``Fbdd`` additionally enforces the read-once
property; ``RawDiagram`` is the unrestricted output of the ∧ / → grafting
step and remembers which phase (``"t"`` prefix, ``"s"`` suffix) each node
came from so it can be repaired into an ``Fbdd``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .core import BitVector, FeatureSubset, _check_arity
from .errors import DimensionError, StructuralError

LEAF0 = "leaf0"
LEAF1 = "leaf1"
LEAVES = (LEAF0, LEAF1)

Ref = Union[int, str]


@dataclass(frozen=True)
class Node:
    var: int
    low: Ref
    high: Ref

    def child(self, bit: int) -> Ref:
        return self.high if bit else self.low


def leaf(value: int) -> str:
    return LEAF1 if value else LEAF0


def _is_leaf(ref: Ref) -> bool:
    return isinstance(ref, str)


class Diagram:
    """Rooted DAG with binary branching; structure is validated on construction."""

    def __init__(self, n: int, nodes: Mapping[int, Node], root: Ref):
        if n < 1:
            raise StructuralError("arity must be positive")
        self.n = n
        self.nodes = dict(nodes)
        self.root = root
        self._order = self._validate()
        self._arrays = None

    def _validate(self) -> list[int]:
        def check_ref(ref):
            if _is_leaf(ref):
                if ref not in LEAVES:
                    raise StructuralError(f"unknown leaf marker {ref!r}")
            elif ref not in self.nodes:
                raise StructuralError(f"dangling node reference {ref!r}")

        check_ref(self.root)
        for nid, node in self.nodes.items():
            if not 1 <= node.var <= self.n:
                raise StructuralError(f"node {nid} tests feature {node.var} outside 1..{self.n}")
            check_ref(node.low)
            check_ref(node.high)
        # iterative DFS from the root: children-first order, cycle detection
        order: list[int] = []
        state: dict[int, int] = {}
        if _is_leaf(self.root):
            return order
        stack = [(self.root, False)]
        while stack:
            nid, done = stack.pop()
            if done:
                state[nid] = 2
                order.append(nid)
                continue
            if state.get(nid) == 2:
                continue
            if state.get(nid) == 1:
                raise StructuralError(f"cycle through node {nid}")
            state[nid] = 1
            stack.append((nid, True))
            node = self.nodes[nid]
            for child in (node.high, node.low):
                if _is_leaf(child):
                    continue
                if state.get(child) == 1:
                    raise StructuralError(f"cycle through node {child}")
                if state.get(child) != 2:
                    stack.append((child, False))
        return order

    @property
    def order(self) -> list[int]:
        """Reachable internal nodes, every node after all of its descendants."""
        return self._order

    @property
    def size(self) -> int:
        """Number of edges among reachable nodes."""
        return 2 * len(self._order)

    def evaluate(self, x: BitVector) -> int:
        _check_arity(self.n, x)
        ref = self.root
        while not _is_leaf(ref):
            node = self.nodes[ref]
            ref = node.child(x.bits[node.var - 1])
        return int(ref == LEAF1)

    def _dense(self):
        if self._arrays is None:
            index = {nid: k for k, nid in enumerate(self._order)}
            m = len(self._order)
            index[LEAF0], index[LEAF1] = m, m + 1
            var = np.array([self.nodes[nid].var - 1 for nid in self._order], dtype=np.int64)
            low = np.array([index[self.nodes[nid].low] for nid in self._order], dtype=np.int64)
            high = np.array([index[self.nodes[nid].high] for nid in self._order], dtype=np.int64)
            self._arrays = (index[self.root], var, low, high, m)
        return self._arrays

    def evaluate_batch(self, bits: np.ndarray) -> np.ndarray:
        if bits.shape[1] != self.n:
            raise DimensionError(f"batch has {bits.shape[1]} features, model expects {self.n}")
        root, var, low, high, m = self._dense()
        cur = np.full(bits.shape[0], root, dtype=np.int64)
        rows = np.arange(bits.shape[0])
        active = cur < m
        while active.any():
            r = rows[active]
            c = cur[active]
            b = bits[r, var[c]]
            cur[r] = np.where(b == 1, high[c], low[c])
            active = cur < m
        return cur == m + 1

    def support_below(self) -> dict[int, int]:
        """Bitmask (bit ``var``) of features tested in each node's sub-diagram."""
        out: dict[int, int] = {}
        for nid in self._order:
            node = self.nodes[nid]
            acc = 1 << node.var
            for child in (node.low, node.high):
                if not _is_leaf(child):
                    acc |= out[child]
            out[nid] = acc
        return out

    def repeated_on_some_path(self) -> bool:
        support = self.support_below()
        for nid in self._order:
            node = self.nodes[nid]
            for child in (node.low, node.high):
                if not _is_leaf(child) and (support[child] >> node.var) & 1:
                    return True
        return False

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, nodes={len(self._order)}, root={self.root!r})"


class Fbdd(Diagram):
    def __init__(self, n: int, nodes: Mapping[int, Node], root: Ref):
        super().__init__(n, nodes, root)
        if self.repeated_on_some_path():
            raise StructuralError("feature repeated along a root-to-leaf path")


class RawDiagram(Diagram):
    def __init__(self, n: int, nodes: Mapping[int, Node], root: Ref, phase: Mapping[int, str]):
        super().__init__(n, nodes, root)
        self.phase = dict(phase)
        for nid in self._order:
            if self.phase.get(nid) not in ("t", "s"):
                raise StructuralError(f"node {nid} has no phase label")
        for nid in self._order:
            if self.phase[nid] == "s":
                node = self.nodes[nid]
                for child in (node.low, node.high):
                    if child in self.phase and self.phase[child] == "t":
                        raise StructuralError(f"node {nid}: suffix node leads back into the prefix")


def path_audit(f: Diagram) -> bool:
    """True when no feature repeats along any root-to-leaf path."""
    return not f.repeated_on_some_path()


def fbdd_evaluate(f: Diagram, x: BitVector) -> int:
    return f.evaluate(x)


def _swap(ref: Ref) -> Ref:
    if ref == LEAF0:
        return LEAF1
    if ref == LEAF1:
        return LEAF0
    return ref


def fbdd_negate(f: Fbdd) -> Fbdd:
    nodes = {nid: Node(nd.var, _swap(nd.low), _swap(nd.high)) for nid, nd in f.nodes.items()}
    return Fbdd(f.n, nodes, _swap(f.root))


def fbdd_constant_one(n: int) -> Fbdd:
    return Fbdd(n, {}, LEAF1)


def fbdd_constant_zero(n: int) -> Fbdd:
    return Fbdd(n, {}, LEAF0)


def fbdd_indicator(x: BitVector) -> Fbdd:
    """Chain of n nodes with a single accepting path, the one matching ``x``."""
    n = x.n
    nodes = {}
    for i in range(1, n + 1):
        on = i if i < n else LEAF1
        bit = x.bits[i - 1]
        nodes[i - 1] = Node(i, LEAF0 if bit else on, on if bit else LEAF0)
    return Fbdd(n, nodes, 0)


def fbdd_literal(n: int, i: int, positive: bool = True) -> Fbdd:
    """Single-node diagram for ``x_i`` (or its negation)."""
    lo, hi = (LEAF0, LEAF1) if positive else (LEAF1, LEAF0)
    return Fbdd(n, {0: Node(i, lo, hi)}, 0)


def _graft(base: Diagram, target: str, tail: Diagram) -> RawDiagram:
    """Redirect every ``target`` leaf edge of ``base`` to a shared copy of ``tail``."""
    if base.n != tail.n:
        raise DimensionError(f"arity mismatch: {base.n} vs {tail.n}")
    nodes: dict[int, Node] = {}
    phase: dict[int, str] = {}
    tail_ids = {nid: k for k, nid in enumerate(tail.order)}
    offset = len(tail_ids)
    base_ids = {nid: offset + k for k, nid in enumerate(base.order)}

    def tail_ref(ref):
        return ref if _is_leaf(ref) else tail_ids[ref]

    def base_ref(ref):
        if ref == target:
            return tail_ref(tail.root)
        return ref if _is_leaf(ref) else base_ids[ref]

    for nid, k in tail_ids.items():
        nd = tail.nodes[nid]
        nodes[k] = Node(nd.var, tail_ref(nd.low), tail_ref(nd.high))
        phase[k] = "s"
    for nid, k in base_ids.items():
        nd = base.nodes[nid]
        nodes[k] = Node(nd.var, base_ref(nd.low), base_ref(nd.high))
        phase[k] = "t"
    return RawDiagram(base.n, nodes, base_ref(base.root), phase)


def fbdd_and(ft: Fbdd, fs: Fbdd) -> RawDiagram:
    """``ft ∧ fs``: every 1-leaf edge of ``ft`` continues into ``fs``."""
    return _graft(ft, LEAF1, fs)


def fbdd_implies(ft: Fbdd, fs: Fbdd) -> RawDiagram:
    """``ft → fs``: negate ``ft``, then continue its 0-leaf edges into ``fs``."""
    return _graft(fbdd_negate(ft), LEAF0, fs)


def fbdd_read_once_repair(raw: RawDiagram) -> Fbdd:
    """Remove repeated tests from a two-phase diagram.

    Walking down the prefix phase records each decision. In the suffix
    phase, a node testing an already-decided feature is bypassed toward the
    child agreeing with that decision; other nodes are kept. Sub-results are
    shared whenever the decisions relevant to the remaining suffix coincide.
    """
    if not isinstance(raw, RawDiagram):
        raise StructuralError("repair expects a RawDiagram with phase labels")
    for nid in raw.order:
        nd = raw.nodes[nid]
        if raw.phase[nid] == "s":
            for child in (nd.low, nd.high):
                if not _is_leaf(child) and raw.phase[child] == "t":
                    raise StructuralError(f"suffix node {nid} leads back into the prefix phase")

    # features of suffix nodes reachable from each node
    suffix_vars: dict[int, int] = {}
    for nid in raw.order:
        nd = raw.nodes[nid]
        acc = (1 << nd.var) if raw.phase[nid] == "s" else 0
        for child in (nd.low, nd.high):
            if not _is_leaf(child):
                acc |= suffix_vars[child]
        suffix_vars[nid] = acc

    nodes: dict[int, Node] = {}
    unique: dict[tuple, int] = {}
    memo: dict[tuple, Ref] = {}

    def make(var, lo, hi) -> Ref:
        if lo == hi:
            return lo
        key = (var, lo, hi)
        if key not in unique:
            unique[key] = len(nodes)
            nodes[unique[key]] = Node(var, lo, hi)
        return unique[key]

    def build(ref: Ref, decided: int, values: int) -> Ref:
        # decided: bitmask of features fixed by the prefix; values: their bits
        if _is_leaf(ref):
            return ref
        relevant = decided & suffix_vars[ref]
        key = (ref, relevant, values & relevant)
        if key in memo:
            return memo[key]
        nd = raw.nodes[ref]
        bit = 1 << nd.var
        if raw.phase[ref] == "t":
            lo = build(nd.low, decided | bit, values & ~bit)
            hi = build(nd.high, decided | bit, values | bit)
            out = make(nd.var, lo, hi)
        elif decided & bit:
            out = build(nd.child(1 if values & bit else 0), decided, values)
        else:
            out = make(nd.var, build(nd.low, decided, values), build(nd.high, decided, values))
        memo[key] = out
        return out

    root = build(raw.root, 0, 0)
    return Fbdd(raw.n, nodes, root)


def _opposite_leaf(f: Diagram, x: BitVector) -> str:
    return LEAF0 if f.evaluate(x) else LEAF1


def fbdd_min_change_misaligned(f: Fbdd, x: BitVector) -> tuple[int, FeatureSubset] | None:
    """Fewest feature flips reaching the opposite leaf, plus the
    lexicographically smallest witness of that size; ``None`` for constants.

    Shortest path over the DAG where an edge disagreeing with ``x`` at the
    node's feature costs ``2^n - 2^(n-i)``: cardinality dominates, and among
    equal cardinalities smaller feature indices are cheaper.
    """
    _check_arity(f.n, x)
    n = f.n
    target = _opposite_leaf(f, x)
    weight = {i: (1 << n) - (1 << (n - i)) for i in range(1, n + 1)}
    best: dict[Ref, int | None] = {target: 0, _swap(target): None}
    choice: dict[int, int] = {}
    for nid in f.order:
        nd = f.nodes[nid]
        xi = x.bits[nd.var - 1]
        cands = []
        for b in (0, 1):
            c = best[nd.child(b)]
            if c is not None:
                cands.append((c + (weight[nd.var] if b != xi else 0), b))
        if cands:
            best[nid], choice[nid] = min(cands)
        else:
            best[nid] = None
    if best[f.root] is None:
        return None
    flipped = []
    ref = f.root
    while not _is_leaf(ref):
        nd = f.nodes[ref]
        b = choice[ref]
        if b != x.bits[nd.var - 1]:
            flipped.append(nd.var)
        ref = nd.child(b)
    return len(flipped), FeatureSubset(n, tuple(flipped))


def fbdd_count_completions_misaligned(f: Fbdd, x: BitVector, s: FeatureSubset) -> int:
    """Number of assignments to ``s`` (rest pinned to ``x``) that flip f(x).

    Each node carries ``2^|s|`` times the probability that a uniformly random
    assignment of the free features reaches the opposite leaf; read-once
    paths make the halving at free nodes exact.
    """
    if not (f.n == x.n == s.n):
        raise DimensionError(f"arities differ: model {f.n}, input {x.n}, subset {s.n}")
    target = _opposite_leaf(f, x)
    total = 1 << len(s)
    free = set(s.members)
    count: dict[Ref, int] = {target: total, _swap(target): 0}
    for nid in f.order:
        nd = f.nodes[nid]
        if nd.var in free:
            both = count[nd.low] + count[nd.high]
            assert both % 2 == 0, "odd count: diagram is not read-once"
            count[nid] = both // 2
        else:
            count[nid] = count[nd.child(x.bits[nd.var - 1])]
    return count[f.root]
