"""ReLU networks with a step output, and Boolean circuits compiled into them.

Layer ``j`` computes ``h_j = act(h_{j-1} @ W_j + b_j)`` where ``W_j`` has
shape ``(d_{j-1}, d_j)``. Hidden activations are ReLU, the last one is the
step function (1 iff the pre-activation is strictly positive).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .core import BitVector, _check_arity, int_affine
from .errors import DimensionError, StructuralError
from .linear import HALF, Perceptron, to_fraction

RELU = "relu"
STEP = "step"


@dataclass(frozen=True)
class Layer:
    weights: tuple[tuple[Fraction, ...], ...]
    bias: tuple[Fraction, ...]
    activation: str = RELU

    def __post_init__(self):
        weights = tuple(tuple(to_fraction(v) for v in row) for row in self.weights)
        bias = tuple(to_fraction(v) for v in self.bias)
        if self.activation not in (RELU, STEP):
            raise StructuralError(f"unknown activation {self.activation!r}")
        if not bias:
            raise StructuralError("layer without units")
        if any(len(row) != len(bias) for row in weights):
            raise StructuralError("weight rows must match the bias length")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def fan_in(self) -> int:
        return len(self.weights)

    @property
    def width(self) -> int:
        return len(self.bias)


class Mlp:
    def __init__(self, n: int, layers: Sequence[Layer]):
        layers = tuple(layers)
        if n < 1:
            raise StructuralError("arity must be positive")
        if not layers:
            raise StructuralError("network without layers")
        prev = n
        for j, layer in enumerate(layers, 1):
            if layer.fan_in != prev:
                raise StructuralError(f"layer {j} expects {layer.fan_in} inputs, gets {prev}")
            want = STEP if j == len(layers) else RELU
            if layer.activation != want:
                raise StructuralError(f"layer {j} must use {want}")
            prev = layer.width
        if prev != 1:
            raise StructuralError("output layer must have a single unit")
        self.n = n
        self.layers = layers
        self._int_layers = None

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        """Nonzero weights plus one bias per unit."""
        return sum(
            sum(1 for row in L.weights for v in row if v != 0) + L.width for L in self.layers
        )

    def output_preactivation(self, x: BitVector) -> Fraction:
        _check_arity(self.n, x)
        h = [Fraction(b) for b in x.bits]
        for L in self.layers:
            a = [
                sum((h[i] * L.weights[i][j] for i in range(L.fan_in) if h[i]), Fraction(0))
                + L.bias[j]
                for j in range(L.width)
            ]
            if L.activation == RELU:
                h = [max(v, Fraction(0)) for v in a]
            else:
                return a[0]
        raise AssertionError("unreachable: last layer is a step layer")

    def evaluate(self, x: BitVector) -> int:
        return int(self.output_preactivation(x) > 0)

    def integer_layers(self) -> list[tuple[list[list[int]], list[int]]]:
        """Integer layers whose hidden units are positive multiples of the originals.

        With ``K_j`` the running scale and ``D_j`` the common denominator of
        layer j, the scaled layer is ``(D_j W_j, K_{j-1} D_j b_j)``; ReLU is
        positively homogeneous, so every unit keeps its sign.
        """
        if self._int_layers is None:
            out = []
            scale = 1
            for L in self.layers:
                d = lcm(*(v.denominator for row in L.weights for v in row), *(b.denominator for b in L.bias))
                w = [[int(v * d) for v in row] for row in L.weights]
                b = [int(v * d * scale) for v in L.bias]
                out.append((w, b))
                scale *= d
            self._int_layers = out
        return self._int_layers

    def evaluate_batch(self, bits: np.ndarray) -> np.ndarray:
        if bits.shape[1] != self.n:
            raise DimensionError(f"batch has {bits.shape[1]} features, model expects {self.n}")
        h = bits.astype(np.int64)
        bound = 1
        for w, b in self.integer_layers():
            a, bound = int_affine(h, w, b, bound)
            h = np.maximum(a, 0)
        return np.asarray(a[:, 0] > 0, dtype=bool)

    def __repr__(self):
        dims = [self.n] + [L.width for L in self.layers]
        return f"Mlp(dims={dims})"


def mlp_evaluate(f: Mlp, x: BitVector) -> int:
    return f.evaluate(x)


def _layer(weights, bias, activation=RELU) -> Layer:
    return Layer(tuple(tuple(r) for r in weights), tuple(bias), activation)


def mlp_from_perceptron(p: Perceptron) -> Mlp:
    return Mlp(p.n, [_layer([[w] for w in p.weights], [p.bias], STEP)])


def mlp_rescale_integer(f: Mlp) -> Mlp:
    """Integer weights everywhere; the output bias gets an extra -1/2.

    On Boolean inputs the integer output pre-activation is an integer, so the
    shift keeps the classification and no input lands exactly on 0.
    """
    layers = []
    ints = f.integer_layers()
    for j, (w, b) in enumerate(ints, 1):
        bias = [Fraction(v) for v in b]
        act = RELU
        if j == len(ints):
            bias[0] -= HALF
            act = STEP
        layers.append(_layer(w, bias, act))
    return Mlp(f.n, layers)


def mlp_negate(f: Mlp) -> Mlp:
    g = mlp_rescale_integer(f)
    last = g.layers[-1]
    flipped = _layer([[-v for v in row] for row in last.weights], [-v for v in last.bias], STEP)
    return Mlp(f.n, [*g.layers[:-1], flipped])


def _zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def mlp_or(ft: Mlp, fs: Mlp) -> Mlp:
    """Disjunction by running both networks side by side.

    Both step outputs become ReLU units, the shallower branch is extended
    with identity pass-through units, and a final step unit sums the two.
    """
    if ft.n != fs.n:
        raise DimensionError(f"arity mismatch: {ft.n} vs {fs.n}")
    depth = max(ft.depth, fs.depth)

    def branch(f: Mlp, j: int):
        # (weights, bias) of layer j of the branch, padded past its depth
        if j <= f.depth:
            L = f.layers[j - 1]
            return [list(r) for r in L.weights], list(L.bias)
        return [[Fraction(1)]], [Fraction(0)]

    layers = []
    for j in range(1, depth + 1):
        wt, bt = branch(ft, j)
        ws, bs = branch(fs, j)
        if j == 1:
            weights = [rt + rs for rt, rs in zip(wt, ws)]
        else:
            weights = [r + [Fraction(0)] * len(bs) for r in wt] + [
                [Fraction(0)] * len(bt) + r for r in ws
            ]
        layers.append(_layer(weights, bt + bs, RELU))
    layers.append(_layer([[Fraction(1)], [Fraction(1)]], [Fraction(0)], STEP))
    return Mlp(ft.n, layers)


def mlp_and(ft: Mlp, fs: Mlp) -> Mlp:
    return mlp_negate(mlp_or(mlp_negate(ft), mlp_negate(fs)))


def mlp_implies(ft: Mlp, fs: Mlp) -> Mlp:
    return mlp_or(mlp_negate(ft), fs)


def mlp_constant_one(n: int) -> Mlp:
    return Mlp(n, [_layer(_zeros(n, 1), [Fraction(1)], STEP)])


# -- Boolean circuits ---------------------------------------------------------

AND, OR, NOT = "and", "or", "not"


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple  # refs: ("x", i) for inputs, ("g", k) for earlier gates


class BooleanCircuit:
    """Topologically ordered AND/OR/NOT gates over inputs x1..xn."""

    def __init__(self, n: int, gates: Sequence[Gate], output):
        if n < 1:
            raise StructuralError("arity must be positive")
        gates = tuple(gates)
        for k, g in enumerate(gates):
            if g.kind not in (AND, OR, NOT):
                raise StructuralError(f"gate {k}: unknown kind {g.kind!r}")
            if not g.inputs:
                raise StructuralError(f"gate {k}: no inputs")
            if g.kind == NOT and len(g.inputs) != 1:
                raise StructuralError(f"gate {k}: NOT takes exactly one input")
            for ref in g.inputs:
                self._check_ref(ref, n, k)
        self._check_ref(output, n, len(gates))
        self.n = n
        self.gates = gates
        self.output = tuple(output)

    @staticmethod
    def _check_ref(ref, n, limit):
        tag, idx = ref
        if tag == "x":
            if not 1 <= idx <= n:
                raise StructuralError(f"input reference x{idx} outside 1..{n}")
        elif tag == "g":
            if not 0 <= idx < limit:
                raise StructuralError(f"gate reference {idx} is not an earlier gate")
        else:
            raise StructuralError(f"bad reference {ref!r}")

    def evaluate(self, x: BitVector) -> int:
        _check_arity(self.n, x)
        vals: list[int] = []

        def get(ref):
            tag, idx = ref
            return x.bits[idx - 1] if tag == "x" else vals[idx]

        for g in self.gates:
            args = [get(r) for r in g.inputs]
            if g.kind == AND:
                vals.append(int(all(args)))
            elif g.kind == OR:
                vals.append(int(any(args)))
            else:
                vals.append(1 - args[0])
        return get(self.output)


def circuit_to_mlp(c: BooleanCircuit) -> Mlp:
    """Compile a circuit into an equivalent ReLU network.

    AND over k Boolean signals is ``relu(sum - (k-1))``; OR is
    ``1 - relu(1 - sum)``; NOT is the affine map ``1 - a`` and costs no layer.
    Gates are layered by AND/OR depth and signals still needed later are
    carried through ``relu(a) = a``.
    """
    n = c.n

    def base(ref):
        # (sign, ref) with NOT chains folded away: value = ref if sign else 1 - ref
        sign = True
        while ref[0] == "g" and c.gates[ref[1]].kind == NOT:
            ref = c.gates[ref[1]].inputs[0]
            sign = not sign
        return sign, tuple(ref)

    depth: dict[tuple, int] = {("x", i): 0 for i in range(1, n + 1)}
    for k, g in enumerate(c.gates):
        if g.kind != NOT:
            depth[("g", k)] = 1 + max(depth[base(r)[1]] for r in g.inputs)
    total = max(depth.values())

    # last layer at which each base signal is read
    last_use: dict[tuple, int] = {}
    for k, g in enumerate(c.gates):
        if g.kind != NOT:
            for r in g.inputs:
                b = base(r)[1]
                last_use[b] = max(last_use.get(b, 0), depth[("g", k)])
    out_sign, out_base = base(c.output)
    last_use[out_base] = total + 1

    # affine form of each live base signal over the current layer: (coeffs, const)
    forms: dict[tuple, tuple[dict[int, int], int]] = {
        ("x", i): ({i - 1: 1}, 0) for i in range(1, n + 1)
    }
    width = n
    layers = []

    def signed_form(ref):
        sign, b = base(ref)
        coeffs, const = forms[b]
        if sign:
            return dict(coeffs), const
        return {u: -v for u, v in coeffs.items()}, 1 - const

    def add(acc, form, scale=1):
        coeffs, const = form
        for u, v in coeffs.items():
            acc[0][u] = acc[0].get(u, 0) + scale * v
        acc[1] += scale * const

    for level in range(1, total + 1):
        units: list[tuple[dict[int, int], int]] = []
        new_forms: dict[tuple, tuple[dict[int, int], int]] = {}
        for k, g in enumerate(c.gates):
            if g.kind == NOT or depth[("g", k)] != level:
                continue
            acc = [{}, 0]
            for r in g.inputs:
                add(acc, signed_form(r))
            if g.kind == AND:
                acc[1] -= len(g.inputs) - 1
                units.append((acc[0], acc[1]))
                new_forms[("g", k)] = ({len(units) - 1: 1}, 0)
            else:
                units.append(({u: -v for u, v in acc[0].items()}, 1 - acc[1]))
                new_forms[("g", k)] = ({len(units) - 1: -1}, 1)
        for b, form in forms.items():
            if last_use.get(b, 0) > level:
                units.append(form)
                new_forms[b] = ({len(units) - 1: 1}, 0)
        weights = [[Fraction(0)] * len(units) for _ in range(width)]
        bias = []
        for j, (coeffs, const) in enumerate(units):
            for u, v in coeffs.items():
                weights[u][j] = Fraction(v)
            bias.append(Fraction(const))
        layers.append(_layer(weights, bias, RELU))
        forms = new_forms
        width = len(units)

    coeffs, const = signed_form(c.output)
    weights = [[Fraction(coeffs.get(u, 0))] for u in range(width)]
    layers.append(_layer(weights, [Fraction(const) - HALF], STEP))
    return Mlp(n, layers)


def conjunction_circuit(x: BitVector) -> BooleanCircuit:
    """Circuit for the literal conjunction satisfied only by ``x``."""
    gates = []
    literals = []
    for i, b in enumerate(x.bits, 1):
        if b:
            literals.append(("x", i))
        else:
            gates.append(Gate(NOT, (("x", i),)))
            literals.append(("g", len(gates) - 1))
    gates.append(Gate(AND, tuple(literals)))
    return BooleanCircuit(x.n, gates, ("g", len(gates) - 1))


def mlp_indicator(x: BitVector) -> Mlp:
    return circuit_to_mlp(conjunction_circuit(x))
