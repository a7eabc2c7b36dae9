"""JSON file forms for models, indicators, SSP instances and reduction bundles.

Rationals are written as ``"p/q"`` or integer strings. JSON integers are
accepted on input; JSON floats never are.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import ConstantOne
from .errors import SchemaError, StructuralError
from .fbdd import LEAVES, Diagram, Fbdd, Node
from .linear import Perceptron
from .mlp import AND, NOT, OR, RELU, STEP, BooleanCircuit, Gate, Layer, Mlp, circuit_to_mlp


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise SchemaError(f"{where}: expected an exact rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
        raise SchemaError(f"{where}: not a rational literal: {value!r}")
    raise SchemaError(f"{where}: expected a rational string, got {type(value).__name__}")


def _rational_text(q: Fraction) -> str:
    return str(Fraction(q))


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SchemaError(f"{where}: field {key!r} must be an integer")
    if kind is not int and not isinstance(value, kind):
        raise SchemaError(f"{where}: field {key!r} has the wrong type")
    return value


def _arity(doc: dict, where: str) -> int:
    n = _require(doc, "n", int, where)
    if n < 1:
        raise SchemaError(f"{where}: n must be positive")
    return n


# -- decoding -----------------------------------------------------------------


def _fbdd_ref(value, where):
    if isinstance(value, str):
        if value not in LEAVES:
            raise SchemaError(f"{where}: unknown leaf {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise SchemaError(f"{where}: node references are non-negative integers or leaf markers")
    return value


def fbdd_from_dict(doc: dict) -> Fbdd:
    n = _arity(doc, "fbdd")
    raw_nodes = _require(doc, "nodes", list, "fbdd")
    nodes: dict[int, Node] = {}
    for k, item in enumerate(raw_nodes):
        where = f"fbdd node #{k}"
        if not isinstance(item, dict):
            raise SchemaError(f"{where}: expected an object")
        nid = _fbdd_ref(_require(item, "id", int, where), where)
        if nid in nodes:
            raise SchemaError(f"{where}: duplicate id {nid}")
        nodes[nid] = Node(
            _require(item, "var", int, where),
            _fbdd_ref(_require(item, "low", (int, str), where), where),
            _fbdd_ref(_require(item, "high", (int, str), where), where),
        )
    root = _fbdd_ref(_require(doc, "root", (int, str), "fbdd"), "fbdd root")
    try:
        return Fbdd(n, nodes, root)
    except StructuralError as exc:
        raise SchemaError(f"fbdd: {exc}") from exc


def perceptron_from_dict(doc: dict) -> Perceptron:
    n = _arity(doc, "perceptron")
    weights = _require(doc, "weights", list, "perceptron")
    if len(weights) != n:
        raise SchemaError(f"perceptron: {len(weights)} weights for n={n}")
    w = tuple(_rational(v, f"perceptron weight {i + 1}") for i, v in enumerate(weights))
    return Perceptron(w, _rational(_require(doc, "bias", (str, int), "perceptron"), "perceptron bias"))


def mlp_from_dict(doc: dict) -> Mlp:
    n = _arity(doc, "mlp")
    layers = []
    for j, item in enumerate(_require(doc, "layers", list, "mlp"), 1):
        where = f"mlp layer {j}"
        if not isinstance(item, dict):
            raise SchemaError(f"{where}: expected an object")
        rows = _require(item, "weights", list, where)
        if not all(isinstance(r, list) for r in rows):
            raise SchemaError(f"{where}: weights must be a list of rows")
        act = item.get("activation", RELU)
        if act not in (RELU, STEP):
            raise SchemaError(f"{where}: activation must be relu or step")
        try:
            layers.append(Layer(
                tuple(tuple(_rational(v, where) for v in r) for r in rows),
                tuple(_rational(v, where) for v in _require(item, "bias", list, where)),
                act,
            ))
        except StructuralError as exc:
            raise SchemaError(f"{where}: {exc}") from exc
    try:
        return Mlp(n, layers)
    except StructuralError as exc:
        raise SchemaError(f"mlp: {exc}") from exc


def _circuit_ref(value, ids: dict, where):
    if isinstance(value, str) and value.startswith("x") and value[1:].isdigit():
        return ("x", int(value[1:]))
    key = value if not isinstance(value, bool) else None
    if key in ids:
        return ("g", ids[key])
    raise SchemaError(f"{where}: unknown reference {value!r}")


def circuit_from_dict(doc: dict) -> BooleanCircuit:
    n = _arity(doc, "circuit")
    ids: dict = {}
    gates = []
    for k, item in enumerate(_require(doc, "gates", list, "circuit")):
        where = f"circuit gate #{k}"
        if not isinstance(item, dict) or "id" not in item:
            raise SchemaError(f"{where}: expected an object with an id")
        kind = item.get("kind")
        if kind not in (AND, OR, NOT):
            raise SchemaError(f"{where}: kind must be and, or or not")
        refs = tuple(_circuit_ref(r, ids, where) for r in _require(item, "in", list, where))
        gid = item["id"]
        if isinstance(gid, (list, dict)) or gid in ids:
            raise SchemaError(f"{where}: invalid or duplicate id {gid!r}")
        gates.append(Gate(kind, refs))
        ids[gid] = len(gates) - 1
    if "out" not in doc:
        raise SchemaError("circuit: missing field 'out'")
    out = _circuit_ref(doc["out"], ids, "circuit out")
    try:
        return BooleanCircuit(n, gates, out)
    except StructuralError as exc:
        raise SchemaError(f"circuit: {exc}") from exc


def constant_from_dict(doc: dict) -> ConstantOne:
    n = _arity(doc, "constant")
    if doc.get("value", 1) != 1:
        raise SchemaError("constant: only the constant-one indicator is supported")
    return ConstantOne(n)


_DECODERS = {
    "fbdd": fbdd_from_dict,
    "perceptron": perceptron_from_dict,
    "mlp": mlp_from_dict,
    "circuit": circuit_from_dict,
    "constant": constant_from_dict,
}


def model_from_dict(doc: Any, compile_circuits: bool = True):
    """Decode any model document; circuits compile to an ``Mlp`` by default."""
    if not isinstance(doc, dict):
        raise SchemaError("model document must be a JSON object")
    kind = doc.get("type")
    if kind not in _DECODERS:
        raise SchemaError(f"unknown model type {kind!r}")
    model = _DECODERS[kind](doc)
    if compile_circuits and isinstance(model, BooleanCircuit):
        return circuit_to_mlp(model)
    return model


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_model(path, compile_circuits: bool = True):
    return model_from_dict(read_json(path), compile_circuits)


# -- encoding -----------------------------------------------------------------


def model_to_dict(model) -> dict:
    if isinstance(model, Diagram):
        if not isinstance(model, Fbdd):
            model = Fbdd(model.n, model.nodes, model.root)
        return {
            "type": "fbdd",
            "n": model.n,
            "root": model.root,
            "nodes": [
                {"id": nid, "var": nd.var, "low": nd.low, "high": nd.high}
                for nid, nd in sorted(model.nodes.items())
            ],
        }
    if isinstance(model, Perceptron):
        return {
            "type": "perceptron",
            "n": model.n,
            "weights": [_rational_text(w) for w in model.weights],
            "bias": _rational_text(model.bias),
        }
    if isinstance(model, Mlp):
        return {
            "type": "mlp",
            "n": model.n,
            "layers": [
                {
                    "weights": [[_rational_text(v) for v in row] for row in L.weights],
                    "bias": [_rational_text(v) for v in L.bias],
                    "activation": L.activation,
                }
                for L in model.layers
            ],
        }
    if isinstance(model, BooleanCircuit):
        def ref(r):
            return f"x{r[1]}" if r[0] == "x" else r[1]
        return {
            "type": "circuit",
            "n": model.n,
            "gates": [
                {"id": k, "kind": g.kind, "in": [ref(r) for r in g.inputs]}
                for k, g in enumerate(model.gates)
            ],
            "out": ref(model.output),
        }
    if isinstance(model, ConstantOne):
        return {"type": "constant", "n": model.n, "value": 1}
    raise SchemaError(f"cannot serialize {type(model).__name__}")


def write_json(path, doc: Any) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def save_model(path, model) -> None:
    write_json(path, model_to_dict(model))


def ssp_from_dict(doc: Any):
    from .constructions import SspInstance

    if not isinstance(doc, dict):
        raise SchemaError("SSP document must be a JSON object")
    values = _require(doc, "values", list, "ssp")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise SchemaError("ssp: values must be integers")
    try:
        return SspInstance(tuple(values), _require(doc, "k", int, "ssp"), _require(doc, "T", int, "ssp"))
    except ValueError as exc:
        raise SchemaError(f"ssp: {exc}") from exc


def write_bundle(directory, inst, contract: str) -> dict:
    """Write ``model.json``, ``indicator.json`` and ``manifest.json``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    save_model(out / "model.json", inst.model)
    save_model(out / "indicator.json", inst.indicator)
    param = inst.param
    manifest = {
        "model": "model.json",
        "indicator": "indicator.json",
        "input": str(inst.input),
        "k": param if isinstance(param, int) else None,
        "subset": None if param is None or isinstance(param, int) else str(param),
        "provenance": inst.provenance,
        "contract": contract,
    }
    write_json(out / "manifest.json", manifest)
    return manifest
