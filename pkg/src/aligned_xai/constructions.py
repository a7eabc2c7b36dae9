"""Instance reductions and alignment constructions.

* ``embed_misaligned``: a misaligned instance becomes an aligned one by
  pairing the model with a constant-one indicator.
* ``indicator_reduction``: a misaligned instance on ``f1`` becomes an aligned
  instance whose model is the point indicator of ``x`` and whose context
  indicator is ``f1`` or its negation.
* ``self_align``: folds an indicator into a single model of the same class
  (FBDDs and MLPs; perceptrons are refused).
* ``ssp_to_mcr``: subset sum to aligned MCR over perceptron pairs, with the
  ``ssp_solve`` dynamic program as its oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

from .core import BitVector, Classifier, ConstantOne, FeatureSubset, evaluate
from .errors import ConstructionError, NotSelfAlignedError
from .fbdd import (
    Fbdd,
    fbdd_and,
    fbdd_constant_one,
    fbdd_implies,
    fbdd_indicator,
    fbdd_negate,
    fbdd_read_once_repair,
)
from .linear import Perceptron, perceptron_constant_one, perceptron_indicator, perceptron_negate
from .mlp import Mlp, mlp_and, mlp_constant_one, mlp_indicator, mlp_negate, mlp_or

Param = Union[int, FeatureSubset]

CLASSES = ("fbdd", "perceptron", "mlp")


def model_class(f: Classifier) -> str:
    if isinstance(f, Fbdd):
        return "fbdd"
    if isinstance(f, Perceptron):
        return "perceptron"
    if isinstance(f, Mlp):
        return "mlp"
    if isinstance(f, ConstantOne):
        return "constant"
    raise ConstructionError(f"unsupported classifier type {type(f).__name__}")


def negate(f: Classifier) -> Classifier:
    cls = model_class(f)
    if cls == "fbdd":
        return fbdd_negate(f)
    if cls == "perceptron":
        return perceptron_negate(f)
    if cls == "mlp":
        return mlp_negate(f)
    raise ConstructionError("the constant-one indicator has no negation in its class")


def point_indicator(cls: str, x: BitVector) -> Classifier:
    if cls == "fbdd":
        return fbdd_indicator(x)
    if cls == "perceptron":
        return perceptron_indicator(x, 1, -1)
    if cls == "mlp":
        return mlp_indicator(x)
    raise ConstructionError(f"no point-indicator constructor for class {cls!r}")


def constant_one(cls: str, n: int) -> Classifier:
    if cls == "fbdd":
        return fbdd_constant_one(n)
    if cls == "perceptron":
        return perceptron_constant_one(n)
    if cls == "mlp":
        return mlp_constant_one(n)
    if cls == "constant":
        return ConstantOne(n)
    raise ConstructionError(f"no constant-one constructor for class {cls!r}")


@dataclass
class ReducedInstance:
    model: Classifier
    indicator: Classifier
    input: BitVector
    param: Any  # k (int), a FeatureSubset, or None
    provenance: dict = field(default_factory=dict)


def embed_misaligned(f: Classifier, x: BitVector, param: Param | None = None,
                     indicator_class: str | None = None) -> ReducedInstance:
    cls = indicator_class or model_class(f)
    return ReducedInstance(
        f, constant_one(cls, f.n), x, param,
        {"reduction": "embed_misaligned", "source_class": model_class(f), "indicator_class": cls},
    )


def indicator_reduction(f1: Classifier, x: BitVector, param: Param | None = None,
                        model_class_name: str | None = None) -> ReducedInstance:
    """Model := indicator of ``x``; context := ``¬f1`` if f1(x)=1 else ``f1``.

    In-context points are then exactly the points where f1 disagrees with
    f1(x), and the indicator model disagrees with its value at x everywhere
    except x itself, so every query keeps its answer.
    """
    source = model_class(f1)
    target = model_class_name or source
    value = evaluate(f1, x)
    pi = negate(f1) if value else f1
    return ReducedInstance(
        point_indicator(target, x), pi, x, param,
        {"reduction": "indicator_reduction", "source_class": source, "model_class": target,
         "f1_at_x": value, "indicator": "negated source" if value else "source"},
    )


def self_align(f: Classifier, pi: Classifier, x: BitVector) -> Classifier:
    """Single model ``g`` whose misaligned answers equal the aligned answers of (f, pi).

    ``g = f ∨ ¬pi`` when f(x)=1 (built as ``pi → f``), ``g = f ∧ pi`` otherwise.
    """
    cls, pcls = model_class(f), model_class(pi)
    if cls == "perceptron" or pcls == "perceptron":
        raise NotSelfAlignedError("perceptrons are not closed under the required compositions")
    if cls != pcls:
        raise ConstructionError(f"model class {cls} and indicator class {pcls} differ")
    value = evaluate(f, x)
    if cls == "fbdd":
        raw = fbdd_implies(pi, f) if value else fbdd_and(f, pi)
        return fbdd_read_once_repair(raw)
    if cls == "mlp":
        return mlp_or(f, mlp_negate(pi)) if value else mlp_and(f, pi)
    raise ConstructionError(f"class {cls!r} has no self-alignment construction")


# -- subset sum ---------------------------------------------------------------


@dataclass(frozen=True)
class SspInstance:
    values: tuple[int, ...]
    k: int
    T: int

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v <= 0 for v in values):
            raise ValueError("subset-sum values must be positive")
        if not 0 <= self.k <= len(values):
            raise ValueError(f"k must lie in 0..{len(values)}")
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return len(self.values)


def ssp_solve(inst: SspInstance) -> bool:
    """Is there a subset of exactly ``k`` values summing to ``T``?

    ``reach[c]`` is a bitset of the sums reachable with ``c`` chosen values.
    """
    if inst.T < 0:
        return False
    reach = [0] * (inst.k + 1)
    reach[0] = 1
    for v in inst.values:
        for c in range(inst.k, 0, -1):
            reach[c] |= reach[c - 1] << v
    return bool((reach[inst.k] >> inst.T) & 1)


def _dummy_yes() -> tuple[Perceptron, Perceptron, BitVector, int]:
    return Perceptron((1, -1), 0), Perceptron((1, 1), 1), BitVector((1, 1)), 2


def _canonical_no() -> tuple[Perceptron, Perceptron, BitVector, int]:
    # constant-0 model: nothing can flip
    return Perceptron((0, 0), -1), perceptron_constant_one(2), BitVector((1, 1)), 1


def ssp_to_mcr(inst: SspInstance, variant: str = "exact") -> ReducedInstance:
    """Aligned-MCR instance over two perceptrons, answering like ``inst``.

    ``variant="paper"`` emits the published parameters verbatim
    (model weights ``-z``, bias ``T + 1/4``; indicator weights ``z``, bias
    ``-T``). Under the strict step those two perceptrons are complementary,
    so that variant never has an in-context flip.

    ``variant="exact"`` (default) keeps the same shape but shifts each value
    by ``L = sum(z) + 1`` so that only flips of exactly ``k`` features can hit
    the target, and sets the indicator bias to ``-R + 1/4`` so the target
    remaining weight ``R`` itself is in-context.
    """
    z, k, T, m = inst.values, inst.k, inst.T, inst.m
    prov = {"reduction": "ssp_to_mcr", "variant": variant,
            "source": {"values": list(z), "k": k, "T": T}}

    def bundle(f1, f2, x, kk, branch):
        return ReducedInstance(f1, f2, x, kk, {**prov, "branch": branch})

    if k == m:
        return bundle(*(_dummy_yes() if sum(z) == T else _canonical_no()), "k=m")
    if variant == "paper":
        f1 = Perceptron(tuple(-v for v in z), T + Fraction(1, 4))
        f2 = Perceptron(tuple(z), -T)
        return bundle(f1, f2, BitVector((1,) * m), k, "general")
    if variant != "exact":
        raise ValueError(f"unknown variant {variant!r}")
    if k == 0:
        return bundle(*(_dummy_yes() if T == 0 else _canonical_no()), "k=0")
    if not 0 <= T <= sum(z):
        return bundle(*_canonical_no(), "target out of range")
    shift = sum(z) + 1
    zs = tuple(v + shift for v in z)
    remaining = sum(zs) - (k * shift + T)
    f1 = Perceptron(tuple(-v for v in zs), remaining + Fraction(1, 4))
    f2 = Perceptron(zs, -remaining + Fraction(1, 4))
    return bundle(f1, f2, BitVector((1,) * m), k, "general")
