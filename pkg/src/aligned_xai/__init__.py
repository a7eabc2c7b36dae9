"""Distribution-aligned formal explanations for Boolean classifiers."""

from .core import BitVector, ConstantOne, FeatureSubset, evaluate, splice
from .errors import (
    AlignedXAIError,
    ConstructionError,
    DimensionError,
    EnumerationLimitError,
    FastPathUnavailable,
    NotSelfAlignedError,
    SchemaError,
    StructuralError,
)
from .fbdd import Fbdd, Node, RawDiagram
from .linear import Perceptron
from .mlp import BooleanCircuit, Gate, Layer, Mlp
from .queries import QueryResult, run_query

__version__ = "0.1.0"
