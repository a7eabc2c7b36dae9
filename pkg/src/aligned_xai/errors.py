"""Exception hierarchy shared by every module."""


class AlignedXAIError(Exception):
    """Base class for all library errors."""


class DimensionError(AlignedXAIError, ValueError):
    """Arity or shape mismatch between models, inputs and subsets."""


class StructuralError(AlignedXAIError, ValueError):
    """A model or circuit violates its structural invariants."""


class SchemaError(AlignedXAIError, ValueError):
    """A serialized model does not match its file schema."""


class EnumerationLimitError(AlignedXAIError):
    """Brute-force enumeration would exceed the configured cap."""

    def __init__(self, required, cap):
        super().__init__(f"enumeration of {required} items exceeds cap {cap}")
        self.required = required
        self.cap = cap


class FastPathUnavailable(AlignedXAIError):
    """mode='fast' was requested but no polynomial algorithm applies."""


class ConstructionError(AlignedXAIError):
    """A model class lacks a constructor needed by a reduction."""


class NotSelfAlignedError(ConstructionError):
    """Perceptrons cannot absorb an indicator into a single perceptron."""
