"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Tensor shapes or index extents are inconsistent."""


class ParameterError(ValueError):
    """A parameter is outside its valid range or unknown."""


class ResourceError(RuntimeError):
    """A dense object would exceed the configured memory budget."""


class NumericalError(RuntimeError):
    """A numerical backend routine failed to converge."""
