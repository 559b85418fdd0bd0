"""Python bindings for the cagegen C++ core."""

from ._cagegen import (
    GeometryError,
    InfeasibleError,
    InputError,
    Instance,
    IoError,
    __version__,
    assemble,
    benchmark_trees,
    count_trees,
    find_paths,
    fixtures,
    trees,
    validate,
)

__all__ = [
    "GeometryError",
    "InfeasibleError",
    "InputError",
    "Instance",
    "IoError",
    "__version__",
    "assemble",
    "benchmark_trees",
    "count_trees",
    "find_paths",
    "fixtures",
    "trees",
    "validate",
]
