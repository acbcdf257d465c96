"""Distributional part-of-speech induction."""

from ._core import (
    Config,
    Corpus,
    DataError,
    Model,
    NumericError,
    Tagging,
    UsageError,
    buckshot,
    evaluate,
    f_measure,
    generate_synthetic,
    induce,
    svd,
)

__all__ = [
    "Config",
    "Corpus",
    "DataError",
    "Model",
    "NumericError",
    "Tagging",
    "UsageError",
    "buckshot",
    "evaluate",
    "f_measure",
    "generate_synthetic",
    "induce",
    "svd",
]
