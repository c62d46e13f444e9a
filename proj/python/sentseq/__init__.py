"""Hierarchical sequential sentence classification toolkit."""

from sentseq._sentseq import (
    ConfigError,
    Corpus,
    DataError,
    Model,
    NumericError,
    grad_check,
    load_model,
    log_partition,
    make_synthetic,
    parse_corpus,
    preset_names,
    save_corpus,
    tokenize,
    train,
    viterbi,
)

__all__ = [
    "ConfigError",
    "Corpus",
    "DataError",
    "Model",
    "NumericError",
    "grad_check",
    "load_model",
    "log_partition",
    "make_synthetic",
    "parse_corpus",
    "preset_names",
    "save_corpus",
    "tokenize",
    "train",
    "viterbi",
]
