"""Python bindings for the mulimit core."""

from ._mulimit import (
    Construction,
    ContractViolation,
    EnumerationTooLarge,
    ParseError,
    ValidationError,
    diagram,
    exact_measure,
    fragment_layout,
    generator_prefix,
    oracle,
    parse_config,
    run_experiment,
)

__all__ = [
    "Construction",
    "ContractViolation",
    "EnumerationTooLarge",
    "ParseError",
    "ValidationError",
    "diagram",
    "exact_measure",
    "fragment_layout",
    "generator_prefix",
    "oracle",
    "parse_config",
    "run_experiment",
]
