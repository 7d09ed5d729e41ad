"""Sequential specification generation."""

from .spec_of import (
    NameSupply,
    SpecGenerator,
    SpecResult,
    generate,
    internal_choice,
    loop_functional,
    rel_cm,
)

__all__ = [
    "NameSupply",
    "SpecGenerator",
    "SpecResult",
    "generate",
    "internal_choice",
    "loop_functional",
    "rel_cm",
]
