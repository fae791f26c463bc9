"""Named constant profiles.

The structural lemmas are generic in their constants.  The ``paper``
profile carries the values needed for the asymptotic guarantees, which
only apply to astronomically large graphs; ``demo-small`` keeps every
threshold meaningful on graphs with a few hundred vertices.  Derived
thresholds are always computed from these entries, never hard-coded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType

from .errors import PreconditionViolated
from .graph import as_fraction, format_rational

PAPER = "paper"
DEMO = "demo"

ENV_VAR = "BLOCKADE_PROFILE"

# integer-valued entries (exponents)
_INTEGER_ENTRIES = ("d", "a", "t")


def _paper_entries() -> dict[str, Fraction]:
    d = 40
    c = Fraction(1, 2**8)
    t = 36 * d * d
    return {
        "d": Fraction(d),
        "c": c,
        "eta": Fraction(1, 2**5),
        "xi": c**16,
        "theta": Fraction(1, 2**35),
        "t": Fraction(t),
        "a": Fraction(2 * d * t),
        "c_round2": Fraction(1, 4**6),
    }


def _demo_small_entries() -> dict[str, Fraction]:
    return {
        "d": Fraction(2),
        "c": Fraction(1, 4),
        "eta": Fraction(1, 8),
        "xi": Fraction(1, 16),
        "theta": Fraction(1, 8),
        "t": Fraction(2),
        "a": Fraction(4),
        "c_round2": Fraction(1, 16),
    }


@dataclass(frozen=True)
class ConstantsProfile:
    name: str
    mode: str
    entries: MappingProxyType = field(repr=False)

    def __post_init__(self):
        for key in _INTEGER_ENTRIES:
            value = self.entries[key]
            if value.denominator != 1 or value < 1:
                raise ValueError(f"profile entry {key} must be a positive integer")
        for key, value in self.entries.items():
            if value <= 0:
                raise ValueError(f"profile entry {key} must be positive")
        if self.mode == PAPER:
            if self.d < 40:
                raise ValueError("paper mode needs d >= 40")
            if self.c != Fraction(1, 256) or self.eta != Fraction(1, 32):
                raise ValueError("paper mode fixes c = 2^-8 and eta = 2^-5")

    @property
    def paper(self) -> bool:
        return self.mode == PAPER

    def __getattr__(self, key):
        entries = object.__getattribute__(self, "entries")
        if key in entries:
            value = entries[key]
            return int(value) if key in _INTEGER_ENTRIES else value
        raise AttributeError(key)

    def serialised(self) -> dict:
        return {
            "name": self.name,
            "entries": {k: format_rational(v) for k, v in sorted(self.entries.items())},
        }

    def with_overrides(self, **overrides) -> "ConstantsProfile":
        entries = dict(self.entries)
        for key, value in overrides.items():
            if key not in entries:
                raise KeyError(f"unknown profile entry {key!r}")
            entries[key] = as_fraction(value)
        name = self.name if not overrides else f"{self.name}+custom"
        mode = DEMO if overrides else self.mode
        return ConstantsProfile(name, mode, MappingProxyType(entries))


PROFILES = {
    "paper": ConstantsProfile("paper", PAPER, MappingProxyType(_paper_entries())),
    "demo-small": ConstantsProfile("demo-small", DEMO, MappingProxyType(_demo_small_entries())),
}

DEFAULT_PROFILE = "demo-small"


def get_profile(name: str | None = None, overrides: dict | None = None) -> ConstantsProfile:
    """Look up a profile; ``BLOCKADE_PROFILE`` wins over ``name`` when set."""
    name = os.environ.get(ENV_VAR) or name or DEFAULT_PROFILE
    try:
        profile = PROFILES[name]
    except KeyError:
        raise KeyError(f"unknown profile {name!r}; known: {sorted(PROFILES)}") from None
    if overrides:
        profile = profile.with_overrides(**overrides)
    return profile


def require(condition: bool, profile: ConstantsProfile, message: str, witness=None) -> None:
    """Raise only in paper mode; demo mode records achieved values instead."""
    if profile.paper and not condition:
        raise PreconditionViolated(message, witness)
