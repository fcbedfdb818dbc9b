"""Bundled example programs and aspect specifications."""

from __future__ import annotations

from pathlib import Path

DIR = Path(__file__).parent


def path(name: str) -> Path:
    return DIR / name


def read(name: str) -> str:
    return path(name).read_text()


# the four scenario programs, each with an aspect specification next to it
SCENARIOS = ("truck.mol", "dispatch.mol", "visitor.mol", "sideeffect.mol")


def small_programs() -> list[str]:
    """Names of the generated programs used by the property suites."""
    return sorted(p.name for p in DIR.glob("small_*.mol"))


def aspect_spec(name: str) -> str:
    """Aspect specification shipped for scenario ``name`` (e.g. ``truck.mol``)."""
    return read(name.replace(".mol", "_aspects.json"))
