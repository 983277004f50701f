"""Transition weights counted from an example piece."""

from __future__ import annotations

import json
from importlib import resources
from typing import Sequence

from ..mrf import transition_counts

__all__ = ["extract_weights", "load_piece", "ode_to_joy", "weights_to_dict"]


def extract_weights(piece: Sequence[tuple[str, str]]) -> tuple[dict, dict]:
    """Consecutive-pair counts for pitches and for durations, separately.

    Pairs that never occur are absent (weight zero).
    """
    if len(piece) < 2:
        raise ValueError("a piece needs at least two notes to extract weights")
    pitches = [p for p, _ in piece]
    durations = [d for _, d in piece]
    return transition_counts(pitches), transition_counts(durations)


def load_piece(data) -> list[tuple[str, str]]:
    """``{"notes": [[pitch, duration], ...]}`` -> list of pairs."""
    try:
        notes = [(str(p), str(d)) for p, d in data["notes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"invalid piece: {exc}") from exc
    return notes


def ode_to_joy() -> list[tuple[str, str]]:
    text = resources.files("qubo_music").joinpath("data/ode_to_joy.json").read_text()
    return load_piece(json.loads(text))


def weights_to_dict(pitch: dict, duration: dict) -> dict:
    """JSON-ready weight lists, sorted for byte-stable output."""
    return {
        "type": "weights",
        "pitch": [[a, b, w] for (a, b), w in sorted(pitch.items())],
        "duration": [[a, b, w] for (a, b), w in sorted(duration.items())],
    }
