"""Plain-text and ABC renderings of decoded music.

A score is a list of voices; a voice is a name plus a list of events, and
an event is ``(pitches, duration)`` where ``pitches`` is a tuple of pitch
names (empty for a rest) and ``duration`` a name from ``DURATION_LENGTHS``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .pitch import PitchError, Scale, parse_pitch, pitch_midi
from .specs import DURATION_LENGTHS

__all__ = [
    "Voice",
    "format_score",
    "parse_score",
    "to_abc",
    "triad_degrees",
    "chord_pitches",
    "REST",
]

REST = "R"
_BAR_EIGHTHS = 8


@dataclass(frozen=True)
class Voice:
    name: str
    events: tuple[tuple[tuple[str, ...], str], ...]

    def __post_init__(self):
        if not self.name or any(c.isspace() or c == ":" for c in self.name):
            raise ValueError(f"voice name {self.name!r} must be a non-empty word without ':'")
        object.__setattr__(self, "events", tuple((tuple(p), d) for p, d in self.events))


def _token(pitches: Sequence[str], duration: str) -> str:
    return f"{'+'.join(pitches) if pitches else REST}:{duration}"


def format_score(voices: Sequence[Voice]) -> str:
    """One line per voice: ``name: C4:Q D4:H C4+E4+G4:Q R:E``."""
    lines = []
    for v in voices:
        lines.append(f"{v.name}: " + " ".join(_token(p, d) for p, d in v.events))
    return "\n".join(lines) + "\n"


def parse_score(text: str) -> list[Voice]:
    voices = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        name, sep, rest = line.partition(": ")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'voice: tokens'")
        events = []
        for tok in rest.split():
            notes, sep, dur = tok.rpartition(":")
            if not sep or not notes:
                raise ValueError(f"line {lineno}: bad token {tok!r}")
            pitches = () if notes == REST else tuple(notes.split("+"))
            for p in pitches:
                parse_pitch(p)
            events.append((pitches, dur))
        voices.append(Voice(name.strip(), tuple(events)))
    return voices


def triad_degrees(chord_index: int) -> tuple[int, int, int]:
    """Scale degrees of the diatonic triad on root ``chord_index + 1``."""
    root = chord_index + 1
    return (root, root + 2, root + 4)


def chord_pitches(chord_index: int, scale: Scale) -> tuple[str, ...]:
    return tuple(scale.degree(d) for d in triad_degrees(chord_index))


def _abc_note(name: str, key: dict[str, int], bar_state: dict[tuple[str, int], int]) -> str:
    letter, alter, octave = parse_pitch(name)
    current = bar_state.get((letter, octave), key.get(letter, 0))
    if alter != current:
        acc = {-2: "__", -1: "_", 0: "=", 1: "^", 2: "^^"}[alter]
        bar_state[(letter, octave)] = alter
    else:
        acc = ""
    if octave >= 5:
        body = letter.lower() + "'" * (octave - 5)
    else:
        body = letter + "," * (4 - octave)
    return acc + body


def _abc_length(duration: str) -> str:
    if duration not in DURATION_LENGTHS:
        raise PitchError(f"unknown duration {duration!r}")
    eighths = DURATION_LENGTHS[duration]
    return "" if eighths == 1 else str(eighths)


def to_abc(voices: Sequence[Voice], scale: Scale, title: str = "Untitled", index: int = 1) -> str:
    """ABC text with ``X``, ``T``, ``M:4/4``, ``L:1/8`` and ``K`` headers.

    Accidentals are written whenever a note differs from the key signature
    or from an earlier accidental in the same bar.
    """
    key = scale.key_signature()
    lines = [f"X:{index}", f"T:{title}", "M:4/4", "L:1/8", f"K:{'C' if scale.mode == 'chromatic' else scale.abc_key()}"]
    for v in voices:
        if len(voices) > 1:
            lines.append(f"V:{v.name}")
        out, pos, bar_state = [], 0, {}
        for pitches, dur in v.events:
            length = _abc_length(dur)
            if not pitches:
                body = "z"
            elif len(pitches) == 1:
                body = _abc_note(pitches[0], key, bar_state)
            else:
                ordered = sorted(pitches, key=pitch_midi)
                body = "[" + "".join(_abc_note(p, key, bar_state) for p in ordered) + "]"
            out.append(body + length)
            pos += DURATION_LENGTHS[dur]
            if pos % _BAR_EIGHTHS == 0:
                out.append("|")
                bar_state = {}
        if not out or out[-1] != "|":
            out.append("|")
        out[-1] = "|]"
        lines.append(" ".join(out))
    return "\n".join(lines) + "\n"
