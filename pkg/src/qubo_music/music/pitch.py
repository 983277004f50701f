"""Pitch names, scales and the element domains the melody models range over."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Sequence

__all__ = [
    "PitchError",
    "parse_pitch",
    "midi_to_name",
    "pitch_name",
    "PitchDomain",
    "Scale",
    "render",
    "MODE_OFFSETS",
]

_LETTERS = "CDEFGAB"
_LETTER_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_SHARP_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]
_FLAT_NAMES = ["C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B"]
_PITCH_RE = re.compile(r"^([A-Ga-g])(#{1,2}|b{1,2}|)(-?\d+)$")

MODE_OFFSETS = {
    "major": (0, 2, 4, 5, 7, 9, 11),
    "natural-minor": (0, 2, 3, 5, 7, 8, 10),
}


class PitchError(ValueError):
    pass


def parse_pitch(name: str) -> tuple[str, int, int]:
    """``"F#4"`` -> ``("F", 1, 4)`` as (letter, accidental, octave)."""
    m = _PITCH_RE.match(name.strip())
    if not m:
        raise PitchError(f"not a pitch name: {name!r}")
    letter, acc, octave = m.groups()
    alter = acc.count("#") - acc.count("b")
    return letter.upper(), alter, int(octave)


def pitch_midi(name: str) -> int:
    letter, alter, octave = parse_pitch(name)
    return 12 * (octave + 1) + _LETTER_PC[letter] + alter


def midi_to_name(midi: int, flats: bool = False) -> str:
    names = _FLAT_NAMES if flats else _SHARP_NAMES
    return f"{names[midi % 12]}{midi // 12 - 1}"


def pitch_name(letter: str, alter: int, octave: int) -> str:
    acc = "#" * alter if alter > 0 else "b" * (-alter)
    return f"{letter}{acc}{octave}"


@dataclass(frozen=True)
class PitchDomain:
    """Ordered set of values a note may take.

    ``kind`` is ``"named"`` (pitch names such as ``"C4"``), ``"semitone"``
    (offsets above the lowest pitch) or ``"degree"`` (scale degrees 1..8).
    """

    kind: str
    elements: tuple

    def __post_init__(self):
        if self.kind not in ("named", "semitone", "degree"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        elements = tuple(self.elements)
        if not elements:
            raise ValueError("pitch domain must not be empty")
        if len(set(elements)) != len(elements):
            raise ValueError("pitch domain elements must be unique")
        if self.kind == "named":
            for e in elements:
                parse_pitch(e)
        else:
            elements = tuple(int(e) for e in elements)
            if self.kind == "degree" and not all(1 <= e <= 8 for e in elements):
                raise ValueError("scale degrees must lie in 1..8")
            if self.kind == "semitone" and any(e < 0 for e in elements):
                raise ValueError("semitone offsets must be non-negative")
        object.__setattr__(self, "elements", elements)

    def __len__(self):
        return len(self.elements)

    def index(self, element: Hashable) -> int:
        return self.elements.index(element)

    def semitones(self, element) -> int:
        """Pitch height in semitones, used for interval rules.

        Degrees are measured on the major scale.
        """
        if self.kind == "named":
            return pitch_midi(element)
        if self.kind == "semitone":
            return int(element)
        d = int(element)
        return MODE_OFFSETS["major"][(d - 1) % 7] + 12 * ((d - 1) // 7)

    @property
    def first(self):
        """The anchor element: degree 1, offset 0, or the first listed pitch."""
        if self.kind == "degree" and 1 in self.elements:
            return 1
        if self.kind == "semitone" and 0 in self.elements:
            return 0
        return self.elements[0]


@dataclass(frozen=True)
class Scale:
    tonic: str = "C4"
    mode: str = "major"

    def __post_init__(self):
        parse_pitch(self.tonic)
        if self.mode not in ("major", "natural-minor", "chromatic"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def tonic_midi(self) -> int:
        return pitch_midi(self.tonic)

    def degree(self, d: int) -> str:
        """Spelled pitch of scale degree ``d`` (8 is the octave, 9 the ninth, ...)."""
        if d < 1:
            raise PitchError(f"scale degree {d} must be at least 1")
        if self.mode == "chromatic":
            raise PitchError("a chromatic scale has no diatonic degrees")
        letter, _, octave = parse_pitch(self.tonic)
        pos = _LETTERS.index(letter) + (d - 1)
        step_letter = _LETTERS[pos % 7]
        step_octave = octave + pos // 7
        target = self.tonic_midi + MODE_OFFSETS[self.mode][(d - 1) % 7] + 12 * ((d - 1) // 7)
        natural = 12 * (step_octave + 1) + _LETTER_PC[step_letter]
        return pitch_name(step_letter, target - natural, step_octave)

    def semitone(self, k: int) -> str:
        """Pitch ``k`` semitones above the tonic, spelled in-scale when possible."""
        if k < 0:
            raise PitchError("semitone offsets are non-negative")
        if self.mode != "chromatic":
            offsets = MODE_OFFSETS[self.mode]
            if k == 12 or (k < 12 and k in offsets):
                return self.degree(8 if k == 12 else offsets.index(k) + 1)
        _, alter, _ = parse_pitch(self.tonic)
        return midi_to_name(self.tonic_midi + k, flats=alter < 0 or self.mode == "natural-minor")

    def degree_of(self, name: str) -> int:
        diff = pitch_midi(name) - self.tonic_midi
        offsets = MODE_OFFSETS.get(self.mode)
        if offsets is None or diff < 0 or diff > 12:
            raise PitchError(f"{name} is not a degree of {self}")
        if diff == 12:
            return 8
        if diff not in offsets:
            raise PitchError(f"{name} is not in {self.tonic} {self.mode}")
        return offsets.index(diff) + 1

    def element_of(self, name: str, kind: str):
        """Inverse of :func:`render` for one note."""
        if kind == "named":
            return name
        if kind == "semitone":
            return pitch_midi(name) - self.tonic_midi
        return self.degree_of(name)

    def key_signature(self) -> dict[str, int]:
        """Letter -> accidental implied by the key (empty for chromatic)."""
        if self.mode == "chromatic":
            return {}
        sig = {}
        for d in range(1, 8):
            letter, alter, _ = parse_pitch(self.degree(d))
            if alter:
                sig[letter] = alter
        return sig

    def abc_key(self) -> str:
        letter, alter, _ = parse_pitch(self.tonic)
        acc = "#" * alter if alter > 0 else "b" * (-alter)
        return f"{letter}{acc}" + ("m" if self.mode == "natural-minor" else "")


def render(seq: Sequence, scale: Scale, kind: str = "degree") -> list[str]:
    """Turn degrees, semitone offsets or names into spelled pitch names."""
    out = []
    for e in seq:
        if kind == "named":
            parse_pitch(e)
            out.append(e)
        elif kind == "semitone":
            out.append(scale.semitone(int(e)))
        elif kind == "degree":
            if not 1 <= int(e) <= 8:
                raise PitchError(f"scale degree {e} out of range 1..8")
            out.append(scale.degree(int(e)))
        else:
            raise ValueError(f"unknown kind {kind!r}")
    return out
