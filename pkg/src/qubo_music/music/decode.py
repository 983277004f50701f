"""Turn solver bit vectors back into note sequences and check them against the rules."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .build import TENDENCY_RESOLUTIONS, Layout
from .specs import HarmonySpec, MelodySpec, RhythmSpec

__all__ = [
    "Decoded",
    "decode_sequence",
    "validate_melody",
    "validate_rhythm",
    "validate_harmony",
    "validate_progression",
]


@dataclass(frozen=True)
class Decoded:
    """Decoded positions plus the positions whose selection count is wrong.

    ``sequence[i]`` is a column (one-hot layouts), a tuple of columns
    (k-hot layouts) or ``None`` when position ``i`` is invalid.
    ``invalid`` holds ``(position, number_selected)`` pairs.
    """

    sequence: tuple
    invalid: tuple[tuple[int, int], ...]

    @property
    def valid(self) -> bool:
        return not self.invalid


def decode_sequence(bits, layout: Layout) -> Decoded:
    """Read the indicator grid of ``bits`` (a bit sequence or a ``Sample``)."""
    x = getattr(bits, "assignment", bits)
    if len(x) < layout.grid_size:
        raise ValueError(f"assignment has {len(x)} bits, layout needs {layout.grid_size}")
    seq, invalid = [], []
    for i in range(layout.n):
        chosen = [layout.columns[c] for c in range(layout.width) if x[layout.var(i, c)]]
        want = layout.select
        if want is not None and len(chosen) != want:
            invalid.append((i, len(chosen)))
            seq.append(None)
        elif want == 1:
            seq.append(chosen[0])
        else:
            seq.append(tuple(chosen))
    return Decoded(tuple(seq), tuple(invalid))


def validate_melody(seq: Sequence, spec: MelodySpec) -> list[str]:
    """Every broken melody rule, as human-readable messages (empty when clean)."""
    out = []
    n = spec.n
    if len(seq) != n:
        return [f"expected {n} notes, got {len(seq)}"]
    missing = [i for i, e in enumerate(seq) if e is None]
    for i in missing:
        out.append(f"position {i}: no single note selected")
    if missing:
        return out
    for i in range(n - 1):
        a, b = seq[i], seq[i + 1]
        if (a, b) in spec.forbidden_successions:
            out.append(f"position {i}: forbidden succession {a} -> {b}")
        if spec.forbidden_intervals and a in spec.domain.elements and b in spec.domain.elements:
            gap = abs(spec.semitones(a) - spec.semitones(b))
            if gap in spec.forbidden_intervals:
                out.append(f"position {i}: forbidden interval of {gap} semitones ({a} -> {b})")
    if spec.no_triple_repeat:
        for i in range(n - 2):
            if seq[i] == seq[i + 1] == seq[i + 2]:
                out.append(f"position {i}: {seq[i]} three times in a row")
    if spec.anchor_first_last:
        first = spec.domain.first
        for pos in (0, n - 1):
            if seq[pos] != first:
                out.append(f"position {pos}: expected anchor {first}, got {seq[pos]}")
    if spec.tendency_rules:
        for i in range(n - 1):
            for src, dst in TENDENCY_RESOLUTIONS:
                if seq[i] == src and seq[i + 1] != dst:
                    out.append(f"position {i}: degree {src} does not resolve to {dst}")
    if spec.rest is not None:
        k = sum(1 for e in seq if e == spec.rest.symbol)
        if k != spec.rest.count:
            out.append(f"expected {spec.rest.count} rests, got {k}")
    return out


def validate_rhythm(seq: Sequence, spec: RhythmSpec) -> list[str]:
    out = []
    if len(seq) != spec.n:
        return [f"expected {spec.n} durations, got {len(seq)}"]
    missing = [i for i, e in enumerate(seq) if e is None]
    for i in missing:
        out.append(f"position {i}: no single duration selected")
    if missing:
        return out
    for d in spec.durations:
        k = sum(1 for e in seq if e == d)
        if k < spec.min_count_each:
            out.append(f"duration {d} used {k} times, need at least {spec.min_count_each}")
    if spec.total_length is not None:
        total = sum(spec.lengths[e] for e in seq)
        if total != spec.total_length:
            out.append(f"total length {total} eighths, expected {spec.total_length}")
    return out


def validate_harmony(chords: Sequence, spec: HarmonySpec) -> list[str]:
    """Check triads (tuples of degrees) against the harmonisation rules."""
    out = []
    n = spec.n
    if len(chords) != n:
        return [f"expected {n} chords, got {len(chords)}"]
    for i, ch in enumerate(chords):
        if ch is None or len(ch) != spec.chord_size:
            out.append(f"position {i}: expected {spec.chord_size} notes")
    if out:
        return out
    if spec.anchor_first_last_triad:
        for pos in (0, n - 1):
            if set(chords[pos]) != {1, 3, 5}:
                out.append(f"position {pos}: expected the tonic triad (1, 3, 5), got {tuple(chords[pos])}")
    for i in range(1, n - 1):
        ch = chords[i]
        if spec.melody[i] not in ch:
            out.append(f"position {i}: melody degree {spec.melody[i]} missing from {tuple(ch)}")
        for a, b in itertools.combinations(sorted(ch), 2):
            if b - a in spec.forbidden_within:
                out.append(f"position {i}: degrees {a} and {b} clash")
    return out


def validate_progression(seq: Sequence) -> list[str]:
    """A chord progression needs exactly one chord per timestep."""
    return [f"timestep {i}: no single chord selected" for i, c in enumerate(seq) if c is None]
