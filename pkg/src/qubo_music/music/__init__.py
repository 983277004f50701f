"""Music formulations: specs, model builders, decoding and score output."""

from .build import (
    TENDENCY_RESOLUTIONS,
    Layout,
    build_chord_mrf,
    build_harmony,
    build_melody,
    build_pitch_duration,
    build_qharmony,
    build_rhythm,
    chord_layout,
    encode_sequence,
)
from .decode import (
    Decoded,
    decode_sequence,
    validate_harmony,
    validate_melody,
    validate_progression,
    validate_rhythm,
)
from .pitch import MODE_OFFSETS, PitchDomain, PitchError, Scale, midi_to_name, parse_pitch, pitch_name, render
from .score import REST, Voice, chord_pitches, format_score, parse_score, to_abc, triad_degrees
from .specs import (
    CHORDS,
    DURATION_LENGTHS,
    QHARMONY_NOTES,
    ChordProgressionSpec,
    HarmonySpec,
    MelodySpec,
    QHarmonySpec,
    RestRule,
    RhythmSpec,
    SpecError,
    load_spec,
)
from .weights import extract_weights, load_piece, ode_to_joy, weights_to_dict

__all__ = [
    "TENDENCY_RESOLUTIONS", "Layout", "build_chord_mrf", "build_harmony", "build_melody",
    "build_pitch_duration", "build_qharmony", "build_rhythm", "chord_layout", "encode_sequence",
    "Decoded", "decode_sequence", "validate_harmony", "validate_melody", "validate_progression",
    "validate_rhythm", "MODE_OFFSETS", "PitchDomain", "PitchError", "Scale", "midi_to_name",
    "parse_pitch", "pitch_name", "render", "REST", "Voice", "chord_pitches", "format_score",
    "parse_score", "to_abc", "triad_degrees", "CHORDS", "DURATION_LENGTHS", "QHARMONY_NOTES",
    "ChordProgressionSpec", "HarmonySpec", "MelodySpec", "QHarmonySpec", "RestRule", "RhythmSpec",
    "SpecError", "load_spec", "extract_weights", "load_piece", "ode_to_joy", "weights_to_dict",
]
