"""Command-line entry point: compile and solve models, and write music from rule files.

Exit codes: 0 on success, 2 for bad input, 3 when a model is too large for
the chosen solver or the solver cannot handle it.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .compiler import CompileError, IlpModel, compile_model
from .io import FormatError, dumps, model_from_dict, read_json
from .mrf import MarkovNetwork, UnsupportedCliqueError, mrf_to_qubo
from .music import (
    REST,
    ChordProgressionSpec,
    HarmonySpec,
    Layout,
    MelodySpec,
    PitchError,
    QHarmonySpec,
    RhythmSpec,
    Scale,
    SpecError,
    Voice,
    build_chord_mrf,
    build_harmony,
    build_melody,
    build_pitch_duration,
    build_qharmony,
    build_rhythm,
    chord_layout,
    chord_pitches,
    decode_sequence,
    extract_weights,
    format_score,
    load_piece,
    load_spec,
    render,
    to_abc,
    validate_harmony,
    validate_melody,
    validate_progression,
    validate_rhythm,
    weights_to_dict,
)
from .qubo import IsingModel, QuboModel, ising_to_qubo
from .solvers import SaParams, SampleSet, SizeError, brute_force, one_hot_patterns, restricted_enumerate, simulated_annealing

__all__ = ["main", "RunConfig", "InputError", "CapabilityError"]

SOLVERS = ("brute", "sa", "restricted")
FORMATS = ("samples-table", "score-text", "abc", "model-text")
RHYTHM_PITCH = "B4"


class InputError(ValueError):
    """Bad files or arguments; exit code 2."""


class CapabilityError(RuntimeError):
    """The solver cannot handle this model; exit code 3."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    solver: str = "brute"
    sa: SaParams | None = None
    output: str | None = None
    format: str | None = None

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise InputError(f"unknown solver {self.solver!r}")
        if self.solver == "sa" and self.sa is None:
            raise InputError("--seed is required with --solver sa")
        if self.format is not None and self.format not in FORMATS:
            raise InputError(f"unknown format {self.format!r}")
        for p in self.inputs:
            if not Path(p).is_file():
                raise InputError(f"no such file: {p}")


def _solve(model: QuboModel, cfg: RunConfig, layout: Layout | None = None, choices=None) -> SampleSet:
    if cfg.solver == "brute":
        marginalize = layout.aux if layout is not None else None
        enumerated = model.num_vars - len(marginalize or ())
        if enumerated > 24:
            raise SizeError(f"brute force is limited to 24 variables; this model has {enumerated} (try --solver sa)")
        return brute_force(model, marginalize=marginalize)
    if cfg.solver == "sa":
        return simulated_annealing(model, cfg.sa)
    if layout is None or choices is None:
        raise CapabilityError("the restricted solver needs a music model with per-position choices")
    groups = [layout.position_vars(i) for i in range(layout.n)]
    group_choices = [choices] * layout.n
    for g in layout.aux_groups:
        groups.append(list(g))
        group_choices.append(list(itertools.product((0, 1), repeat=len(g))))
    return restricted_enumerate(model, groups, group_choices)


def _warn(messages: Sequence[str]) -> None:
    for m in messages:
        print(f"warning: {m}", file=sys.stderr)


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        return read_json(path)
    except FormatError as exc:
        raise InputError(str(exc)) from exc


# commands -------------------------------------------------------------------


def cmd_compile(cfg: RunConfig, varmap_path: str | None) -> None:
    data = _load_json(cfg.inputs[0])
    model = model_from_dict(data, ("ilp",))
    qubo, varmap = compile_model(model)
    if varmap_path:
        Path(varmap_path).write_text(dumps(varmap))
    _emit(dumps(qubo), cfg)


def _as_qubo(model) -> QuboModel:
    if isinstance(model, QuboModel):
        return model
    if isinstance(model, IsingModel):
        return ising_to_qubo(model)
    if isinstance(model, MarkovNetwork):
        return mrf_to_qubo(model)
    if isinstance(model, IlpModel):
        return compile_model(model)[0]
    raise InputError("this file does not describe a solvable model")


def cmd_solve(cfg: RunConfig) -> None:
    model = _as_qubo(model_from_dict(_load_json(cfg.inputs[0]), ("qubo", "ising", "mrf", "ilp")))
    fmt = cfg.format or "samples-table"
    if fmt == "model-text":
        _emit(dumps(model), cfg)
        return
    if fmt != "samples-table":
        raise InputError("solve only writes samples-table or model-text")
    _emit(_solve(model, cfg).to_table(), cfg)


def _spec(cfg: RunConfig, kind: str):
    data = _load_json(cfg.inputs[0])
    if not isinstance(data, dict):
        raise InputError("spec files must be JSON objects")
    return data, load_spec(data, kind)


def _music_output(cfg: RunConfig, model, samples: SampleSet | None, voices, scale: Scale, title: str, notes=()) -> None:
    fmt = cfg.format or "score-text"
    if fmt == "model-text":
        _emit(dumps(model), cfg)
    elif fmt == "samples-table":
        _emit(samples.to_table(), cfg)
    elif fmt == "abc":
        _emit(to_abc(voices, scale, title), cfg)
    else:
        _emit("".join(f"# {line}\n" for line in notes) + format_score(voices), cfg)


def _element_pitch(e, spec: MelodySpec) -> tuple[str, ...]:
    if e is None or (spec.rest is not None and e == spec.rest.symbol):
        return ()
    return tuple(render([e], spec.scale, spec.domain.kind))


def cmd_melody(cfg: RunConfig) -> None:
    data, spec = _spec(cfg, "melody")
    rhythm = RhythmSpec.from_dict(data["rhythm"]) if "rhythm" in data else None
    if rhythm is not None:
        joint = {}
        for a, b, w in data.get("joint_weights", []):
            key = ((_cast(spec, a[0]), a[1]), (_cast(spec, b[0]), b[1]))
            joint[key] = joint.get(key, 0.0) + float(w)
        model, layout = build_pitch_duration(spec, rhythm, joint)
    else:
        model, layout = build_melody(spec)
    if cfg.format == "model-text":
        _music_output(cfg, model, None, (), spec.scale, "Melody")
        return
    samples = _solve(model, cfg, layout, one_hot_patterns(layout.width))
    decoded = decode_sequence(samples.first, layout)
    if rhythm is not None:
        pitches = [c[0] if c is not None else None for c in decoded.sequence]
        durations = [c[1] if c is not None else "Q" for c in decoded.sequence]
        problems = validate_melody(pitches, spec) + validate_rhythm(
            [c[1] if c is not None else None for c in decoded.sequence], rhythm
        )
    else:
        pitches = list(decoded.sequence)
        durations = ["Q"] * spec.n
        problems = validate_melody(pitches, spec)
    _warn(problems)
    events = tuple((_element_pitch(p, spec), d) for p, d in zip(pitches, durations))
    notes = [f"energy {_fmt(samples.first.energy)}"]
    _music_output(cfg, model, samples, [Voice("melody", events)], spec.scale, "Melody", notes)


def _cast(spec: MelodySpec, v):
    if spec.domain.kind == "named" or (spec.rest is not None and v == spec.rest.symbol):
        return v
    return int(v)


def cmd_rhythm(cfg: RunConfig) -> None:
    _, spec = _spec(cfg, "rhythm")
    model, layout = build_rhythm(spec)
    if cfg.format == "model-text":
        _music_output(cfg, model, None, (), Scale(), "Rhythm")
        return
    samples = _solve(model, cfg, layout, one_hot_patterns(layout.width))
    seq = decode_sequence(samples.first, layout).sequence
    _warn(validate_rhythm(seq, spec))
    events = tuple(((RHYTHM_PITCH,), d) if d is not None else ((), "Q") for d in seq)
    notes = [f"energy {_fmt(samples.first.energy)}"]
    _music_output(cfg, model, samples, [Voice("rhythm", events)], Scale(), "Rhythm", notes)


def cmd_harmony(cfg: RunConfig) -> None:
    _, spec = _spec(cfg, "harmony")
    model, layout = build_harmony(spec)
    if cfg.format == "model-text":
        _music_output(cfg, model, None, (), spec.scale, "Harmony")
        return
    subsets = [tuple(int(c in comb) for c in range(8)) for comb in itertools.combinations(range(8), spec.chord_size)]
    samples = _solve(model, cfg, layout, subsets)
    chords = decode_sequence(samples.first, layout).sequence
    _warn(validate_harmony(chords, spec))
    melody = tuple((tuple(render([d], spec.scale)), "H") for d in spec.melody)
    harmony = tuple((tuple(render(ch, spec.scale)) if ch else (), "H") for ch in chords)
    notes = [f"energy {_fmt(samples.first.energy)}"]
    voices = [Voice("melody", melody), Voice("harmony", harmony)]
    _music_output(cfg, model, samples, voices, spec.scale, "Harmony", notes)


def cmd_chords(cfg: RunConfig) -> None:
    _, spec = _spec(cfg, "chords")
    net = build_chord_mrf(spec)
    model = mrf_to_qubo(net)
    if cfg.format == "model-text":
        _music_output(cfg, net, None, (), spec.scale, "Chords")
        return
    layout = chord_layout(spec)
    samples = _solve(model, cfg, layout, one_hot_patterns(layout.width, include_empty=True))
    seq = decode_sequence(samples.first, layout).sequence
    _warn(validate_progression(seq))
    events = tuple((chord_pitches(spec.chords.index(c), spec.scale) if c is not None else (), "H") for c in seq)
    progression = " ".join(c if c is not None else REST for c in seq)
    notes = [f"progression {progression}", f"energy {_fmt(samples.first.energy)}"]
    _music_output(cfg, net, samples, [Voice("chords", events)], spec.scale, "Chords", notes)


def cmd_qharmony(cfg: RunConfig) -> None:
    _, spec = _spec(cfg, "qharmony")
    ising = build_qharmony(spec)
    if cfg.format == "model-text":
        _music_output(cfg, ising, None, (), Scale(), "qHarmony")
        return
    if cfg.solver == "restricted":
        raise CapabilityError("the restricted solver does not apply to qharmony")
    samples = _solve(ising_to_qubo(ising), cfg)
    # bit 0 is spin +1, i.e. the note is selected
    chosen = tuple(p for p, b in zip(spec.notes, samples.first.assignment) if b == 0)
    _warn([f"input note {p} is not in the chord" for p in spec.input_notes if p not in chosen])
    voices = [Voice("input", ((tuple(spec.input_notes), "H"),)), Voice("harmony", ((chosen, "H"),))]
    notes = [f"energy {_fmt(ising.energy([1 if p in chosen else -1 for p in spec.notes]))}"]
    _music_output(cfg, ising, samples, voices, Scale(), "qHarmony", notes)


def cmd_extract_weights(cfg: RunConfig) -> None:
    try:
        piece = load_piece(_load_json(cfg.inputs[0]))
        pitch, duration = extract_weights(piece)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(dumps(weights_to_dict(pitch, duration)), cfg)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


# argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubo-music", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=True):
        p.add_argument("--solver", choices=SOLVERS, default="brute")
        p.add_argument("--seed", type=int, help="required with --solver sa")
        p.add_argument("--reads", type=int, default=SaParams.num_reads)
        p.add_argument("--sweeps", type=int, default=SaParams.sweeps_per_read)
        p.add_argument("--beta-start", type=float, default=SaParams.beta_start)
        p.add_argument("--beta-end", type=float, default=SaParams.beta_end)
        if formats:
            p.add_argument("--format", choices=FORMATS)
        p.add_argument("--output", "-o", help="write here instead of standard output")

    p = sub.add_parser("compile", help="compile an ILP file into a QUBO file")
    p.add_argument("input")
    p.add_argument("--varmap", help="also write the variable map here")
    p.add_argument("--output", "-o")
    p = sub.add_parser("solve", help="solve a qubo, ising, mrf or ilp file")
    p.add_argument("input")
    common(p)
    for name, text in [
        ("melody", "write a melody from a melody spec"),
        ("rhythm", "write a rhythm from a rhythm spec"),
        ("harmony", "harmonise a degree melody with triads"),
        ("chords", "write a chord progression"),
        ("qharmony", "pick a chord around input notes (Ising model)"),
    ]:
        p = sub.add_parser(name, help=text)
        p.add_argument("input")
        common(p)
    p = sub.add_parser("extract-weights", help="count consecutive pitch and duration pairs in a piece")
    p.add_argument("input")
    p.add_argument("--output", "-o")
    return parser


_COMMANDS = {
    "solve": cmd_solve,
    "melody": cmd_melody,
    "rhythm": cmd_rhythm,
    "harmony": cmd_harmony,
    "chords": cmd_chords,
    "qharmony": cmd_qharmony,
    "extract-weights": cmd_extract_weights,
}


def _config(args) -> RunConfig:
    solver = getattr(args, "solver", "brute")
    sa = None
    if solver == "sa" and args.seed is not None:
        try:
            sa = SaParams(args.reads, args.sweeps, args.beta_start, args.beta_end, args.seed)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return RunConfig(args.command, (args.input,), solver, sa, args.output, getattr(args, "format", None))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        if args.command == "compile":
            cmd_compile(cfg, args.varmap)
        else:
            _COMMANDS[args.command](cfg)
    except (SizeError, CapabilityError, UnsupportedCliqueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, FormatError, SpecError, PitchError, CompileError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
