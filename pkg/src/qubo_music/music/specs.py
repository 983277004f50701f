"""Declarative rule sets for the music models, with JSON-friendly loaders."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .pitch import MODE_OFFSETS, PitchDomain, Scale

__all__ = [
    "SpecError",
    "DURATION_LENGTHS",
    "CHORDS",
    "QHARMONY_NOTES",
    "RestRule",
    "MelodySpec",
    "RhythmSpec",
    "HarmonySpec",
    "ChordProgressionSpec",
    "QHarmonySpec",
    "load_spec",
]

DURATION_LENGTHS = {"E": 1, "Q": 2, "DQ": 3, "H": 4}
CHORDS = ("I", "ii", "iii", "IV", "V", "vi", "VIIdim")
QHARMONY_NOTES = ("C4", "D4", "E4", "F4", "G4", "A4", "B4", "C5")

MELODY_FAMILIES = {"one_hot", "succession", "interval", "triple", "anchor", "tendency", "rest"}
RHYTHM_FAMILIES = {"one_hot", "min_count", "length"}
HARMONY_FAMILIES = {"three", "anchor", "melody", "triad"}


class SpecError(ValueError):
    pass


def _check_penalties(penalties: Mapping[str, float], allowed: set[str]) -> dict[str, float]:
    out = {}
    for k, v in penalties.items():
        if k not in allowed:
            raise SpecError(f"unknown penalty family {k!r}; expected one of {sorted(allowed)}")
        if not v > 0:
            raise SpecError(f"penalty for {k!r} must be positive")
        out[k] = float(v)
    return out


def _pairs(data, cast=lambda v: v) -> dict[tuple, float]:
    """Weights given as ``[[a, b, w], ...]`` or ``{"a,b": w}``."""
    if isinstance(data, Mapping):
        items = [(*k.split(","), w) for k, w in data.items()]
    else:
        items = data or []
    out: dict[tuple, float] = {}
    for a, b, w in items:
        key = (cast(a), cast(b))
        out[key] = out.get(key, 0.0) + float(w)
    return out


@dataclass(frozen=True)
class RestRule:
    symbol: str = "R"
    count: int = 0


@dataclass(frozen=True)
class MelodySpec:
    n: int
    domain: PitchDomain
    forbidden_successions: frozenset = frozenset()
    forbidden_intervals: frozenset = frozenset()
    no_triple_repeat: bool = False
    anchor_first_last: bool = False
    tendency_rules: bool = False
    weights: Mapping[tuple, float] = field(default_factory=dict)
    rest: RestRule | None = None
    penalties: Mapping[str, float] = field(default_factory=dict)
    scale: Scale = field(default_factory=Scale)

    def __post_init__(self):
        if self.n < 2:
            raise SpecError("a melody needs at least two notes")
        cols = set(self.columns)
        object.__setattr__(self, "forbidden_successions", frozenset(tuple(p) for p in self.forbidden_successions))
        object.__setattr__(self, "forbidden_intervals", frozenset(int(a) for a in self.forbidden_intervals))
        for a, b in self.forbidden_successions:
            if a not in cols or b not in cols:
                raise SpecError(f"forbidden succession ({a}, {b}) uses elements outside the domain")
        for (a, b), w in self.weights.items():
            if a not in cols or b not in cols:
                raise SpecError(f"weight ({a}, {b}) uses elements outside the domain")
            if w < 0:
                raise SpecError("transition weights must be non-negative")
        if self.rest is not None:
            if self.rest.symbol in self.domain.elements:
                raise SpecError("rest symbol collides with a domain element")
            if not 0 <= self.rest.count <= self.n:
                raise SpecError(f"rest count must lie in [0, {self.n}]")
        object.__setattr__(self, "penalties", _check_penalties(self.penalties, MELODY_FAMILIES))

    def semitones(self, element) -> int:
        """Pitch height used by interval rules; degrees follow this melody's scale mode."""
        if self.domain.kind == "degree" and self.scale.mode in MODE_OFFSETS:
            d = int(element)
            return MODE_OFFSETS[self.scale.mode][(d - 1) % 7] + 12 * ((d - 1) // 7)
        return self.domain.semitones(element)

    @property
    def columns(self) -> tuple:
        """Domain elements plus the rest symbol, if rests are enabled."""
        return self.domain.elements + ((self.rest.symbol,) if self.rest else ())

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "MelodySpec":
        try:
            dom = d["domain"]
            domain = PitchDomain(dom["kind"], tuple(dom["elements"]))
            cast = (lambda v: v) if domain.kind == "named" else _maybe_int
            rest = d.get("rest")
            return cls(
                n=int(d["n"]),
                domain=domain,
                forbidden_successions=frozenset((cast(a), cast(b)) for a, b in d.get("forbidden_successions", [])),
                forbidden_intervals=frozenset(d.get("forbidden_intervals", [])),
                no_triple_repeat=bool(d.get("no_triple_repeat", False)),
                anchor_first_last=bool(d.get("anchor_first_last", False)),
                tendency_rules=bool(d.get("tendency_rules", False)),
                weights=_pairs(d.get("weights"), cast),
                rest=RestRule(rest.get("symbol", "R"), int(rest["count"])) if rest else None,
                penalties=d.get("penalties", {}),
                scale=Scale(**d.get("scale", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"invalid melody spec: {exc}") from exc


def _maybe_int(v):
    try:
        return int(v)
    except (TypeError, ValueError):
        return v


@dataclass(frozen=True)
class RhythmSpec:
    n: int
    durations: tuple[str, ...] = ("E", "Q", "DQ", "H")
    lengths: Mapping[str, int] = field(default_factory=lambda: dict(DURATION_LENGTHS))
    weights: Mapping[tuple[str, str], float] = field(default_factory=dict)
    min_count_each: int = 2
    total_length: int | None = None
    penalties: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "durations", tuple(self.durations))
        if self.n < 1:
            raise SpecError("a rhythm needs at least one note")
        if not self.durations or len(set(self.durations)) != len(self.durations):
            raise SpecError("durations must be a non-empty list of distinct names")
        for dname in self.durations:
            if dname not in self.lengths:
                raise SpecError(f"no length given for duration {dname!r}")
            if self.lengths[dname] < 1:
                raise SpecError("duration lengths must be at least one eighth")
        for a, b in self.weights:
            if a not in self.durations or b not in self.durations:
                raise SpecError(f"weight ({a}, {b}) uses an unknown duration")
        if self.min_count_each < 0:
            raise SpecError("min_count_each must be non-negative")
        if self.min_count_each * len(self.durations) > self.n:
            raise SpecError(
                f"infeasible: {len(self.durations)} durations x {self.min_count_each} each exceeds n={self.n}"
            )
        if self.total_length is not None:
            lens = [self.lengths[x] for x in self.durations]
            if not self.n * min(lens) <= self.total_length <= self.n * max(lens):
                raise SpecError(
                    f"infeasible total length {self.total_length}: must lie in "
                    f"[{self.n * min(lens)}, {self.n * max(lens)}]"
                )
        object.__setattr__(self, "penalties", _check_penalties(self.penalties, RHYTHM_FAMILIES))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "RhythmSpec":
        try:
            durations = tuple(d.get("durations", ("E", "Q", "DQ", "H")))
            lengths = {**DURATION_LENGTHS, **d.get("lengths", {})}
            return cls(
                n=int(d["n"]),
                durations=durations,
                lengths=lengths,
                weights=_pairs(d.get("weights")),
                min_count_each=int(d.get("min_count_each", 2)),
                total_length=d.get("total_length"),
                penalties=d.get("penalties", {}),
            )
        except (KeyError, TypeError) as exc:
            raise SpecError(f"invalid rhythm spec: {exc}") from exc


@dataclass(frozen=True)
class HarmonySpec:
    melody: tuple[int, ...]
    chord_size: int = 3
    forbidden_within: frozenset = frozenset({1, 6, 7})
    anchor_first_last_triad: bool = True
    penalties: Mapping[str, float] = field(default_factory=dict)
    scale: Scale = field(default_factory=Scale)

    def __post_init__(self):
        object.__setattr__(self, "melody", tuple(int(p) for p in self.melody))
        object.__setattr__(self, "forbidden_within", frozenset(int(v) for v in self.forbidden_within))
        if len(self.melody) < 2:
            raise SpecError("harmonisation needs a melody of at least two notes")
        if not all(1 <= p <= 8 for p in self.melody):
            raise SpecError("melody degrees must lie in 1..8")
        if self.anchor_first_last_triad and (self.melody[0] != 1 or self.melody[-1] != 1):
            raise SpecError("anchored harmonisation needs the melody to start and end on degree 1")
        if not 1 <= self.chord_size <= 8:
            raise SpecError("chord size must lie in 1..8")
        object.__setattr__(self, "penalties", _check_penalties(self.penalties, HARMONY_FAMILIES))

    @property
    def n(self) -> int:
        return len(self.melody)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "HarmonySpec":
        try:
            return cls(
                melody=tuple(d["melody"]),
                chord_size=int(d.get("chord_size", 3)),
                forbidden_within=frozenset(d.get("forbidden_within", (1, 6, 7))),
                anchor_first_last_triad=bool(d.get("anchor_first_last_triad", True)),
                penalties=d.get("penalties", {}),
                scale=Scale(**d.get("scale", {})),
            )
        except (KeyError, TypeError) as exc:
            raise SpecError(f"invalid harmony spec: {exc}") from exc


@dataclass(frozen=True)
class ChordProgressionSpec:
    n: int = 4
    chords: tuple[str, ...] = CHORDS
    potential_base: float = 50.0
    potential_conflict: float = 100.0
    cadence_reward: float = 0.0
    scale: Scale = field(default_factory=Scale)

    def __post_init__(self):
        object.__setattr__(self, "chords", tuple(self.chords))
        if self.n < 2:
            raise SpecError("a progression needs at least two chords")
        if len(set(self.chords)) != len(self.chords):
            raise SpecError("chord names must be distinct")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ChordProgressionSpec":
        try:
            return cls(
                n=int(d.get("n", 4)),
                chords=tuple(d.get("chords", CHORDS)),
                potential_base=float(d.get("potential_base", 50.0)),
                potential_conflict=float(d.get("potential_conflict", 100.0)),
                cadence_reward=float(d.get("cadence_reward", 0.0)),
                scale=Scale(**d.get("scale", {})),
            )
        except (KeyError, TypeError) as exc:
            raise SpecError(f"invalid chord spec: {exc}") from exc


@dataclass(frozen=True)
class QHarmonySpec:
    input_notes: tuple[str, ...]
    notes: tuple[str, ...] = QHARMONY_NOTES

    def __post_init__(self):
        object.__setattr__(self, "notes", tuple(self.notes))
        object.__setattr__(self, "input_notes", tuple(self.input_notes))
        if not self.input_notes:
            raise SpecError("qHarmony needs at least one input note")
        missing = [p for p in self.input_notes if p not in self.notes]
        if missing:
            raise SpecError(f"input notes {missing} are not in the note set")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "QHarmonySpec":
        try:
            return cls(tuple(d["input_notes"]), tuple(d.get("notes", QHARMONY_NOTES)))
        except (KeyError, TypeError) as exc:
            raise SpecError(f"invalid qharmony spec: {exc}") from exc


_LOADERS = {
    "melody": MelodySpec,
    "rhythm": RhythmSpec,
    "harmony": HarmonySpec,
    "chords": ChordProgressionSpec,
    "qharmony": QHarmonySpec,
}


def load_spec(d: Mapping[str, Any], expected: str | None = None):
    kind = d.get("type", expected)
    if expected is not None and kind != expected:
        raise SpecError(f"expected a {expected!r} spec, got {kind!r}")
    if kind not in _LOADERS:
        raise SpecError(f"unknown spec type {kind!r}")
    try:
        return _LOADERS[kind].from_dict(d)
    except SpecError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise SpecError(str(exc)) from exc
