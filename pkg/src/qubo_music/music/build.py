"""Music models as QUBO, Ising and Markov-network instances.

Each note position ``i`` owns one block of indicator bits, one per column
(pitch, duration, degree, ...). Rules are written against these indicators;
slack bits needed by inequality rules are appended after the grid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from ..compiler import BinaryEncoding, Constraint, IntVar, LinearExpr, PolyExpr, binarize, squared_penalty, to_equality
from ..mrf import MarkovNetwork, PairPotential
from ..qubo import IsingModel, QuboModel
from .specs import (
    ChordProgressionSpec,
    HarmonySpec,
    MelodySpec,
    QHarmonySpec,
    RhythmSpec,
    SpecError,
)

__all__ = [
    "Layout",
    "TENDENCY_RESOLUTIONS",
    "build_melody",
    "build_rhythm",
    "build_pitch_duration",
    "build_harmony",
    "build_chord_mrf",
    "chord_layout",
    "build_qharmony",
    "encode_sequence",
]

TENDENCY_RESOLUTIONS = ((2, 1), (4, 3), (6, 5), (7, 8))


@dataclass(frozen=True)
class Layout:
    """Where each (position, column) indicator lives in the variable vector."""

    n: int
    columns: tuple
    select: int | None = 1
    aux_groups: tuple[tuple[int, ...], ...] = ()
    penalties: dict = field(default_factory=dict, compare=False)

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def grid_size(self) -> int:
        return self.n * self.width

    @property
    def aux(self) -> tuple[int, ...]:
        return tuple(v for g in self.aux_groups for v in g)

    @property
    def num_vars(self) -> int:
        return self.grid_size + len(self.aux)

    def var(self, i: int, c: int) -> int:
        if not (0 <= i < self.n and 0 <= c < self.width):
            raise IndexError(f"no variable for position {i}, column {c}")
        return i * self.width + c

    def index(self, i: int, column: Hashable) -> int:
        return self.var(i, self.columns.index(column))

    def position_vars(self, i: int) -> list[int]:
        return [self.var(i, c) for c in range(self.width)]

    def encode(self, seq: Sequence) -> list[int]:
        """Grid bits for a sequence of columns (or tuples of columns for chords); aux bits zero."""
        x = [0] * self.num_vars
        for i, item in enumerate(seq):
            items = item if isinstance(item, (tuple, list, frozenset, set)) and self.select != 1 else [item]
            for col in items:
                x[self.index(i, col)] = 1
        return x


class _Rules:
    """Accumulates soft terms, unit-weight hard terms and slack encodings."""

    def __init__(self, n: int, columns: Sequence, label: Callable[[int, Hashable], str]):
        self.n = n
        self.columns = tuple(columns)
        self.width = len(self.columns)
        self.next_id = n * self.width
        self.soft = PolyExpr()
        self.hard: dict[str, PolyExpr] = {}
        self.budget = 0.0
        self.aux_groups: list[tuple[int, ...]] = []
        self.labels = {i * self.width + c: label(i, col) for i in range(n) for c, col in enumerate(self.columns)}

    def x(self, i: int, c: int) -> int:
        return i * self.width + c

    def ind(self, i: int, cols: Sequence[int]) -> PolyExpr:
        return PolyExpr.linear((self.x(i, c), 1.0) for c in cols)

    def soft_term(self, poly: PolyExpr, weight: float) -> None:
        self.soft = self.soft + poly * weight

    def reward(self, poly: PolyExpr, weight: float) -> None:
        self.soft = self.soft - poly * weight

    def hard_term(self, family: str, poly: PolyExpr) -> None:
        self.hard[family] = self.hard.get(family, PolyExpr()) + poly

    def hard_equal(self, family: str, lhs: PolyExpr, target: float) -> None:
        diff = lhs - target
        self.hard_term(family, diff * diff)

    def bounded_sum(self, var_ids: Sequence[int], relation: str, bound: int, tag: str) -> PolyExpr:
        """Unit squared penalty for ``sum(x) <= bound`` or ``>= bound`` through a binarised slack."""
        names = {v: f"v{v}" for v in var_ids}
        variables = {name: IntVar(name, 0, 1) for name in names.values()}
        c = Constraint(LinearExpr({names[v]: 1.0 for v in var_ids}), relation, bound)
        eq, slack = to_equality(c, variables, "slack")
        enc = binarize(slack, self.next_id)
        self.next_id += len(enc.bits)
        if enc.bits:
            self.aux_groups.append(tuple(i for i, _ in enc.bits))
            for k, (i, _) in enumerate(enc.bits):
                self.labels[i] = f"slack[{tag}][{k}]"
        encs = {name: BinaryEncoding(variables[name], ((v, 1),), 0) for v, name in names.items()}
        encs["slack"] = enc
        return squared_penalty(eq, encs, 1.0)

    def finish(self, hard_overrides: dict[str, float]) -> tuple[QuboModel, dict[str, float]]:
        default_hard = 2.0 * self.budget + 1.0
        resolved = {}
        total = self.soft
        for family, poly in self.hard.items():
            P = hard_overrides.get(family, default_hard)
            resolved[family] = P
            total = total + poly * P
        return total.to_qubo(self.next_id, self.labels), resolved


def _melody_rules(r: _Rules, spec: MelodySpec, cols_of: Callable[[Hashable], list[int]]) -> dict[str, float]:
    """Pitch rules written on marginal indicators ``sum(cols_of(e))`` at each position."""
    n = spec.n
    pen = spec.penalties
    used: dict[str, float] = {}
    order = {col: k for k, col in enumerate(spec.columns)}

    def ind(i, e):
        return r.ind(i, cols_of(e))

    if spec.forbidden_successions:
        P = used["succession"] = pen.get("succession", 1.0)
        for a, b in sorted(spec.forbidden_successions, key=lambda p: (order[p[0]], order[p[1]])):
            for i in range(n - 1):
                r.soft_term(ind(i, a) * ind(i + 1, b), P)

    if spec.forbidden_intervals:
        P = used["interval"] = pen.get("interval", 1.0)
        dom = spec.domain
        for a, b in itertools.product(dom.elements, repeat=2):
            if abs(spec.semitones(a) - spec.semitones(b)) in spec.forbidden_intervals:
                for i in range(n - 1):
                    r.soft_term(ind(i, a) * ind(i + 1, b), P)

    if spec.no_triple_repeat:
        P = used["triple"] = pen.get("triple", 1.0)
        for i in range(n - 2):
            for e in spec.columns:
                window = [r.x(i + t, c) for t in range(3) for c in cols_of(e)]
                r.soft_term(r.bounded_sum(window, "<=", 2, f"{i},{e}"), P)

    if spec.anchor_first_last:
        P = used["anchor"] = pen.get("anchor", 1.0)
        first = spec.domain.first
        r.soft_term(1.0 - ind(0, first), P)
        r.soft_term(1.0 - ind(n - 1, first), P)

    if spec.tendency_rules:
        if spec.domain.kind != "degree":
            raise SpecError("tendency rules need a scale-degree domain")
        nonzero = [w for w in spec.weights.values() if w > 0]
        P = used["tendency"] = pen.get("tendency", sum(nonzero) / len(nonzero) if nonzero else 1.0)
        for src, dst in TENDENCY_RESOLUTIONS:
            if src not in spec.domain.elements:
                continue
            for i in range(n - 1):
                resolve = 1.0 - ind(i + 1, dst) if dst in spec.domain.elements else PolyExpr(constant=1.0)
                r.soft_term(ind(i, src) * resolve, P)

    r.budget += sum(used.values())
    if spec.rest is not None:
        rest_sum = sum((ind(i, spec.rest.symbol) for i in range(n)), PolyExpr())
        r.hard_equal("rest", rest_sum, spec.rest.count)
    return used


def _rhythm_rules(r: _Rules, spec: RhythmSpec, cols_of: Callable[[str], list[int]]) -> None:
    n = spec.n
    if spec.min_count_each > 0:
        for d in spec.durations:
            ids = [r.x(i, c) for i in range(n) for c in cols_of(d)]
            r.hard_term("min_count", r.bounded_sum(ids, ">=", spec.min_count_each, d))
    if spec.total_length is not None:
        total = PolyExpr()
        for i in range(n):
            for d in spec.durations:
                total = total + r.ind(i, cols_of(d)) * spec.lengths[d]
        r.hard_equal("length", total, spec.total_length)


def _one_hot(r: _Rules) -> None:
    for i in range(r.n):
        r.hard_equal("one_hot", r.ind(i, range(r.width)), 1.0)


def _hard_overrides(penalties, families):
    return {f: penalties[f] for f in families if f in penalties}


def build_melody(spec: MelodySpec) -> tuple[QuboModel, Layout]:
    """Pitch-only melody model with ``n * |columns|`` indicator bits (+ slack bits).

    Hard rules (one pitch per position, rest count) default to
    ``2 * (sum of transition weights + sum of soft family penalties) + 1``.
    """
    r = _Rules(spec.n, spec.columns, lambda i, col: f"x[{i},{col}]")
    _one_hot(r)
    used = _melody_rules(r, spec, lambda e: [spec.columns.index(e)])
    r.budget += sum(abs(w) for w in spec.weights.values())
    for (a, b), w in sorted(spec.weights.items(), key=lambda kv: (spec.columns.index(kv[0][0]), spec.columns.index(kv[0][1]))):
        ia, ib = spec.columns.index(a), spec.columns.index(b)
        for i in range(spec.n - 1):
            r.reward(PolyExpr({(r.x(i, ia), r.x(i + 1, ib)): 1.0}), w)
    model, hard = r.finish(_hard_overrides(spec.penalties, ("one_hot", "rest")))
    return model, Layout(spec.n, spec.columns, 1, tuple(r.aux_groups), {**used, **hard})


def build_rhythm(spec: RhythmSpec) -> tuple[QuboModel, Layout]:
    r = _Rules(spec.n, spec.durations, lambda i, d: f"y[{i},{d}]")
    _one_hot(r)
    _rhythm_rules(r, spec, lambda d: [spec.durations.index(d)])
    r.budget += sum(abs(w) for w in spec.weights.values())
    for (a, b), w in sorted(spec.weights.items(), key=lambda kv: (spec.durations.index(kv[0][0]), spec.durations.index(kv[0][1]))):
        ia, ib = spec.durations.index(a), spec.durations.index(b)
        for i in range(spec.n - 1):
            r.reward(PolyExpr({(r.x(i, ia), r.x(i + 1, ib)): 1.0}), w)
    model, hard = r.finish(_hard_overrides(spec.penalties, ("one_hot", "min_count", "length")))
    return model, Layout(spec.n, spec.durations, 1, tuple(r.aux_groups), hard)


def build_pitch_duration(
    melody: MelodySpec,
    rhythm: RhythmSpec,
    joint_weights: dict | None = None,
) -> tuple[QuboModel, Layout]:
    """Joint model over (pitch, duration) columns, ``n * |P| * |D|`` indicator bits.

    Pitch rules act on the pitch marginal, duration rules on the duration
    marginal; the objective rewards consecutive (pitch, duration) pairs from
    ``joint_weights`` keyed ``((p, d), (p', d'))``.
    """
    if melody.n != rhythm.n:
        raise SpecError(f"melody has {melody.n} notes but rhythm has {rhythm.n}")
    columns = tuple(itertools.product(melody.columns, rhythm.durations))
    r = _Rules(melody.n, columns, lambda i, col: f"x[{i},{col[0]},{col[1]}]")
    _one_hot(r)
    used = _melody_rules(r, melody, lambda e: [c for c, (p, _) in enumerate(columns) if p == e])
    _rhythm_rules(r, rhythm, lambda d: [c for c, (_, q) in enumerate(columns) if q == d])
    r.budget += sum(abs(w) for w in (joint_weights or {}).values())
    for (a, b), w in sorted((joint_weights or {}).items(), key=lambda kv: (columns.index(tuple(kv[0][0])), columns.index(tuple(kv[0][1])))):
        ia, ib = columns.index(tuple(a)), columns.index(tuple(b))
        for i in range(melody.n - 1):
            r.reward(PolyExpr({(r.x(i, ia), r.x(i + 1, ib)): 1.0}), w)
    overrides = {**_hard_overrides(rhythm.penalties, ("min_count", "length")),
                 **_hard_overrides(melody.penalties, ("one_hot", "rest"))}
    model, hard = r.finish(overrides)
    return model, Layout(melody.n, columns, 1, tuple(r.aux_groups), {**used, **hard})


def build_harmony(spec: HarmonySpec) -> tuple[QuboModel, Layout]:
    """Triads over degrees 1..8 at each position of a given melody."""
    degrees = tuple(range(1, 9))
    n = spec.n
    pen = spec.penalties
    r = _Rules(n, degrees, lambda i, d: f"x[{i},{d}]")
    for i in range(n):
        r.hard_equal("three", r.ind(i, range(8)), spec.chord_size)
    used = {}
    if spec.anchor_first_last_triad:
        P = used["anchor"] = pen.get("anchor", 1.0)
        for pos in (0, n - 1):
            for d in (1, 3, 5):
                r.soft_term(1.0 - r.ind(pos, [d - 1]), P)
    P_mel = used["melody"] = pen.get("melody", 1.0)
    P_tri = used["triad"] = pen.get("triad", 1.0)
    for i in range(1, n - 1):
        r.soft_term(1.0 - r.ind(i, [spec.melody[i] - 1]), P_mel)
        for j, k in itertools.combinations(degrees, 2):
            if k - j in spec.forbidden_within:
                r.soft_term(PolyExpr({(r.x(i, j - 1), r.x(i, k - 1)): 1.0}), P_tri)
    r.budget += sum(used.values())
    model, hard = r.finish(_hard_overrides(pen, ("three",)))
    return model, Layout(n, degrees, spec.chord_size, (), {**used, **hard})


def chord_layout(spec: ChordProgressionSpec) -> Layout:
    return Layout(spec.n, spec.chords, 1)


def build_chord_mrf(spec: ChordProgressionSpec) -> MarkovNetwork:
    """One binary node per (timestep, chord); pairwise potentials only.

    Two chords at the same timestep and the same chord at consecutive
    timesteps cost ``potential_conflict`` when both are on; V followed by I
    costs ``cadence_reward``; every other consecutive pair is neutral.
    Chords more than one step apart are not connected.
    """
    chords, n, k = spec.chords, spec.n, len(spec.chords)
    base = spec.potential_base
    labels = tuple(f"{c}_{t + 1}" for t in range(n) for c in chords)
    conflict = PairPotential(base, base, base, spec.potential_conflict)
    cadence = PairPotential(base, base, base, spec.cadence_reward)
    neutral = PairPotential(base, base, base, base)
    edges = {}
    for t in range(n):
        for a, b in itertools.combinations(range(k), 2):
            edges[t * k + a, t * k + b] = conflict
    for t in range(n - 1):
        for a in range(k):
            for b in range(k):
                if a == b:
                    pot = conflict
                elif chords[a] == "V" and chords[b] == "I":
                    pot = cadence
                else:
                    pot = neutral
                edges[t * k + a, (t + 1) * k + b] = pot
    return MarkovNetwork(labels, {}, edges)


def build_qharmony(spec: QHarmonySpec) -> IsingModel:
    """Ising harmoniser: ``J_ij = 7 - 2|i - j|``, ``h_i = -7`` on input notes and 1 elsewhere.

    Spin +1 means the note is in the chord.
    """
    notes = spec.notes
    h = {i: (-7.0 if p in spec.input_notes else 1.0) for i, p in enumerate(notes)}
    J = {(i, j): 7.0 - 2.0 * abs(i - j) for i, j in itertools.combinations(range(len(notes)), 2)}
    return IsingModel(len(notes), h, J, 0.0, dict(enumerate(notes)))


def encode_sequence(model: QuboModel, layout: Layout, seq: Sequence) -> list[int]:
    """Bits for ``seq`` with each slack group set to its cheapest pattern.

    Slack groups only couple to grid bits and to themselves, so they can be
    completed one at a time by enumeration.
    """
    x = layout.encode(seq)
    for group in layout.aux_groups:
        best = None
        for pattern in itertools.product((0, 1), repeat=len(group)):
            for v, b in zip(group, pattern):
                x[v] = b
            e = model.energy(x)
            if best is None or e < best[0]:
                best = (e, pattern)
        for v, b in zip(group, best[1]):
            x[v] = b
    return x
