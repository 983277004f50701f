"""Exact enumeration and a seeded simulated-annealing sampler for QUBO models."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numba
import numpy as np

from .qubo import QuboModel

__all__ = [
    "SizeError",
    "Sample",
    "SampleSet",
    "SaParams",
    "brute_force",
    "simulated_annealing",
    "restricted_enumerate",
    "one_hot_patterns",
]

_CHUNK = 1 << 16


class SizeError(ValueError):
    """Model too large for the requested exact method."""


@dataclass(frozen=True, order=True)
class Sample:
    energy: float
    assignment: tuple[int, ...]
    num_occurrences: int = 1


@dataclass(frozen=True)
class SampleSet:
    samples: tuple[Sample, ...]
    model_fingerprint: str = ""

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(sorted(self.samples, key=lambda s: (s.energy, s.assignment))))

    @classmethod
    def from_assignments(cls, model: QuboModel, assignments: Iterable[Sequence[int]]) -> "SampleSet":
        counts: dict[tuple[int, ...], int] = {}
        for a in assignments:
            a = tuple(int(v) for v in a)
            counts[a] = counts.get(a, 0) + 1
        samples = [Sample(model.energy(a), a, n) for a, n in counts.items()]
        return cls(tuple(samples), model.fingerprint())

    @property
    def first(self) -> Sample:
        if not self.samples:
            raise ValueError("empty sample set")
        return self.samples[0]

    @property
    def lowest_energy(self) -> float:
        return self.first.energy

    def lowest(self) -> list[Sample]:
        e = self.lowest_energy
        return [s for s in self.samples if s.energy == e]

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def merge(self, other: "SampleSet") -> "SampleSet":
        if self.model_fingerprint and other.model_fingerprint and self.model_fingerprint != other.model_fingerprint:
            raise ValueError("cannot merge samples from different models")
        acc: dict[tuple[int, ...], Sample] = {}
        for s in (*self.samples, *other.samples):
            prev = acc.get(s.assignment)
            acc[s.assignment] = s if prev is None else Sample(prev.energy, s.assignment, prev.num_occurrences + s.num_occurrences)
        return SampleSet(tuple(acc.values()), self.model_fingerprint or other.model_fingerprint)

    def to_table(self) -> str:
        """Tab-separated rows of ``bits energy num_occurrences``."""
        n = len(self.samples[0].assignment) if self.samples else 0
        lines = [f"# model {self.model_fingerprint} num_vars {n}", "bits\tenergy\tnum_occurrences"]
        for s in self.samples:
            bits = "".join(str(b) for b in s.assignment)
            lines.append(f"{bits}\t{_fmt(s.energy)}\t{s.num_occurrences}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_table(cls, text: str) -> "SampleSet":
        fp = ""
        samples = []
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) >= 2 and parts[0] == "model":
                    fp = parts[1]
                continue
            if line.startswith("bits"):
                continue
            bits, e, n = line.split("\t")
            samples.append(Sample(float(e), tuple(int(c) for c in bits), int(n)))
        return cls(tuple(samples), fp)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() and abs(x) < 2**53 else repr(float(x))


def _bits_block(start: int, stop: int, n: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    # column 0 is the most significant bit, so row order is lexicographic
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def _components(model: QuboModel, nodes: Sequence[int]) -> list[list[int]]:
    nodes_set = set(nodes)
    adj = {v: set() for v in nodes}
    for i, j in model.quadratic:
        if i in nodes_set and j in nodes_set:
            adj[i].add(j)
            adj[j].add(i)
    seen: set[int] = set()
    out = []
    for v in sorted(nodes):
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        out.append(sorted(comp))
    return out


def brute_force(model: QuboModel, limit: int = 24, marginalize: Iterable[int] | None = None) -> SampleSet:
    """Every minimum-energy assignment, by exhaustive enumeration.

    Variables listed in ``marginalize`` are not enumerated jointly: they are
    split into connected groups (via couplings among themselves) and each
    group is minimised exactly, per assignment of the other variables. This
    keeps slack bits from blowing up the search while staying exact. The
    ground-state set is then complete over the enumerated variables; each is
    completed with the lexicographically first optimal pattern per group.
    ``limit`` bounds the number of enumerated variables.
    """
    n = model.num_vars
    aux = sorted(set(marginalize or ()))
    primary = [i for i in range(n) if i not in set(aux)]
    if len(primary) > limit:
        raise SizeError(f"brute force limited to {limit} variables, model has {len(primary)}")
    lin, upper = model.to_arrays()
    sym = upper + upper.T

    groups = []
    for comp in _components(model, aux):
        if len(comp) > 16:
            raise SizeError(f"auxiliary group of {len(comp)} variables is too large to marginalise")
        pats = _bits_block(0, 1 << len(comp), len(comp)).astype(float)
        internal = pats @ lin[comp] + np.einsum("ij,ij->i", pats @ upper[np.ix_(comp, comp)], pats)
        coupling = sym[np.ix_(primary, comp)] @ pats.T  # (|primary|, patterns)
        groups.append((comp, pats, internal, coupling))

    p_lin = lin[primary]
    p_upper = upper[np.ix_(primary, primary)]
    total = 1 << len(primary)
    best = np.inf
    hits: list[np.ndarray] = []
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        X = _bits_block(start, stop, len(primary)).astype(float)
        E = X @ p_lin + np.einsum("ij,ij->i", X @ p_upper, X) + model.offset
        for _, _, internal, coupling in groups:
            E = E + np.min(internal[None, :] + X @ coupling, axis=1)
        m = E.min()
        tol = 1e-9 * max(1.0, abs(m))
        if m < best - tol:
            best = m
            hits = []
        if m <= best + tol:
            hits.append(np.flatnonzero(E <= best + 1e-9 * max(1.0, abs(best))) + start)
    idx = np.concatenate(hits) if hits else np.zeros(0, dtype=np.int64)

    assignments = []
    P = _index_to_bits(idx, len(primary))
    for row in P:
        x = np.zeros(n, dtype=np.int8)
        x[primary] = row
        xf = row.astype(float)
        for comp, pats, internal, coupling in groups:
            k = int(np.argmin(internal + xf @ coupling))
            x[comp] = pats[k]
        assignments.append(x)
    out = SampleSet.from_assignments(model, assignments)
    return _ground_only(out)


def _index_to_bits(idx: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None].astype(np.int64) >> shifts) & 1).astype(np.int8)


def _ground_only(ss: SampleSet) -> SampleSet:
    if not ss.samples:
        return ss
    e = ss.lowest_energy
    return SampleSet(tuple(s for s in ss.samples if s.energy == e), ss.model_fingerprint)


def one_hot_patterns(size: int, include_empty: bool = False) -> list[tuple[int, ...]]:
    pats = [tuple(int(i == j) for i in range(size)) for j in range(size)]
    if include_empty:
        pats.append((0,) * size)
    return pats


def restricted_enumerate(
    model: QuboModel,
    groups: Sequence[Sequence[int]],
    choices: Sequence[Sequence[Sequence[int]]],
    max_block: int = 1 << 22,
    limit: int = 1 << 30,
) -> SampleSet:
    """Exact minimum over the cross product of allowed per-group patterns.

    Energy splits into per-group tables and pairwise group tables, so the
    enumeration is a broadcast sum; leading groups are looped over when the
    full product would exceed ``max_block`` entries.
    More than ``limit`` combinations in total raises :class:`SizeError`.
    """
    flat = [v for g in groups for v in g]
    if sorted(flat) != list(range(model.num_vars)):
        raise ValueError("groups must partition the model's variables")
    if len(choices) != len(groups):
        raise ValueError("need one choice list per group")
    pats = []
    for g, ch in zip(groups, choices):
        arr = np.asarray(list(ch), dtype=float).reshape(-1, len(g))
        if arr.shape[0] == 0:
            raise ValueError("empty choice set for a group")
        pats.append(arr)

    lin, upper = model.to_arrays()
    sym = upper + upper.T
    G = len(groups)
    unary = [p @ lin[list(g)] + np.einsum("ij,ij->i", p @ upper[np.ix_(g, g)], p) for g, p in zip(groups, pats)]
    pair = {}
    for a in range(G):
        for b in range(a + 1, G):
            # couplings between distinct groups: count each pair once
            W = upper[np.ix_(groups[a], groups[b])] + upper[np.ix_(groups[b], groups[a])].T
            if np.any(W):
                pair[(a, b)] = pats[a] @ W @ pats[b].T
    sizes = [p.shape[0] for p in pats]
    total = math.prod(sizes)
    if total > limit:
        raise SizeError(f"{total} pattern combinations exceed the limit of {limit}")

    split = G
    block = 1
    while split > 0 and block * sizes[split - 1] <= max_block:
        split -= 1
        block *= sizes[split]
    lead, trail = list(range(split)), list(range(split, G))
    tshape = [sizes[g] for g in trail]

    base = np.zeros(tshape) if trail else np.zeros(())
    for t, g in enumerate(trail):
        base = base + unary[g].reshape([-1 if k == t else 1 for k in range(len(trail))])
    for (a, b), T in pair.items():
        if a in trail and b in trail:
            ta, tb = trail.index(a), trail.index(b)
            shape = [1] * len(trail)
            shape[ta], shape[tb] = sizes[a], sizes[b]
            base = base + T.reshape(shape)

    best = np.inf
    hits: list[tuple[tuple[int, ...], np.ndarray]] = []
    for combo in itertools.product(*(range(sizes[g]) for g in lead)):
        E = base + model.offset
        const = sum(unary[g][c] for g, c in zip(lead, combo))
        for (a, b), T in pair.items():
            if a in lead and b in lead:
                const += T[combo[lead.index(a)], combo[lead.index(b)]]
            elif a in lead:
                vec = T[combo[lead.index(a)], :]
                tb = trail.index(b)
                E = E + vec.reshape([-1 if k == tb else 1 for k in range(len(trail))])
        E = E + const
        m = float(np.min(E))
        tol = 1e-9 * max(1.0, abs(m))
        if m < best - tol:
            best, hits = m, []
        if m <= best + tol:
            flat_idx = np.flatnonzero(np.ravel(E) <= best + 1e-9 * max(1.0, abs(best)))
            hits.append((combo, flat_idx))

    assignments = []
    for combo, flat_idx in hits:
        for fi in flat_idx:
            tidx = np.unravel_index(int(fi), tshape) if trail else ()
            x = np.zeros(model.num_vars, dtype=np.int8)
            for g, c in zip(lead, combo):
                x[list(groups[g])] = pats[g][c]
            for g, c in zip(trail, tidx):
                x[list(groups[g])] = pats[g][int(c)]
            assignments.append(x)
    return _ground_only(SampleSet.from_assignments(model, assignments))


@dataclass(frozen=True)
class SaParams:
    num_reads: int = 100
    sweeps_per_read: int = 1000
    beta_start: float = 0.1
    beta_end: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValueError("num_reads must be at least 1")
        if self.sweeps_per_read < 1:
            raise ValueError("sweeps_per_read must be at least 1")
        if not 0 < self.beta_start < self.beta_end:
            raise ValueError("need 0 < beta_start < beta_end")

    def betas(self) -> np.ndarray:
        return np.geomspace(self.beta_start, self.beta_end, self.sweeps_per_read)

    def read_seeds(self) -> np.ndarray:
        # one independent substream per read, keyed by (seed, read index)
        return np.array(
            [np.random.SeedSequence(self.seed, spawn_key=(r,)).generate_state(1)[0] for r in range(self.num_reads)],
            dtype=np.uint32,
        )


@numba.njit(cache=True)
def _anneal(indptr, indices, weights, lin, betas, seeds, n):
    reads = seeds.shape[0]
    out = np.zeros((reads, n), dtype=np.int8)
    field = np.empty(n)
    for r in range(reads):
        np.random.seed(seeds[r])
        x = np.empty(n, dtype=np.int8)
        for i in range(n):
            x[i] = 1 if np.random.random() < 0.5 else 0
        for i in range(n):
            f = lin[i]
            for p in range(indptr[i], indptr[i + 1]):
                if x[indices[p]]:
                    f += weights[p]
            field[i] = f
        for beta in betas:
            for i in range(n):
                # energy change of flipping x_i
                delta = field[i] if x[i] == 0 else -field[i]
                u = np.random.random()
                if delta <= 0.0 or u < np.exp(-beta * delta):
                    step = 1.0 if x[i] == 0 else -1.0
                    x[i] = 1 - x[i]
                    for p in range(indptr[i], indptr[i + 1]):
                        field[indices[p]] += step * weights[p]
        out[r] = x
    return out


def _csr(model: QuboModel):
    adj = model.adjacency()
    indptr = np.zeros(model.num_vars + 1, dtype=np.int64)
    indices, weights = [], []
    for i, nbrs in enumerate(adj):
        for j in sorted(nbrs):
            indices.append(j)
            weights.append(nbrs[j])
        indptr[i + 1] = len(indices)
    lin, _ = model.to_arrays()
    return indptr, np.asarray(indices, dtype=np.int64), np.asarray(weights, dtype=float), lin


def simulated_annealing(model: QuboModel, params: SaParams | None = None) -> SampleSet:
    """Single-flip Metropolis annealing, one restart per read.

    Reads draw from their own generator seeded by ``(seed, read index)``,
    so results depend only on the model and parameters.
    """
    params = params or SaParams()
    if model.num_vars < 1:
        raise ValueError("simulated annealing needs at least one variable")
    indptr, indices, weights, lin = _csr(model)
    states = _anneal(indptr, indices, weights, lin, params.betas(), params.read_seeds(), model.num_vars)
    return SampleSet.from_assignments(model, states)
