"""Markov chains from sequences and pairwise binary Markov random fields."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from .qubo import QuboBuilder, QuboModel

__all__ = [
    "UnsupportedCliqueError",
    "TransitionMatrix",
    "PairPotential",
    "MarkovNetwork",
    "mrf_to_qubo",
    "transition_counts",
    "transition_matrix",
]


class UnsupportedCliqueError(ValueError):
    """Only unary and pairwise cliques can be written as a QUBO directly."""


@dataclass(frozen=True)
class TransitionMatrix:
    states: tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        k = len(self.states)
        if probs.shape != (k, k):
            raise ValueError(f"expected a {k}x{k} matrix, got {probs.shape}")
        if np.any(probs < 0):
            raise ValueError("transition probabilities must be non-negative")
        if not np.allclose(probs.sum(axis=1), 1.0, rtol=0, atol=1e-9):
            raise ValueError("rows of a transition matrix must sum to 1")
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, key):
        a, b = key
        return self.probs[self.states.index(a), self.states.index(b)]


def transition_counts(seq: Sequence[Hashable]) -> dict[tuple, int]:
    """Occurrences of each consecutive pair ``(seq[i], seq[i+1])``."""
    if len(seq) < 2:
        raise ValueError("need at least two elements to count transitions")
    return dict(Counter(zip(seq[:-1], seq[1:])))


def transition_matrix(seq: Sequence[Hashable]) -> TransitionMatrix:
    counts = transition_counts(seq)
    states = list(dict.fromkeys(seq))
    idx = {s: k for k, s in enumerate(states)}
    M = np.zeros((len(states), len(states)))
    for (a, b), c in counts.items():
        M[idx[a], idx[b]] += c
    totals = M.sum(axis=1)
    missing = [s for s, t in zip(states, totals) if t == 0]
    if missing:
        raise ValueError(f"state(s) never observed as a source: {missing}")
    return TransitionMatrix(tuple(states), M / totals[:, None])


@dataclass(frozen=True)
class PairPotential:
    """Energies of the four joint states of two binary variables."""

    phi00: float
    phi01: float
    phi10: float
    phi11: float

    @classmethod
    def from_table(cls, table: Mapping[tuple[int, int], float]) -> "PairPotential":
        missing = {(0, 0), (0, 1), (1, 0), (1, 1)} - set(table)
        if missing:
            raise ValueError(f"potential table is missing entries {sorted(missing)}")
        return cls(table[0, 0], table[0, 1], table[1, 0], table[1, 1])

    def __call__(self, a: int, b: int) -> float:
        return (self.phi00, self.phi01, self.phi10, self.phi11)[2 * a + b]

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.phi00, self.phi01, self.phi10, self.phi11)


@dataclass(frozen=True)
class MarkovNetwork:
    labels: tuple[str, ...]
    unary: Mapping[int, tuple[float, float]] = field(default_factory=dict)
    edges: Mapping[tuple[int, int], PairPotential] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.labels)
        object.__setattr__(self, "labels", tuple(self.labels))
        edges = {}
        for (i, j), pot in self.edges.items():
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"edge ({i}, {j}) does not join two declared nodes")
            if i > j:
                i, j = j, i
                pot = PairPotential(pot.phi00, pot.phi10, pot.phi01, pot.phi11)
            if (i, j) in edges:
                raise ValueError(f"duplicate edge ({i}, {j})")
            edges[i, j] = pot
        for i in self.unary:
            if not 0 <= i < n:
                raise ValueError(f"unary potential on undeclared node {i}")
        object.__setattr__(self, "edges", dict(sorted(edges.items())))
        object.__setattr__(self, "unary", {int(i): tuple(map(float, v)) for i, v in sorted(self.unary.items())})

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    def energy(self, config: Sequence[int]) -> float:
        """Sum of all clique potentials at ``config``."""
        if len(config) != self.num_nodes:
            raise ValueError("configuration length does not match the network")
        total = 0.0
        for i, (p0, p1) in self.unary.items():
            total += p1 if config[i] else p0
        for (i, j), pot in self.edges.items():
            total += pot(config[i], config[j])
        return total

    def to_dict(self) -> dict:
        return {
            "type": "mrf",
            "nodes": list(self.labels),
            "unary": [[i, list(v)] for i, v in self.unary.items()],
            "edges": [[i, j, list(p.as_tuple())] for (i, j), p in self.edges.items()],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MarkovNetwork":
        labels = tuple(d["nodes"])
        index = {s: k for k, s in enumerate(labels)}

        def node(v):
            return index[v] if isinstance(v, str) else int(v)

        edges = {}
        for e in d.get("edges", []):
            # either [i, j, table] or [[nodes...], table]
            if len(e) == 2 and isinstance(e[0], list):
                nodes, table = e
            else:
                *nodes, table = e
            if len(nodes) != 2:
                raise UnsupportedCliqueError(f"clique of size {len(nodes)} is not supported; only pairs")
            if len(table) != 4:
                raise ValueError("pair potential tables need four entries (phi00, phi01, phi10, phi11)")
            edges[node(nodes[0]), node(nodes[1])] = PairPotential(*map(float, table))
        unary = {node(i): tuple(v) for i, v in d.get("unary", [])}
        return cls(labels, unary, edges)


def mrf_to_qubo(net: MarkovNetwork) -> QuboModel:
    """QUBO whose energy equals the network's total potential everywhere.

    An edge ``(i, j)`` contributes
    ``(phi10 - phi00) x_i + (phi01 - phi00) x_j
    + (phi11 - phi10 - phi01 + phi00) x_i x_j + phi00``.
    """
    b = QuboBuilder(net.num_nodes)
    for i, (p0, p1) in net.unary.items():
        b.add_linear(i, p1 - p0)
        b.add_offset(p0)
    for (i, j), p in net.edges.items():
        b.add_linear(i, p.phi10 - p.phi00)
        b.add_linear(j, p.phi01 - p.phi00)
        b.add_term(i, j, p.phi11 - p.phi10 - p.phi01 + p.phi00)
        b.add_offset(p.phi00)
    return QuboModel(net.num_nodes, b.linear, b.quadratic, b.offset, dict(enumerate(net.labels)))
