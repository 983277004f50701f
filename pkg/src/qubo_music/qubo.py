"""Binary quadratic models in QUBO and Ising form.

A QUBO model over binary ``x`` has energy

    E(x) = sum_i a_i x_i + sum_{i<j} b_ij x_i x_j + c

and an Ising model over spins ``s`` in {-1, +1} has energy

    H(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + c.

The two are related by ``x_i = (1 - s_i) / 2``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DimensionError",
    "QuboModel",
    "QuboBuilder",
    "IsingModel",
    "energy",
    "ising_energy",
    "qubo_to_ising",
    "ising_to_qubo",
    "spins_to_bits",
    "bits_to_spins",
]


class DimensionError(ValueError):
    """Assignment length does not match the model."""


def _canonical(num_vars, linear, quadratic, what="variable"):
    lin: dict[int, float] = {}
    quad: dict[tuple[int, int], float] = {}
    for i, bias in linear.items():
        i = int(i)
        if not 0 <= i < num_vars:
            raise ValueError(f"{what} index {i} out of range for {num_vars} {what}s")
        lin[i] = lin.get(i, 0.0) + float(bias)
    for (i, j), bias in quadratic.items():
        i, j = int(i), int(j)
        if not (0 <= i < num_vars and 0 <= j < num_vars):
            raise ValueError(f"{what} pair ({i}, {j}) out of range for {num_vars} {what}s")
        if i == j:
            lin[i] = lin.get(i, 0.0) + float(bias)
            continue
        key = (i, j) if i < j else (j, i)
        quad[key] = quad.get(key, 0.0) + float(bias)
    lin = {i: b for i, b in sorted(lin.items()) if b != 0.0}
    quad = {k: b for k, b in sorted(quad.items()) if b != 0.0}
    return lin, quad


@dataclass(frozen=True)
class QuboModel:
    """Upper-triangular QUBO with a constant offset.

    Diagonal entries are stored as linear biases (``x_i**2 == x_i``),
    pairs given as ``(j, i)`` with ``j > i`` are folded onto ``(i, j)`` and
    zero coefficients are dropped, so two models with the same terms compare
    equal regardless of insertion order.
    """

    num_vars: int
    linear: Mapping[int, float] = field(default_factory=dict)
    quadratic: Mapping[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0
    labels: Mapping[int, str] | None = None

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        lin, quad = _canonical(self.num_vars, self.linear, self.quadratic)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "quadratic", quad)
        object.__setattr__(self, "offset", float(self.offset))
        if self.labels is not None:
            labels = {int(k): str(v) for k, v in sorted(self.labels.items())}
            if any(not 0 <= k < self.num_vars for k in labels):
                raise ValueError("label index out of range")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_matrix(cls, Q, offset: float = 0.0, labels=None) -> "QuboModel":
        """Build from a square matrix; the lower triangle is folded upward."""
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        n = Q.shape[0]
        linear = {i: Q[i, i] for i in range(n)}
        quadratic = {
            (i, j): Q[i, j] for i in range(n) for j in range(n) if i != j and Q[i, j] != 0
        }
        return cls(n, linear, quadratic, offset, labels)

    def energy(self, x: Sequence[int]) -> float:
        if len(x) != self.num_vars:
            raise DimensionError(f"assignment has length {len(x)}, model has {self.num_vars} variables")
        total = self.offset
        for i, a in self.linear.items():
            if x[i]:
                total += a
        for (i, j), b in self.quadratic.items():
            if x[i] and x[j]:
                total += b
        return total

    def energies(self, X) -> np.ndarray:
        """Vectorised energies for a (m, num_vars) array of 0/1 rows."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.num_vars:
            raise DimensionError(f"expected shape (m, {self.num_vars}), got {X.shape}")
        lin, upper = self.to_arrays()
        return X @ lin + np.einsum("ij,ij->i", X @ upper, X) + self.offset

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Linear vector and strictly upper-triangular coupling matrix."""
        lin = np.zeros(self.num_vars)
        upper = np.zeros((self.num_vars, self.num_vars))
        for i, a in self.linear.items():
            lin[i] = a
        for (i, j), b in self.quadratic.items():
            upper[i, j] = b
        return lin, upper

    def to_matrix(self) -> np.ndarray:
        lin, upper = self.to_arrays()
        return upper + np.diag(lin)

    def adjacency(self) -> list[dict[int, float]]:
        adj: list[dict[int, float]] = [dict() for _ in range(self.num_vars)]
        for (i, j), b in self.quadratic.items():
            adj[i][j] = b
            adj[j][i] = b
        return adj

    def is_integral(self) -> bool:
        coeffs = [*self.linear.values(), *self.quadratic.values(), self.offset]
        return all(float(c).is_integer() for c in coeffs)

    def fingerprint(self) -> str:
        payload = json.dumps(
            [self.num_vars, sorted(self.linear.items()),
             [[i, j, b] for (i, j), b in sorted(self.quadratic.items())], self.offset]
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        out = {
            "type": "qubo",
            "num_vars": self.num_vars,
            "linear": [[i, b] for i, b in self.linear.items()],
            "quadratic": [[i, j, b] for (i, j), b in self.quadratic.items()],
            "offset": self.offset,
        }
        if self.labels:
            out["labels"] = [[i, s] for i, s in self.labels.items()]
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "QuboModel":
        labels = data.get("labels")
        return cls(
            int(data["num_vars"]),
            {int(i): float(b) for i, b in data.get("linear", [])},
            {(int(i), int(j)): float(b) for i, j, b in data.get("quadratic", [])},
            float(data.get("offset", 0.0)),
            {int(i): s for i, s in labels} if labels else None,
        )


class QuboBuilder:
    """Accumulating builder; repeated terms add up."""

    def __init__(self, num_vars: int = 0):
        self.num_vars = num_vars
        self.linear: dict[int, float] = {}
        self.quadratic: dict[tuple[int, int], float] = {}
        self.offset = 0.0
        self.labels: dict[int, str] = {}

    def add_variable(self, label: str | None = None) -> int:
        idx = self.num_vars
        self.num_vars += 1
        if label is not None:
            self.labels[idx] = label
        return idx

    def add_linear(self, i: int, bias: float) -> None:
        self.num_vars = max(self.num_vars, i + 1)
        self.linear[i] = self.linear.get(i, 0.0) + bias

    def add_term(self, i: int, j: int, bias: float) -> None:
        if i == j:
            self.add_linear(i, bias)
            return
        key = (i, j) if i < j else (j, i)
        self.num_vars = max(self.num_vars, key[1] + 1)
        self.quadratic[key] = self.quadratic.get(key, 0.0) + bias

    def add_offset(self, c: float) -> None:
        self.offset += c

    def add_model(self, other: QuboModel) -> None:
        for i, a in other.linear.items():
            self.add_linear(i, a)
        for (i, j), b in other.quadratic.items():
            self.add_term(i, j, b)
        self.offset += other.offset

    def build(self) -> QuboModel:
        return QuboModel(self.num_vars, self.linear, self.quadratic, self.offset,
                         self.labels or None)


@dataclass(frozen=True)
class IsingModel:
    num_spins: int
    h: Mapping[int, float] = field(default_factory=dict)
    J: Mapping[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0
    labels: Mapping[int, str] | None = None

    def __post_init__(self):
        if self.num_spins < 0:
            raise ValueError("num_spins must be non-negative")
        if any(int(i) == int(j) for i, j in self.J):
            raise ValueError("self-coupling J_ii is not allowed (s_i**2 == 1 is a constant)")
        h, J = _canonical(self.num_spins, self.h, self.J, what="spin")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "offset", float(self.offset))
        if self.labels is not None:
            object.__setattr__(self, "labels", {int(k): str(v) for k, v in sorted(self.labels.items())})

    def energy(self, s: Sequence[int]) -> float:
        if len(s) != self.num_spins:
            raise DimensionError(f"spin vector has length {len(s)}, model has {self.num_spins} spins")
        if any(v not in (-1, 1) for v in s):
            raise ValueError("spins must be -1 or +1")
        total = self.offset
        for i, hi in self.h.items():
            total += hi * s[i]
        for (i, j), jij in self.J.items():
            total += jij * s[i] * s[j]
        return total

    def to_dict(self) -> dict:
        out = {
            "type": "ising",
            "num_spins": self.num_spins,
            "h": [[i, b] for i, b in self.h.items()],
            "J": [[i, j, b] for (i, j), b in self.J.items()],
            "offset": self.offset,
        }
        if self.labels:
            out["labels"] = [[i, s] for i, s in self.labels.items()]
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "IsingModel":
        labels = data.get("labels")
        return cls(
            int(data["num_spins"]),
            {int(i): float(b) for i, b in data.get("h", [])},
            {(int(i), int(j)): float(b) for i, j, b in data.get("J", [])},
            float(data.get("offset", 0.0)),
            {int(i): s for i, s in labels} if labels else None,
        )


def energy(model: QuboModel, x: Sequence[int]) -> float:
    return model.energy(x)


def ising_energy(model: IsingModel, s: Sequence[int]) -> float:
    return model.energy(s)


def qubo_to_ising(model: QuboModel) -> IsingModel:
    """Substitute ``x_i = (1 - s_i) / 2``; energies agree configuration by configuration."""
    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    offset = model.offset
    for i, a in model.linear.items():
        h[i] = h.get(i, 0.0) - a / 2
        offset += a / 2
    for (i, j), b in model.quadratic.items():
        q = b / 4
        J[(i, j)] = J.get((i, j), 0.0) + q
        h[i] = h.get(i, 0.0) - q
        h[j] = h.get(j, 0.0) - q
        offset += q
    return IsingModel(model.num_vars, h, J, offset, model.labels)


def ising_to_qubo(model: IsingModel) -> QuboModel:
    """Substitute ``s_i = 1 - 2 x_i``, the inverse of :func:`qubo_to_ising`."""
    b = QuboBuilder(model.num_spins)
    offset = model.offset
    for i, hi in model.h.items():
        b.add_linear(i, -2 * hi)
        offset += hi
    for (i, j), jij in model.J.items():
        b.add_term(i, j, 4 * jij)
        b.add_linear(i, -2 * jij)
        b.add_linear(j, -2 * jij)
        offset += jij
    b.offset = offset
    return QuboModel(model.num_spins, b.linear, b.quadratic, offset, model.labels)


def spins_to_bits(s: Iterable[int]) -> tuple[int, ...]:
    return tuple((1 - v) // 2 for v in s)


def bits_to_spins(x: Iterable[int]) -> tuple[int, ...]:
    return tuple(1 - 2 * v for v in x)
