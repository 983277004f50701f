"""Compile bounded integer programs into QUBO.

Pipeline: inequalities get slack variables, every integer variable (slacks
included) is expanded into weighted bits, constraints become penalty terms
and any monomial of degree three or more is reduced with Rosenberg
substitution before the terms are assembled into a :class:`QuboModel`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .qubo import DimensionError, QuboBuilder, QuboModel

__all__ = [
    "CompileError",
    "InfeasibleConstraintError",
    "UnboundedVariableError",
    "ModelError",
    "IntVar",
    "LinearExpr",
    "PolyExpr",
    "Constraint",
    "IlpModel",
    "BinaryEncoding",
    "VarMap",
    "CompileConfig",
    "ConstraintReport",
    "to_equality",
    "binarize",
    "penalty_pattern",
    "squared_penalty",
    "quadratize",
    "rosenberg_penalty",
    "quadratization_penalty",
    "compile_model",
    "decode",
]

RELATIONS = ("<=", "=", ">=")
_TOL = 1e-9


class CompileError(ValueError):
    pass


class InfeasibleConstraintError(CompileError):
    pass


class UnboundedVariableError(CompileError):
    pass


class ModelError(CompileError):
    """Malformed model: unknown variables, bad bounds, bad relation."""


@dataclass(frozen=True)
class IntVar:
    name: str
    lower: int | None = 0
    upper: int | None = 1

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ModelError(f"variable {self.name!r}: lower bound {self.lower} > upper bound {self.upper}")

    @property
    def bounded(self) -> bool:
        return self.lower is not None and self.upper is not None

    @property
    def is_binary(self) -> bool:
        return self.lower == 0 and self.upper == 1


@dataclass(frozen=True)
class LinearExpr:
    """Sum of ``coef * var`` keyed by variable name, plus a constant."""

    terms: Mapping[str, float] = field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "terms", {k: float(v) for k, v in self.terms.items() if v != 0})

    def value(self, values: Mapping[str, float]) -> float:
        return self.constant + sum(c * values[k] for k, c in self.terms.items())

    def bounds(self, variables: Mapping[str, IntVar]) -> tuple[float, float]:
        """Interval-arithmetic range of the expression over the variable box."""
        lo = hi = self.constant
        for name, c in self.terms.items():
            v = variables[name]
            if not v.bounded:
                raise UnboundedVariableError(f"variable {name!r} has no finite bounds")
            a, b = c * v.lower, c * v.upper
            lo += min(a, b)
            hi += max(a, b)
        return lo, hi


class PolyExpr:
    """Polynomial over binary variables (``x**2 == x``).

    Monomials are sorted tuples of distinct variable ids; the constant lives
    outside the monomial map.
    """

    __slots__ = ("monomials", "constant")

    def __init__(self, monomials: Mapping[Iterable[int], float] | None = None, constant: float = 0.0):
        terms: dict[tuple[int, ...], float] = {}
        const = float(constant)
        for key, c in (monomials or {}).items():
            key = tuple(sorted(set(key)))
            if not key:
                const += c
            else:
                terms[key] = terms.get(key, 0.0) + float(c)
        self.monomials = {k: c for k, c in terms.items() if c != 0.0}
        self.constant = const

    @classmethod
    def var(cls, i: int, coef: float = 1.0) -> "PolyExpr":
        return cls({(i,): coef})

    @classmethod
    def linear(cls, terms: Iterable[tuple[int, float]], constant: float = 0.0) -> "PolyExpr":
        out: dict[tuple[int, ...], float] = {}
        for i, c in terms:
            out[(i,)] = out.get((i,), 0.0) + c
        return cls(out, constant)

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.monomials), default=0)

    def variables(self) -> set[int]:
        return {i for k in self.monomials for i in k}

    def __add__(self, other):
        if not isinstance(other, PolyExpr):
            return PolyExpr(self.monomials, self.constant + other)
        terms = dict(self.monomials)
        for k, c in other.monomials.items():
            terms[k] = terms.get(k, 0.0) + c
        return PolyExpr(terms, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolyExpr):
            return PolyExpr({k: c * other for k, c in self.monomials.items()}, self.constant * other)
        terms: dict[tuple[int, ...], float] = {}
        left = [((), self.constant), *self.monomials.items()]
        right = [((), other.constant), *other.monomials.items()]
        for (ka, ca), (kb, cb) in itertools.product(left, right):
            if ca == 0 or cb == 0:
                continue
            key = tuple(sorted(set(ka) | set(kb)))
            terms[key] = terms.get(key, 0.0) + ca * cb
        return PolyExpr(terms)

    __rmul__ = __mul__

    def evaluate(self, x: Sequence[int]) -> float:
        total = self.constant
        for k, c in self.monomials.items():
            if all(x[i] for i in k):
                total += c
        return total

    def abs_sum(self, min_degree: int = 1) -> float:
        return sum(abs(c) for k, c in self.monomials.items() if len(k) >= min_degree)

    def __eq__(self, other):
        if not isinstance(other, PolyExpr):
            return NotImplemented
        return self.monomials == other.monomials and self.constant == other.constant

    def __repr__(self):
        parts = [f"{c:g}*" + "*".join(f"x{i}" for i in k) for k, c in sorted(self.monomials.items())]
        return f"PolyExpr({' + '.join(parts) or '0'} + {self.constant:g})"

    def to_qubo(self, num_vars: int, labels=None) -> QuboModel:
        if self.degree > 2:
            raise CompileError(f"polynomial has degree {self.degree}; quadratize first")
        b = QuboBuilder(num_vars)
        for k, c in self.monomials.items():
            if len(k) == 1:
                b.add_linear(k[0], c)
            else:
                b.add_term(k[0], k[1], c)
        return QuboModel(num_vars, b.linear, b.quadratic, self.constant, labels)


@dataclass(frozen=True)
class Constraint:
    lhs: LinearExpr
    relation: str
    rhs: float
    penalty: float | None = None
    hardness: str = "hard"
    name: str | None = None

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ModelError(f"unknown relation {self.relation!r}")
        if self.penalty is not None and not self.penalty > 0:
            raise ModelError("penalty must be positive")
        if self.hardness not in ("hard", "soft"):
            raise ModelError(f"hardness must be 'hard' or 'soft', got {self.hardness!r}")

    def satisfied(self, values: Mapping[str, float]) -> bool:
        v = self.lhs.value(values)
        if self.relation == "<=":
            return v <= self.rhs + _TOL
        if self.relation == ">=":
            return v >= self.rhs - _TOL
        return abs(v - self.rhs) <= _TOL

    def label(self, index: int) -> str:
        return self.name or f"constraint[{index}]"


@dataclass(frozen=True)
class IlpModel:
    """Minimisation over bounded integers with penalised linear constraints.

    ``objective`` maps tuples of variable names to coefficients; the empty
    tuple is the constant, ``("y",)`` a linear term, ``("y", "z")`` a product.
    """

    variables: Sequence[IntVar] = ()
    objective: Mapping[tuple[str, ...], float] = field(default_factory=dict)
    constraints: Sequence[Constraint] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "objective", {tuple(k): float(c) for k, c in self.objective.items()})
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ModelError("duplicate variable names")
        known = set(names)
        for key in self.objective:
            for name in key:
                if name not in known:
                    raise ModelError(f"objective references undeclared variable {name!r}")
        for k, c in enumerate(self.constraints):
            for name in c.lhs.terms:
                if name not in known:
                    raise ModelError(f"{c.label(k)} references undeclared variable {name!r}")

    @property
    def var_dict(self) -> dict[str, IntVar]:
        return {v.name: v for v in self.variables}

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(c * math.prod(values[n] for n in key) for key, c in self.objective.items())

    def to_dict(self) -> dict:
        return {
            "type": "ilp",
            "variables": [{"name": v.name, "lower": v.lower, "upper": v.upper} for v in self.variables],
            "objective": [{"vars": list(k), "coef": c} for k, c in self.objective.items()],
            "constraints": [
                {
                    "name": c.name,
                    "lhs": dict(c.lhs.terms),
                    "constant": c.lhs.constant,
                    "relation": c.relation,
                    "rhs": c.rhs,
                    "penalty": c.penalty,
                    "hardness": c.hardness,
                }
                for c in self.constraints
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "IlpModel":
        try:
            variables = [IntVar(v["name"], v.get("lower"), v.get("upper")) for v in data.get("variables", [])]
            objective: dict[tuple[str, ...], float] = {}
            for term in data.get("objective", []):
                key = tuple(term["vars"])
                objective[key] = objective.get(key, 0.0) + float(term["coef"])
            constraints = []
            for c in data.get("constraints", []):
                rel = {"==": "=", "≤": "<=", "≥": ">="}.get(c["relation"], c["relation"])
                constraints.append(
                    Constraint(
                        LinearExpr(c["lhs"], float(c.get("constant", 0.0))),
                        rel,
                        float(c["rhs"]),
                        c.get("penalty"),
                        c.get("hardness", "hard"),
                        c.get("name"),
                    )
                )
        except (KeyError, TypeError) as exc:
            raise ModelError(f"malformed model: {exc}") from exc
        return cls(variables, objective, constraints)


@dataclass(frozen=True)
class BinaryEncoding:
    """``value = offset + sum(coef * bit)`` over the listed variable ids."""

    source: IntVar
    bits: tuple[tuple[int, int], ...]
    offset: int

    def decode(self, x: Sequence[int]) -> int:
        return self.offset + sum(c for i, c in self.bits if x[i])

    def poly(self) -> PolyExpr:
        return PolyExpr.linear(self.bits, self.offset)

    def to_dict(self) -> dict:
        s = self.source
        return {"name": s.name, "lower": s.lower, "upper": s.upper,
                "bits": [list(b) for b in self.bits], "offset": self.offset}

    @classmethod
    def from_dict(cls, d: Mapping) -> "BinaryEncoding":
        return cls(IntVar(d["name"], d["lower"], d["upper"]),
                   tuple((int(i), int(c)) for i, c in d["bits"]), int(d["offset"]))


@dataclass
class VarMap:
    num_vars: int = 0
    encodings: dict[str, BinaryEncoding] = field(default_factory=dict)
    slacks: dict[int, BinaryEncoding] = field(default_factory=dict)
    aux: dict[int, tuple[int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": "varmap",
            "num_vars": self.num_vars,
            "encodings": [e.to_dict() for e in self.encodings.values()],
            "slacks": [[k, e.to_dict()] for k, e in self.slacks.items()],
            "aux": [[y, i, j] for y, (i, j) in self.aux.items()],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "VarMap":
        encs = [BinaryEncoding.from_dict(e) for e in d.get("encodings", [])]
        return cls(
            int(d["num_vars"]),
            {e.source.name: e for e in encs},
            {int(k): BinaryEncoding.from_dict(e) for k, e in d.get("slacks", [])},
            {int(y): (int(i), int(j)) for y, i, j in d.get("aux", [])},
        )


@dataclass(frozen=True)
class CompileConfig:
    hard_factor: float = 10.0
    use_patterns: bool = True
    quadratization_penalty: float | None = None


def to_equality(c: Constraint, variables: Mapping[str, IntVar], slack_name: str = "xi") -> tuple[Constraint, IntVar]:
    """Turn ``<=``/``>=`` into ``=`` with an integer slack bounded by interval arithmetic."""
    if c.relation == "=":
        raise CompileError("constraint is already an equality")
    _check_integral(c)
    lo, hi = c.lhs.bounds(variables)
    terms = dict(c.lhs.terms)
    if c.relation == "<=":
        rhs = math.floor(c.rhs + _TOL)
        if rhs < lo - _TOL:
            raise InfeasibleConstraintError(f"infeasible: minimum of lhs is {lo:g} > rhs {c.rhs:g}")
        upper, coef = rhs - lo, 1.0
    else:
        rhs = math.ceil(c.rhs - _TOL)
        if rhs > hi + _TOL:
            raise InfeasibleConstraintError(f"infeasible: maximum of lhs is {hi:g} < rhs {c.rhs:g}")
        upper, coef = hi - rhs, -1.0
    slack = IntVar(slack_name, 0, int(round(upper)))
    terms[slack_name] = coef
    eq = Constraint(LinearExpr(terms, c.lhs.constant), "=", float(rhs), c.penalty, c.hardness, c.name)
    return eq, slack


def _check_integral(c: Constraint) -> None:
    coeffs = [*c.lhs.terms.values(), c.lhs.constant]
    if not all(float(v).is_integer() for v in coeffs):
        raise CompileError(f"slack encoding needs integer coefficients ({c.name or 'constraint'})")


def binarize(v: IntVar, first_id: int = 0) -> BinaryEncoding:
    """Bounded-coefficient binary expansion of ``v``.

    Uses ``k = ceil(log2(range + 1))`` bits with weights ``1, 2, ..., 2**(k-2)``
    and a last weight of ``range - (2**(k-1) - 1)``; every bit pattern
    decodes inside ``[lower, upper]`` and every value there is reachable.
    """
    if not v.bounded:
        raise UnboundedVariableError(f"variable {v.name!r} has no finite bounds")
    span = v.upper - v.lower
    k = span.bit_length()
    coefs = [2**i for i in range(k - 1)]
    if k:
        coefs.append(span - (2 ** (k - 1) - 1))
    return BinaryEncoding(v, tuple((first_id + i, c) for i, c in enumerate(coefs)), v.lower)


# Penalty table rows: arity, feasibility predicate, penalty over local vars 0..arity-1.
_PATTERNS = (
    (2, lambda a, b: a + b <= 1, {(0, 1): 1.0}, 0.0),
    (2, lambda a, b: a + b >= 1, {(0,): -1.0, (1,): -1.0, (0, 1): 1.0}, 1.0),
    (2, lambda a, b: a + b == 1, {(0,): -1.0, (1,): -1.0, (0, 1): 2.0}, 1.0),
    (2, lambda a, b: a <= b, {(0,): 1.0, (0, 1): -1.0}, 0.0),
    (3, lambda a, b, c: a + b + c <= 1, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0}, 0.0),
    (2, lambda a, b: a == b, {(0,): 1.0, (1,): 1.0, (0, 1): -2.0}, 0.0),
)


def penalty_pattern(c: Constraint, ids: Mapping[str, int], penalty: float | None = None) -> PolyExpr | None:
    """Tabulated quadratic penalty for small binary constraints, or ``None``.

    A row applies when the constraint has exactly the row's feasible set
    (compared by truth table under some ordering of the variables), so
    ``2a + 2b <= 3`` gets the same ``a*b`` penalty as ``a + b <= 1``.
    """
    P = penalty if penalty is not None else (c.penalty or 1.0)
    names = sorted(c.lhs.terms)
    arity = len(names)
    if arity not in (2, 3):
        return None
    table = {bits: c.satisfied(dict(zip(names, bits))) for bits in itertools.product((0, 1), repeat=arity)}
    for row_arity, pred, monos, const in _PATTERNS:
        if row_arity != arity:
            continue
        for perm in itertools.permutations(range(arity)):
            if all(bool(pred(*(bits[p] for p in perm))) == ok for bits, ok in table.items()):
                local = [ids[names[p]] for p in perm]
                return PolyExpr({tuple(local[i] for i in k): P * v for k, v in monos.items()}, P * const)
    return None


def squared_penalty(c: Constraint, encodings: Mapping[str, BinaryEncoding], penalty: float | None = None) -> PolyExpr:
    """``P * (lhs - rhs)**2`` expanded over the bit encodings of the variables."""
    if c.relation != "=":
        raise CompileError("squared_penalty needs an equality; apply to_equality first")
    P = penalty if penalty is not None else (c.penalty or 1.0)
    diff = PolyExpr(constant=c.lhs.constant - c.rhs)
    for name, coef in c.lhs.terms.items():
        diff = diff + encodings[name].poly() * coef
    return (diff * diff) * P


def rosenberg_penalty(i: int, j: int, y: int, P: float) -> PolyExpr:
    """``P (x_i x_j - 2 x_i y - 2 x_j y + 3 y)``; zero iff ``y == x_i x_j``."""
    return PolyExpr({(i, j): P, (i, y): -2 * P, (j, y): -2 * P, (y,): 3 * P})


def quadratization_penalty(p: PolyExpr) -> float:
    """Smallest weight the value-preservation argument needs: 1 + sum |c| over degree >= 3."""
    return 1.0 + p.abs_sum(min_degree=3)


def quadratize(p: PolyExpr, penalty: float | None = None, next_id: int | None = None) -> tuple[PolyExpr, dict[int, tuple[int, int]]]:
    """Reduce ``p`` to degree two by repeated pair substitution.

    Each round picks the pair that occurs in the most monomials of degree
    three or more (ties: lexicographically smallest pair), replaces it with
    a fresh variable ``y`` and adds the Rosenberg penalty. Returns the
    reduced polynomial and ``{y: (i, j)}`` in creation order.
    """
    P = quadratization_penalty(p) if penalty is None else penalty
    if P <= 0:
        raise ValueError("penalty must be positive")
    nxt = (max(p.variables(), default=-1) + 1) if next_id is None else next_id
    terms = dict(p.monomials)
    aux: dict[int, tuple[int, int]] = {}
    extra = PolyExpr()
    while True:
        counts: dict[tuple[int, int], int] = {}
        for k in terms:
            if len(k) >= 3:
                for pair in itertools.combinations(k, 2):
                    counts[pair] = counts.get(pair, 0) + 1
        if not counts:
            break
        best = max(counts.values())
        i, j = min(pair for pair, n in counts.items() if n == best)
        y = nxt
        nxt += 1
        aux[y] = (i, j)
        new_terms: dict[tuple[int, ...], float] = {}
        for k, c in terms.items():
            if len(k) >= 3 and i in k and j in k:
                k = tuple(sorted([v for v in k if v not in (i, j)] + [y]))
            new_terms[k] = new_terms.get(k, 0.0) + c
        terms = new_terms
        extra = extra + rosenberg_penalty(i, j, y, P)
    return PolyExpr(terms, p.constant) + extra, aux


def _objective_poly(m: IlpModel, encodings: Mapping[str, BinaryEncoding]) -> PolyExpr:
    total = PolyExpr()
    for key, c in m.objective.items():
        term = PolyExpr(constant=c)
        for name in key:
            term = term * encodings[name].poly()
        total = total + term
    return total


def compile_model(m: IlpModel, config: CompileConfig | None = None) -> tuple[QuboModel, VarMap]:
    """Compile an :class:`IlpModel` into a QUBO plus the map back to integers.

    Unset constraint penalties default to ``1 + sum |c|`` over the binary
    expansion of the objective, times ``config.hard_factor`` for hard
    constraints. That sum bounds the objective's range over the box, so with
    integral constraint data every minimiser of the QUBO is feasible.
    """
    config = config or CompileConfig()
    variables = m.var_dict
    varmap = VarMap()
    labels: dict[int, str] = {}
    nxt = 0
    for v in m.variables:
        enc = binarize(v, nxt)
        varmap.encodings[v.name] = enc
        for pos, (i, _) in enumerate(enc.bits):
            labels[i] = f"{v.name}[{pos}]"
        nxt += len(enc.bits)

    objective = _objective_poly(m, varmap.encodings)
    base_penalty = 1.0 + objective.abs_sum()
    total = objective

    for k, c in enumerate(m.constraints):
        P = c.penalty if c.penalty is not None else base_penalty * (config.hard_factor if c.hardness == "hard" else 1.0)
        lo, hi = c.lhs.bounds(variables)
        if (c.relation == "=" and not lo - _TOL <= c.rhs <= hi + _TOL):
            raise InfeasibleConstraintError(f"{c.label(k)} is infeasible: lhs ranges over [{lo:g}, {hi:g}], rhs {c.rhs:g}")
        binary = all(variables[n].is_binary for n in c.lhs.terms)
        if config.use_patterns and binary:
            ids = {n: varmap.encodings[n].bits[0][0] for n in c.lhs.terms}
            pat = penalty_pattern(c, ids, P)
            if pat is not None:
                total = total + pat
                continue
        if c.relation == "=":
            eq = c
            encs = varmap.encodings
        else:
            slack_name = f"_slack{k}"
            try:
                eq, slack = to_equality(c, variables, slack_name)
            except CompileError as exc:
                raise type(exc)(f"{c.label(k)}: {exc}") from exc
            enc = binarize(slack, nxt)
            varmap.slacks[k] = enc
            for pos, (i, _) in enumerate(enc.bits):
                labels[i] = f"{slack_name}[{pos}]"
            nxt += len(enc.bits)
            encs = {**varmap.encodings, slack_name: enc}
        total = total + squared_penalty(eq, encs, P)

    if total.degree > 2:
        qp = config.quadratization_penalty
        total, aux = quadratize(total, qp, nxt)
        for y, (i, j) in aux.items():
            labels[y] = f"aux({i},{j})"
        varmap.aux = aux
        nxt += len(aux)

    varmap.num_vars = nxt
    return total.to_qubo(nxt, labels or None), varmap


@dataclass(frozen=True)
class ConstraintReport:
    index: int
    name: str
    lhs: float
    relation: str
    rhs: float
    satisfied: bool
    slack: int | None = None


def decode(x: Sequence[int], varmap: VarMap, m: IlpModel) -> tuple[dict[str, int], list[ConstraintReport]]:
    """Integer values of the original variables and a per-constraint report."""
    if len(x) != varmap.num_vars:
        raise DimensionError(f"assignment has length {len(x)}, compiled model has {varmap.num_vars} variables")
    values = {name: enc.decode(x) for name, enc in varmap.encodings.items()}
    report = []
    for k, c in enumerate(m.constraints):
        slack = varmap.slacks[k].decode(x) if k in varmap.slacks else None
        report.append(ConstraintReport(k, c.label(k), c.lhs.value(values), c.relation, c.rhs, c.satisfied(values), slack))
    return values, report
