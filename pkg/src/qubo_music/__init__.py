"""Constrained binary models compiled to QUBO form, solved exactly or by annealing, and used to write music."""

from .compiler import (
    CompileConfig,
    CompileError,
    Constraint,
    IlpModel,
    IntVar,
    LinearExpr,
    PolyExpr,
    VarMap,
    compile_model,
    decode,
)
from .mrf import MarkovNetwork, PairPotential, TransitionMatrix, mrf_to_qubo, transition_counts, transition_matrix
from .qubo import IsingModel, QuboBuilder, QuboModel, bits_to_spins, ising_to_qubo, qubo_to_ising, spins_to_bits
from .solvers import SaParams, Sample, SampleSet, SizeError, brute_force, restricted_enumerate, simulated_annealing

__version__ = "0.1.0"

__all__ = [
    "CompileConfig", "CompileError", "Constraint", "IlpModel", "IntVar", "LinearExpr", "PolyExpr",
    "VarMap", "compile_model", "decode", "MarkovNetwork", "PairPotential", "TransitionMatrix",
    "mrf_to_qubo", "transition_counts", "transition_matrix", "IsingModel", "QuboBuilder", "QuboModel",
    "bits_to_spins", "ising_to_qubo", "qubo_to_ising", "spins_to_bits", "SaParams", "Sample",
    "SampleSet", "SizeError", "brute_force", "restricted_enumerate", "simulated_annealing",
]
