"""Learn transition weights from the Ode to Joy fixture and anneal a new melody.

    python3 scripts/ode_to_joy_melody.py --length 8 --seed 0
"""

import argparse

from qubo_music.music import (
    MelodySpec,
    PitchDomain,
    Voice,
    build_melody,
    decode_sequence,
    extract_weights,
    format_score,
    ode_to_joy,
    validate_melody,
)
from qubo_music.solvers import SaParams, simulated_annealing


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--reads", type=int, default=100)
    args = ap.parse_args(argv)

    pitch_weights, _ = extract_weights(ode_to_joy())
    elements = sorted({p for pair in pitch_weights for p in pair}, key=lambda p: (p[-1], "CDEFGAB".index(p[0])))
    spec = MelodySpec(
        args.length,
        PitchDomain("named", tuple(elements)),
        no_triple_repeat=True,
        weights={k: float(v) for k, v in pitch_weights.items()},
    )
    q, layout = build_melody(spec)
    best = simulated_annealing(q, SaParams(seed=args.seed, num_reads=args.reads)).first
    seq = decode_sequence(best, layout).sequence
    print(f"# {q.num_vars} variables, energy {best.energy:g}")
    problems = validate_melody(seq, spec)
    for msg in problems:
        print(f"# rule broken: {msg}")
    print(format_score([Voice("melody", tuple(((p,), "Q") for p in seq if p is not None))]), end="")


if __name__ == "__main__":
    main()
