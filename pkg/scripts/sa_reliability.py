"""Count how many seeded annealing runs reach the exact minimum.

    python3 scripts/sa_reliability.py --trials 100
    python3 scripts/sa_reliability.py --harmony-sweep 1 2 3 5 7

Exact minima come from brute force (melodies) or from enumeration restricted
to valid per-position patterns (chords, harmony).
"""

import argparse
import itertools
import time

from qubo_music.mrf import mrf_to_qubo
from qubo_music.music import (
    ChordProgressionSpec,
    HarmonySpec,
    MelodySpec,
    PitchDomain,
    build_chord_mrf,
    build_harmony,
    build_melody,
    chord_layout,
)
from qubo_music.solvers import SaParams, brute_force, one_hot_patterns, restricted_enumerate, simulated_annealing

P4 = ("C4", "D4", "E4", "G4")


def melody_case(rules):
    spec = MelodySpec(5, PitchDomain("named", P4), forbidden_successions={("D4", "G4")} if rules else (), no_triple_repeat=rules)
    q, layout = build_melody(spec)
    return q, brute_force(q, marginalize=layout.aux).lowest_energy


def chord_case():
    spec = ChordProgressionSpec()
    q = mrf_to_qubo(build_chord_mrf(spec))
    layout = chord_layout(spec)
    groups = [layout.position_vars(i) for i in range(spec.n)]
    return q, restricted_enumerate(q, groups, [one_hot_patterns(7, include_empty=True)] * spec.n).lowest_energy


def harmony_case(melody, three=None):
    spec = HarmonySpec(melody, penalties={} if three is None else {"three": three})
    q, layout = build_harmony(spec)
    triads = [tuple(int(c in comb) for c in range(8)) for comb in itertools.combinations(range(8), 3)]
    groups = [layout.position_vars(i) for i in range(layout.n)]
    return q, restricted_enumerate(q, groups, [triads] * layout.n).lowest_energy


def hits(q, best, trials, params):
    return sum(
        simulated_annealing(q, SaParams(seed=s, num_reads=params.reads, sweeps_per_read=params.sweeps)).lowest_energy <= best + 1e-9
        for s in range(trials)
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--reads", type=int, default=100)
    ap.add_argument("--sweeps", type=int, default=1000)
    ap.add_argument("--melody", type=int, nargs="+", default=[1, 5, 4, 1], help="harmony melody degrees")
    ap.add_argument("--harmony-sweep", type=float, nargs="*", metavar="P", help="hard penalties for the triad-size rule")
    args = ap.parse_args(argv)

    if args.harmony_sweep:
        cases = [(f"harmony three={p:g}", lambda p=p: harmony_case(tuple(args.melody), p)) for p in args.harmony_sweep]
    else:
        cases = [
            ("melody one-hot", lambda: melody_case(False)),
            ("melody with rules", lambda: melody_case(True)),
            ("chord progression", chord_case),
            ("harmony default penalty", lambda: harmony_case(tuple(args.melody))),
            ("harmony three=2", lambda: harmony_case(tuple(args.melody), 2.0)),
        ]
    for name, make in cases:
        t = time.perf_counter()
        q, best = make()
        k = hits(q, best, args.trials, args)
        print(f"{name:28s} {q.num_vars:4d} vars  min {best:10g}  {k:4d}/{args.trials}  {time.perf_counter() - t:6.1f} s")


if __name__ == "__main__":
    main()
