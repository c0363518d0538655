#!/usr/bin/env python3
"""Branch-selection statistics for the four-alternative regulatory fixture.

Runs the branching circuit over many seeds and reports how often each
alternative fires, verifying that exactly one full alternative runs per
seed.
"""

import argparse
from collections import Counter

from ctrlcirc import ExecConfig, Outcome, Value, initial_state, run
from ctrlcirc.fixtures import build_p53


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--p53", type=int, choices=[0, 1], default=1)
    ap.add_argument("--mdm2", type=int, choices=[0, 1], default=0)
    args = ap.parse_args()

    fx = build_p53()
    init = initial_state(
        fx.circuit,
        {
            fx.CTRL_IN: Value.SIGNAL,
            fx.P53_IN: Value.from_bit(args.p53),
            fx.MDM2_IN: Value.from_bit(args.mdm2),
        },
    )
    hits: Counter[str] = Counter()
    outputs: Counter[tuple[str, int]] = Counter()
    for seed in range(args.seeds):
        tr = run(fx.circuit, init, ExecConfig(seed=seed))
        assert tr.outcome is Outcome.FINAL, f"seed {seed}: {tr.outcome}"
        fired = tr.fired_units()
        chosen = [name for name, units in fx.alternatives.items() if fired & units]
        assert len(chosen) == 1 and fired == fx.alternatives[chosen[0]], f"seed {seed} fired {sorted(fired)}"
        hits[chosen[0]] += 1
        outputs[(chosen[0], tr.final_state.values[fx.P53_OUT].bit)] += 1

    width = max(len(n) for n in hits)
    print(f"inputs: p53={args.p53} mdm2={args.mdm2}; {args.seeds} seeded runs\n")
    for name in sorted(hits):
        bar = "#" * round(40 * hits[name] / args.seeds)
        outs = {b: outputs[(name, b)] for b in (0, 1) if outputs[(name, b)]}
        print(f"  {name:<{width}}  {hits[name]:5}  {bar}  p53' counts: {outs}")
    missing = set(fx.alternatives) - set(hits)
    print("\nall alternatives observed" if not missing else f"NEVER OBSERVED: {sorted(missing)}")
    raise SystemExit(1 if missing else 0)


if __name__ == "__main__":
    main()
