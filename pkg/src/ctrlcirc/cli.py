"""Command-line interface.

Exit codes: 0 success, 1 validation/equivalence failure, 2 I/O or usage
problems, 3 execution that did not reach a final state under
``--expect-final``. The default seed comes from ``CTRLCIRC_SEED`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from pathlib import Path

from .errors import CircuitError, CompositionError, StructureError, ValidationError
from .model import classify, interface, is_sound
from .colimits import Span, is_isomorphic
from .operators import (
    IterationWiring,
    auto_pairing,
    branch,
    iterate_head,
    iterate_tail,
    parallel_with_injections,
    sequence,
    sequence_span,
)
from .dynamics import ExecConfig, Outcome, initial_state, run
from .nanddag import synth_family, to_control
from .dot import export_dot
from .fixtures import REGISTRY, fixture
from . import serialize as ser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SystemExit(f"io error: {e}")


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise SystemExit(f"io error: {e}")


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise SystemExit(f"io error: {path}: {e}")


def _load_circuit(path: str):
    return ser.circuit_from_dict(_load_json(path))


def _default_seed() -> int:
    return int(os.environ.get("CTRLCIRC_SEED", "0"))


def _emit(args, payload: dict, human: str) -> None:
    if getattr(args, "format", None) == "json-lines":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        c = _load_circuit(args.circuit)
    except ValidationError as e:
        _emit(args, {"valid": False, "violations": e.violations}, "invalid: " + ", ".join(e.violations))
        return 1
    _emit(
        args,
        {"valid": True, "class": classify(c).value, "sound": is_sound(c)},
        f"valid ({classify(c).value}, {'sound' if is_sound(c) else 'not sound'})",
    )
    return 0


def cmd_classify(args) -> int:
    c = _load_circuit(args.circuit)
    print(classify(c).value)
    return 0


def _morphism_maps(doc: dict) -> tuple[dict, dict, dict, dict]:
    return doc.get("f_v", {}), doc.get("f_u", {}), doc.get("f_i", {}), doc.get("f_o", {})


def cmd_compose(args) -> int:
    wiring = _load_json(args.wiring) if args.wiring else {}
    prov: dict = {"op": args.op}

    if args.op in ("seq", "par", "branch"):
        if len(args.operands) != 2:
            raise SystemExit(f"compose --op {args.op} takes exactly 2 operand files")
        left = _load_circuit(args.operands[0])
        right = _load_circuit(args.operands[1])

    if args.op == "seq":
        if args.span:
            doc = _load_json(args.span)
            apex = ser.circuit_from_dict(doc["apex"]) if isinstance(doc.get("apex"), dict) else _load_circuit(doc["apex"])
            from .morphisms import validate_morphism

            lm = validate_morphism(apex, left, *_morphism_maps(doc["left"]))
            rm = validate_morphism(apex, right, *_morphism_maps(doc["right"]))
            res = sequence_span(Span(apex, lm, rm))
        else:
            pairs = [tuple(p) for p in wiring.get("pairs", [])]
            if args.auto_pair:
                pairs = auto_pairing(left, right)
            res = sequence(left, right, pairs)
        out = res.circuit
        prov["total"] = res.total
        prov["left"] = ser.morphism_to_dict(res.left_leg)
        prov["right"] = ser.morphism_to_dict(res.right_leg)
    elif args.op == "par":
        cp = parallel_with_injections(left, right)
        out = cp.circuit
        prov["left"] = ser.morphism_to_dict(cp.left)
        prov["right"] = ser.morphism_to_dict(cp.right)
    elif args.op == "branch":
        res = branch(
            left,
            right,
            [tuple(p) for p in wiring.get("in_pairs", [])],
            [tuple(p) for p in wiring.get("out_pairs", [])],
        )
        out = res.circuit
        prov["left"] = ser.morphism_to_dict(res.left_leg)
        prov["right"] = ser.morphism_to_dict(res.right_leg)
    else:  # iter-head / iter-tail
        if len(args.operands) != 4:
            raise SystemExit(f"compose --op {args.op} takes entry, body, end and exit files")
        entry, body, end, exit_c = (_load_circuit(p) for p in args.operands)
        w = IterationWiring(
            entry=entry,
            body=body,
            end=end,
            exit=exit_c,
            head=tuple(tuple(r) for r in wiring.get("head", [])),
            tail=tuple(tuple(r) for r in wiring.get("tail", [])),
        )
        res = iterate_head(w) if args.op == "iter-head" else iterate_tail(w)
        out = res.circuit
        for role, m in (
            ("entry", res.entry_map),
            ("body", res.body_map),
            ("end", res.end_map),
            ("exit", res.exit_map),
        ):
            prov[role] = ser.morphism_to_dict(m)

    _write(args.out, ser.dumps_circuit(out))
    if args.provenance:
        _write(args.provenance, json.dumps(prov, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out} ({len(out.vars)} vars, {len(out.units)} units)")
    return 0


def cmd_exec(args) -> int:
    c = _load_circuit(args.circuit)
    inputs = ser.assignments_from_dict(_load_json(args.inputs))
    init = initial_state(c, inputs)
    cfg = ExecConfig(seed=args.seed, max_steps=args.max_steps)

    if args.runs > 1:
        outcomes: Counter[str] = Counter()
        fired_sets: Counter[tuple[str, ...]] = Counter()
        for k in range(args.runs):
            tr = run(c, init, ExecConfig(seed=args.seed + k, max_steps=args.max_steps))
            outcomes[tr.outcome.value] += 1
            fired_sets[tuple(sorted(tr.fired_units()))] += 1
        payload = {
            "runs": args.runs,
            "outcomes": dict(sorted(outcomes.items())),
            "fired_unit_sets": [
                {"units": list(units), "count": n}
                for units, n in sorted(fired_sets.items(), key=lambda kv: (-kv[1], kv[0]))
            ],
        }
        _emit(args, payload, json.dumps(payload, indent=2, sort_keys=True))
        if args.expect_final and outcomes.get("final", 0) != args.runs:
            return 3
        return 0

    tr = run(c, init, cfg)
    if args.trace:
        _write(args.trace, ser.trace_to_jsonl(tr))
    final = {v: ser.value_to_json(val) for v, val in sorted(tr.final_state.values.items())}
    payload = {"outcome": tr.outcome.value, "time": tr.final_state.time, "state": final}
    human = f"outcome: {tr.outcome.value} at t={tr.final_state.time}; state: " + ", ".join(
        f"{v}={x}" for v, x in final.items()
    )
    _emit(args, payload, human)
    if args.expect_final and tr.outcome is not Outcome.FINAL:
        return 3
    return 0


def cmd_iso(args) -> int:
    a = _load_circuit(args.left)
    b = _load_circuit(args.right)
    witness = is_isomorphic(a, b)
    if witness is None:
        print("not isomorphic")
        return 1
    if args.witness:
        _write(args.witness, json.dumps(ser.morphism_to_dict(witness), indent=2, sort_keys=True) + "\n")
    print("isomorphic")
    return 0


def cmd_import_nand(args) -> int:
    d = ser.dag_from_dict(_load_json(args.dag))
    res = to_control(d)
    _write(args.out, ser.dumps_circuit(res.circuit))
    if args.provenance:
        prov = {
            "vars": {v: {"edge": list(e), "copy": k} for v, (e, k) in sorted(res.var_origin.items())},
            "units": dict(sorted(res.unit_origin.items())),
            "inputs": {n: [list(p) for p in pairs] for n, pairs in sorted(res.input_bindings.items())},
            "outputs": {n: list(vs) for n, vs in sorted(res.output_bindings.items())},
        }
        _write(args.provenance, json.dumps(prov, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out} ({len(res.circuit.vars)} vars, {len(res.circuit.units)} units)")
    return 0


def cmd_synth_family(args) -> int:
    doc = _load_json(args.tables)
    tables = {int(k): v for k, v in doc.items()}
    fam = synth_family(tables)
    outdir = Path(args.out_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SystemExit(f"io error: {e}")
    manifest = {}
    for k, member in sorted(fam.members.items()):
        path = outdir / f"member_{k}.circuit"
        _write(str(path), ser.dumps_circuit(member.circuit))
        entry = {"circuit": path.name, "inputs": [list(g) for g in member.input_groups]}
        if member.dag is not None:
            dag_path = outdir / f"member_{k}.dag"
            _write(str(dag_path), ser.dumps_dag(member.dag))
            entry["dag"] = dag_path.name
            entry["output"] = member.output_node
        manifest[str(k)] = entry
    _write(str(outdir / "family.json"), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(fam.members)} members into {outdir}")
    return 0


def cmd_export_dot(args) -> int:
    c = _load_circuit(args.circuit)
    text = export_dot(c)
    if args.out:
        _write(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for name in sorted(REGISTRY):
            print(name)
        return 0
    c = fixture(args.name)
    text = ser.dumps_circuit(c)
    if args.out:
        _write(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ctrlcirc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check a circuit file")
    sp.add_argument("circuit")
    sp.add_argument("--format", choices=["human", "json-lines"], default="human")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("classify", help="print a circuit's structural class")
    sp.add_argument("circuit")
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("compose", help="combine circuits with an operator")
    sp.add_argument("--op", required=True, choices=["seq", "par", "branch", "iter-head", "iter-tail"])
    sp.add_argument("operands", nargs="+", help="operand circuit files")
    sp.add_argument("--wiring", help="pairing/wiring JSON file")
    sp.add_argument("--span", help="explicit span file (seq only): apex + two morphisms")
    sp.add_argument("--auto-pair", action="store_true", help="pair by sorted type order (seq only, non-canonical)")
    sp.add_argument("--out", required=True)
    sp.add_argument("--provenance", help="write element-provenance JSON here")
    sp.set_defaults(fn=cmd_compose)

    sp = sub.add_parser("exec", help="run a circuit from an input assignment")
    sp.add_argument("circuit")
    sp.add_argument("--inputs", required=True, help="JSON file: variable -> '*' | 0 | 1")
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--max-steps", type=int, default=10_000)
    sp.add_argument("--trace", help="write a JSONL trace here")
    sp.add_argument("--runs", type=int, default=1, help="run K times with seeds seed..seed+K-1")
    sp.add_argument("--expect-final", action="store_true")
    sp.add_argument("--format", choices=["human", "json-lines"], default="human")
    sp.set_defaults(fn=cmd_exec)

    sp = sub.add_parser("iso", help="test two circuit files for isomorphism")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--witness", help="write the witness maps here")
    sp.set_defaults(fn=cmd_iso)

    sp = sub.add_parser("import-nand", help="transform a NAND netlist file")
    sp.add_argument("dag")
    sp.add_argument("--out", required=True)
    sp.add_argument("--provenance")
    sp.set_defaults(fn=cmd_import_nand)

    sp = sub.add_parser("synth-family", help="synthesise circuits from truth tables")
    sp.add_argument("tables", help="JSON file: input length -> list of 2**k outputs")
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(fn=cmd_synth_family)

    sp = sub.add_parser("export-dot", help="render a circuit as DOT")
    sp.add_argument("circuit")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_export_dot)

    sp = sub.add_parser("fixtures", help="list or emit bundled example circuits")
    sp.add_argument("action", choices=["list", "emit"])
    sp.add_argument("name", nargs="?")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_fixtures)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fixtures" and args.action == "emit" and not args.name:
        print("fixtures emit needs a name", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except SystemExit as e:
        if isinstance(e.code, str):
            print(e.code, file=sys.stderr)
            return 2
        raise
    except ValidationError as e:
        print(f"validation failure: {e}", file=sys.stderr)
        return 1
    except CompositionError as e:
        print(f"composition failure: {e}", file=sys.stderr)
        return 1
    except StructureError as e:
        print(f"malformed input: {e}", file=sys.stderr)
        return 2
    except CircuitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except KeyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
