"""JSON file formats for circuits, netlists, morphisms, states and traces.

All writers emit sorted keys so any given object serialises to exactly one
byte sequence; readers reject unknown keys.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .errors import StructureError
from .model import Circuit, Flow, validate_circuit
from .morphisms import CircuitMorphism, validate_morphism
from .nanddag import NandDag, validate_dag
from .dynamics import State, Trace, Value


def _require_keys(d: Mapping[str, Any], required: set[str], optional: set[str], what: str) -> None:
    keys = set(d)
    unknown = keys - required - optional
    if unknown:
        raise StructureError(f"{what} has unknown keys: {sorted(unknown)}")
    missing = required - keys
    if missing:
        raise StructureError(f"{what} is missing keys: {sorted(missing)}")


# -- circuits ---------------------------------------------------------------


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "vars": {v: c.var_types[v].value for v in sorted(c.var_types)},
        "units": sorted(c.units),
        "in_flows": {i: {"src": f.src, "dst": f.dst} for i, f in sorted(c.in_flows.items())},
        "out_flows": {o: {"src": f.src, "dst": f.dst} for o, f in sorted(c.out_flows.items())},
        "sigma": sorted(t.value for t in c.sigma),
    }


def circuit_from_dict(d: Mapping[str, Any]) -> Circuit:
    _require_keys(d, {"vars", "units", "in_flows", "out_flows"}, {"sigma"}, "circuit document")

    def flows(key: str) -> dict[str, Flow]:
        out = {}
        for fid, spec in d[key].items():
            _require_keys(spec, {"src", "dst"}, set(), f"{key}[{fid!r}]")
            out[fid] = Flow(spec["src"], spec["dst"])
        return out

    return validate_circuit(
        d["vars"], d["units"], flows("in_flows"), flows("out_flows"), d.get("sigma")
    )


def dumps_circuit(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=2, sort_keys=True) + "\n"


def loads_circuit(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))


# -- netlists ---------------------------------------------------------------


def dag_to_dict(d: NandDag) -> dict:
    return {
        "nodes": {n: d.nodes[n].value for n in sorted(d.nodes)},
        "edges": [[a, b] for a, b in sorted(d.edges)],
    }


def dag_from_dict(d: Mapping[str, Any]) -> NandDag:
    _require_keys(d, {"nodes", "edges"}, set(), "netlist document")
    return validate_dag(d["nodes"], [tuple(e) for e in d["edges"]])


def dumps_dag(d: NandDag) -> str:
    return json.dumps(dag_to_dict(d), indent=2, sort_keys=True) + "\n"


def loads_dag(text: str) -> NandDag:
    return dag_from_dict(json.loads(text))


# -- morphisms --------------------------------------------------------------


def morphism_to_dict(m: CircuitMorphism) -> dict:
    return {
        "f_v": dict(sorted(m.f_v.items())),
        "f_u": dict(sorted(m.f_u.items())),
        "f_i": dict(sorted(m.f_i.items())),
        "f_o": dict(sorted(m.f_o.items())),
    }


def morphism_from_dict(d: Mapping[str, Any], src: Circuit, dst: Circuit) -> CircuitMorphism:
    _require_keys(d, {"f_v", "f_u", "f_i", "f_o"}, {"src", "dst"}, "morphism document")
    return validate_morphism(src, dst, d["f_v"], d["f_u"], d["f_i"], d["f_o"])


# -- values, states, traces -------------------------------------------------


def value_to_json(v: Value):
    return v.value


def value_from_json(x) -> Value:
    if x == "*":
        return Value.SIGNAL
    if x in (0, 1):
        return Value(x)
    if x in ("0", "1"):
        return Value(int(x))
    raise StructureError(f"not a value: {x!r} (expected '*', 0 or 1)")


def assignments_from_dict(d: Mapping[str, Any]) -> dict[str, Value]:
    return {str(v): value_from_json(x) for v, x in d.items()}


def state_to_dict(st: State) -> dict:
    return {
        "time": st.time,
        "values": {v: value_to_json(st.values[v]) for v in sorted(st.values)},
    }


def trace_to_jsonl(trace: Trace) -> str:
    """One record per step plus a final outcome line, byte-stable."""
    lines = []
    for s in trace.steps:
        lines.append(
            json.dumps(
                {
                    "time": s.time,
                    "state": state_to_dict(s.state)["values"],
                    "enabled": list(s.enabled),
                    "ready": list(s.ready),
                    "results": {u: value_to_json(s.results[u]) for u in sorted(s.results)},
                },
                sort_keys=True,
            )
        )
    tail: dict[str, Any] = {"outcome": trace.outcome.value}
    if trace.conflict:
        tail["conflict"] = trace.conflict
    lines.append(json.dumps(tail, sort_keys=True))
    return "\n".join(lines) + "\n"
