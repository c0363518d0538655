"""Classical NAND netlists and their transformation into control circuits.

A netlist is a DAG whose nodes are input variables (in-degree 0), output
variables (out-degree 0) or NAND gates (fan-in 2, fan-out 1). It doubles as
the independent truth-table oracle: the transformation below converts any
such DAG into a control circuit whose execution must agree with direct
topological evaluation on every input vector.

The transformation allocates one control and one Boolean variable per DAG
edge (ids ``src>dst#1`` and ``src>dst#2``), one unit per gate, an input flow
per edge-copy entering a gate and an output flow per edge-copy leaving one.
Edges out of input nodes become invar pairs; edges into output nodes become
outvar pairs.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Mapping, Optional, Sequence

from .errors import StructureError, ValidationError
from .model import BOOL, CTRL, Circuit, Flow, TypeTag, circuit_violations, is_sound, mk_primitive
from .dynamics import ExecConfig, State, Trace, Value, initial_state, run


class NodeKind(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    GATE = "gate"


@dataclass(frozen=True)
class NandDag:
    """A validated NAND netlist. Treat fields as immutable."""

    nodes: Mapping[str, NodeKind]
    edges: frozenset[tuple[str, str]]

    @cached_property
    def in_edges(self) -> dict[str, list[tuple[str, str]]]:
        table: dict[str, list[tuple[str, str]]] = {n: [] for n in self.nodes}
        for e in sorted(self.edges):
            table[e[1]].append(e)
        return table

    @cached_property
    def out_edges(self) -> dict[str, list[tuple[str, str]]]:
        table: dict[str, list[tuple[str, str]]] = {n: [] for n in self.nodes}
        for e in sorted(self.edges):
            table[e[0]].append(e)
        return table

    def kind(self, n: str) -> NodeKind:
        return self.nodes[n]

    def inputs(self) -> list[str]:
        return sorted(n for n, k in self.nodes.items() if k is NodeKind.INPUT)

    def outputs(self) -> list[str]:
        return sorted(n for n, k in self.nodes.items() if k is NodeKind.OUTPUT)

    def gates(self) -> list[str]:
        return sorted(n for n, k in self.nodes.items() if k is NodeKind.GATE)


def dag_violations(nodes: Mapping[str, NodeKind], edges: frozenset[tuple[str, str]]) -> list[str]:
    bad: list[str] = []
    if not edges:
        bad.append("no-edges")
    indeg = {n: 0 for n in nodes}
    outdeg = {n: 0 for n in nodes}
    for a, b in edges:
        outdeg[a] += 1
        indeg[b] += 1
    for n, k in sorted(nodes.items()):
        if indeg[n] + outdeg[n] == 0:
            bad.append(f"isolated-node:{n}")
        elif k is NodeKind.INPUT and indeg[n] != 0:
            bad.append(f"input-degree:{n}")
        elif k is NodeKind.OUTPUT and outdeg[n] != 0:
            bad.append(f"output-degree:{n}")
        elif k is NodeKind.GATE and (indeg[n] != 2 or outdeg[n] != 1):
            bad.append(f"gate-degree:{n}")
    for a, b in sorted(edges):
        ka, kb = nodes[a], nodes[b]
        if ka is NodeKind.OUTPUT or kb is NodeKind.INPUT or (ka is NodeKind.INPUT and kb is NodeKind.OUTPUT):
            bad.append(f"bad-edge:{a}->{b}")
    ts = TopologicalSorter()
    for n in nodes:
        ts.add(n)
    for a, b in edges:
        ts.add(b, a)
    try:
        list(ts.static_order())
    except CycleError:
        bad.append("cyclic")
    return bad


def validate_dag(nodes: Mapping[str, NodeKind | str], edges) -> NandDag:
    """Validate raw netlist data; raises listing every violated rule."""
    nk: dict[str, NodeKind] = {}
    for n, k in nodes.items():
        nk[str(n)] = k if isinstance(k, NodeKind) else NodeKind(k)
    es = set()
    for e in edges:
        a, b = e
        if a not in nk or b not in nk:
            raise StructureError(f"edge ({a!r}, {b!r}) references an undeclared node")
        es.add((str(a), str(b)))
    bad = dag_violations(nk, frozenset(es))
    if bad:
        raise ValidationError(bad, subject="nand-dag")
    return NandDag(nk, frozenset(es))


def topo_order(d: NandDag) -> list[str]:
    ts = TopologicalSorter()
    for n in sorted(d.nodes):
        ts.add(n)
    for a, b in sorted(d.edges):
        ts.add(b, a)
    return list(ts.static_order())


def eval_dag(d: NandDag, bits: Mapping[str, int]) -> dict[str, int]:
    """Topological evaluation; each gate outputs the negated conjunction."""
    missing = set(d.inputs()) - set(bits)
    if missing:
        raise StructureError(f"missing input bits for {sorted(missing)}")
    value: dict[str, int] = {}
    for n in topo_order(d):
        kind = d.kind(n)
        if kind is NodeKind.INPUT:
            value[n] = 1 if bits[n] else 0
        elif kind is NodeKind.GATE:
            a, b = (value[src] for src, _ in d.in_edges[n])
            value[n] = 0 if (a and b) else 1
        else:
            sources = {value[src] for src, _ in d.in_edges[n]}
            if len(sources) != 1:
                raise StructureError(f"output node {n!r} receives disagreeing values")
            value[n] = sources.pop()
    return {n: value[n] for n in d.outputs()}


def longest_gate_path(d: NandDag) -> int:
    depth: dict[str, int] = {}
    best = 0
    for n in topo_order(d):
        if d.kind(n) is NodeKind.GATE:
            depth[n] = 1 + max((depth.get(src, 0) for src, _ in d.in_edges[n]), default=0)
            best = max(best, depth[n])
    return best


# ---------------------------------------------------------------------------
# transformation


def _edge_id(e: tuple[str, str]) -> str:
    return f"{e[0]}>{e[1]}"


def ctrl_var(e: tuple[str, str]) -> str:
    return f"{_edge_id(e)}#1"


def bool_var(e: tuple[str, str]) -> str:
    return f"{_edge_id(e)}#2"


@dataclass(frozen=True)
class TransformResult:
    """Transformed circuit plus the table tracing elements back to the DAG."""

    circuit: Circuit
    var_origin: Mapping[str, tuple[tuple[str, str], int]]  # variable -> (edge, copy)
    unit_origin: Mapping[str, str]  # unit -> gate
    input_bindings: Mapping[str, tuple[tuple[str, str], ...]]  # input node -> (ctrl invar, bool invar) pairs
    output_bindings: Mapping[str, tuple[str, ...]]  # output node -> bool outvars


def to_control(d: NandDag) -> TransformResult:
    """Turn a NAND netlist into an equivalent control circuit.

    Every DAG edge yields one control and one Boolean variable, every gate a
    unit; flows mirror which edges enter and leave gates. The result is
    checked valid and sound before being returned (both must hold for every
    well-formed netlist; a failure is an implementation bug).
    """
    gates = set(d.gates())
    produced = {e for e in d.edges if e[0] in gates}  # edges leaving a gate
    consumed = {e for e in d.edges if e[1] in gates}  # edges entering a gate

    var_types: dict[str, TypeTag] = {}
    var_origin: dict[str, tuple[tuple[str, str], int]] = {}
    for e in sorted(d.edges):
        var_types[ctrl_var(e)] = CTRL
        var_types[bool_var(e)] = BOOL
        var_origin[ctrl_var(e)] = (e, 1)
        var_origin[bool_var(e)] = (e, 2)

    in_flows: dict[str, Flow] = {}
    for e in sorted(consumed):
        gate = e[1]
        in_flows[f"i:{_edge_id(e)}#1"] = Flow(ctrl_var(e), gate)
        in_flows[f"i:{_edge_id(e)}#2"] = Flow(bool_var(e), gate)
    out_flows: dict[str, Flow] = {}
    for e in sorted(produced):
        gate = e[0]
        out_flows[f"o:{_edge_id(e)}#1"] = Flow(gate, ctrl_var(e))
        out_flows[f"o:{_edge_id(e)}#2"] = Flow(gate, bool_var(e))

    circuit = Circuit(
        var_types=var_types,
        units=frozenset(gates),
        in_flows=in_flows,
        out_flows=out_flows,
        sigma=frozenset({CTRL, BOOL}),
    )
    bad = circuit_violations(circuit)
    if bad:
        raise AssertionError(f"netlist transformation produced an invalid circuit: {bad}")
    if not is_sound(circuit):
        raise AssertionError("netlist transformation produced an unsound circuit")

    input_bindings = {
        n: tuple((ctrl_var(e), bool_var(e)) for e in d.out_edges[n]) for n in d.inputs()
    }
    output_bindings = {n: tuple(bool_var(e) for e in d.in_edges[n]) for n in d.outputs()}
    return TransformResult(
        circuit=circuit,
        var_origin=var_origin,
        unit_origin={g: g for g in sorted(gates)},
        input_bindings=input_bindings,
        output_bindings=output_bindings,
    )


def lift_inputs(d: NandDag, bits: Mapping[str, int]) -> State:
    """Initial state for the transformed circuit of ``d``.

    Every control invar receives a signal; every Boolean invar receives its
    source input's bit, replicated once per outgoing edge (invars are never
    shared).
    """
    missing = set(d.inputs()) - set(bits)
    if missing:
        raise StructureError(f"missing input bits for {sorted(missing)}")
    values: dict[str, Value] = {}
    for n in d.inputs():
        for e in d.out_edges[n]:
            values[ctrl_var(e)] = Value.SIGNAL
            values[bool_var(e)] = Value.from_bit(bits[n])
    return State(0, values)


def read_outputs(d: NandDag, trace: Trace) -> dict[str, int]:
    """Decode the DAG's output bits from a finished trace.

    Requires a final outcome; replicated outvars mapped to one output node
    must agree (a disagreement would be an engine bug).
    """
    from .dynamics import Outcome

    if trace.outcome is not Outcome.FINAL:
        raise StructureError(f"cannot read outputs from a {trace.outcome.value} trace")
    final = trace.final_state.values
    out: dict[str, int] = {}
    for n in d.outputs():
        vals = {final[v].bit for v in (bool_var(e) for e in d.in_edges[n])}
        if len(vals) != 1:
            raise AssertionError(f"replicated outvars for {n!r} disagree")
        out[n] = vals.pop()
    return out


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class FamilyMember:
    """One circuit of a family, for a fixed input length ``k``.

    For ``k >= 1`` the member is imported from a synthesised netlist whose
    input nodes are grouped per logical bit (``input_groups[i]`` lists the
    nodes that all receive bit ``i``); a zero-input member is built directly
    from a constant primitive and carries no netlist.
    """

    k: int
    circuit: Circuit
    dag: Optional[NandDag]
    input_groups: tuple[tuple[str, ...], ...]
    output_node: Optional[str]

    def evaluate(self, x: Sequence[int], seed: int = 0) -> int:
        if len(x) != self.k:
            raise StructureError(f"expected {self.k} input bits, got {len(x)}")
        if self.dag is None:
            st = initial_state(self.circuit, {v: Value.SIGNAL for v in self.circuit.invars})
            tr = run(self.circuit, st, ExecConfig(seed=seed))
            bools = [v for v in sorted(self.circuit.outvars) if self.circuit.var_types[v] is BOOL]
            return tr.final_state.values[bools[0]].bit
        bits = {}
        for i, group in enumerate(self.input_groups):
            for node in group:
                bits[node] = x[i]
        tr = run(self.circuit, lift_inputs(self.dag, bits), ExecConfig(seed=seed))
        return read_outputs(self.dag, tr)[self.output_node]


@dataclass(frozen=True)
class CircuitFamily:
    members: Mapping[int, FamilyMember]

    def evaluate(self, x: Sequence[int], seed: int = 0) -> int:
        k = len(x)
        if k not in self.members:
            raise StructureError(f"family has no member for input length {k}")
        return self.members[k].evaluate(x, seed=seed)


# Expression trees over fresh input leaves; ("leaf", bit) | ("nand", l, r).
# Fan-out-1 gates cannot share subresults, so negation duplicates its
# argument subtree instead of reusing a wire.


def _expr_not(e):
    return ("nand", e, e)  # duplicated at emission time, not shared


def _expr_and(a, b):
    return _expr_not(("nand", a, b))


def _expr_or(a, b):
    return ("nand", _expr_not(a), _expr_not(b))


def _expr_const_one():
    # x0 NAND (not x0) == 1 regardless of the input's value
    leaf = ("leaf", 0)
    return ("nand", leaf, _expr_not(leaf))


def _table_expr(k: int, table: Sequence[int]):
    minterms = []
    for row, out in enumerate(table):
        if not out:
            continue
        lits = []
        for i in range(k):
            leaf = ("leaf", i)
            lits.append(leaf if (row >> i) & 1 else _expr_not(leaf))
        term = lits[0]
        for lit in lits[1:]:
            term = _expr_and(term, lit)
        minterms.append(term)
    if not minterms:
        return _expr_not(_expr_const_one())
    if len(minterms) == len(table):
        return _expr_const_one()
    expr = minterms[0]
    for term in minterms[1:]:
        expr = _expr_or(expr, term)
    if expr[0] == "leaf":  # bare wire: force a gate level so the netlist is non-empty
        expr = _expr_not(_expr_not(expr))
    return expr


def _expr_to_dag(expr, k: int) -> tuple[NandDag, tuple[tuple[str, ...], ...], str]:
    nodes: dict[str, NodeKind] = {}
    edges: set[tuple[str, str]] = set()
    groups: list[list[str]] = [[] for _ in range(k)]
    counter = {"leaf": 0, "gate": 0}

    def emit(node) -> str:
        if node[0] == "leaf":
            counter["leaf"] += 1
            name = f"x{node[1]}_{counter['leaf']}"
            nodes[name] = NodeKind.INPUT
            groups[node[1]].append(name)
            return name
        counter["gate"] += 1
        name = f"g{counter['gate']}"
        left = emit(node[1])
        right = emit(node[2])
        nodes[name] = NodeKind.GATE
        edges.add((left, name))
        edges.add((right, name))
        return name

    root = emit(expr)
    if nodes[root] is not NodeKind.GATE:
        raise AssertionError("expression root must be a gate")
    nodes["out"] = NodeKind.OUTPUT
    edges.add((root, "out"))
    dag = validate_dag(nodes, edges)
    return dag, tuple(tuple(g) for g in groups), "out"


def synth_family(tables: Mapping[int, Sequence[int]]) -> CircuitFamily:
    """Build one circuit per input length from explicit truth tables.

    Tables map ``k`` to the 2**k outputs (row index read in binary, least
    significant bit = first input). Synthesis is a plain sum-of-minterms
    netlist compiled to fan-in-2 NAND gates, so member size is O(2**k);
    no minimisation is attempted.
    """
    members: dict[int, FamilyMember] = {}
    for k, table in sorted(tables.items()):
        table = [1 if b else 0 for b in table]
        if len(table) != 2**k:
            raise StructureError(f"truth table for k={k} must have {2 ** k} entries, got {len(table)}")
        if k == 0:
            const_one = mk_primitive(1, 0, 1, 1)
            if table[0]:
                circuit = const_one
            else:
                from .operators import sequence

                inv = mk_primitive(1, 1, 1, 1)
                circuit = sequence(const_one, inv, [("v2", "v1"), ("v3", "v2")], tag="const").circuit
            members[k] = FamilyMember(k, circuit, None, (), None)
            continue
        expr = _table_expr(k, table)
        dag, groups, out_node = _expr_to_dag(expr, k)
        members[k] = FamilyMember(k, to_control(dag).circuit, dag, groups, out_node)
    return CircuitFamily(members)


# ---------------------------------------------------------------------------
# randomised netlists (used by the test suite and experiment scripts)


def random_dag(rng: random.Random, max_inputs: int = 6, max_gates: int = 15) -> NandDag:
    """A random well-formed netlist with the given size bounds.

    Every input feeds at least one gate, every gate output is consumed
    exactly once (by a gate or a fresh output node), and output nodes have
    in-degree one.
    """
    if max_inputs < 2:
        raise StructureError("need room for at least 2 inputs")
    n_gates = rng.randint(1, max_gates)
    n_inputs = rng.randint(2, min(max_inputs, 2 * n_gates))
    inputs = [f"x{i}" for i in range(n_inputs)]
    unused_inputs = set(inputs)
    open_gates: list[str] = []
    nodes: dict[str, NodeKind] = {n: NodeKind.INPUT for n in inputs}
    edges: set[tuple[str, str]] = set()
    for gi in range(n_gates):
        g = f"g{gi}"
        slots_after = 2 * (n_gates - gi - 1)
        must_take = max(0, min(2, len(unused_inputs) - slots_after))
        sources: list[str] = []
        for _ in range(must_take):
            pick = rng.choice(sorted(unused_inputs))
            unused_inputs.discard(pick)
            sources.append(pick)
        pool = [n for n in inputs + open_gates if n not in sources]
        while len(sources) < 2:
            pick = rng.choice(pool)
            pool.remove(pick)
            sources.append(pick)
            unused_inputs.discard(pick)
        for src in sources:
            if src in open_gates:
                open_gates.remove(src)
            edges.add((src, g))
        nodes[g] = NodeKind.GATE
        open_gates.append(g)
    for j, g in enumerate(open_gates):
        out = f"y{j}"
        nodes[out] = NodeKind.OUTPUT
        edges.add((g, out))
    return validate_dag(nodes, edges)
