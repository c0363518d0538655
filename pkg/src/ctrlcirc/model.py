"""Core circuit model: typed variables, computation units, and flows.

A circuit is a bipartite flow structure.  Variables hold values (a bare
control signal, or a Boolean); computation units consume a set of variables
through input flows and produce into a set of variables through output
flows.  Control variables gate when a unit may fire, which is what makes
evaluation order explicit rather than implied by wiring alone.

Structural rules enforced by :func:`validate_circuit`:

* at least one variable exists, and every declared type is used;
* every unit has input and output flows (no dangling units);
* every unit is fed from at least one control variable and feeds at least
  one control variable;
* at least one control variable has no incoming flows (a control invar) and
  at least one has no outgoing flows (a control outvar).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import StructureError, ValidationError


class TypeTag(enum.Enum):
    """Variable type: a control signal carrier or a Boolean carrier."""

    CTRL = "ctrl"
    BOOL = "bool"

    def __repr__(self) -> str:  # keep reprs short in test output
        return self.value


CTRL = TypeTag.CTRL
BOOL = TypeTag.BOOL


@dataclass(frozen=True)
class Flow:
    """A directed flow edge; src/dst are a variable and a unit (or vice versa)."""

    src: str
    dst: str


@dataclass(frozen=True, eq=True)
class Circuit:
    """A validated circuit. Treat all fields as immutable.

    ``var_types`` maps every variable id to its type tag (its key set is the
    variable set). ``in_flows`` map flow ids to variable->unit edges,
    ``out_flows`` to unit->variable edges. ``sigma`` is the set of types the
    circuit operates on.
    """

    var_types: Mapping[str, TypeTag]
    units: frozenset[str]
    in_flows: Mapping[str, Flow]
    out_flows: Mapping[str, Flow]
    sigma: frozenset[TypeTag]

    # -- derived views (cached; cheap to recompute but used everywhere) -----

    @cached_property
    def vars(self) -> frozenset[str]:
        return frozenset(self.var_types)

    @cached_property
    def flow_sources(self) -> frozenset[str]:
        """Variables with at least one outgoing flow (s(I))."""
        return frozenset(f.src for f in self.in_flows.values())

    @cached_property
    def flow_targets(self) -> frozenset[str]:
        """Variables with at least one incoming flow (t(O))."""
        return frozenset(f.dst for f in self.out_flows.values())

    @cached_property
    def invars(self) -> frozenset[str]:
        """Variables with no incoming flows."""
        return self.vars - self.flow_targets

    @cached_property
    def outvars(self) -> frozenset[str]:
        """Variables with no outgoing flows."""
        return self.vars - self.flow_sources

    @cached_property
    def inoutvars(self) -> frozenset[str]:
        return self.invars & self.outvars

    @cached_property
    def _unit_pre(self) -> dict[str, frozenset[str]]:
        pre: dict[str, set[str]] = {u: set() for u in self.units}
        for f in self.in_flows.values():
            pre[f.dst].add(f.src)
        return {u: frozenset(vs) for u, vs in pre.items()}

    @cached_property
    def _unit_post(self) -> dict[str, frozenset[str]]:
        post: dict[str, set[str]] = {u: set() for u in self.units}
        for f in self.out_flows.values():
            post[f.src].add(f.dst)
        return {u: frozenset(vs) for u, vs in post.items()}

    @cached_property
    def _var_consumers(self) -> dict[str, frozenset[str]]:
        cons: dict[str, set[str]] = {v: set() for v in self.var_types}
        for f in self.in_flows.values():
            cons[f.src].add(f.dst)
        return {v: frozenset(us) for v, us in cons.items()}

    @cached_property
    def _var_producers(self) -> dict[str, frozenset[str]]:
        prod: dict[str, set[str]] = {v: set() for v in self.var_types}
        for f in self.out_flows.values():
            prod[f.dst].add(f.src)
        return {v: frozenset(us) for v, us in prod.items()}

    def pre_set(self, unit: str) -> frozenset[str]:
        """Variables connected into ``unit``."""
        return self._unit_pre[unit]

    def post_set(self, unit: str) -> frozenset[str]:
        """Variables connected from ``unit``."""
        return self._unit_post[unit]

    def consumers(self, var: str) -> frozenset[str]:
        """Units fed by ``var``."""
        return self._var_consumers[var]

    def producers(self, var: str) -> frozenset[str]:
        """Units feeding ``var``."""
        return self._var_producers[var]

    def tag(self, var: str) -> TypeTag:
        return self.var_types[var]

    def sorted_vars(self) -> list[str]:
        return sorted(self.var_types)

    def sorted_units(self) -> list[str]:
        return sorted(self.units)


@dataclass(frozen=True)
class Interface:
    """The boundary of a circuit: its invars and outvars."""

    invars: frozenset[str]
    outvars: frozenset[str]

    @property
    def inoutvars(self) -> frozenset[str]:
        return self.invars & self.outvars


class CircuitClass(enum.Enum):
    TRIVIAL = "trivial"
    PRIMITIVE = "primitive"
    UNIT_CIRCUIT = "unit-circuit"
    GENERAL = "general"


# ---------------------------------------------------------------------------
# validation


def _as_tag(value) -> TypeTag:
    if isinstance(value, TypeTag):
        return value
    try:
        return TypeTag(value)
    except ValueError:
        raise StructureError(f"unknown type tag {value!r}") from None


def _assemble(
    var_types: Mapping[str, TypeTag | str],
    units: Iterable[str],
    in_flows: Mapping[str, Flow | tuple[str, str]],
    out_flows: Mapping[str, Flow | tuple[str, str]],
    sigma: Optional[Iterable[TypeTag | str]],
) -> Circuit:
    """Build a Circuit, raising StructureError on dangling references."""
    vt = {str(v): _as_tag(t) for v, t in var_types.items()}
    us = frozenset(str(u) for u in units)

    def norm(flows) -> dict[str, Flow]:
        out = {}
        for fid, f in flows.items():
            if not isinstance(f, Flow):
                f = Flow(*f)
            out[str(fid)] = f
        return out

    ins = norm(in_flows)
    outs = norm(out_flows)
    for fid, f in ins.items():
        if f.src not in vt:
            raise StructureError(f"in-flow {fid!r} has undeclared source variable {f.src!r}")
        if f.dst not in us:
            raise StructureError(f"in-flow {fid!r} has undeclared target unit {f.dst!r}")
    for fid, f in outs.items():
        if f.src not in us:
            raise StructureError(f"out-flow {fid!r} has undeclared source unit {f.src!r}")
        if f.dst not in vt:
            raise StructureError(f"out-flow {fid!r} has undeclared target variable {f.dst!r}")
    if sigma is None:
        sig = frozenset(vt.values())
    else:
        sig = frozenset(_as_tag(t) for t in sigma)
    return Circuit(vt, us, ins, outs, sig)


def circuit_violations(c: Circuit) -> list[str]:
    """Names of every violated model constraint (empty list means valid)."""
    bad: list[str] = []
    if not c.var_types:
        bad.append("no-vars")
    if not c.sigma:
        bad.append("sigma-empty")
    used = set(c.var_types.values())
    if used - c.sigma:
        bad.append("var-type-outside-sigma")
    if c.sigma - used:
        bad.append("c-not-surjective")

    fed = {f.dst for f in c.in_flows.values()}
    feeding = {f.src for f in c.out_flows.values()}
    if c.units - fed:
        bad.append("tau-not-surjective")
    if c.units - feeding:
        bad.append("sigma-not-surjective")
    ctrl_fed = {f.dst for f in c.in_flows.values() if c.var_types[f.src] is CTRL}
    ctrl_feeding = {f.src for f in c.out_flows.values() if c.var_types[f.dst] is CTRL}
    if c.units - ctrl_fed:
        bad.append("tau-ctrl-restriction-not-surjective")
    if c.units - ctrl_feeding:
        bad.append("sigma-ctrl-restriction-not-surjective")

    if not any(c.var_types[v] is CTRL for v in c.invars):
        bad.append("no-control-invar")
    if not any(c.var_types[v] is CTRL for v in c.outvars):
        bad.append("no-control-outvar")
    return bad


def validate_circuit(
    var_types: Mapping[str, TypeTag | str],
    units: Iterable[str] = (),
    in_flows: Mapping[str, Flow | tuple[str, str]] | None = None,
    out_flows: Mapping[str, Flow | tuple[str, str]] | None = None,
    sigma: Optional[Iterable[TypeTag | str]] = None,
) -> Circuit:
    """Validate raw circuit data and return a sealed :class:`Circuit`.

    Raises :class:`StructureError` for dangling references and
    :class:`ValidationError` (listing every violated clause) otherwise.
    """
    c = _assemble(var_types, units, in_flows or {}, out_flows or {}, sigma)
    violations = circuit_violations(c)
    if violations:
        raise ValidationError(violations)
    return c


def revalidate(c: Circuit) -> Circuit:
    """Assert that an already-assembled circuit satisfies all constraints."""
    violations = circuit_violations(c)
    if violations:
        raise ValidationError(violations)
    return c


# ---------------------------------------------------------------------------
# interface / soundness / classification


def interface(c: Circuit) -> Interface:
    return Interface(invars=c.invars, outvars=c.outvars)


def is_sound(c: Circuit) -> bool:
    """True iff every invar and every flow source reaches some outvar.

    Reachability alternates variable -> unit -> variable and must traverse at
    least one unit, so an inoutvar (no flows at all) never satisfies it.
    Circuits may be cyclic; the visited set guarantees termination.
    """
    starts = c.flow_sources | c.invars
    for v in starts:
        seen_units: set[str] = set()
        frontier = list(c.consumers(v))
        reached_out = False
        while frontier:
            u = frontier.pop()
            if u in seen_units:
                continue
            seen_units.add(u)
            for w in c.post_set(u):
                if w in c.outvars:
                    reached_out = True
                    frontier = []
                    break
                frontier.extend(c.consumers(w))
        if not reached_out:
            return False
    return True


def classify(c: Circuit) -> CircuitClass:
    if not c.units and not c.in_flows and not c.out_flows:
        if len(c.var_types) == 1 and next(iter(c.var_types.values())) is CTRL:
            return CircuitClass.UNIT_CIRCUIT
        return CircuitClass.TRIVIAL
    if len(c.units) == 1 and c.vars == (c.flow_sources ^ c.flow_targets):
        return CircuitClass.PRIMITIVE
    return CircuitClass.GENERAL


# ---------------------------------------------------------------------------
# constructors


def mk_trivial(tags: Sequence[TypeTag | str], prefix: str = "v") -> Circuit:
    """A circuit of bare variables: no units, no flows.

    Needs at least one control tag; variables are named ``v1..vn`` in the
    given order.
    """
    tags = [_as_tag(t) for t in tags]
    if not tags:
        raise ValidationError(["no-vars"])
    if CTRL not in tags:
        raise ValidationError(["no-control-invar", "no-control-outvar"])
    vt = {f"{prefix}{i + 1}": t for i, t in enumerate(tags)}
    return validate_circuit(vt)


def unit_circuit() -> Circuit:
    """The one-control-variable circuit; identity for sequencing."""
    return mk_trivial([CTRL])


def mk_primitive(n_ctrl_in: int, n_bool_in: int, n_ctrl_out: int, n_bool_out: int) -> Circuit:
    """A single-unit circuit with disjoint invars and outvars.

    Control in/out counts must be at least 1 (units always synchronise on
    control). Variables are numbered invars first (control before Boolean),
    then outvars, as ``v1..vn``; the unit is ``u1``; flows ``i1..``/``o1..``
    in variable order.
    """
    if n_ctrl_in < 1 or n_ctrl_out < 1:
        raise ValidationError(
            ["tau-ctrl-restriction-not-surjective"] if n_ctrl_in < 1
            else ["sigma-ctrl-restriction-not-surjective"]
        )
    if n_bool_in < 0 or n_bool_out < 0:
        raise StructureError("negative variable count")
    vt: dict[str, TypeTag] = {}
    order: list[str] = []
    for _ in range(n_ctrl_in):
        order.append(CTRL)
    for _ in range(n_bool_in):
        order.append(BOOL)
    n_in = len(order)
    for _ in range(n_ctrl_out):
        order.append(CTRL)
    for _ in range(n_bool_out):
        order.append(BOOL)
    for i, t in enumerate(order):
        vt[f"v{i + 1}"] = t
    ins = {f"i{k + 1}": Flow(f"v{k + 1}", "u1") for k in range(n_in)}
    outs = {f"o{k + 1}": Flow("u1", f"v{n_in + k + 1}") for k in range(len(order) - n_in)}
    return validate_circuit(vt, ["u1"], ins, outs)


# ---------------------------------------------------------------------------
# relabelling


def relabel(c: Circuit, var_names: Mapping[str, str] | None = None, interior_prefix: str = "w"):
    """Rename a circuit's elements to a readable, canonical scheme.

    Variables listed in ``var_names`` take the given names; remaining
    variables become ``w1..wn`` in sorted order. Units become ``u1..``,
    flows ``i1..``/``o1..`` (sorted by renamed endpoints). Returns the new
    circuit together with the renaming morphism (old -> new).
    """
    from .morphisms import validate_morphism  # local import to avoid a cycle

    var_names = dict(var_names or {})
    unknown = set(var_names) - c.vars
    if unknown:
        raise StructureError(f"relabel names unknown variables: {sorted(unknown)}")
    if len(set(var_names.values())) != len(var_names):
        raise StructureError("relabel target names must be distinct")
    v_map = dict(var_names)
    counter = 0
    for v in c.sorted_vars():
        if v in v_map:
            continue
        counter += 1
        while f"{interior_prefix}{counter}" in var_names.values():
            counter += 1
        v_map[v] = f"{interior_prefix}{counter}"
    if len(set(v_map.values())) != len(v_map):
        raise StructureError("relabel produced colliding variable names")
    u_map = {u: f"u{i + 1}" for i, u in enumerate(c.sorted_units())}
    in_order = sorted(c.in_flows, key=lambda fid: (v_map[c.in_flows[fid].src], u_map[c.in_flows[fid].dst], fid))
    i_map = {fid: f"i{k + 1}" for k, fid in enumerate(in_order)}
    out_order = sorted(c.out_flows, key=lambda fid: (u_map[c.out_flows[fid].src], v_map[c.out_flows[fid].dst], fid))
    o_map = {fid: f"o{k + 1}" for k, fid in enumerate(out_order)}

    new = Circuit(
        var_types={v_map[v]: t for v, t in c.var_types.items()},
        units=frozenset(u_map.values()),
        in_flows={i_map[f]: Flow(v_map[fl.src], u_map[fl.dst]) for f, fl in c.in_flows.items()},
        out_flows={o_map[f]: Flow(u_map[fl.src], v_map[fl.dst]) for f, fl in c.out_flows.items()},
        sigma=c.sigma,
    )
    revalidate(new)
    ren = validate_morphism(c, new, v_map, u_map, i_map, o_map)
    return new, ren
