"""Gluing constructions on circuits: pushout, coproduct, isomorphism.

A pushout merges two circuits along a shared apex by quotienting the tagged
disjoint union of each component set; a coproduct places two circuits side
by side. Identifier freshness uses a namespace prefix ``<tag>/<L|R>/<id>``
and quotient classes are named after their lexicographically least member,
so results are reproducible and diffable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .errors import CompositionError, StructureError
from .model import Circuit, Flow, TypeTag, circuit_violations
from .morphisms import CircuitMorphism, boundary_sets, is_mono, validate_morphism


@dataclass(frozen=True)
class Span:
    """Two morphisms out of a common apex."""

    apex: Circuit
    left: CircuitMorphism
    right: CircuitMorphism

    def __post_init__(self):
        if self.left.src != self.apex or self.right.src != self.apex:
            raise StructureError("span legs must share the apex as their domain")


@dataclass(frozen=True)
class Cospan:
    """The result of a pushout: the glued circuit plus its two legs."""

    result: Circuit
    left_leg: CircuitMorphism
    right_leg: CircuitMorphism


class UnionFind:
    """Plain union-find over hashable items; classes are reported sorted."""

    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self) -> list[list]:
        by_root: dict = {}
        for x in self.parent:
            by_root.setdefault(self.find(x), []).append(x)
        return [sorted(members) for members in by_root.values()]


def _quotient(
    left_items: Iterable[str],
    right_items: Iterable[str],
    seeds: Iterable[tuple[str, str]],
    name: Callable[[tuple[str, str]], str],
) -> tuple[dict[tuple[str, str], str], list[list[tuple[str, str]]]]:
    """Quotient the tagged union of two id sets by the seed pairs.

    Returns a map from tagged element to its class representative name, and
    the list of classes (each a sorted list of tagged elements).
    """
    tagged = [("L", x) for x in left_items] + [("R", x) for x in right_items]
    uf = UnionFind(tagged)
    for lx, rx in seeds:
        uf.union(("L", lx), ("R", rx))
    classes = uf.classes()
    rep: dict[tuple[str, str], str] = {}
    for members in classes:
        rep_name = min(name(m) for m in members)
        for m in members:
            rep[m] = rep_name
    return rep, classes


def pushout(span: Span, tag: str = "po") -> Cospan:
    """Glue the two base circuits of a span along its apex.

    Exists only when each leg maps the other leg's boundary-gaining
    variables into interface variables; otherwise raises
    ``CompositionError("pushout-does-not-exist")``.
    """
    alpha, beta = span.left, span.right
    left, right = alpha.dst, beta.dst

    gi_b, go_b = boundary_sets(span.apex, right, beta.f_v, beta.f_u)
    gi_a, go_a = boundary_sets(span.apex, left, alpha.f_v, alpha.f_u)
    img_in_left = {alpha.f_v[v] for v in gi_b | go_b}
    img_in_right = {beta.f_v[v] for v in gi_a | go_a}
    if not img_in_left <= (left.invars | left.outvars):
        raise CompositionError(
            "pushout-does-not-exist",
            f"left operand would gain flows at non-interface variables {sorted(img_in_left - (left.invars | left.outvars))}",
        )
    if not img_in_right <= (right.invars | right.outvars):
        raise CompositionError(
            "pushout-does-not-exist",
            f"right operand would gain flows at non-interface variables {sorted(img_in_right - (right.invars | right.outvars))}",
        )

    def name(member: tuple[str, str]) -> str:
        side, orig = member
        return f"{tag}/{side}/{orig}"

    v_rep, v_classes = _quotient(
        left.vars, right.vars, ((alpha.f_v[v], beta.f_v[v]) for v in span.apex.vars), name
    )
    u_rep, _ = _quotient(
        left.units, right.units, ((alpha.f_u[u], beta.f_u[u]) for u in span.apex.units), name
    )
    i_rep, i_classes = _quotient(
        left.in_flows, right.in_flows, ((alpha.f_i[i], beta.f_i[i]) for i in span.apex.in_flows), name
    )
    o_rep, o_classes = _quotient(
        left.out_flows, right.out_flows, ((alpha.f_o[o], beta.f_o[o]) for o in span.apex.out_flows), name
    )

    sides = {"L": left, "R": right}
    var_types: dict[str, TypeTag] = {}
    for members in v_classes:
        tags = {sides[s].var_types[x] for s, x in members}
        if len(tags) != 1:
            raise AssertionError(f"pushout identified variables of different types: {members}")
        var_types[v_rep[members[0]]] = tags.pop()

    in_flows: dict[str, Flow] = {}
    for members in i_classes:
        images = {
            (v_rep[(s, sides[s].in_flows[x].src)], u_rep[(s, sides[s].in_flows[x].dst)]) for s, x in members
        }
        if len(images) != 1:
            raise AssertionError(f"pushout produced an ill-defined input-flow map on {members}")
        src, dst = images.pop()
        in_flows[i_rep[members[0]]] = Flow(src, dst)
    out_flows: dict[str, Flow] = {}
    for members in o_classes:
        images = {
            (u_rep[(s, sides[s].out_flows[x].src)], v_rep[(s, sides[s].out_flows[x].dst)]) for s, x in members
        }
        if len(images) != 1:
            raise AssertionError(f"pushout produced an ill-defined output-flow map on {members}")
        src, dst = images.pop()
        out_flows[o_rep[members[0]]] = Flow(src, dst)

    result = Circuit(
        var_types=var_types,
        units=frozenset(u_rep[m] for m in u_rep),
        in_flows=in_flows,
        out_flows=out_flows,
        sigma=left.sigma | right.sigma,
    )
    bad = circuit_violations(result)
    if bad:
        raise AssertionError(f"pushout produced an invalid circuit: {bad}")

    def leg(side: str, base: Circuit) -> CircuitMorphism:
        return validate_morphism(
            base,
            result,
            {v: v_rep[(side, v)] for v in base.vars},
            {u: u_rep[(side, u)] for u in base.units},
            {i: i_rep[(side, i)] for i in base.in_flows},
            {o: o_rep[(side, o)] for o in base.out_flows},
        )

    left_leg = leg("L", left)
    right_leg = leg("R", right)
    for v in span.apex.vars:
        if left_leg.f_v[alpha.f_v[v]] != right_leg.f_v[beta.f_v[v]]:
            raise AssertionError("pushout square does not commute")
    return Cospan(result, left_leg, right_leg)


# ---------------------------------------------------------------------------
# coproduct


@dataclass(frozen=True)
class CoproductResult:
    circuit: Circuit
    left: CircuitMorphism
    right: CircuitMorphism


def coproduct(a: Circuit, b: Circuit, tag: str = "cp") -> CoproductResult:
    """Componentwise disjoint union with namespace-prefixed identifiers."""

    def ren(side: str, x: str) -> str:
        return f"{tag}/{side}/{x}"

    var_types = {ren("L", v): t for v, t in a.var_types.items()}
    var_types.update({ren("R", v): t for v, t in b.var_types.items()})
    units = frozenset([ren("L", u) for u in a.units] + [ren("R", u) for u in b.units])
    in_flows = {ren("L", i): Flow(ren("L", f.src), ren("L", f.dst)) for i, f in a.in_flows.items()}
    in_flows.update({ren("R", i): Flow(ren("R", f.src), ren("R", f.dst)) for i, f in b.in_flows.items()})
    out_flows = {ren("L", o): Flow(ren("L", f.src), ren("L", f.dst)) for o, f in a.out_flows.items()}
    out_flows.update({ren("R", o): Flow(ren("R", f.src), ren("R", f.dst)) for o, f in b.out_flows.items()})
    result = Circuit(var_types, units, in_flows, out_flows, a.sigma | b.sigma)
    bad = circuit_violations(result)
    if bad:
        raise AssertionError(f"coproduct produced an invalid circuit: {bad}")

    def inj(side: str, base: Circuit) -> CircuitMorphism:
        return validate_morphism(
            base,
            result,
            {v: ren(side, v) for v in base.vars},
            {u: ren(side, u) for u in base.units},
            {i: ren(side, i) for i in base.in_flows},
            {o: ren(side, o) for o in base.out_flows},
        )

    return CoproductResult(result, inj("L", a), inj("R", b))


def copair(f: CircuitMorphism, g: CircuitMorphism, cp: CoproductResult) -> CircuitMorphism:
    """The unique morphism out of a coproduct agreeing with ``f`` and ``g``."""
    if f.src != cp.left.src or g.src != cp.right.src:
        raise StructureError("copair components must match the coproduct summands")
    if f.dst != g.dst:
        raise StructureError("copair components must share a codomain")

    def merge(comp_f: Mapping[str, str], comp_g: Mapping[str, str], inj_l: Mapping[str, str], inj_r: Mapping[str, str]):
        out = {inj_l[x]: y for x, y in comp_f.items()}
        out.update({inj_r[x]: y for x, y in comp_g.items()})
        return out

    return validate_morphism(
        cp.circuit,
        f.dst,
        merge(f.f_v, g.f_v, cp.left.f_v, cp.right.f_v),
        merge(f.f_u, g.f_u, cp.left.f_u, cp.right.f_u),
        merge(f.f_i, g.f_i, cp.left.f_i, cp.right.f_i),
        merge(f.f_o, g.f_o, cp.left.f_o, cp.right.f_o),
    )


# ---------------------------------------------------------------------------
# isomorphism


def _var_signature(c: Circuit, v: str):
    return (
        c.var_types[v].value,
        len([1 for f in c.out_flows.values() if f.dst == v]),
        len([1 for f in c.in_flows.values() if f.src == v]),
    )


def _unit_signature(c: Circuit, u: str, var_sig):
    ins = sorted(var_sig[f.src] for f in c.in_flows.values() if f.dst == u)
    outs = sorted(var_sig[f.dst] for f in c.out_flows.values() if f.src == u)
    return (tuple(ins), tuple(outs))


def _flow_multiplicities(c: Circuit):
    in_mult: dict[tuple[str, str], int] = {}
    for f in c.in_flows.values():
        in_mult[(f.src, f.dst)] = in_mult.get((f.src, f.dst), 0) + 1
    out_mult: dict[tuple[str, str], int] = {}
    for f in c.out_flows.values():
        out_mult[(f.src, f.dst)] = out_mult.get((f.src, f.dst), 0) + 1
    return in_mult, out_mult


def is_isomorphic(a: Circuit, b: Circuit) -> Optional[CircuitMorphism]:
    """Search for an isomorphism; returns a witness morphism or ``None``.

    Complete backtracking over variables and units, ordered by structural
    signature (type, in-degree, out-degree) to keep the worst case tractable
    at the scale this package works with (well under 200 elements).
    """
    if a.sigma != b.sigma:
        return None
    if (len(a.vars), len(a.units), len(a.in_flows), len(a.out_flows)) != (
        len(b.vars),
        len(b.units),
        len(b.in_flows),
        len(b.out_flows),
    ):
        return None

    sig_a = {v: _var_signature(a, v) for v in a.vars}
    sig_b = {v: _var_signature(b, v) for v in b.vars}
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return None
    usig_a = {u: _unit_signature(a, u, sig_a) for u in a.units}
    usig_b = {u: _unit_signature(b, u, sig_b) for u in b.units}
    if sorted(usig_a.values()) != sorted(usig_b.values()):
        return None

    in_mult_a, out_mult_a = _flow_multiplicities(a)
    in_mult_b, out_mult_b = _flow_multiplicities(b)

    # One interleaved ordering over variables and units, rarest signature first.
    nodes: list[tuple[str, str]] = [("v", v) for v in a.sorted_vars()] + [("u", u) for u in a.sorted_units()]
    freq: dict = {}
    for kind, x in nodes:
        s = sig_a[x] if kind == "v" else usig_a[x]
        freq[(kind, s)] = freq.get((kind, s), 0) + 1
    nodes.sort(key=lambda n: (freq[(n[0], sig_a[n[1]] if n[0] == "v" else usig_a[n[1]])], n[1]))

    v_map: dict[str, str] = {}
    u_map: dict[str, str] = {}
    used_v: set[str] = set()
    used_u: set[str] = set()

    def consistent_var(v: str, w: str) -> bool:
        if sig_a[v] != sig_b[w]:
            return False
        for u, uu in u_map.items():
            if in_mult_a.get((v, u), 0) != in_mult_b.get((w, uu), 0):
                return False
            if out_mult_a.get((u, v), 0) != out_mult_b.get((uu, w), 0):
                return False
        return True

    def consistent_unit(u: str, uu: str) -> bool:
        if usig_a[u] != usig_b[uu]:
            return False
        for v, w in v_map.items():
            if in_mult_a.get((v, u), 0) != in_mult_b.get((w, uu), 0):
                return False
            if out_mult_a.get((u, v), 0) != out_mult_b.get((uu, w), 0):
                return False
        return True

    def extend(k: int) -> bool:
        if k == len(nodes):
            return True
        kind, x = nodes[k]
        if kind == "v":
            for w in sorted(b.vars - used_v):
                if consistent_var(x, w):
                    v_map[x] = w
                    used_v.add(w)
                    if extend(k + 1):
                        return True
                    del v_map[x]
                    used_v.remove(w)
        else:
            for uu in sorted(b.units - used_u):
                if consistent_unit(x, uu):
                    u_map[x] = uu
                    used_u.add(uu)
                    if extend(k + 1):
                        return True
                    del u_map[x]
                    used_u.remove(uu)
        return False

    if not extend(0):
        return None

    # Flows carry no data beyond their endpoints, so any endpoint-respecting
    # bijection works; pair them off in sorted order per endpoint group.
    def flow_bijection(flows_a: Mapping[str, Flow], flows_b: Mapping[str, Flow], ends) -> Optional[dict[str, str]]:
        groups_a: dict[tuple[str, str], list[str]] = {}
        for fid in sorted(flows_a):
            f = flows_a[fid]
            groups_a.setdefault(ends(f), []).append(fid)
        groups_b: dict[tuple[str, str], list[str]] = {}
        for fid in sorted(flows_b):
            f = flows_b[fid]
            groups_b.setdefault((f.src, f.dst), []).append(fid)
        out: dict[str, str] = {}
        for key, ids in groups_a.items():
            target = groups_b.get(key)
            if target is None or len(target) != len(ids):
                return None
            out.update(zip(ids, target))
        return out

    f_i = flow_bijection(a.in_flows, b.in_flows, lambda f: (v_map[f.src], u_map[f.dst]))
    f_o = flow_bijection(a.out_flows, b.out_flows, lambda f: (u_map[f.src], v_map[f.dst]))
    if f_i is None or f_o is None:
        return None
    m = validate_morphism(a, b, v_map, u_map, f_i, f_o)
    if not is_mono(m):
        raise AssertionError("isomorphism witness must be mono")
    return m


def invert_iso(m: CircuitMorphism) -> CircuitMorphism:
    """Invert an isomorphism witness."""
    flip = lambda d: {v: k for k, v in d.items()}
    return validate_morphism(m.dst, m.src, flip(m.f_v), flip(m.f_u), flip(m.f_i), flip(m.f_o))
