"""Deterministic DOT rendering of circuits.

Follows the diagram conventions used throughout this package's docs:
control flows dashed, Boolean flows solid; control variables square, Boolean
variables round; invars hollow, outvars filled, inoutvars grey; units are
small rectangles. Output is a pure function of the circuit (sorted ids),
with the legend embedded as comments.
"""

from __future__ import annotations

from .model import CTRL, Circuit

_LEGEND = [
    "// legend:",
    "//   box node           computation unit",
    "//   square/circle      control/Boolean variable",
    "//   white fill         invar (no incoming flows)",
    "//   black fill         outvar (no outgoing flows)",
    "//   grey fill          inoutvar (no flows at all)",
    "//   lightyellow fill   interior variable",
    "//   dashed/solid edge  control/Boolean flow",
]


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(c: Circuit) -> str:
    lines = ["digraph circuit {"]
    lines.extend("  " + line for line in _LEGEND)
    lines.append("  rankdir=LR;")
    for v in c.sorted_vars():
        tag = c.var_types[v]
        shape = "square" if tag is CTRL else "circle"
        if v in c.inoutvars:
            fill, font = "grey", "black"
        elif v in c.invars:
            fill, font = "white", "black"
        elif v in c.outvars:
            fill, font = "black", "white"
        else:
            fill, font = "lightyellow", "black"
        lines.append(
            f"  {_quote('var:' + v)} [label={_quote(v)} shape={shape} style=filled "
            f"fillcolor={fill} fontcolor={font}];"
        )
    for u in c.sorted_units():
        lines.append(f"  {_quote('unit:' + u)} [label={_quote(u)} shape=box style=filled fillcolor=white];")
    for fid in sorted(c.in_flows):
        f = c.in_flows[fid]
        style = "dashed" if c.var_types[f.src] is CTRL else "solid"
        lines.append(f"  {_quote('var:' + f.src)} -> {_quote('unit:' + f.dst)} [style={style} label={_quote(fid)}];")
    for fid in sorted(c.out_flows):
        f = c.out_flows[fid]
        style = "dashed" if c.var_types[f.dst] is CTRL else "solid"
        lines.append(f"  {_quote('unit:' + f.src)} -> {_quote('var:' + f.dst)} [style={style} label={_quote(fid)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
