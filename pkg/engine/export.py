"""
Graph Export
============
DOT rendering of a blowup tower: one node per chart labeled
`id:center_of_birth:branch_var` (one-based, `-` for the root), one edge
per parent → child, nodes in id order.
"""

from jinja2 import Environment

from .charts import BlowupTower

DOT_TEMPLATE = """digraph tower {
  node [shape=box];
{% for node in nodes %}  c{{ node.id }} [label="{{ node.label }}"{% if node.leaf %}, style=bold{% endif %}];
{% endfor %}{% for parent, child in edges %}  c{{ parent }} -> c{{ child }};
{% endfor %}}
"""

_template = Environment(autoescape=False, keep_trailing_newline=True).from_string(DOT_TEMPLATE)


def _label(tower: BlowupTower, chart_id: int) -> str:
    chart = tower.chart(chart_id)
    center = "{" + ",".join(str(i + 1) for i in sorted(chart.center_of_birth)) + "}" if chart.center_of_birth else "-"
    branch = "-" if chart.branch_var is None else str(chart.branch_var + 1)
    return f"{chart_id}:{center}:{branch}"


def to_dot(tower: BlowupTower) -> str:
    ids = sorted(tower.charts)
    nodes = [{"id": c, "label": _label(tower, c), "leaf": tower.is_leaf(c)} for c in ids]
    edges = [(tower.charts[c].parent_id, c) for c in ids if tower.charts[c].parent_id is not None]
    return _template.render(nodes=nodes, edges=edges)
