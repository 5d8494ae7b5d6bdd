"""Interchange renderings: DOT graphs, plain-text tables, result documents."""

from __future__ import annotations

import importlib.resources
import json

import jsonschema

from .errors import ConsistencyError
from .influence import AlterationResult, ConflictMatrix, PIExplanation, PIGraph, ORIENTATION

PROPONENT_COLOR = "green"
OPPONENT_COLOR = "red"
SUPPORT_COLOR = "green"
ATTACK_COLOR = "red"


def emit_dot(g: PIGraph, e: PIExplanation, *, weight_labels: bool = True) -> str:
    """Render the influence graph as a Graphviz digraph.

    Vertices and edges are listed in feature-index order so output is
    deterministic; edge labels carry the influence entry to 2 decimals.
    """
    if g.feature_names != e.feature_names:
        raise ConsistencyError(
            f"graph features {g.feature_names} differ from explanation features {e.feature_names}"
        )
    opponents = set(g.opponents)
    lines = ["digraph peer_influence {", "  rankdir=LR;"]
    for i, name in enumerate(g.feature_names):
        color = OPPONENT_COLOR if i in opponents else PROPONENT_COLOR
        lines.append(f'  n{i} [label="{name}", color={color}, fontcolor={color}];')
    attack = set(g.attack_arcs)
    for i in range(g.m):
        for j in range(g.m):
            if i == j:
                continue
            color = ATTACK_COLOR if (i, j) in attack else SUPPORT_COLOR
            attrs = [f"color={color}"]
            if weight_labels:
                attrs.append(f'label="{e.matrix[i, j]:.2f}"')
            lines.append(f"  n{i} -> n{j} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_table(r: AlterationResult, names, proponents, *, title: str = "ALT") -> str:
    """Plain-text alteration table: index, name, side, row sum, selection."""
    names = tuple(names)
    if len(names) != r.row_sums.shape[0]:
        raise ConsistencyError(
            f"{len(names)} names given for {r.row_sums.shape[0]} row sums"
        )
    proponents = set(proponents)
    rows = r.restricted_to if r.restricted_to is not None else range(len(names))
    width = max(len(n) for n in names)
    out = [f"{title} row sums", f"{'i':>3}  {'feature':<{width}}  side  {'row sum':>9}"]
    for i in rows:
        side = "P" if i in proponents else "O"
        mark = "  *" if i in r.selected else ""
        out.append(f"{i + 1:>3}  {names[i]:<{width}}  {side:<4}  {r.row_sums[i]:>9.2f}{mark}")
    out.append(f"selected: {', '.join(names[i] for i in r.selected)}")
    return "\n".join(out) + "\n"


def build_result_document(
    pi: PIExplanation,
    g: PIGraph,
    c: ConflictMatrix,
    alt_result: AlterationResult,
    calt_result: AlterationResult,
) -> dict:
    names = list(pi.feature_names)

    def alteration(res: AlterationResult) -> dict:
        return {
            "row_sums": [float(v) for v in res.row_sums],
            "selected": [names[i] for i in res.selected],
            "restricted_to": None
            if res.restricted_to is None
            else [names[i] for i in res.restricted_to],
        }

    return {
        "feature_names": names,
        "baseline": pi.baseline.to_dict(),
        "influence": {
            "orientation": ORIENTATION,
            "matrix": [[float(v) for v in row] for row in pi.matrix],
        },
        "conflict": {
            "zero_policy": c.zero_policy,
            "matrix": [[int(v) for v in row] for row in c.matrix],
        },
        "graph": {
            "proponents": [names[i] for i in g.proponents],
            "opponents": [names[i] for i in g.opponents],
            "support_arcs": [[i, j] for i, j in g.support_arcs],
            "attack_arcs": [[i, j] for i, j in g.attack_arcs],
        },
        "alt": alteration(alt_result),
        "calt": alteration(calt_result),
    }


def render_document(doc: dict) -> str:
    """Canonical text form; serialise -> parse -> serialise is the identity."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit_result_document(pi, g, c, alt_result, calt_result) -> str:
    doc = build_result_document(pi, g, c, alt_result, calt_result)
    validate_result_document(doc)
    return render_document(doc)


def result_document_schema() -> dict:
    text = (
        importlib.resources.files("peerinfluence")
        .joinpath("schemas/result.schema.json")
        .read_text(encoding="utf-8")
    )
    return json.loads(text)


def validate_result_document(doc: dict) -> None:
    jsonschema.validate(doc, result_document_schema())


def parse_result_document(text: str) -> dict:
    doc = json.loads(text)
    validate_result_document(doc)
    return doc
