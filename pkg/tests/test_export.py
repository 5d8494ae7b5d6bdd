import json
import re

import numpy as np
import pytest

from peerinfluence import ConsistencyError, alt, calt, conflict_matrix, pi_graph
from peerinfluence.export import (
    build_result_document,
    emit_dot,
    emit_result_document,
    emit_table,
    parse_result_document,
    render_document,
    validate_result_document,
)

from . import cases

_NODE = re.compile(r'^(n\d+) \[label="([^"]*)", color=(\w+), fontcolor=(\w+)\];$')
_EDGE = re.compile(r'^(n\d+) -> (n\d+) \[color=(\w+)(?:, label="(-?\d+\.\d{2})")?\];$')


def check_dot(text: str):
    """Minimal DOT digraph grammar check; returns (nodes, edges)."""
    lines = text.strip().splitlines()
    assert lines[0] == "digraph peer_influence {"
    assert lines[-1] == "}"
    nodes = {}
    edges = []
    for line in lines[1:-1]:
        line = line.strip()
        if line.startswith("rankdir"):
            continue
        node = _NODE.match(line)
        edge = _EDGE.match(line)
        assert node or edge, f"line does not parse as DOT: {line!r}"
        if node:
            nodes[node.group(1)] = {"label": node.group(2), "color": node.group(3)}
        else:
            edges.append(
                {
                    "src": edge.group(1),
                    "dst": edge.group(2),
                    "color": edge.group(3),
                    "label": edge.group(4),
                }
            )
    for e in edges:
        assert e["src"] in nodes and e["dst"] in nodes
    return nodes, edges


@pytest.fixture
def case1():
    pi = cases.case1_pi()
    g = pi_graph(pi)
    c = conflict_matrix(pi, "inclusive")
    return pi, g, c, alt(pi), calt(c)


class TestDot:
    def test_case1_structure(self, case1):
        pi, g, *_ = case1
        nodes, edges = check_dot(emit_dot(g, pi))
        assert len(nodes) == 5
        assert len(edges) == 20
        red_nodes = [n for n in nodes.values() if n["color"] == "red"]
        assert len(red_nodes) == 2
        assert {n["label"] for n in red_nodes} == {"Weight", "N Best"}

    def test_edge_colors_match_arc_partition(self, case1):
        pi, g, *_ = case1
        nodes, edges = check_dot(emit_dot(g, pi))
        attack = {(int(e["src"][1:]), int(e["dst"][1:])) for e in edges if e["color"] == "red"}
        assert attack == set(g.attack_arcs)

    def test_edge_labels_two_decimals(self, case1):
        pi, g, *_ = case1
        _, edges = check_dot(emit_dot(g, pi))
        for e in edges:
            i, j = int(e["src"][1:]), int(e["dst"][1:])
            assert e["label"] == f"{pi.matrix[i, j]:.2f}"

    def test_no_weight_labels(self, case1):
        pi, g, *_ = case1
        _, edges = check_dot(emit_dot(g, pi, weight_labels=False))
        assert all(e["label"] is None for e in edges)

    def test_deterministic(self, case1):
        pi, g, *_ = case1
        assert emit_dot(g, pi) == emit_dot(g, pi)

    def test_all_proponents_no_red(self):
        pi = cases.make_pi(("a", "b"), np.zeros((2, 2)), (1.0, 2.0))
        g = pi_graph(pi)
        nodes, _ = check_dot(emit_dot(g, pi))
        assert all(n["color"] == "green" for n in nodes.values())

    def test_name_mismatch_is_consistency_error(self, case1):
        pi, _, *_ = case1
        other = cases.make_pi(("x", "y"), np.zeros((2, 2)), (1.0, -1.0))
        with pytest.raises(ConsistencyError):
            emit_dot(pi_graph(other), pi)


class TestTable:
    def test_case2_alt_table(self):
        pi = cases.case2_pi()
        g = pi_graph(pi)
        text = emit_table(alt(pi), pi.feature_names, g.proponents)
        lines = text.strip().splitlines()
        assert len(lines) == 2 + 7 + 1  # title, header, rows, selection line
        assert any("M Best" in line and "*" in line for line in lines)
        assert lines[-1] == "selected: M Best"

    def test_single_row_when_masked(self):
        pi = cases.case2_pi()
        g = pi_graph(pi)
        result = alt(pi, controllable_mask=(1,))
        text = emit_table(result, pi.feature_names, g.proponents)
        body = [l for l in text.splitlines() if re.match(r"^\s*\d", l)]
        assert len(body) == 1
        assert "Weight" in body[0]

    def test_tie_set_all_flagged(self):
        pi = cases.make_pi(("a", "b", "c"), np.zeros((3, 3)), (1.0, -1.0, 1.0))
        g = pi_graph(pi)
        text = emit_table(alt(pi), pi.feature_names, g.proponents)
        flagged = [l for l in text.splitlines() if l.endswith("*")]
        assert len(flagged) == 3

    def test_length_mismatch(self):
        pi = cases.case1_pi()
        with pytest.raises(ConsistencyError):
            emit_table(alt(pi), ("only", "two"), ())


class TestResultDocument:
    def test_canonical_round_trip(self, case1):
        text = emit_result_document(*case1)
        doc = parse_result_document(text)
        assert render_document(doc) == text

    def test_orientation_tag(self, case1):
        doc = build_result_document(*case1)
        assert doc["influence"]["orientation"] == "rows-influence-columns"

    def test_schema_validation_accepts_fixture(self, case1):
        validate_result_document(build_result_document(*case1))

    def test_schema_validation_rejects_damage(self, case1):
        doc = build_result_document(*case1)
        doc["influence"]["orientation"] = "columns-influence-rows"
        with pytest.raises(Exception):
            validate_result_document(doc)

    def test_numbers_survive_json_exactly(self, case1):
        pi, *_ = case1
        text = emit_result_document(*case1)
        doc = json.loads(text)
        matrix = np.array(doc["influence"]["matrix"])
        assert np.array_equal(matrix, pi.matrix)

    def test_selected_names_in_document(self, case1):
        doc = build_result_document(*case1)
        assert doc["alt"]["selected"] == ["M Best"]
        assert set(doc["calt"]["selected"]) == set(cases.CASE1_CALT_SELECTED)

    def test_frontend_fixture_in_sync(self, case1):
        # the browser console's tests consume this exact document
        from pathlib import Path

        fixture = Path(__file__).resolve().parent.parent / "frontend/test/fixtures/case1_result.json"
        assert fixture.read_text(encoding="utf-8") == emit_result_document(*case1)
