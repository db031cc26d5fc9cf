"""Tests for tier design dispatch."""

from __future__ import annotations

import pytest

from fiberplan.geodata import GeoPoint, RoadGraph, Settlement, haversine_km
from fiberplan.netdesign import EmptyNodeSet, design_network


def _s(sid, lat, lon, pop=1000, region="R1", sub="R1-01"):
    return Settlement(sid, GeoPoint(lat, lon), pop, region, sub)


# Road along the equator with vertices every 0.25 degrees.
ROAD = RoadGraph(
    vertices=tuple(GeoPoint(0.0, 0.25 * i) for i in range(5)),
    edges=tuple(
        (i, i + 1, haversine_km(GeoPoint(0.0, 0.25 * i), GeoPoint(0.0, 0.25 * (i + 1))))
        for i in range(4)
    ),
)


class TestMstDesign:
    def test_three_nodes(self):
        nodes = [_s("root", 0.0, 0.0), _s("a", 0.0, 0.3), _s("b", 0.0, 0.6)]
        result = design_network("access", "mst", nodes, "root")
        assert result.design.algorithm == "MST"
        assert len(result.design.edges) == 2
        assert result.design.terminal_node_count == 3
        assert result.connected_settlements() == ["a", "b", "root"]
        # Chain along the equator: ~0.3 degrees per hop.
        assert result.design.total_length_km == pytest.approx(2 * 33.3585, abs=0.01)

    def test_root_not_counted_when_core(self):
        nodes = [_s("core", 0.0, 0.0), _s("a", 0.0, 0.3)]
        result = design_network(
            "regional", "mst", nodes, "core", count_root_as_terminal=False
        )
        assert result.design.terminal_node_count == 1

    def test_single_node_degenerates(self):
        result = design_network("access", "mst", [_s("only", 0.0, 0.0)], "only")
        assert result.design.edges == ()
        assert result.design.total_length_km == 0.0
        assert result.design.terminal_node_count == 1

    def test_errors(self):
        with pytest.raises(EmptyNodeSet):
            design_network("access", "mst", [], "root")
        with pytest.raises(ValueError, match="root"):
            design_network("access", "mst", [_s("a", 0, 0), _s("b", 1, 1)], "zzz")
        with pytest.raises(ValueError, match="level"):
            design_network("backbone", "mst", [_s("a", 0, 0), _s("b", 1, 1)], "a")
        with pytest.raises(ValueError, match="algorithm"):
            design_network("access", "spanner", [_s("a", 0, 0), _s("b", 1, 1)], "a")
        with pytest.raises(ValueError, match="duplicate"):
            design_network("access", "mst", [_s("a", 0, 0), _s("a", 1, 1)], "a")


class TestPcstDesign:
    def test_keeps_valuable_terminal_drops_cheap_one(self):
        # Root on the road's west end; "good" rides the road 27.8 km away
        # with plenty of users; "bad" sits mid-road with users worth less
        # than its spur.
        nodes = [
            _s("root", 0.0, 0.0),
            _s("good", 0.0, 1.0),
            _s("bad", 0.045, 0.5),  # ~5 km spur north of the road
        ]
        users = {"good": 200.0, "bad": 1.0}
        result = design_network(
            "access",
            "pcst",
            nodes,
            "root",
            roads=ROAD,
            node_users=users,
            snap_radius_km=10.0,
            prize_scale=1.0,
        )
        design = result.design
        connected = result.connected_settlements()
        assert "good" in connected
        assert "bad" not in connected
        assert design.total_penalty == pytest.approx(1.0)
        assert design.terminal_node_count == 2  # root + good
        # Full road length, no spur.
        assert design.total_length_km == pytest.approx(4 * 27.7988, abs=0.01)

    def test_requires_roads(self):
        nodes = [_s("a", 0, 0), _s("b", 0, 0.5)]
        with pytest.raises(ValueError, match="road"):
            design_network("access", "pcst", nodes, "a", node_users={"b": 5.0})

    def test_warns_beyond_snap(self):
        nodes = [_s("root", 0.0, 0.0), _s("far", 0.5, 0.5, pop=10)]
        result = design_network(
            "access",
            "pcst",
            nodes,
            "root",
            roads=ROAD,
            node_users={"far": 1e6},
            snap_radius_km=5.0,
        )
        assert any("far" in w for w in result.warnings)
        assert "far" in result.connected_settlements()

    def test_root_counting_flag(self):
        nodes = [_s("core", 0.0, 0.0), _s("t", 0.0, 1.0)]
        counted = design_network(
            "regional", "pcst", nodes, "core", roads=ROAD, node_users={"t": 1e4}
        )
        assert counted.design.terminal_node_count == 2
        uncounted = design_network(
            "regional",
            "pcst",
            nodes,
            "core",
            roads=ROAD,
            node_users={"t": 1e4},
            count_root_as_terminal=False,
        )
        assert uncounted.design.terminal_node_count == 1

    def test_determinism(self):
        nodes = [_s("root", 0.0, 0.0), _s("a", 0.0, 0.5), _s("b", 0.0, 1.0)]
        kw = dict(roads=ROAD, node_users={"a": 30.0, "b": 50.0})
        r1 = design_network("access", "pcst", nodes, "root", **kw)
        r2 = design_network("access", "pcst", nodes, "root", **kw)
        assert r1.design == r2.design
