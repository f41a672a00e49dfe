import copy
import itertools
import math

import pytest
import yaml
from hypothesis import given, settings, strategies as st

from sitcov.hyperspace import (ELEMENT_IDS, ConflictInteraction, Hyperspace, HyperspaceError,
                               EnvironmentalElement, IntersectionSituationLabel, Situation,
                               build_hyperspace, dump_hyperspace, load_config, make_situation,
                               resolve_label, situation_count)
from sitcov.simulator.geometry import build_geometry, check_interaction


def _config():
    return copy.deepcopy(load_config()[0])


class TestDefaultHyperspace:
    def test_shape(self, h):
        assert h.element_ids == ELEMENT_IDS
        assert all(e.n_bins == 6 for e in h.elements)
        assert len(h.labels) == 12
        assert len(set(h.label_names)) == 12

    def test_situation_count(self, h):
        # 6**8 * 12 by repeated multiplication
        n = 1
        for _ in range(8):
            n *= 6
        assert situation_count(h) == n * 12 == 20_155_392

    def test_friction_range(self, h):
        values = h.element("Friction").values
        assert min(values) == 0.1
        assert max(values) <= 1.0
        assert sorted(values) == [0.1, 0.28, 0.46, 0.64, 0.82, 1.0]

    def test_other_elements_use_intensity_scale(self, h):
        for e in h.elements[1:]:
            assert e.values == (0.0, 20.0, 40.0, 60.0, 80.0, 100.0)

    def test_resolve_known_rows(self, h):
        assert resolve_label(h, "IntSit-8") == ConflictInteraction("B", "R", "L", "R", "c1")
        assert resolve_label(h, "IntSit-10") == ConflictInteraction("R", "B", "B", "L", "c2")

    def test_resolve_unknown(self, h):
        with pytest.raises(HyperspaceError, match="unknown label"):
            resolve_label(h, "IntSit-99")

    def test_config_has_reconstructed_row_comments(self):
        raw = load_config()[1].decode()
        assert raw.lower().count("reconstructed") >= 3


class TestBuildErrors:
    def test_wrong_bin_count(self):
        cfg = _config()
        row = next(r for r in cfg["elements"] if r["name"] == "Precipitation")
        row["values"] = row["values"][:5]
        with pytest.raises(HyperspaceError, match="wrong bin count"):
            build_hyperspace(cfg)

    def test_missing_element(self):
        cfg = _config()
        cfg["elements"] = [r for r in cfg["elements"] if r["name"] != "Wetness"]
        with pytest.raises(HyperspaceError, match="missing element"):
            build_hyperspace(cfg)

    def test_duplicate_label(self):
        cfg = _config()
        cfg["intersections"][1]["label"] = cfg["intersections"][0]["label"]
        with pytest.raises(HyperspaceError, match="duplicate label"):
            build_hyperspace(cfg)

    def test_same_start_and_goal(self):
        cfg = _config()
        cfg["intersections"][0]["ov_goal"] = cfg["intersections"][0]["ov_start"]
        with pytest.raises(HyperspaceError, match="same leg"):
            build_hyperspace(cfg)

    def test_unordered_values(self):
        cfg = _config()
        cfg["elements"][1]["values"] = [0, 20, 20, 60, 80, 100]
        with pytest.raises(HyperspaceError, match="strictly ordered"):
            build_hyperspace(cfg)

    def test_friction_minimum(self):
        cfg = _config()
        cfg["elements"][0]["values"] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5]
        with pytest.raises(HyperspaceError, match="Friction"):
            build_hyperspace(cfg)

    def test_bad_conflict_point(self):
        cfg = _config()
        cfg["intersections"][0]["conflict_point"] = "c9"
        with pytest.raises(HyperspaceError, match="conflict point"):
            build_hyperspace(cfg)

    def test_label_count(self):
        cfg = _config()
        cfg["intersections"].pop()
        with pytest.raises(HyperspaceError, match="12"):
            build_hyperspace(cfg)


class TestSituationCount:
    @staticmethod
    def _small(n_elements, n_bins, n_labels):
        elements = tuple(EnvironmentalElement(f"e{i}", tuple(float(b) for b in range(n_bins)))
                         for i in range(n_elements))
        labels = tuple(IntersectionSituationLabel(f"L{i}", ConflictInteraction("B", "R", "L", "R", "c1"))
                       for i in range(n_labels))
        return Hyperspace(elements, labels)

    def test_one_element_one_label(self):
        assert situation_count(self._small(1, 6, 1)) == 6

    def test_no_labels(self):
        assert situation_count(self._small(8, 6, 0)) == 0

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 3))
    def test_matches_enumeration(self, n_elements, n_bins, n_labels):
        h = self._small(n_elements, n_bins, n_labels)
        axes = [range(e.n_bins) for e in h.elements] + [h.label_names]
        assert situation_count(h) == sum(1 for _ in itertools.product(*axes))


class TestRoundTrip:
    def test_dump_and_reload(self, h):
        assert build_hyperspace(yaml.safe_load(dump_hyperspace(h))) == h

    def test_situation_dict(self, h):
        s = make_situation(h, [0, 1, 2, 3, 4, 5, 0, 1], "IntSit-3")
        assert Situation.from_dict(s.to_dict()) == s

    def test_make_situation_rejects_bad_bin(self, h):
        with pytest.raises(HyperspaceError):
            make_situation(h, [0, 1, 2, 3, 4, 6, 0, 1], "IntSit-3")


class TestGeometryAgreement:
    def test_every_row_crosses_at_named_point(self, h):
        geom = build_geometry(interactions=h)
        for lab in h.labels:
            p = check_interaction(geom, lab.interaction)
            cp = geom.conflict_points[lab.interaction.conflict_point]
            assert math.dist(p, cp) <= 0.5, lab.label

    def test_wrong_conflict_point_rejected(self, h):
        geom = build_geometry()
        ci = resolve_label(h, "IntSit-8")
        bad = ConflictInteraction(ci.av_start, ci.av_goal, ci.ov_start, ci.ov_goal, "c3")
        with pytest.raises(ValueError, match="c3"):
            check_interaction(geom, bad)

    @settings(max_examples=30)
    @given(st.sampled_from(["L", "R", "B"]), st.sampled_from(["L", "R", "B"]))
    def test_paths_keep_right(self, start, goal):
        if start == goal:
            return
        geom = build_geometry()
        path = geom.path(start, goal)
        # first point sits on the inbound (right-hand) lane of its leg
        x, y = path.points[0]
        hw = geom.lane_width / 2
        expected = {"L": (-geom.leg_length, -hw), "R": (geom.leg_length, hw),
                    "B": (hw, -geom.leg_length)}[start]
        assert (x, y) == pytest.approx(expected)
