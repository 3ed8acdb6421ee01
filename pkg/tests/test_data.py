import json
import math

import numpy as np
import pytest

from esl.data import (
    NormalizationSpec,
    SyntheticSpec,
    apply_normalization,
    build_mnist8,
    gen_synthetic,
    load_csv,
    load_model,
    load_model_document,
    normalize,
    save_csv,
    save_model,
)
from esl.errors import CsvParseError, InvalidInputError, ModelSchemaError
from esl.model import Dataset, Hypergraph, Simplicial

from oracles import random_simplicial


class TestLoadCsv:
    def test_plain_numeric_rows(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n5.5,6.5\n")
        data = load_csv(str(path))
        assert data.dim == 2 and data.n_samples == 3
        assert data.labels is None
        assert data.points[:, 2].tolist() == [5.5, 6.5]

    def test_header_detected_and_labels_parsed(self, tmp_path):
        path = tmp_path / "labeled.csv"
        path.write_text("x,y,label\n1.0,2.0,0\n3.0,4.0,1\n")
        data = load_csv(str(path), has_labels=True)
        assert data.dim == 2 and data.n_samples == 2
        assert data.labels.tolist() == [0, 1]

    def test_ragged_row_names_the_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(CsvParseError, match="row 2"):
            load_csv(str(path))

    def test_non_numeric_cell_names_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(CsvParseError, match="row 2, column 2"):
            load_csv(str(path))

    def test_fractional_label_rejected(self, tmp_path):
        path = tmp_path / "fraclab.csv"
        path.write_text("1.0,0.5\n2.0,1.5\n")
        with pytest.raises(CsvParseError, match="integer"):
            load_csv(str(path), has_labels=True)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CsvParseError):
            load_csv(str(tmp_path / "nope.csv"))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(CsvParseError):
            load_csv(str(path))

    def test_round_trip_with_save(self, tmp_path):
        rng = np.random.default_rng(0)
        data = Dataset(rng.normal(size=(3, 7)), labels=rng.integers(0, 3, 7))
        path = tmp_path / "rt.csv"
        save_csv(data, str(path))
        back = load_csv(str(path), has_labels=True)
        assert np.array_equal(back.points, data.points)
        assert np.array_equal(back.labels, data.labels)


class TestNormalization:
    def test_minmax_maps_range(self):
        data = Dataset(np.array([[2.0, 3.0, 4.0]]))
        normed, spec = normalize(data)
        assert normed.points[0].tolist() == [0.0, 0.5, 1.0]
        assert spec.mode == "minmax"

    def test_constant_feature_maps_to_zero(self):
        data = Dataset(np.array([[1.0, 1.0], [0.0, 2.0]]))
        normed, spec = normalize(data)
        assert np.all(normed.points[0] == 0.0)
        back = spec.inverse(normed.points)
        assert np.allclose(back, data.points, atol=1e-12)

    def test_round_trip_within_tolerance(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(scale=40.0, size=(4, 30)) + 17.0
        for mode in ("minmax", "zscore"):
            normed, spec = normalize(Dataset(pts), mode=mode)
            back = spec.inverse(normed.points)
            assert np.abs((back - pts) / np.maximum(np.abs(pts), 1e-9)).max() < 1e-9

    def test_apply_to_new_data_can_leave_unit_box(self):
        train = Dataset(np.array([[0.0, 10.0]]))
        _, spec = normalize(train)
        fresh = apply_normalization(spec, Dataset(np.array([[20.0]])))
        assert fresh.points[0, 0] == pytest.approx(2.0)

    def test_dimension_mismatch_rejected(self):
        _, spec = normalize(Dataset(np.zeros((2, 3))))
        with pytest.raises(InvalidInputError):
            apply_normalization(spec, Dataset(np.zeros((3, 3))))


class TestSyntheticGenerators:
    def test_deterministic_and_balanced(self):
        spec = SyntheticSpec("half-kernel", 120, noise=0.1, seed=9)
        a = gen_synthetic(spec)
        b = gen_synthetic(spec)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)
        assert np.bincount(a.labels).tolist() == [120, 120]
        assert a.dim == 2

    @pytest.mark.parametrize(
        "kind,classes",
        [
            ("cluster-in-cluster", 2),
            ("two-spirals", 2),
            ("half-kernel", 2),
            ("crescent-full-moon", 2),
            ("corners", 4),
            ("outliers", 4),
        ],
    )
    def test_class_counts(self, kind, classes):
        data = gen_synthetic(SyntheticSpec(kind, 50, seed=3))
        assert len(np.unique(data.labels)) == classes
        assert data.n_samples == 50 * classes

    def test_spiral_radius_tracks_angle(self):
        data = gen_synthetic(SyntheticSpec("two-spirals", 400, noise=0.0, seed=4))
        pts = data.points[:, data.labels == 0]
        radius = np.linalg.norm(pts, axis=0)
        growth = 3.0 / (3.0 * math.pi)
        theta = radius / growth
        angle = np.arctan2(pts[1], pts[0])
        wrapped = np.mod(theta, 2.0 * math.pi)
        diff = np.abs(np.angle(np.exp(1j * (angle - wrapped))))
        assert diff.max() < 1e-9

    def test_cluster_in_cluster_radially_separated(self):
        data = gen_synthetic(SyntheticSpec("cluster-in-cluster", 300, noise=0.0, seed=5))
        r_inner = np.linalg.norm(data.points[:, data.labels == 0], axis=0)
        r_outer = np.linalg.norm(data.points[:, data.labels == 1], axis=0)
        assert r_inner.max() < r_outer.min()

    def test_corners_live_in_their_quadrant_family(self):
        data = gen_synthetic(SyntheticSpec("corners", 200, noise=0.0, seed=6))
        # every class occupies exactly one quadrant
        for label in range(4):
            pts = data.points[:, data.labels == label]
            signs = {(float(np.sign(x)), float(np.sign(y))) for x, y in pts.T}
            assert len(signs) == 1

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidInputError, match="two-spirals"):
            SyntheticSpec("moons", 10)


class TestMnist8:
    def source(self):
        rng = np.random.default_rng(7)
        return Dataset(rng.uniform(0.0, 1.0, size=(64, 20)))

    def test_pale_copies_are_exactly_scaled(self):
        src = self.source()
        out = build_mnist8(src, scale=0.25)
        assert out.n_samples == 40
        assert np.bincount(out.labels).tolist() == [20, 20]
        bright = out.points[:, out.labels == 1]
        pale = out.points[:, out.labels == 0]
        assert np.array_equal(pale, bright * 0.25)

    def test_pairs_are_collinear_with_origin(self):
        out = build_mnist8(self.source(), scale=0.25)
        bright = out.points[:, out.labels == 1]
        pale = out.points[:, out.labels == 0]
        cross = np.linalg.norm(pale - 0.25 * bright, axis=0)
        assert cross.max() == 0.0

    @pytest.mark.parametrize("scale", [0.0, 1.0, 1.5, -0.25])
    def test_scale_out_of_range_rejected(self, scale):
        with pytest.raises(InvalidInputError):
            build_mnist8(self.source(), scale=scale)

    def test_pixels_out_of_range_rejected(self):
        bad = Dataset(np.full((4, 3), 2.0))
        with pytest.raises(InvalidInputError):
            build_mnist8(bad)


class TestModelPersistence:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(8)
        s = random_simplicial(rng, dim=3, max_edges=4)
        spec = NormalizationSpec("minmax", rng.normal(size=3), rng.uniform(1, 2, size=3))
        path = tmp_path / "model.json"
        save_model(s, str(path), normalization=spec, meta={"beta": 0.07, "gamma": 12.0, "seed": 5})
        loaded, norm, meta = load_model_document(str(path))
        assert loaded.structurally_equal(s)
        assert norm.mode == "minmax"
        assert np.allclose(norm.offset, spec.offset, atol=0)
        assert np.allclose(norm.scale, spec.scale, atol=1e-15)
        assert meta == {"beta": 0.07, "gamma": 12.0, "seed": 5}

    def test_load_model_returns_simplicial(self, tmp_path):
        s = Simplicial(np.array([[0.0, 1.0], [0.0, 0.0]]), Hypergraph(((0, 1),), 2))
        path = tmp_path / "seg.json"
        save_model(s, str(path))
        assert load_model(str(path)).structurally_equal(s)

    def write_doc(self, tmp_path, doc):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        return str(path)

    def test_out_of_range_hyperedge_index(self, tmp_path):
        doc = {"dim": 2, "vertices": [[0.0, 0.0]], "hyperedges": [[0, 3]]}
        with pytest.raises(ModelSchemaError, match="hyperedges"):
            load_model(self.write_doc(tmp_path, doc))

    def test_empty_hyperedge_list(self, tmp_path):
        doc = {"dim": 2, "vertices": [[0.0, 0.0]], "hyperedges": []}
        with pytest.raises(ModelSchemaError, match="hyperedges"):
            load_model(self.write_doc(tmp_path, doc))

    def test_missing_field_named(self, tmp_path):
        doc = {"dim": 2, "vertices": [[0.0, 0.0]]}
        with pytest.raises(ModelSchemaError, match="hyperedges"):
            load_model(self.write_doc(tmp_path, doc))

    def test_wrong_vertex_width_named(self, tmp_path):
        doc = {"dim": 2, "vertices": [[0.0]], "hyperedges": [[0]]}
        with pytest.raises(ModelSchemaError, match="vertices"):
            load_model(self.write_doc(tmp_path, doc))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ModelSchemaError, match="JSON"):
            load_model(str(path))
