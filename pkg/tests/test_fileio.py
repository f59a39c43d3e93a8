import json
from pathlib import Path

import numpy as np
import pytest

from orliczmeasure.errors import InvalidParameterError
from orliczmeasure.fileio import (
    dumps_json,
    fmt_float,
    read_density_field,
    read_star_body,
    to_jsonable,
    validate_schema,
    write_density_field,
    write_report,
    write_star_body,
)
from orliczmeasure.spaces import DensityField, DomainTag, MeasureSpace
from orliczmeasure.stargeo import random_star_body, sphere_grid

from conftest import positive_field, random_space


class TestFloatFormat:
    def test_seventeen_digits_round_trip(self, rng):
        for x in rng.uniform(-1e6, 1e6, size=200):
            assert float(fmt_float(x)) == x
        for x in (1e-300, 1e300, np.pi, 2.0 / 3.0):
            assert float(fmt_float(x)) == x


class TestFieldRoundTrip:
    def test_exact_round_trip(self, rng, tmp_path):
        space = random_space(rng, 64)
        f = positive_field(rng, space)
        path = tmp_path / "field.txt"
        write_density_field(path, f)
        g = read_density_field(path)
        assert np.array_equal(f.values, g.values)
        assert np.array_equal(f.space.weights, g.space.weights)
        assert np.array_equal(f.space.points, g.space.points)
        assert g.space.domain_tag is DomainTag.ABSTRACT

    def test_multidimensional_points(self, tmp_path, rng):
        pts = rng.normal(size=(32, 3))
        space = MeasureSpace(points=pts, weights=np.full(32, 0.25),
                             domain_tag=DomainTag.SPHERE)
        f = DensityField.infer(space, np.exp(rng.normal(size=32)))
        path = tmp_path / "f3.txt"
        write_density_field(path, f)
        g = read_density_field(path)
        assert np.array_equal(g.space.points, pts)
        assert g.space.domain_tag is DomainTag.SPHERE

    def test_wrong_format_rejected(self, tmp_path, rng):
        grid = sphere_grid(2, 16)
        body = random_star_body(grid, rng)
        path = tmp_path / "body.txt"
        write_star_body(path, body)
        with pytest.raises(InvalidParameterError):
            read_density_field(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# format=density dim=1\n")
        with pytest.raises(InvalidParameterError):
            read_density_field(path)


class TestBodyRoundTrip:
    @pytest.mark.parametrize("dim,res", [(2, 32), (3, 8)])
    def test_exact_round_trip(self, tmp_path, rng, dim, res):
        grid = sphere_grid(dim, res)
        body = random_star_body(grid, rng)
        path = tmp_path / "body.txt"
        write_star_body(path, body)
        back = read_star_body(path)
        assert np.array_equal(back.radial, body.radial)
        assert np.array_equal(back.grid.nodes, grid.nodes)
        assert np.array_equal(back.grid.sigma_weights, grid.sigma_weights)


class TestJson:
    def test_deterministic_and_sorted(self):
        a = dumps_json({"b": 1.5, "a": [1, 2.25], "c": {"y": True, "x": None}})
        b = dumps_json({"c": {"x": None, "y": True}, "a": [1, 2.25], "b": 1.5})
        assert a == b
        assert a.index('"a"') < a.index('"b"') < a.index('"c"')

    def test_parses_as_json(self):
        blob = dumps_json({"x": 1.0 / 3.0, "arr": [1e-300, 2.0], "s": "hi"})
        parsed = json.loads(blob)
        assert parsed["x"] == 1.0 / 3.0

    def test_non_finite_serializes_to_null(self):
        parsed = json.loads(dumps_json({"x": float("nan"), "y": float("inf")}))
        assert parsed["x"] is None and parsed["y"] is None

    def test_dataclass_and_enum_conversion(self):
        from orliczmeasure.divergence import Direction, make_inequality_report

        rep = make_inequality_report(2.0, 1.0, Direction.GE, False, seed=3)
        data = to_jsonable(rep)
        assert data["direction"] == ">="
        assert data["lhs"] == 2.0
        parsed = json.loads(dumps_json(rep))
        assert parsed["seed"] == 3


class TestReports:
    def test_write_report_outputs(self, tmp_path):
        summary = {"suite": "t", "version": "0", "seed": 1, "params": {},
                   "results": {"x": 0.5}, "passed": True}
        rows = [{"a": 1, "b": 0.5}, {"a": 2, "b": 1.5, "c": "note"}]
        paths = write_report(tmp_path, "demo", summary, rows)
        assert [p.name for p in paths] == ["demo.json", "demo.csv"]
        csv_lines = (tmp_path / "demo.csv").read_text().splitlines()
        assert csv_lines[0] == "a,b,c"
        assert len(csv_lines) == 3

    def test_byte_identical_reruns(self, tmp_path):
        summary = {"suite": "t", "version": "0", "seed": 1, "params": {"p": 2.0},
                   "results": {"vals": [1.0 / 3.0, 2.0 / 7.0]}, "passed": True}
        write_report(tmp_path / "one", "r", summary, [{"m": 0.1}])
        write_report(tmp_path / "two", "r", summary, [{"m": 0.1}])
        assert (tmp_path / "one" / "r.json").read_bytes() == \
            (tmp_path / "two" / "r.json").read_bytes()
        assert (tmp_path / "one" / "r.csv").read_bytes() == \
            (tmp_path / "two" / "r.csv").read_bytes()


class TestSchema:
    def schema(self):
        import orliczmeasure

        root = Path(orliczmeasure.__file__).parent
        return json.loads((root / "data" / "report.schema.json").read_text())

    def test_valid_summary_passes(self):
        summary = {"suite": "x", "version": "0.1.0", "seed": 0, "params": {},
                   "results": {}, "passed": True}
        assert validate_schema(summary, self.schema()) == []

    def test_missing_key_reported(self):
        summary = {"suite": "x", "version": "0.1.0", "seed": 0, "params": {},
                   "results": {}}
        problems = validate_schema(summary, self.schema())
        assert any("passed" in p for p in problems)

    def test_type_mismatch_reported(self):
        summary = {"suite": 3, "version": "0.1.0", "seed": 0, "params": {},
                   "results": {}, "passed": True}
        assert validate_schema(summary, self.schema())
