# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Tests for surface and point files and report encoding."""

import json
from fractions import Fraction

import pytest

from fano_congruence import __version__
from fano_congruence.error_handling import SurfaceFileError
from fano_congruence.forms import Backend
from fano_congruence.local import CaseTag
from fano_congruence.surface_file import (
    SCHEMA,
    SurfaceFile,
    decode_scalar,
    dumps,
    encode_scalar,
    load_point,
    load_surface,
    point_from_dict,
    point_to_dict,
    report,
    save_surface,
    to_jsonable,
)

from .planted import cusp_quintic, disjoint_quartic


def quartic_data(**changes):
    data = {
        "degree": 4,
        "backend": "exact",
        "coefficients": [
            {"exponents": [2, 2, 0, 0], "value": "1"},
            {"exponents": [3, 0, 1, 0], "value": "-3/2"},
        ],
    }
    data.update(changes)
    return data


class TestSurfaceFile:
    """Parsing of surface files."""

    def test_parse_exact(self):
        """Test rational values are read exactly."""
        parsed = SurfaceFile.parse(quartic_data())
        Y = parsed.to_surface()
        assert Y.backend is Backend.EXACT
        assert Y.form.coefficient((3, 0, 1, 0)) == Fraction(-3, 2)

    def test_parse_float(self):
        """Test complex values given as {re, im} objects."""
        data = quartic_data(
            backend="float",
            coefficients=[{"exponents": [4, 0, 0, 0], "value": {"re": 1.5, "im": -2.0}}],
        )
        Y = SurfaceFile.parse(data).to_surface()
        assert Y.form.coefficient((4, 0, 0, 0)) == complex(1.5, -2.0)

    def test_exponent_sum(self):
        """Test the entry whose exponents do not sum to the degree is named."""
        data = quartic_data()
        data["coefficients"].append({"exponents": [1, 1, 1, 0], "value": "2"})
        with pytest.raises(SurfaceFileError) as excinfo:
            SurfaceFile.parse(data)
        assert excinfo.value.entry == 2

    def test_duplicate_monomial(self):
        """Test a repeated monomial is rejected."""
        data = quartic_data()
        data["coefficients"].append({"exponents": [2, 2, 0, 0], "value": "5"})
        with pytest.raises(SurfaceFileError) as excinfo:
            SurfaceFile.parse(data)
        assert excinfo.value.entry == 2
        assert "repeat entry 0" in str(excinfo.value)

    @pytest.mark.parametrize(
        "changes",
        [
            {"backend": "decimal"},
            {"degree": "four"},
            {"degree": True},
            {"coefficients": {"exponents": [4, 0, 0, 0]}},
        ],
    )
    def test_malformed(self, changes):
        """Test malformed top-level fields."""
        with pytest.raises(SurfaceFileError):
            SurfaceFile.parse(quartic_data(**changes))

    def test_exact_values_must_be_strings(self):
        """Test floats are refused by the exact backend."""
        with pytest.raises(SurfaceFileError):
            decode_scalar(0.5, Backend.EXACT, 0)
        with pytest.raises(SurfaceFileError):
            decode_scalar("1/0", Backend.EXACT, 0)

    def test_save_and_load(self, tmp_path):
        """Test a saved surface loads back unchanged."""
        Y, _ = cusp_quintic()
        path = tmp_path / "quintic.json"
        save_surface(Y, path)
        assert json.loads(path.read_text())["schema"] == SCHEMA
        assert (load_surface(path).form - Y.form).is_zero()

    def test_missing_file(self, tmp_path):
        """Test a missing file is reported."""
        with pytest.raises(SurfaceFileError, match="not found"):
            load_surface(tmp_path / "absent.json")

    def test_bad_json(self, tmp_path):
        """Test unreadable JSON is reported."""
        path = tmp_path / "broken.json"
        path.write_text("{degree: 4")
        with pytest.raises(SurfaceFileError, match="not valid JSON"):
            load_surface(path)


class TestPointFile:
    """Fano point files."""

    def test_point_dict(self, tmp_path):
        """Test a point written to disk reads back with the same forms."""
        _, P = cusp_quintic()
        path = tmp_path / "point.json"
        path.write_text(json.dumps(point_to_dict(P)))
        loaded = load_point(path)
        assert loaded.g.coeffs == P.g.coeffs
        assert loaded.h.coeffs == P.h.coeffs
        assert loaded.degree == 5

    def test_g_needs_three_coefficients(self):
        """Test that g must be a binary quadric."""
        data = point_to_dict(disjoint_quartic()[1])
        data["g"] = ["1", "0"]
        with pytest.raises(SurfaceFileError, match="'g'"):
            point_from_dict(data)

    def test_empty_h(self):
        """Test that h needs a coefficient."""
        data = point_to_dict(disjoint_quartic()[1])
        data["h"] = []
        with pytest.raises(SurfaceFileError):
            point_from_dict(data)


class TestReportEncoding:
    """JSON-safe encoding of reports."""

    def test_scalars(self):
        """Test rationals, integers and complex numbers."""
        assert encode_scalar(Fraction(3, 4)) == "3/4"
        assert encode_scalar(7) == "7"
        assert encode_scalar(1 - 2j) == {"re": 1.0, "im": -2.0}

    def test_nested(self):
        """Test enums, tuples and dataclasses inside a report."""
        _, P = disjoint_quartic()
        encoded = to_jsonable({"tag": CaseTag.CASE_1_1, "pair": (1, 2.5), "point": P})
        assert encoded["tag"] == "1-1"
        assert encoded["pair"] == [1, 2.5]
        assert encoded["point"]["g"] == ["0", "1", "0"]
        assert "schema" not in encoded["point"]
        json.loads(dumps(encoded))

    def test_report_schema(self):
        """Test the report envelope."""
        body = report("bidegree", {"order": 12}, {"seed": 0})
        assert body["schema"] == "fano-congruence/1/bidegree"
        assert body["tool_version"] == __version__
        assert body["config"] == {"seed": 0}
        assert body["order"] == 12
