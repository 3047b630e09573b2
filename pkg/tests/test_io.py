import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polydist import io
from polydist.optimizer import tau_r

from conftest import rand_poly


@pytest.mark.parametrize("text,value", [
    ("1", 1), ("-0.65", -0.65), ("2i", 2j), ("-i", -1j), ("i", 1j),
    ("-0.3+0.1i", -0.3 + 0.1j), ("1e-3-2.5e2i", 1e-3 - 250j), ("-0.3 + 0.1 i", -0.3 + 0.1j),
    (".5-i", 0.5 - 1j), ("+3", 3),
])
def test_parse_complex(text, value):
    assert io.parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "1+", "i2", "1+2", "1+2j", "abc", "1..2", "--1"])
def test_parse_complex_rejects(text):
    with pytest.raises(io.FormatError, match="mu"):
        io.parse_complex(text, "mu")


def test_parse_lists():
    assert list(io.parse_complex_list("-0.3+0.1i,-0.65")) == [-0.3 + 0.1j, -0.65]
    with pytest.raises(io.FormatError, match=r"targets\[1\]"):
        io.parse_complex_list("1,x")
    assert io.parse_real_list("0.1, 0.2,0.3") == [0.1, 0.2, 0.3]
    with pytest.raises(io.FormatError):
        io.parse_real_list(",")


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_roundtrips(x):
    assert json.loads(io.dumps([x]))[0] == x


def test_seventeen_digits():
    assert io.dumps(0.1) == "0.10000000000000001"
    assert io.dumps(1.0) == "1.0"
    assert io.dumps({"a": [1, True, None, "s"]}) == '{\n "a": [1, true, null, "s"]\n}'


def test_poly_roundtrip_is_bit_exact(tmp_path):
    P = rand_poly(3, 3, 2)
    path = tmp_path / "p.json"
    io.write_poly(P, path)
    Q = io.read_poly(path)
    assert Q == P
    data = json.loads(path.read_text())
    assert data["n"] == 3 and data["m"] == 2 and len(data["coeffs"]) == 3
    assert len(data["coeffs"][0][0][0]) == 2


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.pop("n"), "n"),
    (lambda d: d.update(m=0), "m"),
    (lambda d: d["coeffs"].pop(), "coeffs"),
    (lambda d: d["coeffs"][1][0].pop(), r"coeffs\[1\]\[0\]"),
    (lambda d: d["coeffs"][0][1].__setitem__(0, [1.0]), r"coeffs\[0\]\[1\]\[0\]"),
    (lambda d: d["coeffs"].__setitem__(2, [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]), r"coeffs\[2\]"),
])
def test_poly_errors_name_the_field(mutate, field):
    d = io.poly_to_dict(rand_poly(1, 2, 2))
    mutate(d)
    with pytest.raises(io.FormatError, match=field):
        io.poly_from_dict(d)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(io.FormatError, match="poly"):
        io.read_poly(path)


def test_report_roundtrip(tmp_path):
    P = rand_poly(2, 3, 2)
    rep = tau_r(P, [0.1, -0.5j], 2)
    d = io.report_to_dict(rep, P)
    path = tmp_path / "r.json"
    io.write_json(d, path)
    back = json.loads(path.read_text())
    assert back == d
    assert back["tau"] == rep.tau
    assert np.array_equal(io.read_complex_matrix(back["delta"], 3, "delta"), rep.delta)
    assert back["poly_sha256"] == io.poly_digest(P)
    assert len(back["per_mu_table"]) == 3
