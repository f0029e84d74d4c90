import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsmm import InterpolationSpec, StateSpace
from lsmm import io
from lsmm.errors import ModelFormatError, ValidationError
from lsmm.statespace import FrequencyResponse, ReducedModel

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.lists(finite, min_size=n * n, max_size=n * n), st.lists(finite, min_size=n, max_size=n),
    st.lists(finite, min_size=n, max_size=n))))
def test_model_round_trip_is_byte_identical(mats):
    a, b, c = mats
    n = len(b)
    sys = StateSpace(np.reshape(a, (n, n)), b, c)
    text = io.dumps(io.model_to_dict(sys))
    back = io.model_from_dict(json.loads(text))
    assert io.dumps(io.model_to_dict(back)) == text
    assert np.array_equal(back.A, sys.A)


def test_seventeen_digits():
    assert io.fmt(0.1) == "0.10000000000000001"
    assert io.dumps({"x": [1.0, 2, -0.0]}, indent=0) == '{"x": [1.0, 2, -0.0]}\n'
    assert io.dumps({"x": float("nan")}) == '{\n  "x": null\n}\n'


def test_reduced_model_keys():
    m = ReducedModel([[-1.0]], [2.0], [3.0])
    d = json.loads(io.dumps(io.model_to_dict(m)))
    assert set(d) == {"F", "G", "H"}
    back = io.model_from_dict({**d, "report": {}}, reduced=True)
    assert isinstance(back, ReducedModel) and back.G.item() == 2.0


@pytest.mark.parametrize("d", [{"A": [[1.0]]}, {"A": [[1.0, 2.0]], "B": [1.0], "C": [1.0]}, [1, 2]])
def test_bad_models(d):
    with pytest.raises(ModelFormatError):
        io.model_from_dict(d)


def test_spec_round_trip_and_completion():
    spec = io.spec_from_dict({"points": [{"re": 0.0, "im": 2.0, "order": 1}, {"re": -0.5}]})
    assert spec.completed and spec.nu == 5
    assert io.spec_from_dict(io.spec_to_dict(spec)) == InterpolationSpec(spec.points)
    with pytest.raises(ValidationError):
        io.spec_from_dict({"pts": []})


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError):
        io.load_json(str(p))


def test_response_csv_round_trip(tmp_path):
    resp = FrequencyResponse([0.1, 1.0], [1 + 2j, -0.5j])
    path = str(tmp_path / "r.csv")
    io.write_response_csv(path, resp)
    grid, vals = io.read_response_csv(path)
    assert np.array_equal(grid, resp.grid) and np.array_equal(vals, resp.values)
    assert open(path).readline().strip() == "omega,re,im,abs"
