import math

import numpy as np
import pytest

from trudinger import io
from trudinger.fields import RadialGrid, Trace
from trudinger.geometry import ModelManifold
from trudinger.verify import CheckResult


@pytest.mark.parametrize("value, text", [
    (None, ""),
    (True, "true"),
    (3, "3"),
    (np.int64(7), "7"),
    (0.1, "0.10000000000000001"),
    (math.inf, "inf"),
    (-math.inf, "-inf"),
    (math.nan, "nan"),
    ("abc", "abc"),
])
def test_fmt(value, text):
    assert io.fmt(value) == text


def test_fmt_round_trips():
    x = np.random.default_rng(1).standard_normal(100) * 10.0 ** np.arange(-50, 50)
    assert all(float(io.fmt(v)) == v for v in x)


def test_atomic_write(tmp_path):
    path = tmp_path / "sub" / "a.txt"
    io.write_text_atomic(path, "x\ny\n")
    assert path.read_bytes() == b"x\ny\n"
    io.write_text_atomic(path, "z\n")
    assert path.read_text() == "z\n"
    assert [p.name for p in path.parent.iterdir()] == ["a.txt"]


def test_trace_csv():
    grid = RadialGrid(ModelManifold.euclidean(1), 1.6, 16)
    tr = Trace(grid, [0.0, 1.0], np.vstack([np.ones(16), np.zeros(16)]), 2.0)
    lines = io.trace_csv(tr).splitlines()
    assert lines[0] == "t,r,u"
    assert len(lines) == 33
    assert lines[1] == "0,0.050000000000000003,1"


def test_checks_csv_sorted_and_quoted():
    results = [
        CheckResult("b", 2.0, 1.0, 2.0, 0.0, {"x": 1}),
        CheckResult("a", 3.0, 3.0, 2.0, 0.0, {"note": 'q"uote,comma'}),
        CheckResult("b", 1.0, 1.0, 2.0, 0.0),
    ]
    lines = io.checks_csv(results).splitlines()
    assert lines[0] == "check,t,lhs,rhs,margin,pass,context"
    assert lines[1].startswith("a,3,3,2,-1,false,")
    assert lines[1].endswith('"note=q""uote,comma"')
    assert lines[2].startswith("b,1,")
    assert lines[3] == "b,2,1,2,1,true,x=1"


def test_read_profile_csv(tmp_path):
    f = tmp_path / "s.csv"
    f.write_text("r,S\n0,0\n1,1\n2,4\n")
    r, S = io.read_profile_csv(f)
    np.testing.assert_array_equal(r, [0, 1, 2])
    np.testing.assert_array_equal(S, [0, 1, 4])
    f.write_text("0,0\n1,x\n")
    with pytest.raises(ValueError):
        io.read_profile_csv(f)
