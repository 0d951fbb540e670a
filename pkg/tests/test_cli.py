import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from lrdentropy import ARFIMA, DIVERGENT, FGN, Failure, Table, from_csv, from_json, to_csv, to_json
from lrdentropy.cli import SpecSyntaxError, format_spec, parse_grid, parse_spec, run


def invoke(*argv, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err, environ=environ or {})
    return code, out.getvalue(), err.getvalue()


# --- spec grammar -----------------------------------------------------------

def test_parse_spec_examples():
    assert parse_spec("fgn:H=0.8,var=1") == FGN(0.8, 1.0)
    assert parse_spec("fgn:H=0.3") == FGN(0.3)
    assert parse_spec("arfima:d=0.3,ar=[0.5],ma=[],ivar=1") == ARFIMA(0.3, (0.5,), (), 1.0)
    assert parse_spec("arfima:d=-0.1,ar=[0.5, -0.2],ma=[0.3],ivar=2") == ARFIMA(-0.1, (0.5, -0.2), (0.3,), 2.0)
    assert parse_spec("arfima:d=0.3,ivar=1") == ARFIMA(0.3)


@pytest.mark.parametrize("text", [
    "fgn", "fgn:var=1", "fgn:H=0.8,H=0.7", "fgn:H=abc", "fgn:H=1.2", "fgn:H=0.5,d=0.1", "gauss:H=0.5",
    "arfima:ar=[0.5]", "arfima:d=0.3,ar=[0.5", "arfima:d=0.3,ar=0.5", "arfima:d=0.1,ar=[1.5]", "fgn:H=nan",
])
def test_parse_spec_rejects(text):
    with pytest.raises(SpecSyntaxError):
        parse_spec(text)


@given(st.floats(min_value=-0.49, max_value=0.49),
       st.lists(st.floats(min_value=-0.3, max_value=0.3), max_size=2),
       st.lists(st.floats(min_value=-0.3, max_value=0.3), max_size=2),
       st.floats(min_value=1e-3, max_value=1e3))
def test_spec_grammar_round_trip(d, ar, ma, ivar):
    spec = ARFIMA(d, tuple(ar), tuple(ma), ivar)
    assert parse_spec(format_spec(spec)) == spec


def test_grid():
    grid = parse_grid("0.05:0.95:0.05")
    assert len(grid) == 19 and grid[0] == 0.05 and grid[-1] == 0.95 and grid[9] == 0.5
    for bad in ("0.05:0.95:0", "0:0.5:0.1", "0.5:1.0:0.1", "a:b:c", "0.1:0.2"):
        code, _, err = invoke("sweep", "--model", "fgn", "--grid", bad)
        assert code == 2 and json.loads(err)["error"] == "usage"


# --- tables -----------------------------------------------------------------

cells = st.one_of(
    st.floats(allow_nan=False), st.integers(min_value=-10**12, max_value=10**12),
    st.just(DIVERGENT), st.builds(Failure, st.text(alphabet="abc ,\"xyz", max_size=10)),
    st.text(alphabet="abcxyz ,\"", min_size=1, max_size=8).filter(
        lambda s: s not in ("divergent", "true", "false", "nan", "inf") and not s.startswith("failed: ")),
)


@settings(max_examples=100)
@given(st.lists(st.lists(cells, min_size=3, max_size=3), max_size=6))
def test_csv_and_json_round_trip(rows):
    t = Table(["a", "b", "c"], rows, {"config": {"x": 1}, "version": "0.1.0"})
    for dump, load in ((to_csv, from_csv), (to_json, from_json)):
        back = load(dump(t))
        assert back.columns == t.columns and back.meta == t.meta
        assert len(back.rows) == len(rows)
        for r1, r2 in zip(rows, back.rows):
            for a, b in zip(r1, r2):
                assert a == b and type(a) is type(b)


def test_float_formatting_is_exact():
    x = 0.1 + 0.2
    back = from_csv(to_csv(Table(["x"], [[x], [1.0], [-0.0], [1e-300]])))
    assert back.column("x")[0] == x and isinstance(back.column("x")[1], float)


def test_table_row_width_checked():
    with pytest.raises(ValueError):
        Table(["a", "b"], [[1]])


# --- commands ---------------------------------------------------------------

def test_sweep_fgn_columns_and_spot_value():
    code, out, _ = invoke("sweep", "--model", "fgn", "--grid", "0.05:0.95:0.05", "--var", "1,2,3,4")
    assert code == 0
    t = from_csv(out)
    assert t.columns == ["H", "var", "h_exact", "h_approx"] and len(t.rows) == 76
    row = next(r for r in t.rows if r[0] == 0.5 and r[1] == 1.0)
    assert row[2] == pytest.approx(1.4189385, abs=1e-7)
    assert t.meta["config"]["command"] == "sweep" and t.meta["version"]


def test_sweep_is_deterministic_across_job_counts(tmp_path):
    paths = []
    for jobs in ("1", "4"):
        p = tmp_path / f"s{jobs}.csv"
        assert invoke("sweep", "--model", "arfima", "--grid", "0.1:0.9:0.1", "--var", "1,2",
                      "--jobs", jobs, "-o", str(p))[0] == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]
    t = from_csv(paths[0].decode())
    assert t.columns == ["H", "d", "var", "h_arfima_fixed_variance", "h_fgn_exact"]
    assert all(r[3] >= r[4] - 1e-6 for r in t.rows)


def test_max_entropy():
    code, out, _ = invoke("max-entropy", "--model", "fgn")
    t = from_csv(out)
    values = dict(t.rows)
    assert code == 0 and values["FGN_exact"] == pytest.approx(0.5, abs=5e-3)
    assert 0.0 < values["FGN_approx"] < 1.0
    code, out, _ = invoke("max-entropy", "--model", "arfima", "--format", "json")
    assert json.loads(out)["results"][0]["H_max"] == pytest.approx(0.5, abs=1e-6)


def test_mi_divergent_with_trace():
    code, out, _ = invoke("mi", "--spec", "arfima:d=0.3,ivar=1")
    t = from_csv(out)
    assert code == 0 and t.meta["summary"]["I_pf"] == "divergent"
    sums = t.column("weighted_partial_sum")
    assert len(sums) >= 5 and all(a < b for a, b in zip(sums, sums[1:]))
    code, out, _ = invoke("mi", "--spec", "arfima:d=0,ar=[0.5]", "--n-terms", "512", "--format", "json")
    assert json.loads(out)["summary"]["I_pf"] == pytest.approx(0.5 * math.log(4 / 3), abs=1e-10)


def test_entropy_rate_and_spectrum_and_cepstrum():
    code, out, _ = invoke("entropy-rate", "--spec", "fgn:H=0.5,var=1")
    row = from_csv(out).rows[0]
    assert code == 0 and row[1] == pytest.approx(1.4189385332, abs=1e-9) and row[3] == pytest.approx(row[1], abs=1e-6)
    code, out, _ = invoke("spectrum", "--spec", "arfima:d=0.3", "--points", "8")
    t = from_csv(out)
    assert t.columns == ["lambda", "f"] and t.rows[-1][1] == pytest.approx(2**-0.6 / (2 * math.pi))
    code, out, _ = invoke("cepstrum", "--spec", "arfima:d=0.3", "--k-max", "5")
    t = from_csv(out)
    assert [r[1] for r in t.rows[1:]] == pytest.approx([0.3 / k for k in range(1, 6)], abs=1e-10)


def test_convergence_command():
    code, out, _ = invoke("convergence", "--spec", "arfima:d=0.3", "--n-max", "4096", "--format", "json")
    payload = json.loads(out)
    assert code == 0 and payload["summary"]["verdict"] == "consistent_with_C_over_n"
    assert payload["results"][-1]["n"] == 4096


def test_simulate_deterministic(tmp_path):
    files = []
    for i in range(2):
        p = tmp_path / f"p{i}.csv"
        assert invoke("simulate", "--spec", "fgn:H=0.8", "--n", "256", "--seed", "9", "-o", str(p))[0] == 0
        files.append(p.read_bytes())
    assert files[0] == files[1]
    t = from_csv(files[0].decode())
    assert t.columns == ["x"] and t.meta["path"]["seed"] == 9 and len(t.rows) == 256
    code, _, err = invoke("simulate", "--spec", "arfima:d=0.2,ar=[0.5]", "--n", "10")
    assert code == 2 and json.loads(err)["error"] == "spec"


def test_exit_codes_and_machine_readable_errors(tmp_path):
    code, _, err = invoke("entropy-rate", "--spec", "fgn:H=1.5")
    assert code == 2 and json.loads(err)["exit_code"] == 2
    code, _, err = invoke("entropy-rate", "--spec", "fgn:H=0.5", "-o", str(tmp_path / "no" / "x.csv"))
    assert code == 4 and json.loads(err)["error"] == "io"
    code, out, err = invoke("sweep", "--model", "fgn", "--grid", "0.3:0.4:0.1", "--max-subdivisions", "1",
                            "--abs-tol", "1e-15", "--rel-tol", "1e-15")
    assert code == 3 and json.loads(err)["error"] == "numerical"
    t = from_csv(out)
    assert all(isinstance(r[2], Failure) for r in t.rows) and all(isinstance(r[3], float) for r in t.rows)


def test_environment_overrides():
    code, out, _ = invoke("entropy-rate", "--spec", "fgn:H=0.7", environ={"LRDENT_REL_TOL": "1e-9"})
    assert code == 0 and from_csv(out).meta["config"]["quadrature"]["rel_tol"] == 1e-9
    code, out, _ = invoke("entropy-rate", "--spec", "fgn:H=0.7", "--rel-tol", "1e-8",
                          environ={"LRDENT_REL_TOL": "1e-9"})
    assert from_csv(out).meta["config"]["quadrature"]["rel_tol"] == 1e-8
    code, _, err = invoke("entropy-rate", "--spec", "fgn:H=0.7", environ={"LRDENT_ABS_TOL": "-1"})
    assert code == 2 and json.loads(err)["error"] == "config"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lrdentropy", "entropy-rate", "--spec", "arfima:d=0.3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "closed_form" in proc.stdout
