import csv
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stbqp.cli import main
from stbqp.examples import block_matrices, example
from stbqp.ptas_engine import bounds, evaluate_biquadratic
from stbqp.reports import (
    bounds_from_dict,
    bounds_to_dict,
    dumps,
    make_report,
    read_report,
    tensor_digest,
    write_report,
)
from stbqp.tensor_core import TensorError, all_ones, new_biquad, new_multi
from stbqp.tensorfile import TensorFileError, dump_tensor, load_tensor, parse_tensor, tensor_to_dict


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


# ---- tensor files ----

@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_flat_roundtrip_is_exact(seed, n, m):
    A = new_biquad(n, m, np.random.default_rng(seed).normal(size=n * n * m * m))
    doc = parse_tensor(json.dumps(tensor_to_dict(A, label="x")))
    assert doc.label == "x" and doc.kind == "biquad" and doc.dims == (n, m)
    assert np.array_equal(doc.tensor.data, A.data)


@pytest.mark.parametrize("ex_id", [3, 4, 5])
def test_kron_and_flat_files_give_identical_tensors(tmp_path, ex_id):
    ex = example(ex_id)
    terms = [(t.coefficient, t.factors) for t in ex.kron_terms]
    dump_tensor(ex.tensor, tmp_path / "k.json", kron_terms=terms)
    dump_tensor(ex.tensor, tmp_path / "f.json")
    k = load_tensor(tmp_path / "k.json").tensor
    f = load_tensor(tmp_path / "f.json").tensor
    assert k.data.tobytes() == f.data.tobytes() == ex.tensor.data.tobytes()


def test_entries_are_lexicographic_with_last_index_fastest(tmp_path):
    entries = [0.0] * 16
    # a_{1,1,1,2} and a_{1,1,2,1} (1-based) sit at positions 1 and 2
    entries[1] = entries[2] = 3.0
    doc = parse_tensor(json.dumps({"kind": "biquad", "dims": [2, 2], "entries": entries}))
    assert doc.tensor.data[0, 0, 0, 1] == 3.0
    assert doc.tensor.data[0, 0, 1, 0] == 3.0


def test_multiquad_file():
    M = new_multi((2, 1, 2), np.arange(16.0))
    doc = parse_tensor(json.dumps(tensor_to_dict(M)))
    assert doc.kind == "multiquad" and doc.dims == (2, 1, 2)
    assert np.array_equal(doc.tensor.data, M.data)
    kron = {"kind": "multiquad", "dims": [1, 2, 1],
            "kron_terms": [{"coefficient": 2, "factors": [[[1]], [[1, 2], [2, 1]], [[3]]]}]}
    assert parse_tensor(json.dumps(kron)).tensor.data[0, 0, 0, 1, 0, 0] == 12.0


def test_parse_error_reports_position():
    with pytest.raises(TensorFileError, match="line 2, column"):
        parse_tensor('{"kind": "biquad",\n "dims": [1 1]}')


@pytest.mark.parametrize("doc,invariant", [
    ({"kind": "biquad", "dims": [1, 1]}, "entries-xor-kron"),
    ({"kind": "biquad", "dims": [1, 1], "entries": [1], "kron_terms": []}, "entries-xor-kron"),
    ({"kind": "biquad", "dims": [2, 2], "entries": [1, 2]}, "entry-count"),
    ({"kind": "biquad", "dims": [2, 2, 2], "entries": [1]}, "dims"),
    ({"kind": "biquad", "dims": [2, 1], "kron_terms": [{"coefficient": 1, "factors": [[[1, 2], [3, 4]], [[1]]]}]},
     "symmetric-factor"),
    ({"kind": "biquad", "dims": [2, 1], "kron_terms": [{"coefficient": 1, "factors": [[[1]], [[1]]]}]},
     "kron-factor-shape"),
    ({"kind": "biquad", "dims": [1, 1], "kron_terms": [{"coefficient": 1, "factors": [[[1]]]}]},
     "kron-factor-count"),
])
def test_invariant_violations_are_named(doc, invariant):
    with pytest.raises(TensorError) as exc:
        parse_tensor(json.dumps(doc))
    assert exc.value.invariant == invariant


@pytest.mark.parametrize("doc", [
    [1, 2],
    {"kind": "cube", "dims": [1, 1], "entries": [1]},
    {"kind": "biquad", "dims": "2x2", "entries": [1]},
    {"kind": "biquad", "dims": [1, 1], "entries": ["a"]},
    {"kind": "biquad", "dims": [1, 1], "entries": [1], "extra": 1},
    {"format": "other/9", "kind": "biquad", "dims": [1, 1], "entries": [1]},
])
def test_malformed_documents(doc):
    with pytest.raises(TensorFileError):
        parse_tensor(json.dumps(doc))


# ---- reports ----

def test_report_floats_roundtrip_exactly():
    vals = [0.1, 1 / 3, 1e-300, -2.5e17, 1.0, 0.0, 0.06663333333333334]
    assert json.loads(dumps({"v": vals}))["v"] == vals
    assert '"v":[0.10000000000000001,' in dumps({"v": vals})
    with pytest.raises(ValueError):
        dumps({"v": float("inf")})


def test_bounds_dict_roundtrip(tmp_path):
    rep = bounds(example(1).tensor, 1, 3)
    doc = make_report("solve", bounds_to_dict(rep), example(1).tensor, 0.5)
    write_report(doc, tmp_path / "r.json")
    back = read_report(tmp_path / "r.json")
    assert bounds_from_dict(back["result"]) == rep
    assert back["result"]["argmin_upper"][0]["point"] == ["2/3", "1/3"]


def test_report_digest_ignores_timing_and_detects_edits(tmp_path):
    A = all_ones(2, 2)
    a = make_report("solve", {"x": 1.0}, A, 1.0)
    b = make_report("solve", {"x": 1.0}, A, 99.0)
    assert a["digest"] == b["digest"]
    a["result"]["x"] = 2.0
    write_report(a, tmp_path / "r.json")
    with pytest.raises(ValueError):
        read_report(tmp_path / "r.json")


def test_tensor_digest_depends_on_dims_and_content():
    d1 = tensor_digest(all_ones(1, 4))
    d2 = tensor_digest(all_ones(4, 1))
    d3 = tensor_digest(all_ones(1, 4).shifted(1e-16 + 1e-15))
    assert len({d1["sha256"], d2["sha256"], d3["sha256"]}) == 3
    assert d1["dims"] == [1, 4]


# ---- command line ----

@pytest.fixture()
def files(tmp_path):
    out = {}
    for i in range(1, 6):
        p = tmp_path / f"ex{i}.json"
        assert main(["example", "--id", str(i), "--output", str(p)]) == 0
        out[i] = str(p)
    out["ones"] = _write(tmp_path / "ones.json", {"kind": "biquad", "dims": [2, 2], "entries": [1.0] * 16})
    return out


def _report(path):
    return read_report(path)["result"]


def test_cli_example_files(files):
    doc = load_tensor(files[1])
    assert doc.dims == (2, 4)
    assert evaluate_biquadratic(doc.tensor, [1, 0], [1, 0, 0, 0]) == 0.7027
    assert load_tensor(files[5]).dims == (5, 8)
    assert load_tensor(files[3]).tensor.data.tobytes() == example(3).tensor.data.tobytes()


def test_cli_solve_example4(files, tmp_path):
    out = str(tmp_path / "r.json")
    assert main(["solve", "--input", files[4], "--s", "3", "--r", "5", "--mode", "both", "--output", out]) == 0
    res = _report(out)
    assert round(res["p_upper"], 2) == -4.00
    assert res["upper_coeff"] == 12 / 35 and res["lower_coeff"] == 12 / 24
    assert res["range_bound"] == float(np.ptp(example(4).tensor.data))
    assert all("/" in q for w in res["argmin_upper"] for q in w["point"])


def test_cli_solve_example2_upper(files, tmp_path):
    out = str(tmp_path / "r.json")
    assert main(["solve", "--input", files[2], "--s", "13", "--r", "17", "--mode", "upper", "--output", out]) == 0
    res = _report(out)
    assert abs(res["p_upper"]) < 1e-12 and res["p_lower"] is None


@pytest.mark.parametrize("s,r", [(0, 0), (2, 5)])
def test_cli_solve_all_ones(files, tmp_path, s, r):
    out = str(tmp_path / "r.json")
    assert main(["solve", "--input", files["ones"], "--s", str(s), "--r", str(r), "--output", out]) == 0
    res = _report(out)
    assert res["p_upper"] == pytest.approx(1.0, abs=1e-14)
    assert res["p_lower"] == pytest.approx(1.0, abs=1e-14)


def test_cli_solve_multiquad(tmp_path):
    p = _write(tmp_path / "m.json", {"kind": "multiquad", "dims": [1, 2, 1], "entries": [1.0] * 4})
    out = str(tmp_path / "r.json")
    assert main(["solve", "--input", p, "--r-list", "0,1,0", "--output", out]) == 0
    assert _report(out)["p_upper"] == pytest.approx(1.0)
    assert main(["solve", "--input", p, "--s", "1", "--r", "1"]) == 1


def test_cli_reports_are_byte_deterministic(files, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["solve", "--input", files[1], "--s", "2", "--r", "3", "--output", str(out)]) == 0
        doc = json.loads(out.read_text())
        doc.pop("timing")
        outs.append(dumps(doc))
    assert outs[0] == outs[1]


def test_cli_sweep_single_element_equals_solve(files, tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["solve", "--input", files[1], "--s", "1", "--r", "3", "--mode", "both", "--output", a]) == 0
    assert main(["sweep", "--input", files[1], "--s-list", "1", "--r-list", "3", "--mode", "both",
                 "--output", b]) == 0
    assert _report(b)["rows"] == [_report(a)]


def test_cli_sweep_plot_data(files, tmp_path):
    out, plot = str(tmp_path / "s.json"), str(tmp_path / "p.csv")
    assert main(["sweep", "--input", files[1], "--s-list", "1,2", "--r-list", "3,10", "--mode", "both",
                 "--plot-data", plot, "--id", "1", "--output", out]) == 0
    rows = list(csv.reader(open(plot)))
    assert rows[0] == ["example_id", "s", "r", "p_upper", "p_lower", "x_1", "x_2", "y_1", "y_2", "y_3", "y_4"]
    assert len(rows) == 5
    assert rows[1][:3] == ["1", "1", "3"]
    assert rows[3][5:7] == ["1/2", "1/2"]
    got = [round(r["p_upper"], 4) for r in _report(out)["rows"]]
    # published values at grid denominators (3,5), (3,12), (4,5), (4,12)
    assert got == [0.0666, 0.0668, 0.0600, 0.0601]


def test_cli_membership(files, tmp_path, capsys):
    assert main(["membership", "--input", files["ones"], "--lambda", "1", "--s", "2", "--r", "3"]) == 0
    assert capsys.readouterr().out.strip() == "member"
    out = str(tmp_path / "m.json")
    assert main(["membership", "--input", files[3], "--lambda", "0", "--s", "0", "--r", "0", "--output", out]) == 0
    assert "not member" in capsys.readouterr().out
    res = _report(out)
    assert res["member"] is False and res["witness_value"] < 0
    assert all(isinstance(c, int) for p in res["witness"] for c in p)
    assert main(["membership", "--input", files[1], "--lambda", "-1", "--s", "3", "--r", "3"]) == 0
    assert capsys.readouterr().out.strip() == "member"


def test_cli_table1_small(tmp_path, capsys):
    # the full table runs in the acceptance suite; here only the report plumbing
    from stbqp import table1
    cells = table1.run_table1(example_ids=(1, 3), labels=((4, 17),))
    assert [c.rounded for c in cells] == ["0.0599", "-1.00"]
    assert all(c.passed for c in cells)
    assert "0.0599" in table1.format_table(cells)
    with pytest.raises(ValueError):
        table1.label_to_resolution((1, 5))


def test_cli_exit_codes(files, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "biquad",\n "dims": [2, 2], "entries": [1, 2')
    assert main(["solve", "--input", str(bad), "--s", "0", "--r", "0"]) == 1
    assert "line 2" in capsys.readouterr().err
    short = _write(tmp_path / "short.json", {"kind": "biquad", "dims": [2, 2], "entries": [1, 2]})
    assert main(["solve", "--input", short, "--s", "0", "--r", "0"]) == 2
    assert "entry-count" in capsys.readouterr().err
    assert main(["solve", "--input", files[5], "--s", "13", "--r", "17", "--mode", "upper"]) == 3
    assert main(["solve", "--input", files[1], "--s", "3", "--r", "3", "--budget", "5"]) == 3
    assert main(["solve", "--input", str(tmp_path / "missing.json"), "--s", "0", "--r", "0"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--input", files[1], "--s", "-1", "--r", "0"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["example", "--id", "6", "--output", str(tmp_path / "x.json")])
    assert exc.value.code == 1


def test_block_matrices_structure():
    A, B, C, D = block_matrices(5, 8)
    for P in (A, B, C, D):
        assert np.array_equal(P, P.T)
    assert A.shape == (5, 5) and B.shape == (8, 8)
    with pytest.raises(ValueError):
        block_matrices(1, 8)
