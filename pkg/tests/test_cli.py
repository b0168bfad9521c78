import json
import subprocess
import sys

import jsonschema
import pytest

from khovanov.cli import HOMOLOGY_SCHEMA, RunConfig, UsageError, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_homology_unknot_has_two_entries(capsys):
    code, out, _ = run(capsys, "homology", "0_1", "--json")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, HOMOLOGY_SCHEMA)
    assert data["tables"]["Q"] == [[0, -1, 1], [0, 1, 1]]


def test_homology_all_grid(capsys):
    code, out, _ = run(capsys, "homology", "4_1", "--all")
    assert code == 0
    rows = {line.split("|")[0].strip(): [x.strip() for x in line.split("|")[1:]] for line in out.splitlines()[2:]}
    assert rows["5"][-1] == "1,1,1"
    assert rows["-1"][1:3] == ["1,1,1", "1,1,2"]


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "homology", "3_1", "--all", "--json")
    data = json.loads(out)
    jsonschema.validate(data, HOMOLOGY_SCHEMA)
    assert json.loads(json.dumps(data, sort_keys=True)) == data
    assert set(data["tables"]) == {"Q", "F2", "b3"}


def test_output_is_deterministic_across_thread_counts(capsys):
    outs = {run(capsys, "homology", "5_2", "--all", "--json", "--threads", str(t))[1] for t in (1, 4)}
    assert len(outs) == 1


def test_jones(capsys):
    code, out, _ = run(capsys, "jones", "0_1")
    assert code == 0 and "q + q^-1" in out
    _, out, _ = run(capsys, "jones", "3_1", "--json")
    assert json.loads(out)["jones"] == "t^-1 + t^-3 - t^-4"


def test_jones_of_a_tangle_lists_skein_terms(capsys):
    code, out, _ = run(capsys, "jones", "PD[X[1,2,3,4], B[1,2,3,4]]", "--json")
    assert code == 0
    assert len(json.loads(out)["skein"]) == 2


def test_skein_and_compose(capsys):
    assert run(capsys, "skein", "5_2")[0] == 0
    code, out, _ = run(capsys, "compose", "6_2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["diagram_isomorphic"] and data["complex_matches"]


def test_other_functors(capsys):
    _, out, _ = run(capsys, "homology", "L2a1", "--functor", "lee", "--json")
    assert json.loads(out)["dimension"] == 4
    _, out, _ = run(capsys, "homology", "3_1", "--functor", "f3", "--ring", "F2", "--json")
    assert json.loads(out)["dimension"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["homology", "nope"],
        ["homology", "3_1", "--ring", "b3", "--functor", "lee"],
        ["homology", "3_1", "--functor", "fc"],
        ["homology", "PD[X[1,2,3,4], B[1,2,3,4]]"],
        ["check", "nonsense"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_check_suites(capsys):
    for suite in ("frobenius", "dsquared", "planar"):
        assert run(capsys, "check", suite)[0] == 0
    code, out, _ = run(capsys, "check", "movies", "--mm", "12", "--json")
    assert code == 0
    assert json.loads(out)["details"]["MM12"]["passed"]


def test_check_invariance_small_run(capsys):
    code, out, _ = run(capsys, "check", "invariance", "--seed", "3", "--json")
    assert code == 0
    assert json.loads(out)["checked"] == 100


def test_movie_command(capsys, tmp_path):
    code, out, _ = run(capsys, "movie", "mm1", "--json")
    data = json.loads(out)
    assert code == 0 and data["verdict"] in (1, -1) and data["map_degrees"] == [0]
    code, out, _ = run(capsys, "movie", "mm12_left", "--against", "mm12_right", "--json")
    assert code == 0 and json.loads(out)["passed"]
    f = tmp_path / "cups.movie"
    f.write_text("PD[]\n-- Cup\nPD[O[1]]\n")
    code, out, _ = run(capsys, "movie", str(f), "--json")
    data = json.loads(out)
    assert code == 0 and data["degree"] == 1 and data["verdict"] is None
    bad = tmp_path / "bad.movie"
    bad.write_text("PD[]\nPD[O[1]]\n")
    assert run(capsys, "movie", str(bad))[0] == 2


def test_dump(capsys):
    _, out, _ = run(capsys, "dump", "3_1", "--json")
    d = json.loads(out)
    assert (d["n_plus"], d["n_minus"]) == (0, 3)
    _, out, _ = run(capsys, "dump", "3_1", "--what", "algebraic", "--json")
    assert json.loads(out)["ring"] == "Q"


def test_config_validation():
    RunConfig("homology", ["3_1"]).validate()
    with pytest.raises(UsageError):
        RunConfig("homology", ["3_1"], ring="Z5").validate()
    with pytest.raises(UsageError):
        RunConfig("homology", ["3_1"], threads=0).validate()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "khovanov", "jones", "4_1"], capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "q^5 + q^-5" in r.stdout
