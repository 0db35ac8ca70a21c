"""Command line and HTTP service: exit codes, determinism, transport parity."""

import json

import pytest
from fastapi.testclient import TestClient

from tropireach.cli import main
from tropireach.client import HttpClient, LocalClient
from tropireach.formats import (
    FormatError,
    dumps_canonical,
    result_from_json,
    result_to_json,
)
from tropireach.oracle import OracleCapExceeded
from tropireach.service import app

SYS_PROBLEM = {
    "n": 1, "m": 1,
    "A": [[0]], "B": [[0]],
    "U": {"op": "halfspace", "a": [0], "b": ["-inf"], "d": 0},
    "target": {"op": "halfspace", "a": [0], "b": ["-inf"], "d": 5},
}

PEEL_PROBLEM = {
    "dim": 2,
    "conic": True,
    "target": {"op": "complement",
               "arg": {"op": "halfspace", "a": [1, 0], "b": [0, 0]}},
}

TWO_STATE = {
    "n": 2, "m": 1,
    "A": [[0, "-inf"], [1, 0]], "B": [["-inf"], [0]],
    "U": {"op": "halfspace", "a": [0], "b": ["-inf"], "d": 0},
    "target": {"op": "halfspace", "a": [0, "-inf"], "b": ["-inf", 0]},
}

CAPPED = {
    "n": 4, "m": 3,
    "A": [[0] * 4] * 4, "B": [[0] * 3] * 4,
    "U": {"op": "halfspace", "a": [0, 0, 0], "b": ["-inf"] * 3, "d": 0},
    "target": {"op": "halfspace", "a": [0] * 4, "b": ["-inf"] * 4, "d": 5},
}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, obj in (("sys", SYS_PROBLEM), ("peel", PEEL_PROBLEM),
                      ("two", TWO_STATE), ("capped", CAPPED)):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(obj))
        out[name] = str(path)
    return out


class TestExitCodes:
    def test_success(self, files, capsys):
        assert main(["reach", files["sys"]]) == 0
        capsys.readouterr()

    def test_usage_errors(self, capsys):
        assert main(["no-such-command"]) == 1
        assert main([]) == 1
        assert main(["member", "whatever.json"]) == 1  # missing --point
        capsys.readouterr()

    def test_validation_errors(self, files, tmp_path, capsys):
        assert main(["reach", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["reach", str(bad)]) == 2
        wrongdim = tmp_path / "wrongdim.json"
        wrongdim.write_text(json.dumps({**SYS_PROBLEM, "A": [[0, 0]]}))
        assert main(["reach", str(wrongdim)]) == 2
        assert main(["member", files["sys"], "--point", "1,2"]) == 2
        err = capsys.readouterr().err
        assert "error:" in err

    def test_oracle_cap_exit(self, files, capsys):
        assert main(["compare-oracle", files["capped"], "--samples", "5"]) == 3
        assert "oracle cap" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()


class TestCommands:
    def test_approx_paper_peel(self, files, capsys):
        assert main(["approx", files["peel"]]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["conic"] and not out["exact"]
        assert out["polyhedra"] == [
            {"generators": [[0, "-inf"], [0, 1]]}]

    def test_reach_deterministic_and_round_trips(self, files, capsys):
        assert main(["reach", files["two"], "--steps", "2",
                     "--mode", "iterated"]) == 0
        first = capsys.readouterr().out
        assert main(["reach", files["two"], "--steps", "2",
                     "--mode", "iterated"]) == 0
        second = capsys.readouterr().out
        assert first == second
        parsed = result_from_json(json.loads(first))
        assert dumps_canonical(result_to_json(parsed)) == first
        assert [s.step for s in parsed.stats] == [1, 2]

    def test_member_with_control(self, files, capsys):
        assert main(["member", files["sys"], "--point", "3",
                     "--extract-control"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out == {"inside": True, "exact": True, "control": [0],
                       "guaranteed": True}
        assert main(["member", files["sys"], "--point", "6"]) == 0
        assert json.loads(capsys.readouterr().out)["inside"] is False

    def test_member_on_returned_vertex(self, files, capsys):
        assert main(["reach", files["sys"]]) == 0
        result = json.loads(capsys.readouterr().out)
        vertex = result["polyhedra"][0]["vertices"][-1]
        point = ",".join(str(v) for v in vertex)
        assert main(["member", files["sys"], "--point", point]) == 0
        assert json.loads(capsys.readouterr().out)["inside"] is True

    def test_sample_csv_shape(self, files, capsys):
        assert main(["sample", files["sys"], "--box", "4,7",
                     "--res", "4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "x1,in_set,on_boundary"
        assert len(lines) == 5
        rows = [line.split(",") for line in lines[1:]]
        assert [r[1] for r in rows] == ["1", "1", "0", "0"]
        # membership flips between 5 and 6: both sides marked on_boundary
        assert [r[2] for r in rows] == ["0", "1", "1", "0"]

    def test_sample_oracle_column(self, files, capsys):
        assert main(["sample", files["sys"], "--box", "4,7", "--res", "4",
                     "--oracle"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "x1,in_set,on_boundary,in_oracle"
        assert [line.split(",")[3] for line in lines[1:]] == \
            ["1", "1", "0", "0"]

    def test_sample_fractional_grid_exact(self, files, capsys):
        assert main(["sample", files["sys"], "--box", "0,1",
                     "--res", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert [line.split(",")[0] for line in lines[1:]] == \
            ["0", "1/2", "1"]

    def test_compare_oracle_clean(self, files, capsys):
        assert main(["compare-oracle", files["two"], "--samples", "300",
                     "--seed", "11"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["points"] == 300
        assert report["mismatches"] == 0
        assert report["agree"] + report["exempt_boundary"] == 300
        assert report["seed"] == 11

    def test_compare_oracle_deterministic(self, files, capsys):
        argv = ["compare-oracle", files["two"], "--samples", "100",
                "--seed", "5"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first


class TestService:
    def setup_method(self):
        self.tc = TestClient(app)

    def test_health(self):
        assert self.tc.get("/health").json() == {"status": "ok"}

    def test_validation_maps_to_422(self):
        r = self.tc.post("/reach",
                         json={"problem": {"target": {"op": "bogus"}}})
        assert r.status_code == 422
        assert "unknown set-expression" in r.json()["detail"]

    def test_cap_maps_to_409(self):
        r = self.tc.post("/compare-oracle",
                         json={"problem": CAPPED, "samples": 5})
        assert r.status_code == 409

    def test_transport_parity(self):
        local = LocalClient()
        remote = HttpClient("http://testserver", client=TestClient(app))
        assert remote.reach(SYS_PROBLEM) == local.reach(SYS_PROBLEM)
        assert remote.approx(PEEL_PROBLEM) == local.approx(PEEL_PROBLEM)
        assert remote.member(TWO_STATE, ["0", "4"]) == \
            local.member(TWO_STATE, ["0", "4"])
        assert remote.sample(SYS_PROBLEM, -2, 2, 5) == \
            local.sample(SYS_PROBLEM, -2, 2, 5)
        assert remote.compare_oracle(SYS_PROBLEM, 50, 7) == \
            local.compare_oracle(SYS_PROBLEM, 50, 7)

    def test_http_client_error_mapping(self):
        remote = HttpClient("http://testserver", client=TestClient(app))
        with pytest.raises(FormatError):
            remote.reach({"target": {"op": "bogus"}})
        with pytest.raises(OracleCapExceeded):
            remote.compare_oracle(CAPPED, samples=5)

    def test_member_control_over_http(self):
        remote = HttpClient("http://testserver", client=TestClient(app))
        out = remote.member(SYS_PROBLEM, [3], extract_control=True)
        assert out["control"] == [0] and out["guaranteed"] is True
