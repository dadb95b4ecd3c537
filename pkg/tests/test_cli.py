import io
import json
import subprocess
import sys

import pytest

from cgn.cli import main
from cgn.io import dumps, load_problem, parse_problem, problem_to_dict, validate_certificate
from cgn.errors import SchemaError
from cgn import catalog


def call(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def sqrt2_file(tmp_path):
    path = tmp_path / "sqrt2.json"
    _, text = call("demo", "sqrt2")
    path.write_text(text)
    return path


def edited(tmp_path, base, **changes):
    doc = json.loads(base.read_text())
    for key, val in changes.items():
        section, _, field = key.partition("__")
        if field:
            doc.setdefault(section, {})[field] = val
        else:
            doc[section] = val
    path = tmp_path / "edited.json"
    path.write_text(json.dumps(doc))
    return path


class TestCertify:
    def test_sqrt2_file(self, sqrt2_file):
        code, text = call("certify", str(sqrt2_file))
        assert code == 0
        doc = json.loads(text)
        validate_certificate(doc)
        assert doc["valid"] and doc["t_star"] == pytest.approx(0.13284325835, abs=1e-10)

    def test_deterministic_bytes(self, sqrt2_file):
        assert call("certify", str(sqrt2_file)) == call("certify", str(sqrt2_file))

    def test_xi_zero(self, tmp_path, sqrt2_file):
        code, text = call("certify", str(edited(tmp_path, sqrt2_file, overrides__xi=0.0)))
        assert code == 1
        checks = {c["condition"]: c for c in json.loads(text)["checks"]}
        assert checks["xi>0"]["holds"] is False

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert call("certify", str(bad))[0] == 2

    def test_unknown_key(self, tmp_path, sqrt2_file):
        assert call("certify", str(edited(tmp_path, sqrt2_file, colour="blue")))[0] == 2

    def test_dimension_mismatch(self, tmp_path, sqrt2_file):
        assert call("certify", str(edited(tmp_path, sqrt2_file, x0=[1.0, 2.0])))[0] == 2

    def test_missing_sections(self, tmp_path, sqrt2_file):
        doc = json.loads(sqrt2_file.read_text())
        del doc["majorant"]
        path = tmp_path / "nomaj.json"
        path.write_text(json.dumps(doc))
        assert call("certify", str(path))[0] == 2

    def test_demo_flag(self):
        code, text = call("certify", "--demo", "orthant")
        assert code == 0 and json.loads(text)["cube_vertices"] == 4


class TestSolve:
    def test_sqrt2(self, sqrt2_file):
        code, text = call("solve", str(sqrt2_file))
        assert code == 0
        assert "termination: Feasible" in text and "iterations: 4" in text

    def test_verify_and_trace(self, sqrt2_file, tmp_path):
        trace = tmp_path / "t.csv"
        code, text = call("solve", str(sqrt2_file), "--verify", "--trace", str(trace))
        assert code == 0
        assert "majorization: all k pass" in text
        assert trace.read_text().startswith("k,x_1,step_norm,dist,hF,t_k,dt,bd1_ok,bd2_ok\n")

    def test_infeasible(self):
        code, text = call("solve", "--demo", "infeasible")
        assert code == 4
        assert "MaxIter" in text and "plateau" in text

    def test_max_iter_flag(self):
        code, text = call("solve", "--demo", "boundary", "--max-iter", "3")
        assert code == 4 and "iterations: 3" in text


class TestScalar:
    def test_lipschitz(self):
        code, text = call("scalar", "--lipschitz", "K=1", "--xi", "0.25", "--alpha", "1")
        assert code == 0
        t_star = float(text.split()[2])
        assert t_star == pytest.approx(1 - 0.5**0.5, abs=1e-15)

    def test_boundary_ratios(self):
        code, text = call("scalar", "--lipschitz", "1", "--xi", "0.5")
        assert code == 0 and "Q-linear only" in text
        ratios = [float(line.split()[3]) for line in text.splitlines()[3:]]
        assert all(r == pytest.approx(0.5) for r in ratios)

    def test_h3_fails(self):
        code, text = call("scalar", "--lipschitz", "1", "--xi", "0.6")
        assert code == 1 and "1.2 <= 1" in text

    def test_smale_and_custom(self):
        assert call("scalar", "--smale", "1", "--xi", "0.1")[0] == 0
        code, text = call("scalar", "--custom", "exponential", "--R", "5", "--param", "L=1.5", "--xi", "0.2")
        assert code == 0 and "t* =" in text

    def test_bad_flags(self):
        assert call("scalar", "--xi", "0.1")[0] == 2
        assert call("scalar", "--custom", "nope", "--R", "1", "--xi", "0.1")[0] == 2


class TestDemoAndFiles:
    def test_list(self):
        code, text = call("demo", "--list")
        assert code == 0 and all(name in text for name in catalog.DEMOS)

    @pytest.mark.parametrize("name", sorted(catalog.DEMOS))
    def test_round_trip(self, name, tmp_path):
        _, text = call("demo", name)
        path = tmp_path / f"{name}.json"
        path.write_text(text)
        spec = load_problem(path)
        assert dumps(problem_to_dict(spec)) == text

    def test_parse_rejects(self):
        with pytest.raises(SchemaError):
            parse_problem({"map": {"n": 1, "m": 1, "components": [[]]}, "outer": {"kind": "l2", "c": [0]}, "x0": [0]})

    def test_console_script(self, sqrt2_file):
        res = subprocess.run([sys.executable, "-m", "cgn.cli", "certify", str(sqrt2_file)], capture_output=True, text=True)
        assert res.returncode == 0
        assert json.loads(res.stdout)["valid"]
