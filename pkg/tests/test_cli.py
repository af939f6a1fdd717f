import json
from fractions import Fraction

from wittkit.cli import main
from wittkit.glueing import GlueDatum
from wittkit.hahn import HahnSeries
from wittkit.values import Zp1
from wittkit.witt import WittVec, teichmuller


def tpow(q):
    return HahnSeries.t_pow(2, Zp1(Fraction(q), 2))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_selftest_passes_and_is_deterministic(capsys):
    code1, rep1 = run(capsys, "selftest", "--seed", "5")
    code2, rep2 = run(capsys, "selftest", "--seed", "5")
    assert code1 == code2 == 0
    assert rep1["hash"] == rep2["hash"]
    assert all(v["verdict"] == "pass" for v in rep1["verdicts"])


def test_witt_add_and_mul(capsys, tmp_path):
    a = teichmuller(tpow(1), 3)
    b = teichmuller(tpow(2), 3)
    path = write_json(tmp_path, "add.json",
                      {"a": a.to_json(), "b": b.to_json(), "op": "mul"})
    code, rep = run(capsys, "witt", "--input", path)
    assert code == 0
    result = rep["certificates"][0]["result"]
    # [t][t^2] = [t^3]
    assert result["coords"][0]["terms"][0][0]["num"] == 3


def test_witt_neg(capsys, tmp_path):
    a = teichmuller(tpow(0), 3)
    path = write_json(tmp_path, "neg.json", {"a": a.to_json(), "op": "neg"})
    code, rep = run(capsys, "witt", "--input", path)
    assert code == 0


def test_newton_show(capsys, tmp_path):
    h = WittVec(2, "Zp1", 0, (tpow(2), tpow(0)))
    path = write_json(tmp_path, "np.json", h.to_json())
    code, rep = run(capsys, "newton", "show", "--input", path)
    assert code == 0
    cert = rep["certificates"][0]
    assert cert["faces"][0]["slope"] == [[-2, 1]]
    assert "plot" in cert


def test_witness_chains(capsys):
    code, rep = run(capsys, "witness", "arch", "--depth", "4", "--kmax", "3")
    assert code == 0
    code2, rep2 = run(capsys, "witness", "nonarch", "--depth", "4",
                      "--kmax", "3")
    assert code2 == 0
    assert rep["certificates"][0]["kind"] == "archimedean"
    assert rep2["certificates"][0]["kind"] == "nonarchimedean"


def test_scholze_certifies(capsys):
    code, rep = run(capsys, "scholze", "--depth", "5", "--height", "60",
                    "--candidates", "4")
    assert code in (0, 2)
    liou = next(v for v in rep["verdicts"] if v["name"] == "liouville")
    assert liou["verdict"] == "pass"


def test_scholze_shallow_depth_fails_certification(capsys):
    # depth 2 leaves a single wide gap term: the tail interval traps 1/1
    code, rep = run(capsys, "scholze", "--depth", "2", "--height", "10",
                    "--candidates", "2")
    assert code == 1
    liou = next(v for v in rep["verdicts"] if v["name"] == "liouville")
    assert liou["verdict"] == "fail"


def test_glue_certificate(capsys, tmp_path):
    datum = GlueDatum(2, "Zp1", 2,
                      (("diag", ((1, Fraction(1)), (0, Fraction(-1)))),),
                      4, Fraction(8))
    path = write_json(tmp_path, "glue.json", datum.to_json())
    code, rep = run(capsys, "glue", "--input", path)
    assert code == 0
    assert rep["certificates"][0]["residual"] == "zero"


def test_glue_precision_override(capsys, tmp_path):
    datum = GlueDatum(2, "Zp1", 1, (("diag", ((1, Fraction(0)),)),), 4,
                      Fraction(8))
    path = write_json(tmp_path, "glue1.json", datum.to_json())
    code, rep = run(capsys, "glue", "--input", path, "--N", "3")
    assert code == 0
    assert rep["parameters"]["N"] == 3


def test_tower_member_and_table(capsys):
    code, rep = run(capsys, "tower", "member", "--a", "-1", "--gamma", "2",
                    "--tag", "A1")
    assert code == 0 and rep["certificates"][0]["member"] is True
    code2, rep2 = run(capsys, "tower", "table", "--window", "5")
    assert code2 == 0
    assert rep2["certificates"][0]["ok"] is True


def test_bad_input_exits_three(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["witt", "--input", str(bad)]) == 3
    assert main(["witt", "--input", str(tmp_path / "missing.json")]) == 3
    capsys.readouterr()


def test_bad_usage_exits_three(capsys):
    assert main(["no-such-command"]) == 3
    capsys.readouterr()


def test_report_schema_and_hash_shape(capsys):
    code, rep = run(capsys, "tower", "member")
    assert rep["schema"] == "wittkit-report/1"
    assert len(rep["hash"]) == 64
    assert "seconds" in rep["timings"]
