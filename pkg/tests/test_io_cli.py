import json
import subprocess
import sys
from fractions import Fraction

import pytest

from qsyz.cli import main
from qsyz.errors import ParseError, UnsupportedDimension, ValidationError
from qsyz.fanfile import BUNDLED, load_fan, parse_fan_file, read_fan_source, serialize_fan_file
from qsyz.fibration import discriminant_graph
from qsyz.plotting import emit_svg

KP2 = read_fan_source("kp2.fan").decode()


def run(argv, capsysbinary):
    code = main(argv)
    out, err = capsysbinary.readouterr()
    return code, out, err


# --------------------------------------------------------------------------
# fan files


def test_parse_error_has_location():
    text = KP2.replace("[[1, 2, 4]", "[[0, 2, 4]")
    with pytest.raises(ParseError) as info:
        parse_fan_file(text)
    e = info.value
    assert e.line == next(i for i, l in enumerate(text.splitlines(), 1) if l.startswith("max_cones"))
    assert e.col == 1


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t + "colour = 3\n",
        lambda t: t.replace('eps_abs = "1.0"', "eps_abs = 1.0"),
        lambda t: t.replace('"1"]', '"x"]'),
        lambda t: t.replace("rank = 3", "rank = 0"),
        lambda t: t.replace("rays = [", "rays = [["),
        lambda t: "\n".join(l for l in t.splitlines() if not l.startswith("lambda")),
    ],
)
def test_parse_rejects(mutate):
    with pytest.raises(ParseError):
        parse_fan_file(mutate(KP2))


def test_validation_errors():
    with pytest.raises(ValidationError) as info:
        parse_fan_file(KP2.replace('"0", "0", "0", "1"', '"0", "0", "0", "-1"'))
    assert info.value.invariant == "kahler"
    with pytest.raises(ValidationError) as info:
        parse_fan_file(KP2.replace("[1, 0, 1]", "[2, 0, 2]"))
    assert info.value.invariant == "primitivity"


@pytest.mark.parametrize("name", BUNDLED)
def test_round_trip(name):
    ff = load_fan(name)
    text = serialize_fan_file(ff)
    again = parse_fan_file(text)
    assert again == ff and serialize_fan_file(again) == text


def test_round_trip_with_overrides():
    ff = parse_fan_file(KP2.replace('eps_abs = "1.0"', 'eps_abs = "0.125"\nq = [0.1]'))
    assert ff.eps_abs == Fraction(1, 8) and ff.kahler.q_values == (0.1,)
    assert parse_fan_file(serialize_fan_file(ff)) == ff


# --------------------------------------------------------------------------
# figures


def test_svg_deterministic(kp2):
    base = discriminant_graph(kp2.poly, kp2.frame, 1)
    a, b = emit_svg(base), emit_svg(base)
    assert a == b and a.startswith(b"<?xml") and b"<svg" in a


def test_svg_unsupported_dimension(c4):
    with pytest.raises(UnsupportedDimension):
        emit_svg(discriminant_graph(c4.poly, c4.frame, 1))


# --------------------------------------------------------------------------
# CLI


def test_cli_mirror_json(capsysbinary):
    code, out, _ = run(["mirror", "kp2.fan", "--json"], capsysbinary)
    rep = json.loads(out)
    assert code == 0 and rep["equation"] == "u*v = 1 + z1 + z2 + q*z1^-1*z2^-1"
    assert rep["provenance"]["input_sha256"] and rep["exit_code"] == 0


def test_cli_tsv_lines(capsysbinary):
    code, out, _ = run(["mirror", "kp1.fan"], capsysbinary)
    lines = dict(l.split("\t", 1) for l in out.decode().splitlines())
    assert code == 0 and lines["equation"] == "u*v = 1 + z1 + q*z1^-1"


def test_cli_exit_codes(tmp_path, capsysbinary):
    bad = tmp_path / "bad.fan"
    bad.write_text(KP2 + "extra = 1\n")
    assert run(["check", str(bad)], capsysbinary)[0] == 1
    assert run(["mirror", "kp2.fan", "--gauge-cone", "1,2,3"], capsysbinary)[0] == 1
    assert run(["mirror", "missing.fan"], capsysbinary)[0] == 1
    nonconvex = tmp_path / "nc.fan"
    nonconvex.write_text(KP2.replace('"0", "0", "0", "1"', '"0", "0", "0", "-1"'))
    code, out, _ = run(["check", str(nonconvex), "--json"], capsysbinary)
    assert code == 1 and json.loads(out)["kahler_cone"]["ok"] is False


def test_cli_verify_seed(capsysbinary):
    code, out, _ = run(["verify", "kp2.fan", "--seed", "7", "--json"], capsysbinary)
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and all(s["ok"] for s in rep["suites"].values())


def test_cli_cache_is_transparent(tmp_path, capsysbinary):
    argv = ["discriminant", "kp2.fan", "--json", "--svg", str(tmp_path / "a.svg")]
    cold = run(argv + ["--no-cache"], capsysbinary)
    first = run(argv, capsysbinary)
    svg1 = (tmp_path / "a.svg").read_bytes()
    (tmp_path / "a.svg").unlink()
    warm = run(argv, capsysbinary)
    assert cold[:2] == first[:2] == warm[:2]
    assert (tmp_path / "a.svg").read_bytes() == svg1


def test_cli_discriminant_counts_and_out(tmp_path, capsysbinary):
    out_file = tmp_path / "rep.json"
    code, out, _ = run(["discriminant", "kp2.fan", "--json", "--out", str(out_file)], capsysbinary)
    rep = json.loads(out_file.read_bytes())
    assert code == 0 and out == out_file.read_bytes()
    assert rep["base_graph"]["counts"]["bounded_edges"] == 3


def test_cli_svg_skipped_in_rank_four(tmp_path, capsysbinary):
    code, out, _ = run(["discriminant", "c4.fan", "--json", "--svg", str(tmp_path / "c4.svg")], capsysbinary)
    assert code == 0 and json.loads(out)["svg"]["written"] is False
    assert not (tmp_path / "c4.svg").exists()


@pytest.mark.parametrize("cmd", ["check", "superpotential", "embed", "disks", "critical-points"])
def test_cli_commands_run(cmd, capsysbinary):
    code, out, _ = run([cmd, "kp1.fan", "--json", "--samples", "20"], capsysbinary)
    assert code == 0 and json.loads(out)["command"] == cmd


def test_module_entry_point(tmp_path):
    env = {"QSYZ_CACHE_DIR": str(tmp_path), "PATH": "/usr/bin:/bin"}
    res = subprocess.run([sys.executable, "-m", "qsyz", "mirror", "c3.fan"], capture_output=True, env=env)
    assert res.returncode == 0 and b"u*v = 1 + z1 + z2" in res.stdout
