import json

import pytest

from catcsp.cli import main
from catcsp.copresheaf import directed_cycle, digraph
from catcsp.grothendieck import instance_of
from catcsp.kan import subdivision_gadget
from catcsp.pp import PPInterpretation
from catcsp.textio import (
    format_copresheaf,
    format_functor,
    format_interpretation,
    parse_copresheaf,
    parse_structure,
    write_gadget,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def machine(capsys, *argv):
    code, out, _ = run(capsys, "--format", "machine", *argv)
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    (tmp_path / "c5.txt").write_text(format_copresheaf(directed_cycle(5)))
    (tmp_path / "dbl.txt").write_text(format_copresheaf(digraph([0, 1], [(0, 1), (0, 1)])))
    (tmp_path / "fun.txt").write_text(format_functor(instance_of(directed_cycle(2))))
    write_gadget(subdivision_gadget(), tmp_path / "sub")
    phi = PPInterpretation.build(
        1, [("E", 2)], [("E", 2)], "x = x", {"E": "exists u v . E(x,u) & E(u,v) & E(v,y)"}
    )
    (tmp_path / "c5k5.txt").write_text(format_interpretation(phi))
    return tmp_path


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "--template", "K3", "--instance", "C5")
    assert code == 0 and out.startswith("YES")
    assert machine(capsys, "solve", "--template", "K2", "--instance", "C5")[1]["verdict"] == "NO"
    assert machine(capsys, "solve", "--template", "K3", "--instance", "C4", "--count")[1] == {"count": 18}


def test_format_flag_after_subcommand(capsys):
    code, out, _ = run(capsys, "solve", "--template", "K3", "--instance", "K3", "--count", "--format", "machine")
    assert json.loads(out) == {"count": 6}


def test_limit_and_colimit(capsys, files):
    c5 = str(files / "c5.txt")
    assert machine(capsys, "limit", c5, "--mode", "count")[1] == {"count": 0}
    assert run(capsys, "limit", c5)[1].strip() == "empty"
    assert len(machine(capsys, "colimit", c5)[1]["classes"]) == 1


def test_gr_gl_convert(capsys, files):
    code, data = machine(capsys, "gr", "DC2")
    assert code == 0 and len(data["objects"]) == 4
    code, out, _ = run(capsys, "gl", str(files / "fun.txt"))
    assert parse_copresheaf(out).set_of("V") == (("V:0", "id_V"), ("V:1", "id_V"))
    code, out, _ = run(capsys, "convert", "--to", "sat", "--template", "K3", "--instance", "DC2")
    assert code == 0 and "begin category" in out
    code, out, _ = run(capsys, "convert", "--to", "hom", "--template", "K3", "--functor", str(files / "fun.txt"))
    assert code == 0
    assert run(capsys, "convert", "--to", "sat", "--template", "K3")[0] == 2


def test_ran_and_lan(capsys):
    code, data = machine(capsys, "ran", "--template", "K3", "--arities", "0,1,2")
    assert code == 0 and data["sizes"] == [0, 6, 12] and data["functorial"]
    code, data = machine(capsys, "lan", "--along", "K2", "--instance", "DC1", "--size", "2")
    assert code == 0 and data["size"] >= 1


def test_gadget_commands(capsys, files):
    g = str(files / "sub")
    code, out, _ = run(capsys, "gadget-apply", "--gadget", g, "--instance", str(files / "dbl.txt"))
    Y = parse_copresheaf(out)
    assert [len(s) for s in Y.sets] == [6, 12]
    # the gadget lands in undirected graphs, so C5 is read over that base
    code, data = machine(capsys, "nerve", "--gadget", g, "--template", "C5")
    assert code == 0 and len(data["sets"]["V"]) == 5 and len(data["sets"]["E"]) == 40
    # the nerve of C5 is K5 up to hom-equivalence: K6 has no homomorphism to it
    code, data = machine(capsys, "verify-adjunction", "--gadget", g, "--instance", "K6", "--template", "C5")
    assert code == 0 and data["ok"] and data["left"] == 0
    code, data = machine(capsys, "verify-adjunction", "--gadget", g, "--instance", "DC2", "--template", "C5")
    assert data["ok"] and data["left"] > 0
    assert run(capsys, "nerve", "--gadget", g, "--template", "DC5")[0] == 2


def test_condition_commands(capsys):
    assert machine(capsys, "check-condition", "--condition", "siggers", "--template", "K3")[1] == {"holds": False}
    assert machine(capsys, "check-condition", "--condition", "siggers", "--template", "K2")[1] == {"holds": True}
    code, out, _ = run(capsys, "check-condition", "--condition", "symmetric", "--template", "K2", "--target", "loop", "--witness")
    assert out.startswith("satisfied") and "f:" in out
    assert machine(capsys, "check-condition", "--condition", "symmetric", "--template", "K2", "--direct")[1] == {"holds": False}
    assert run(capsys, "interpretable", "trivial", "siggers")[1].strip() == "interpretable"
    assert run(capsys, "interpretable", "siggers", "trivial")[1].strip() == "not interpretable"


def test_probe(capsys):
    assert run(capsys, "probe-hardness", "--template", "loop", "--max-arity", "2")[1].strip() == "refuted-at-arity 2"
    assert machine(capsys, "probe-hardness", "--template", "K3")[1]["verdict"] == "bounded-witness"


def test_indicator(capsys):
    code, out, _ = run(capsys, "indicator", "--condition", "trivial", "--template", "DC3")
    assert code == 0 and len(parse_copresheaf(out).set_of("V")) == 3


def test_structure_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "encode", "K3")
    p = tmp_path / "k3.txt"
    p.write_text(out)
    code, out, _ = run(capsys, "decode", str(p))
    assert len(parse_structure(out).domain) == 3
    code, data = machine(capsys, "single-sorted", "DC2")
    assert len(data["domain"]) == 4


def test_pp_commands(capsys, files):
    code, out, _ = run(capsys, "pp-to-instance", "--formula", "exists e:E v . s(e) = v")
    assert code == 0 and "object" in out
    out_dir = files / "g"
    assert run(capsys, "pp-to-gadget", str(files / "c5k5.txt"), "--out", str(out_dir))[0] == 0
    code, out, _ = run(capsys, "gadget-to-pp", str(out_dir))
    assert code == 0 and out.startswith("dimension 1")
    code, data = machine(capsys, "canonical", "--formula", "E(x,y) & E(y,z)")
    assert data["domain"] == ["x", "y", "z"]
    code, out, _ = run(capsys, "canonical", "--structure", "K2")
    assert code == 0 and "E(" in out


def test_reduce_and_harness(capsys):
    code, out, _ = run(capsys, "reduce", "--src", "K2", "--instance", "P2")
    assert code == 0 and parse_copresheaf(out)
    code, data = machine(capsys, "harness", "--src", "K3", "--max-vertices", "3", "--max-edges", "1")
    assert code == 0 and data["counts"].get("violation", 0) == 0
    code, out, _ = run(capsys, "harness", "--src", "K3", "--kind", "constant", "--max-vertices", "3", "--max-edges", "2")
    assert code == 1 and "violation at instance" in out
    code, data = machine(capsys, "harness", "--src", "K2", "--kind", "identity", "--random", "5", "--seed", "3")
    assert code == 0 and len(data["results"]) == 5


def test_errors_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "solve", "--template", "K3", "--instance", str(tmp_path / "missing.txt"))
    assert code == 2 and err.startswith("error:")
    bad = tmp_path / "bad.txt"
    bad.write_text("base digraph\nset V = {0\n")
    assert run(capsys, "limit", str(bad))[0] == 2
    code, _, err = run(capsys, "--cap", "5", "ran", "--template", "K3", "--arities", "3")
    assert code == 2 and "cap" in err
    assert run(capsys, "harness", "--src", "K3", "--kind", "gadget", "--max-vertices", "1")[0] == 2
