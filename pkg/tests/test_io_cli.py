import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betwixt import io
from betwixt.cli import FORMULA_KINDS, SCHEME_KINDS, run
from betwixt.defgen import scheme_torus
from betwixt.folang import FiniteStructure, TableRelation, parse
from betwixt.frames import synthesize_frame
from betwixt.tiling import TileSet, build_torus, cell_id, is_valid_tiling, labelled_structure, tile, tiling_sentence
from strategies import formulas, rationals, structures

S2 = TileSet((tile(0, 1, 0, 2), tile(0, 2, 0, 1)))


def write(path, obj):
    path.write_text(obj if isinstance(obj, str) else io.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    uniform = TileSet((tile(4, 4, 4, 4),))
    L = {"0,0": S2.tiles[0], "1,0": S2.tiles[1]}
    return {
        "dir": tmp_path,
        "uniform": write(tmp_path / "uniform.tiles", io.tiles_to_dict(uniform)),
        "s2": write(tmp_path / "s2.tiles", io.tiles_to_dict(S2)),
        "torus": write(tmp_path / "t21.json", io.labelling_to_dict(2, 1, L, S2)),
        "bad_torus": write(tmp_path / "bad.json", io.labelling_to_dict(
            2, 1, {"0,0": S2.tiles[0], "1,0": S2.tiles[0]}, S2)),
    }


# -- formats ----------------------------------------------------------------------

@given(rationals)
def test_rational_text_roundtrip(q):
    assert io.rat_from_text(io.rat_to_text(q)) == q


def test_rational_errors():
    for bad in ("x", "1/0", True, None):
        with pytest.raises(io.FormatError):
            io.rat_from_text(bad)
    assert io.rat_to_text(3) == "3"


@settings(max_examples=50, deadline=None)
@given(structures(max_size=4))
def test_structure_roundtrip(M):
    M = M.expand(constants={"c": M.universe[0]}, sets={"X": {M.universe[-1]}})
    back = io.structure_from_dict(json.loads(io.dumps(io.structure_to_dict(M))))
    assert back.universe == M.universe
    assert all(back.table(r) == M.table(r) for r in M.relations)
    assert back.constants == M.constants and back.sets == M.sets


def test_structure_errors():
    with pytest.raises(io.FormatError):
        io.structure_from_dict({"relations": {}})
    with pytest.raises(io.FormatError):
        io.structure_from_dict({"universe": ["a"], "relations": {"R": []}})
    empty = io.structure_from_dict({"universe": ["a"], "relations": {"R": []}, "arities": {"R": 2}})
    assert empty.relations["R"].arity == 2


@given(formulas(depth=3))
def test_formula_file_roundtrip(f):
    text = io.formula_to_text(f, "provenance; free: -")
    assert text.startswith(io.FORMULA_HEADER + "\n# provenance")
    assert io.formula_from_text(text) == f


def test_formula_header_required():
    with pytest.raises(io.FormatError):
        io.formula_from_text("E x. P(x)\n")
    with pytest.raises(io.FormatError):
        io.formula_from_text("")


def test_json_format_tags():
    with pytest.raises(io.FormatError):
        io._load_json("{nope", "tiles/1")
    with pytest.raises(io.FormatError):
        io._load_json('{"format": "frame/1"}', "tiles/1")


def test_tiles_labelling_frame_scheme_roundtrip():
    assert io.tiles_from_dict(io.tiles_to_dict(S2)) == S2
    L = {"0,0": S2.tiles[1], "1,0": S2.tiles[0]}
    assert io.labelling_from_dict(io.labelling_to_dict(2, 1, L, S2), S2) == (2, 1, L)
    f = synthesize_frame(2, 1, L, S2)
    assert io.frame_from_dict(json.loads(io.dumps(io.frame_to_dict(f)))) == f
    sc = scheme_torus(S2)
    back = io.scheme_from_dict(json.loads(io.dumps(io.scheme_to_dict(sc))))
    assert back.dom == sc.dom and back.relations == {k: (tuple(v[0]), v[1]) for k, v in sc.relations.items()}


def test_labelling_errors():
    good = io.labelling_to_dict(2, 1, {"0,0": S2.tiles[0], "1,0": S2.tiles[0]}, S2)
    with pytest.raises(io.FormatError):
        io.labelling_from_dict({**good, "m": 3}, S2)
    with pytest.raises(io.FormatError):
        io.labelling_from_dict({**good, "cells": {"0,0": 0, "1,0": 7}}, S2)
    with pytest.raises(io.FormatError):
        io.labelling_from_dict({"m": 1}, S2)
    with pytest.raises(io.FormatError):
        io.tiles_from_dict({"tiles": 5})


def test_atomic_write(tmp_path):
    target = tmp_path / "out.txt"
    io.atomic_write(target, "one")
    io.atomic_write(target, "two")
    assert target.read_text() == "two"
    assert os.listdir(tmp_path) == ["out.txt"]
    with pytest.raises(FileNotFoundError):
        io.atomic_write(tmp_path / "missing" / "x.txt", "z")


# -- command line -----------------------------------------------------------------

def test_tiles_solve_uniform(files, capsys):
    assert run(["tiles", "solve", "--tiles", files["uniform"], "--max", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("(1,1)\n")
    assert json.loads(out.split("\n", 1)[1])["cells"] == {"0,0": 0}


def test_tiles_solve_and_check(files, capsys, tmp_path):
    out = str(tmp_path / "sol.json")
    assert run(["tiles", "solve", "--tiles", files["s2"], "--max", "3", "-o", out]) == 0
    assert capsys.readouterr().out == "(2,1)\n"
    assert run(["tiles", "check", "--tiles", files["s2"], "--torus", out]) == 0
    assert run(["tiles", "check", "--tiles", files["s2"], "--torus", files["bad_torus"]]) == 1
    mismatch = write(tmp_path / "m.tiles", io.tiles_to_dict(TileSet((tile(0, 1, 0, 2),))))
    assert run(["tiles", "solve", "--tiles", mismatch, "--max", "2"]) == 1


def test_mc_matches_validator(files, tmp_path, capsys):
    for name, L in (("good", {"0,0": S2.tiles[0], "1,0": S2.tiles[1]}),
                    ("bad", {"0,0": S2.tiles[0], "1,0": S2.tiles[0]})):
        M = labelled_structure(build_torus(2, 1), S2, L)
        struct = write(tmp_path / f"{name}.struct", io.structure_to_dict(M))
        phi = write(tmp_path / "phi.fol", io.formula_to_text(tiling_sentence(S2)))
        want = is_valid_tiling(build_torus(2, 1), S2, L)
        assert run(["mc", "--structure", struct, "--formula", phi]) == (0 if want else 1)
        assert capsys.readouterr().out.strip() == ("true" if want else "false")


def test_mc_rejects_open_formulas(tmp_path):
    M = FiniteStructure(["a"], {"P": TableRelation(1, [("a",)])})
    struct = write(tmp_path / "m.struct", io.structure_to_dict(M))
    phi = write(tmp_path / "open.fol", io.formula_to_text(parse("P(x)")))
    assert run(["mc", "--structure", struct, "--formula", phi]) == 2
    broken = write(tmp_path / "broken.fol", io.FORMULA_HEADER + "\nE x P(x)\n")
    assert run(["mc", "--structure", struct, "--formula", broken]) == 2


@pytest.mark.parametrize("kind", FORMULA_KINDS + tuple(SCHEME_KINDS))
def test_compile_every_kind(kind, files, tmp_path):
    out = tmp_path / f"{kind}.out"
    args = ["compile", kind, "--tiles", files["s2"]]
    if kind in ("basis", "flat", "opentriangle"):
        args += ["--k", "2"]
    args += ["-o", str(out)]
    assert run(args) == 0
    text = out.read_text()
    if kind in SCHEME_KINDS:
        io.scheme_from_dict(json.loads(text))
    else:
        f = io.formula_from_text(text)
        assert io.formula_to_text(f, text.splitlines()[1][2:]) == text
    # byte-identical on a second run
    again = tmp_path / "again.out"
    run(args[:-1] + [str(again)])
    assert again.read_bytes() == out.read_bytes()


def test_compile_usage_errors(files):
    assert run(["compile", "tiling"]) == 2
    assert run(["compile", "scheme-grid"]) == 2
    assert run(["compile", "recurrent", "--tiles", files["s2"], "--tile", "5"]) == 2
    assert run(["compile", "basis", "--k", "-1"]) == 2
    assert run(["compile", "nonsense"]) == 2
    assert run(["tiles", "solve", "--tiles", files["s2"], "--max", "0"]) == 2
    assert run(["tiles", "solve", "--tiles", files["s2"]]) == 2
    assert run(["tiles", "check", "--tiles", "/nonexistent.tiles", "--torus", files["torus"]]) == 2
    assert run([]) == 2


def test_frame_commands(files, tmp_path, capsys):
    frame = str(tmp_path / "f.frame")
    assert run(["frame", "synth", "--tiles", files["s2"], "--torus", files["torus"], "-o", frame]) == 0
    assert run(["frame", "validate", "--tiles", files["s2"], "--frame", frame]) == 0
    assert capsys.readouterr().out == "valid\n"
    back = str(tmp_path / "back.json")
    assert run(["frame", "extract", "--tiles", files["s2"], "--frame", frame, "-o", back]) == 0
    assert json.loads(open(back).read()) == json.loads(open(files["torus"]).read())
    closure = str(tmp_path / "c.struct")
    assert run(["frame", "closure", "--frame", frame, "-o", closure]) == 0
    C = io.load_structure(closure)
    assert C.constants == {"p0": "o", "px": "px", "py": "py"}
    # corrupt: drop a label point
    data = json.loads(open(frame).read())
    data["points"].pop("d0_0_1")
    data["P"].remove("d0_0_1")
    corrupt = write(tmp_path / "bad.frame", data)
    capsys.readouterr()
    assert run(["frame", "validate", "--tiles", files["s2"], "--frame", corrupt]) == 1
    assert "not a tile index" in capsys.readouterr().out
    assert run(["frame", "extract", "--tiles", files["s2"], "--frame", corrupt]) == 1


def test_frame_closure_rejects_broken_frame(tmp_path, capsys):
    flat = {"format": "frame/1", "dim": 2, "points": {"a": ["0", "0"], "b": ["1", "0"], "c": ["2", "0"]},
            "P": ["a", "b", "c"], "p0": "a", "px": "b", "py": "c"}
    path = write(tmp_path / "flat.frame", flat)
    assert run(["frame", "closure", "--frame", path]) == 1
    assert "constants collinear" in capsys.readouterr().out


def test_verify_commands(files, capsys):
    assert run(["verify", "roundtrip", "--tiles", files["s2"], "--max", "3"]) == 0
    assert "PASS roundtrip: 90 cases" in capsys.readouterr().out
    assert run(["verify", "lemma1", "--count", "20"]) == 0
    assert run(["verify", "dualpath", "--max", "2", "--count", "2"]) == 0
    assert run(["verify", "roundtrip", "--count", "0"]) == 2


def test_verify_output_is_deterministic(capsys):
    run(["verify", "lemma1", "--count", "30", "--seed", "4"])
    first = capsys.readouterr().out.rsplit(",", 1)[0]
    run(["verify", "lemma1", "--count", "30", "--seed", "4"])
    assert capsys.readouterr().out.rsplit(",", 1)[0] == first


def test_labelling_file_cells_cover_torus(files):
    m, k, L = io.load_labelling(files["torus"], S2)
    assert set(L) == {cell_id(i, j) for i in range(m) for j in range(k)}
