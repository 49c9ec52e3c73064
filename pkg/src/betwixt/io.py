"""Versioned text formats for formulas, structures, frames, tiles, labellings and schemes.

Everything except formulas is JSON with a ``"format"`` key such as
``"frame/1"``.  Formula files start with the header line ``# fol v1``.
Rationals are written as ``"n/d"`` strings (``"n"`` when integral).
Writes go to a temporary file in the target directory and are renamed into
place, so an interrupted run never leaves a partial file.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from .folang import FiniteStructure, Formula, parse, to_text
from .folang.structure import TableRelation
from .interp import InterpretationScheme
from .tiling import TileSet, build_torus, cell_id, tile

FORMULA_HEADER = "# fol v1"


class FormatError(ValueError):
    """A file does not match the expected format."""


def atomic_write(path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _load_json(text: str, fmt: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict) or data.get("format") != fmt:
        raise FormatError(f"expected format {fmt!r}")
    return data


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


# -- rationals -------------------------------------------------------------------

def rat_to_text(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def rat_from_text(s) -> Fraction:
    if isinstance(s, bool):
        raise FormatError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not a rational: {s!r}") from None


# -- formulas --------------------------------------------------------------------

def formula_to_text(f: Formula, comment: str = "") -> str:
    lines = [FORMULA_HEADER]
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(to_text(f))
    return "\n".join(lines) + "\n"


def formula_from_text(text: str, vocabulary=None) -> Formula:
    first = text.lstrip().splitlines()[0].strip() if text.strip() else ""
    if first != FORMULA_HEADER:
        raise FormatError(f"formula files must start with {FORMULA_HEADER!r}")
    return parse(text, vocabulary)


# -- structures ------------------------------------------------------------------

def structure_to_dict(M: FiniteStructure) -> dict:
    rels, arities = {}, {}
    for name, rel in sorted(M.relations.items()):
        rels[name] = sorted(list(t) for t in rel)
        arities[name] = rel.arity
    out = {
        "format": "structure/1",
        "universe": list(M.universe),
        "relations": rels,
        "arities": arities,
        "constants": dict(sorted(M.constants.items())),
    }
    if M.sets:
        out["sets"] = {k: sorted(v) for k, v in sorted(M.sets.items())}
    return out


def structure_from_dict(data: dict) -> FiniteStructure:
    try:
        universe = [str(u) for u in data["universe"]]
        arities = {k: int(v) for k, v in data.get("arities", {}).items()}
        rels = {}
        for name, table in data.get("relations", {}).items():
            tuples = [tuple(str(x) for x in t) for t in table]
            ar = arities.get(name) or (len(tuples[0]) if tuples else None)
            if ar is None:
                raise FormatError(f"relation {name} is empty and has no declared arity")
            rels[name] = TableRelation(ar, tuples)
        for name, ar in arities.items():
            rels.setdefault(name, TableRelation(ar))
        return FiniteStructure(
            universe, rels, dict(data.get("constants", {})),
            {k: frozenset(v) for k, v in data.get("sets", {}).items()},
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed structure: {exc}") from None


def load_structure(path) -> FiniteStructure:
    return structure_from_dict(_load_json(read_text(path), "structure/1"))


# -- tiles and labellings --------------------------------------------------------

def tiles_to_dict(S: TileSet) -> dict:
    return {"format": "tiles/1", "tiles": [list(t) for t in S]}


def tiles_from_dict(data: dict) -> TileSet:
    try:
        return TileSet(tuple(tile(*t) for t in data["tiles"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed tile set: {exc}") from None


def load_tiles(path) -> TileSet:
    return tiles_from_dict(_load_json(read_text(path), "tiles/1"))


def labelling_to_dict(m: int, k: int, labelling, S: TileSet) -> dict:
    cells = {c: S.position(t) for c, t in labelling.items()}
    return {"format": "labelling/1", "m": m, "k": k, "cells": dict(sorted(cells.items()))}


def labelling_from_dict(data: dict, S: TileSet) -> tuple:
    """(m, k, labelling) with cells mapped back to tile types."""
    try:
        m, k = int(data["m"]), int(data["k"])
        cells = data["cells"]
        expected = set(build_torus(m, k).universe)
        if set(cells) != expected:
            raise FormatError(f"labelling must cover exactly the cells of the {m}x{k} torus")
        L = {}
        for c, pos in cells.items():
            if not isinstance(pos, int) or not 0 <= pos < len(S):
                raise FormatError(f"cell {c}: tile position {pos!r} out of range")
            L[c] = S.tiles[pos]
        return m, k, {cell_id(*map(int, c.split(","))): L[c] for c in sorted(L)}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed labelling: {exc}") from None


def load_labelling(path, S: TileSet) -> tuple:
    return labelling_from_dict(_load_json(read_text(path), "labelling/1"), S)


# -- frames ----------------------------------------------------------------------

def frame_to_dict(f) -> dict:
    return {
        "format": "frame/1",
        "dim": f.dim,
        "points": {pid: [rat_to_text(c) for c in f.points[pid]] for pid in sorted(f.points)},
        "P": sorted(f.P),
        "p0": f.p0,
        "px": f.px,
        "py": f.py,
    }


def frame_from_dict(data: dict):
    from .frames import FiniteCartesianFrame

    try:
        pts = {str(k): tuple(rat_from_text(c) for c in v) for k, v in data["points"].items()}
        return FiniteCartesianFrame(
            pts, data["p0"], data["px"], data["py"],
            frozenset(data["P"]) if "P" in data else None, int(data.get("dim", 2)),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed frame: {exc}") from None


def load_frame(path):
    return frame_from_dict(_load_json(read_text(path), "frame/1"))


# -- schemes ---------------------------------------------------------------------

def scheme_to_dict(scheme: InterpretationScheme) -> dict:
    return {
        "format": "scheme/1",
        "name": scheme.name,
        "dom_var": scheme.dom_var,
        "dom": to_text(scheme.dom),
        "relations": {
            rel: {"vars": list(vs), "formula": to_text(f)}
            for rel, (vs, f) in sorted(scheme.relations.items())
        },
    }


def scheme_from_dict(data: dict) -> InterpretationScheme:
    try:
        rels = {
            rel: (tuple(slot["vars"]), parse(slot["formula"]))
            for rel, slot in data["relations"].items()
        }
        return InterpretationScheme(parse(data["dom"]), data["dom_var"], rels, data.get("name", ""))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed scheme: {exc}") from None


def load_scheme(path) -> InterpretationScheme:
    return scheme_from_dict(_load_json(read_text(path), "scheme/1"))
