"""JSON run configurations, schema ``ontocell/1``.

A document looks like::

    {"schema": "ontocell/1", "command": "su2-matrix", "params": {"ell": "53/2"}}

``params`` is optional; missing keys take the defaults in :data:`DEFAULTS`.
Rational values may be given as strings (``"53/2"``).  Exchange strengths
accept the string ``"pi"``.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction

from .automaton import ExchangeTerm, LatticeSpec, SieveCondition

SCHEMA = "ontocell/1"
COMMANDS = ("cell-spectrum", "su2-matrix", "automaton-verify", "sieve-compare", "kinetic-kernel")

DEFAULTS = {
    "cell-spectrum": {"N_max": 64, "delta_t": 1.0},
    "su2-matrix": {"ell": "53/2", "radius_factor": 1.15},
    "automaton-verify": {
        "cells": [4, 3],
        "delta_t": 1.0,
        "neighbor_pairs": [[0, 1]],
        "terms": [{"target": 0, "k1": 0, "k2": 2, "condition": {"cell": 1, "values": [1]}}],
        "random_lattices": 100,
    },
    "sieve-compare": {"L": 2, "A": 1, "alpha": "1/2", "n_max": 8, "y_samples": 256},
    "kinetic-kernel": {"preset": "quadratic-positive", "M": 256, "n_y": 64},
}

# default assertion tolerances, overridable with --tol KEY=VAL
TOLERANCES = {
    "cell-spectrum": {"eig": 1e-12, "shift": 1e-10},
    "su2-matrix": {"agree": 1e-8, "support": 1e-2},
    "automaton-verify": {"perm": 1e-10, "local": 1e-12},
    "sieve-compare": {"agree": 1e-6},
    "kinetic-kernel": {"gram": 1e-8, "hermitian": 1e-10, "drift": 1e-2},
}


class SchemaError(ValueError):
    """The configuration document does not match ``ontocell/1``."""


def _fraction(value, key):
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{key}: expected a number or 'p/q' string, got {value!r}") from exc


def _int(value, key, lo=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{key}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise SchemaError(f"{key}: must be >= {lo}, got {value}")
    return value


def _real(value, key):
    if isinstance(value, bool):
        raise SchemaError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, str):
        return _fraction(value, key)
    if not isinstance(value, (int, float)):
        raise SchemaError(f"{key}: expected a number, got {value!r}")
    return value


def load(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return validate(doc)


def validate(doc, command: str | None = None) -> dict:
    """Check the envelope and merge ``params`` over the command defaults."""
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"schema must be {SCHEMA!r}, got {doc.get('schema')!r}")
    cmd = doc.get("command", command)
    if cmd not in COMMANDS:
        raise SchemaError(f"command must be one of {COMMANDS}, got {cmd!r}")
    if command is not None and cmd != command:
        raise SchemaError(f"config is for {cmd!r}, not {command!r}")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("params must be an object")
    unknown = set(params) - set(DEFAULTS[cmd]) - {"p", "T", "v", "p_min", "p_max"}
    if unknown:
        raise SchemaError(f"unknown params for {cmd}: {sorted(unknown)}")
    merged = dict(DEFAULTS[cmd])
    merged.update(params)
    return {"schema": SCHEMA, "command": cmd, "params": merged}


def default(command: str) -> dict:
    return validate({"schema": SCHEMA, "command": command})


def parse_term(obj, key="term") -> ExchangeTerm:
    if not isinstance(obj, dict):
        raise SchemaError(f"{key}: expected an object")
    strength = obj.get("strength", "pi")
    if strength == "pi":
        strength = math.pi
    else:
        strength = float(_real(strength, f"{key}.strength"))
    cond = obj.get("condition")
    condition = None
    if cond is not None:
        if not isinstance(cond, dict) or not isinstance(cond.get("values"), list):
            raise SchemaError(f"{key}.condition: expected {{'cell': i, 'values': [...]}}")
        values = [_int(v, f"{key}.condition.values", 0) for v in cond["values"]]
        condition = SieveCondition(_int(cond.get("cell"), f"{key}.condition.cell", 0), frozenset(values))
    try:
        return ExchangeTerm(
            _int(obj.get("target"), f"{key}.target", 0),
            _int(obj.get("k1"), f"{key}.k1", 0),
            _int(obj.get("k2"), f"{key}.k2", 0),
            condition,
            strength,
            _int(obj.get("sign", 1), f"{key}.sign"),
        )
    except ValueError as exc:
        raise SchemaError(f"{key}: {exc}") from exc


def parse_lattice(params: dict):
    """``(LatticeSpec, [ExchangeTerm])`` from automaton-verify params."""
    cells = params.get("cells")
    if not isinstance(cells, list) or not cells:
        raise SchemaError("cells: expected a non-empty list of sizes")
    sizes = [_int(c if not isinstance(c, dict) else c.get("N"), "cells[]", 1) for c in cells]
    pairs = params.get("neighbor_pairs", [])
    if not isinstance(pairs, list) or any(not isinstance(p, list) or len(p) != 2 for p in pairs):
        raise SchemaError("neighbor_pairs: expected a list of [i, j] pairs")
    terms = params.get("terms", [])
    if not isinstance(terms, list):
        raise SchemaError("terms: expected a list")
    try:
        lattice = LatticeSpec.from_sizes(sizes, float(_real(params.get("delta_t", 1.0), "delta_t")),
                                         [tuple(p) for p in pairs])
        parsed = [parse_term(t, f"terms[{i}]") for i, t in enumerate(terms)]
        for t in parsed:
            t.validate(lattice)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return lattice, parsed
