"""``ontocell`` command line: run one experiment, write its artifacts.

Every run writes ``report.json`` plus command-specific CSV/PGM files and a
``manifest.json`` with a SHA-256 digest per file.  Data files depend only on
the config and the seed; the wall-clock timestamp lives in the manifest's
``metadata`` block and nowhere else.

Exit status: 0 all checks pass, 1 a check failed, 2 bad config or flags,
3 I/O failure.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, config, io, kinetic, su2
from . import automaton as am
from . import sieve as sv
from .cell import CellSpec, energy_levels, fourier_matrix, hamiltonian, shift_operator
from .numerics import dagger, mat_exp

DEFAULT_SEED = 20240101
EXIT_OK, EXIT_ASSERT, EXIT_SCHEMA, EXIT_IO = 0, 1, 2, 3


def _check(checks, name, value, tol, strict=True):
    ok = bool(value < tol) if strict else bool(value <= tol)
    checks.append({"name": name, "value": float(value), "tol": float(tol), "ok": ok})


def run_cell_spectrum(params, tol, rng, out: Path):
    n_max = config._int(params["N_max"], "N_max", 1)
    dt = float(config._real(params["delta_t"], "delta_t"))
    rows, eig_err, shift_err, level_err = [], 0.0, 0.0, 0.0
    for n in range(1, n_max + 1):
        spec = CellSpec(n, dt)
        f = fourier_matrix(spec)
        u = shift_operator(spec)
        target = np.diag(np.exp(-2j * np.pi * np.arange(n) / n))
        eig_err = max(eig_err, float(np.max(np.abs(dagger(f) @ u @ f - target))))
        shift_err = max(shift_err, float(np.max(np.abs(mat_exp(hamiltonian(spec), -1j * dt) - u))))
        w = np.linalg.eigvalsh(hamiltonian(spec))
        levels = energy_levels(spec)
        level_err = max(level_err, float(np.max(np.abs(np.sort(w) - levels))))
        rows.extend((n, k, levels[k]) for k in range(n))
    io.write_csv(out / "spectrum.csv", ["N", "n", "energy"], rows)
    checks = []
    _check(checks, "fourier_diagonalizes_shift", eig_err, tol["eig"])
    _check(checks, "exp_H_equals_shift", shift_err, tol["shift"])
    _check(checks, "spectrum_n_omega", level_err, tol["shift"])
    return ["spectrum.csv"], {"N_max": n_max, "delta_t": dt}, checks


def run_su2_matrix(params, tol, rng, out: Path):
    ell = config._fraction(params["ell"], "ell")
    factor = float(config._real(params["radius_factor"], "radius_factor"))
    try:
        rec = su2.bridge_by_recursion(ell)
        rot = su2.bridge_by_rotation(ell)
    except ValueError as exc:
        raise config.SchemaError(str(exc)) from exc
    diff = float(np.max(np.abs(rec.entries - rot.entries)))
    support = su2.support_profile(rec, factor)
    su2.write_bridge_csv(rec, out / "bridge.csv")
    su2.render_bridge(rec, out / "bridge.pgm")
    checks = []
    _check(checks, "recursion_vs_rotation", diff, tol["agree"])
    if ell == Fraction(53, 2) and factor == 1.15:
        _check(checks, "support_outside_1.15_ell", support, tol["support"])
    summary = {"ell": str(ell), "dim": rec.dim, "max_diff": diff, "radius_factor": factor,
               "support_max": support, "phase_convention": rec.phase_convention}
    return ["bridge.csv", "bridge.pgm"], summary, checks


def run_automaton_verify(params, tol, rng, out: Path):
    lattice, terms = config.parse_lattice(params)
    if any(not t.is_ontological for t in terms):
        raise config.SchemaError("automaton-verify checks classical equivalence; all strengths must be pi")
    report = am.verify_equivalence(lattice, terms, tol["perm"])
    rows = []
    for idx, ks in enumerate(lattice.configurations()):
        q = int(report.quantum_map[idx]) if report.quantum_map is not None else -1
        rows.append((idx, " ".join(map(str, ks)), int(report.classical_map[idx]), q))
    io.write_csv(out / "permutation.csv", ["index", "config", "classical", "quantum"], rows)
    loc = am.locality_report(lattice, terms)
    io.write_csv(out / "locality.csv", ["i", "j", "commutator_norm", "disjoint", "adjacent"],
                 [(e.pair[0], e.pair[1], e.norm, int(e.disjoint), int(e.adjacent)) for e in loc])
    n_random = config._int(params["random_lattices"], "random_lattices", 0)
    passed, worst_disjoint = 0, 0.0
    for _ in range(n_random):
        lat, ts = am.random_lattice(rng)
        passed += am.verify_equivalence(lat, ts, tol["perm"]).ok
        for e in am.locality_report(lat, ts):
            if e.disjoint:
                worst_disjoint = max(worst_disjoint, e.norm)
    for e in loc:
        if e.disjoint:
            worst_disjoint = max(worst_disjoint, e.norm)
    checks = [{"name": "configured_lattice_equivalence", "value": float(report.residual),
               "tol": tol["perm"], "ok": bool(report.ok)},
              {"name": "random_lattices_equivalent", "value": passed, "tol": n_random,
               "ok": passed == n_random}]
    _check(checks, "disjoint_terms_commute", worst_disjoint, tol["local"], strict=False)
    summary = {"sizes": list(lattice.sizes), "terms": len(terms), "dim": lattice.dim,
               "random_lattices": n_random, "random_passed": passed}
    return ["permutation.csv", "locality.csv"], summary, checks


def run_sieve_compare(params, tol, rng, out: Path):
    try:
        cfg = sv.SieveModelConfig(config._real(params["L"], "L"), config._real(params["A"], "A"),
                                  config._real(params["alpha"], "alpha"),
                                  config._int(params["n_max"], "n_max", 1))
        y_samples = config._int(params["y_samples"], "y_samples", 4)
        oracle = sv.brute_force_scattering(cfg, y_samples)
    except ValueError as exc:
        if isinstance(exc, config.SchemaError):
            raise
        raise config.SchemaError(str(exc)) from exc
    smap = sv.scattering_map(cfg)
    size = cfg.n_max + 1
    idx = np.arange(size)
    safe = np.tile(np.abs(idx[:, None] - idx[None, :]) <= cfg.n_max / 2, (2, 2))
    diff = np.abs(smap - oracle)
    rows = []
    for r in range(2 * size):
        for c in range(2 * size):
            rows.append((r, c, smap[r, c].real, smap[r, c].imag, oracle[r, c].real, oracle[r, c].imag,
                         diff[r, c], int(safe[r, c])))
    io.write_csv(out / "scattering.csv",
                 ["row", "col", "map_re", "map_im", "oracle_re", "oracle_im", "abs_diff", "safe"], rows)
    deficit = sv.norm_deficit(cfg)
    io.write_csv(out / "deficit.csv", ["trace", "n", "deficit"],
                 [("0" if c < size else "A", c % size, deficit[c]) for c in range(2 * size)])
    io.write_pgm(out / "scattering.pgm", io.grayscale(np.abs(smap), invert=True))
    a, b = float(cfg.alpha), float(1 - cfg.alpha)
    block = smap[np.ix_([0, size], [0, size])]
    block_err = float(np.max(np.abs(block - np.array([[b, a], [a, b]]))))
    checks = []
    _check(checks, "map_vs_oracle_safe_block", float(np.max(diff[safe])), tol["agree"])
    _check(checks, "n0_block", block_err, 0.0, strict=False)
    summary = {"L": str(cfg.L), "A": str(cfg.A), "alpha": str(cfg.alpha), "n_max": cfg.n_max,
               "y_samples": y_samples, "max_diff_safe": float(np.max(diff[safe])),
               "max_diff_all": float(np.max(diff)), "deficit_n0": float(deficit[0])}
    return ["scattering.csv", "deficit.csv", "scattering.pgm"], summary, checks


def _kinetic_spec(params):
    preset = params.get("preset")
    m = config._int(params.get("M", 256), "M", 4)
    extra = {k: float(config._real(params[k], k)) for k in ("p_min", "p_max") if k in params}
    try:
        if preset in kinetic.PRESETS:
            return kinetic.PRESETS[preset](m, **extra)
        if preset == "custom":
            if "p" not in params or "T" not in params:
                raise config.SchemaError("custom kinetic preset needs 'p' and 'T' arrays")
            return kinetic.from_samples(params["p"], params["T"], params.get("v"))
    except config.SchemaError:
        raise
    except (TypeError, ValueError) as exc:
        raise config.SchemaError(f"kinetic spec: {exc}") from exc
    raise config.SchemaError(f"preset must be one of {sorted(kinetic.PRESETS) + ['custom']}, got {preset!r}")


def run_kinetic_kernel(params, tol, rng, out: Path):
    spec = _kinetic_spec(params)
    n_y = config._int(params["n_y"], "n_y", 2)
    x, y = kinetic.kernel_grids(spec, n_y)
    k = kinetic.beable_kernel(spec, x, y)
    gram = kinetic.gram_deviation(k)
    pr = kinetic.participation_ratio(k)
    yop = kinetic.beable_operator(spec)
    herm = float(np.max(np.abs(yop - yop.conj().T)))
    rows = [(i, j, k[i, j].real, k[i, j].imag) for i in range(len(x)) for j in range(len(y))]
    io.write_csv(out / "kernel.csv", ["x_index", "y_index", "re", "im"], rows)
    io.write_csv(out / "participation.csv", ["x", "participation_ratio"], list(zip(x.tolist(), pr.tolist())))
    io.write_pgm(out / "kernel.pgm", io.grayscale(np.abs(k), invert=True))
    checks = []
    _check(checks, "beable_hermitian", herm, tol["hermitian"])
    if spec.name == "linear":
        _check(checks, "kernel_gram_identity", gram, tol["gram"])
    summary = {"preset": spec.name, "M": spec.M, "n_y": n_y, "gram_deviation": gram,
               "monotone": spec.monotone, "support": kinetic.effective_support(spec),
               "mean_participation_ratio": float(np.mean(pr))}
    if spec.M % 2 == 0:
        drift = kinetic.drift_check(spec)
        summary["drift"] = drift
        _check(checks, "drift_below_tol", drift, tol["drift"])
    return ["kernel.csv", "participation.csv", "kernel.pgm"], summary, checks


RUNNERS = {
    "cell-spectrum": run_cell_spectrum,
    "su2-matrix": run_su2_matrix,
    "automaton-verify": run_automaton_verify,
    "sieve-compare": run_sieve_compare,
    "kinetic-kernel": run_kinetic_kernel,
}


def parse_tolerances(command: str, pairs) -> dict:
    tol = dict(config.TOLERANCES[command])
    for item in pairs or []:
        key, sep, val = item.partition("=")
        if not sep or key not in tol:
            raise config.SchemaError(f"--tol expects KEY=VAL with KEY in {sorted(tol)}, got {item!r}")
        try:
            tol[key] = float(val)
        except ValueError as exc:
            raise config.SchemaError(f"--tol {key}: not a number: {val!r}") from exc
    return tol


def run(command: str, cfg: dict, out_dir, seed: int = DEFAULT_SEED, tol: dict | None = None):
    """Execute one command; returns ``(exit_status, manifest)``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tol = dict(config.TOLERANCES[command]) if tol is None else tol
    rng = np.random.default_rng(seed)
    files, summary, checks = RUNNERS[command](cfg["params"], tol, rng, out)
    status = EXIT_OK if all(c["ok"] for c in checks) else EXIT_ASSERT
    report = {"schema": config.SCHEMA, "command": command, "seed": seed, "params": cfg["params"],
              "tolerances": tol, "summary": summary, "checks": checks, "passed": status == EXIT_OK}
    io.write_json(out / "report.json", report)
    files = files + ["report.json"]
    manifest = {
        "schema": config.SCHEMA,
        "command": command,
        "seed": seed,
        "exit_status": status,
        "files": [{"path": f, "sha256": io.sha256(out / f), "bytes": (out / f).stat().st_size} for f in files],
        "metadata": {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(), "version": __version__},
    }
    io.write_json(out / "manifest.json", manifest)
    return status, manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontocell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in config.COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON config (schema ontocell/1); defaults if omitted")
        p.add_argument("--out", type=Path, default=Path("ontocell-out"), help="output directory")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--tol", action="append", metavar="KEY=VAL", help="override a check tolerance")
        p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(os.environ["ONTOCELL_OUT"]) if os.environ.get("ONTOCELL_OUT") else args.out
    try:
        cfg = config.load(args.config) if args.config else config.default(args.command)
        if cfg["command"] != args.command:
            raise config.SchemaError(f"config is for {cfg['command']!r}, not {args.command!r}")
        tol = parse_tolerances(args.command, args.tol)
        if not 0 <= args.seed < 2**64:
            raise config.SchemaError("seed must be a 64-bit unsigned integer")
        status, manifest = run(args.command, cfg, out, args.seed, tol)
    except config.SchemaError as exc:
        print(f"ontocell: config error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"ontocell: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not args.quiet:
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        for c in report["checks"]:
            print(f"{'PASS' if c['ok'] else 'FAIL'} {c['name']} value={c['value']:.3g} tol={c['tol']:.3g}")
        print(f"wrote {len(manifest['files'])} files to {out}")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
