"""Command-line surface: every driver behind reproducible configs.

Each run echoes its full effective configuration and the package
version into the output artifact, so a result file is a complete
experiment record.  Exit codes: 0 success, 1 input error, 2 ran but
found no result (e.g. no plateau).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, oracle
from .direct import run_direct
from .evolution import Exact, Trotter
from .experiments import (
    ScanConfig,
    TauGrid,
    excited_state_scan,
    fit_deviation_scaling,
    ground_state_search,
    single_excitation_refs,
    trotter_deviation_sweep,
)
from .hamiltonian import ParseError, parse_hamiltonian
from .sigma import moment_table, parse_noise
from .statevector import basis_state

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_RESULT = 2

DEFAULT_POWERS = "1,2,4,8,16,32,64"
DEFAULT_DELTAS = "0.01,0.02,0.05,0.1,0.2"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psho",
        description="Sine-filter eigenstate energies for Pauli-string Hamiltonians",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--ham", help="path to the .ham Hamiltonian file")
        p.add_argument("--ref", action="append", help="reference bitstring (repeatable)")
        p.add_argument("--tau-start", type=float, dest="tau_start")
        p.add_argument("--tau-stop", type=float, dest="tau_stop")
        p.add_argument("--tau-steps", type=int, dest="tau_steps")
        p.add_argument("--powers", help=f"comma list of powers (default {DEFAULT_POWERS})")
        p.add_argument("--delta", type=float, help="product-step length for trotter mode")
        p.add_argument("--mode", choices=["exact", "trotter"], default=None)
        p.add_argument("--noise", help="exact | shots:N:SEED | quantize:D")
        p.add_argument("--offset", type=float, help="identity-term offset")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--threads", type=int)
        p.add_argument("--config", help="JSON file of flag defaults; flags override")

    for name, descr in [
        ("ground", "tau-descent ground-state search"),
        ("excited", "tau-ascent excited-state scan with plateau pooling"),
        ("moments", "measure one moment table"),
        ("trotter-error", "product-step deviation sweep and envelope fits"),
        ("direct-prob", "Monte-Carlo success statistics of the direct route"),
        ("spectrum", "exact dense eigenvalues"),
    ]:
        p = sub.add_parser(name, help=descr)
        common(p)
        if name == "excited":
            p.add_argument("--e0", type=float, help="ground energy (oracle if omitted)")
            p.add_argument(
                "--singles", action="store_true",
                help="add all single excitations of the first reference",
            )
        if name == "moments":
            p.add_argument("--max-m", type=int, dest="max_m", default=32)
        if name == "trotter-error":
            p.add_argument("--deltas", help=f"comma list (default {DEFAULT_DELTAS})")
        if name == "direct-prob":
            p.add_argument("--n", type=int, default=0, help="filter rounds")
            p.add_argument("--trials", type=int, default=10000)
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    """Effective settings: hardcoded defaults < config file < flags."""
    settings: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        settings.update(json.loads(path.read_text()))
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            settings[key.replace("_", "-")] = value
    settings.setdefault("mode", "exact")
    settings.setdefault("noise", "exact")
    settings.setdefault("format", "csv")
    settings.setdefault("powers", DEFAULT_POWERS)
    settings.setdefault("offset", 0.0)
    settings.setdefault("seed", 0)
    settings.setdefault("threads", 1)
    return settings


def _load_hamiltonian(settings: dict):
    path = settings.get("ham")
    if not path:
        raise ValueError("--ham is required")
    file = Path(path)
    if not file.is_file():
        raise FileNotFoundError(f"Hamiltonian file not found: {file}")
    return parse_hamiltonian(file.read_text())


def _references(settings: dict, h) -> list[str]:
    refs = settings.get("ref")
    if refs:
        return list(refs)
    hf = h.metadata.get("hf_bitstring")
    if not hf:
        raise ValueError("no --ref given and the file lacks hf_bitstring metadata")
    return [hf]


def _evolution_mode(settings: dict):
    if settings["mode"] == "trotter":
        delta = settings.get("delta")
        if not delta:
            raise ValueError("trotter mode requires --delta")
        return Trotter(delta)
    return Exact()


def _powers(settings: dict) -> tuple[int, ...]:
    return tuple(int(tok) for tok in str(settings["powers"]).split(",") if tok)


def _tau_grid(settings: dict) -> TauGrid | None:
    start, stop = settings.get("tau-start"), settings.get("tau-stop")
    if start is None and stop is None:
        return None
    if stop is None:
        stop = start
    if start is None:
        start = stop
    return TauGrid(start, stop, settings.get("tau-steps") or 1)


def _scan_config(settings: dict) -> ScanConfig:
    return ScanConfig(
        powers=_powers(settings),
        tau_grid=_tau_grid(settings),
        noise=parse_noise(settings["noise"]),
        mode=_evolution_mode(settings),
        offset_eps=settings["offset"],
        workers=settings["threads"],
    )


def _emit(settings: dict, payload: dict, csv_body: str | None) -> None:
    """Write the artifact; JSON embeds config, CSV carries it as comments.

    The output path is not part of the experiment and is excluded, so
    identical configurations give identical bytes wherever they land.
    """
    echoed = {k: v for k, v in settings.items() if k != "out"}
    config_blob = json.dumps(echoed, sort_keys=True)
    if settings["format"] == "json":
        text = json.dumps(
            {"version": __version__, "config": echoed, "result": payload},
            sort_keys=True,
            indent=2,
            default=lambda o: repr(o),
        ) + "\n"
    else:
        header = f"# version={__version__}\n# config={config_blob}\n"
        text = header + (csv_body if csv_body is not None else json.dumps(payload) + "\n")
    out = settings.get("out")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_spectrum(settings: dict) -> int:
    h = _load_hamiltonian(settings)
    spectrum = oracle.diagonalize(h)
    rows = "\n".join(f"{i},{float(e)!r}" for i, e in enumerate(spectrum.eigenvalues))
    payload = {"eigenvalues": [float(e) for e in spectrum.eigenvalues]}
    _emit(settings, payload, "index,energy\n" + rows + "\n")
    return EXIT_OK


def _cmd_moments(settings: dict, max_m: int) -> int:
    h = _load_hamiltonian(settings)
    ref = _references(settings, h)[0]
    tau = settings.get("tau-start")
    if tau is None:
        raise ValueError("moments requires --tau-start")
    table = moment_table(
        h, basis_state(ref, h.n_qubits), tau, max_m,
        _evolution_mode(settings), parse_noise(settings["noise"]),
        workers=settings["threads"],
    )
    payload = {
        "tau": table.tau,
        "c": [float(v) for v in table.c],
        "h": [float(v) for v in table.h],
    }
    _emit(settings, payload, table.to_csv())
    return EXIT_OK


def _cmd_ground(settings: dict) -> int:
    h = _load_hamiltonian(settings)
    ref = _references(settings, h)[0]
    cfg = _scan_config(settings)
    result = ground_state_search(h, basis_state(ref, h.n_qubits), cfg)
    rows = ["tau,energy,energy_qn,n_energy,n_qn,flags"]
    for row in result.trace_rows():
        rows.append(
            f"{row['tau']!r},{row['energy']!r},{row['energy_qn']!r},"
            f"{row['n_energy']},{row['n_qn']},{row['flags']}"
        )
    summary = {
        "found": result.found,
        "energy": result.energy,
        "plateaus": [
            {
                "tau_start": p.tau_start,
                "tau_stop": p.tau_stop,
                "energy": p.energy,
                "n_points": p.n_points,
            }
            for p in result.plateaus
        ],
        "trace": result.trace_rows(),
    }
    _emit(settings, summary, "\n".join(rows) + "\n")
    return EXIT_OK if result.found else EXIT_NO_RESULT


def _cmd_excited(settings: dict, e0: float | None, singles: bool) -> int:
    h = _load_hamiltonian(settings)
    refs = _references(settings, h)
    if singles:
        extra = single_excitation_refs(refs[0])
        refs = list(dict.fromkeys(refs + extra))
    cfg = _scan_config(settings)
    if e0 is None:
        e0 = float(oracle.diagonalize(h).eigenvalues[0])
    report = excited_state_scan(h, refs, cfg, e0)
    rows = ["reference,tau_start,tau_stop,energy,n_used,matched_index,matched_energy"]
    for hit in report.hits:
        rows.append(
            f"{hit.reference},{hit.tau_start!r},{hit.tau_stop!r},{hit.energy!r},"
            f"{hit.n_used},{hit.matched_index},{hit.matched_energy!r}"
        )
    payload = {
        "merged_energies": report.merged_energies,
        "hits": [vars(hit) for hit in report.hits],
    }
    _emit(settings, payload, "\n".join(rows) + "\n")
    return EXIT_OK if report.hits else EXIT_NO_RESULT


def _cmd_trotter_error(settings: dict, deltas_text: str | None) -> int:
    h = _load_hamiltonian(settings)
    ref = _references(settings, h)[0]
    deltas = [float(tok) for tok in (deltas_text or DEFAULT_DELTAS).split(",")]
    start = settings.get("tau-start") or 0.25
    stop = settings.get("tau-stop") or 8.0
    steps = settings.get("tau-steps") or 32
    grid = TauGrid(start, stop, steps)
    table = trotter_deviation_sweep(h, basis_state(ref, h.n_qubits), deltas, grid)
    fits = fit_deviation_scaling(table)
    rows = ["delta,factor_c,factor_h"]
    for delta in sorted(fits.c_fit.factors):
        rows.append(
            f"{delta!r},{fits.c_fit.factors[delta]!r},{fits.h_fit.factors[delta]!r}"
        )
    payload = {
        "factors_c": {repr(d): f for d, f in fits.c_fit.factors.items()},
        "factors_h": {repr(d): f for d, f in fits.h_fit.factors.items()},
        "quad_coeff_c": fits.c_fit.quad_coeff,
        "quad_coeff_h": fits.h_fit.quad_coeff,
        "quad_residual_c": fits.c_fit.quad_residual,
        "quad_residual_h": fits.h_fit.quad_residual,
        "loglog_slope_c": fits.c_fit.loglog_slope,
        "loglog_slope_h": fits.h_fit.loglog_slope,
    }
    _emit(settings, payload, "\n".join(rows) + "\n")
    return EXIT_OK


def _cmd_direct(settings: dict, n: int, trials: int) -> int:
    h = _load_hamiltonian(settings)
    ref = _references(settings, h)[0]
    tau = settings.get("tau-start")
    if tau is None:
        raise ValueError("direct-prob requires --tau-start")
    stats = run_direct(
        h, basis_state(ref, h.n_qubits), tau, n, trials,
        settings["seed"], _evolution_mode(settings),
    )
    payload = stats.to_dict()
    _emit(settings, payload, json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        settings = _merge_config(args)
        if args.command == "spectrum":
            return _cmd_spectrum(settings)
        if args.command == "moments":
            return _cmd_moments(settings, args.max_m)
        if args.command == "ground":
            return _cmd_ground(settings)
        if args.command == "excited":
            return _cmd_excited(settings, args.e0, args.singles)
        if args.command == "trotter-error":
            return _cmd_trotter_error(settings, args.deltas)
        if args.command == "direct-prob":
            return _cmd_direct(settings, args.n, args.trials)
        raise ValueError(f"unknown command {args.command}")
    except (OSError, ValueError, ParseError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
