"""Batch fixture generation and verification."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .generate import FixtureError, generate_fixture, verify_fixture
from .molecule import hydrogen_chain, lithium_hydride


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hamgen", description="Molecular Hamiltonian fixture generator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate the standard fixture set")
    gen.add_argument("--out-dir", required=True)
    gen.add_argument(
        "--h4-lengths", default="0.6:1.8:0.1",
        help="start:stop:step in angstrom (inclusive)",
    )
    gen.add_argument("--lih-lengths", default="1.0:2.9:0.1")
    gen.add_argument("--skip-lih", action="store_true")

    ver = sub.add_parser("verify", help="verify fixture files")
    ver.add_argument("paths", nargs="+")

    args = parser.parse_args(argv)
    if args.command == "verify":
        failures = 0
        for path in args.paths:
            try:
                report = verify_fixture(path)
            except (FixtureError, OSError, KeyError, ValueError) as exc:
                print(f"FAIL {path}: {exc}")
                failures += 1
            else:
                print(
                    f"ok   {path}: {report.n_terms} terms, "
                    f"e_hf={report.e_hf!r}, e_fci={report.e_fci!r}"
                )
        return 1 if failures else 0

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = []
    for spacing in _parse_range(args.h4_lengths):
        specs.append(hydrogen_chain(4, spacing))
    if not args.skip_lih:
        for distance in _parse_range(args.lih_lengths):
            specs.append(lithium_hydride(distance))
    for spec in specs:
        path = out_dir / f"{spec.name.lower()}.ham"
        report = generate_fixture(spec, path)
        verify_fixture(path)
        print(
            f"wrote {path} ({report.n_qubits} qubits, {report.n_terms} terms, "
            f"e_hf={report.e_hf:.8f}, e_fci={report.e_fci:.8f})"
        )
    return 0


def _parse_range(text: str):
    start, stop, step = (float(tok) for tok in text.split(":"))
    return [round(v, 10) for v in np.arange(start, stop + step / 2, step)]


if __name__ == "__main__":
    sys.exit(main())
