"""Command-line front end. All reports are JSON on stdout; diagnostics go to stderr."""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Sequence

from . import chartable, invariants, matgroup, obstruction, sympow
from .chartable import DEFAULT_MAX_DEGREE, TableParseError
from .exactnum import binomial


ENV_DATA = "EXCEPTCHECK_DATA"
EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVALID = 0, 1, 2, 3
VERDICT_EXIT = {"criterion-verified": 0, "not-exceptional": 10, "inconclusive": 20}


def _diag(message: str) -> None:
    sys.stderr.write(f"exceptcheck: {message}\n")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def data_dir(override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    if os.environ.get(ENV_DATA):
        return Path(os.environ[ENV_DATA])
    return Path(str(resources.files("exceptcheck") / "data"))


def resolve(arg: str, directory: Path, suffix: str = ".json") -> Path:
    """A path if it exists, otherwise a bundled file name (with or without .json)."""
    p = Path(arg)
    if p.exists():
        return p
    for cand in (directory / arg, directory / f"{arg}{suffix}"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no such file or bundled name: {arg}")


def _emit(obj: Dict[str, object], json_path: Optional[str]) -> None:
    text = json.dumps({"schema": obstruction.SCHEMA, **obj}, indent=2, ensure_ascii=False)
    sys.stdout.write(text + "\n")
    if json_path:
        Path(json_path).write_text(text + "\n", encoding="utf-8")


def _load_valid(arg: str, args) -> chartable.CharacterTable:
    t = chartable.load(resolve(arg, data_dir(args.data_dir)))
    report = chartable.validate(t, max(args.max, 5))
    if not report.ok:
        raise _Invalid(report.to_dict())
    return t


class _Invalid(Exception):
    pass


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    t = chartable.load(resolve(args.table, data_dir(args.data_dir)))
    report = chartable.validate(t, args.max)
    _emit({"command": "validate", "group_name": t.group_name, **report.to_dict()}, args.json)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_sympow(args) -> int:
    t = _load_valid(args.table, args)
    chi = t.distinguished
    degrees = [args.n] if args.n is not None else list(range(1, 6))
    syms = sympow.sym_power_characters(chi, max(degrees))
    ambient = t.distinguished_degree - 1
    rows = []
    for n in degrees:
        d = sympow.decompose(syms[n])
        full = binomial(ambient + n, n)
        allowed = sorted({full - q for q in sympow.achievable_subdims(d)} - {0})
        rows.append({"n": n, **d.to_dict(), "irreducible": d.parts == ((d.parts[0][0], 1),) if d.parts else False, "allowed_h": allowed})
    _emit({"command": "sympow", "group_name": t.group_name, "representation": t.distinguished_rep, "powers": rows}, args.json)
    return EXIT_OK


def cmd_molien(args) -> int:
    t = _load_valid(args.table, args)
    _emit({"command": "molien", **invariants.molien_table(t, args.max)}, args.json)
    return EXIT_OK


def cmd_check(args) -> int:
    t = _load_valid(args.table, args)
    cert = obstruction.check_exceptionality(t, args.max)
    _emit({"command": "check-exceptional", **cert.to_dict()}, args.json)
    return VERDICT_EXIT[cert.verdict]


def cmd_closure(args) -> int:
    path = resolve(args.file, data_dir(args.data_dir) / "generators")
    gens, meta = matgroup.load_generators(path)
    group = matgroup.closure(gens, args.max_order, meta.get("conductor_hint"))
    dets = [g.determinant().literal() for g in gens]
    _emit(
        {
            "command": "closure",
            "file": path.name,
            "dimension": group.dimension,
            "conductor": group.conductor,
            "generator_determinants": dets,
            "order": group.order,
        },
        args.json,
    )
    return EXIT_OK


def cmd_group_molien(args) -> int:
    path = resolve(args.file, data_dir(args.data_dir) / "generators")
    gens, meta = matgroup.load_generators(path)
    group = matgroup.closure(gens, args.max_order, meta.get("conductor_hint"))
    coeffs = matgroup.direct_molien_coefficients(group, args.n)
    _emit(
        {"command": "group-molien", "file": path.name, "order": group.order, "coefficients": coeffs},
        args.json,
    )
    return EXIT_OK


def cmd_report_all(args) -> int:
    directory = data_dir(args.data_dir)
    rows = []
    status = EXIT_OK
    for path in sorted(directory.glob("*.json")):
        try:
            t = chartable.load(path)
        except TableParseError as exc:
            _diag(f"{path.name}: {exc}")
            status = EXIT_INVALID
            continue
        report = chartable.validate(t, args.max)
        if not report.ok:
            _diag(f"{path.name}: {len(report.violations)} validation violations")
            rows.append({"table": path.stem, "group_name": t.group_name, "verdict": "invalid"})
            status = EXIT_INVALID
            continue
        cert = obstruction.check_exceptionality(t, args.max)
        open_cases = obstruction.assess(cert.to_dict())["open"]
        rows.append(
            {
                "table": path.stem,
                "group_name": t.group_name,
                "dimension": t.distinguished_degree,
                "representation": t.distinguished_rep,
                "verdict": cert.verdict,
                "witness_degree": cert.witness_degree,
                "open_cases": open_cases,
            }
        )
    verified = [r["group_name"] for r in rows if r["verdict"] == "criterion-verified"]
    inconclusive = [r["group_name"] for r in rows if r["verdict"] == "inconclusive"]
    summary = {
        "criterion_verified": verified,
        "inconclusive": inconclusive,
        "not_exceptional": [r["group_name"] for r in rows if r["verdict"] == "not-exceptional"],
    }
    _emit({"command": "report-all", "rows": rows, "summary": summary}, args.json)
    return status


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write the report to PATH")
    common.add_argument("--data-dir", metavar="PATH", help=f"bundled data directory (env {ENV_DATA})")
    common.add_argument("--max", type=int, default=DEFAULT_MAX_DEGREE, help="largest degree searched (default 12)")

    p = _Parser(prog="exceptcheck", description="Exact checks for exceptional quotient singularities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="validate a character table")
    s.add_argument("table")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("sympow", parents=[common], help="decompose symmetric powers")
    s.add_argument("table")
    s.add_argument("--n", type=int, help="single power (default 1..5)")
    s.set_defaults(func=cmd_sympow)

    s = sub.add_parser("molien", parents=[common], help="invariant and semi-invariant multiplicities")
    s.add_argument("table")
    s.set_defaults(func=cmd_molien)

    s = sub.add_parser("check-exceptional", parents=[common], help="run the case analysis")
    s.add_argument("table")
    s.set_defaults(func=cmd_check)

    for name, func, helptext in (
        ("closure", cmd_closure, "enumerate a matrix group from generators"),
        ("group-molien", cmd_group_molien, "Molien coefficients by direct summation"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("file")
        s.add_argument("--max-order", type=int, default=200000)
        if name == "group-molien":
            s.add_argument("--n", type=int, default=DEFAULT_MAX_DEGREE)
        s.set_defaults(func=func)

    s = sub.add_parser("report-all", parents=[common], help="check every bundled table")
    s.set_defaults(func=cmd_report_all)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _diag(f"error: {exc}")
        return EXIT_USAGE
    if getattr(args, "n", None) is not None and args.n < 0 or args.max < 1:
        _diag("error: degrees must be nonnegative")
        return EXIT_USAGE
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        _diag(str(exc))
        return EXIT_IO
    except (TableParseError, matgroup.GeneratorFileError) as exc:
        _diag(str(exc))
        return EXIT_INVALID
    except _Invalid as exc:
        _diag("table failed validation: " + json.dumps(exc.args[0]["violations"][:5]))
        return EXIT_INVALID
    except (ValueError, matgroup.OrderExceeded) as exc:
        _diag(str(exc))
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
