"""``condorcet`` command line: exact, mc, qn, ck, rate-scan, verify.

Every result is emitted as one JSON line (a run record) on stdout, or appended
to ``--out``.  ``CONDORCET_OUT_DIR`` sets the directory for relative ``--out``
paths and CSV files.  Exit codes: 0 ok, 1 bad arguments, 2 budget, tolerance
or verification failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from condorcet import __version__
from condorcet import asymptotics as A
from condorcet import checks
from condorcet import estimators as E
from condorcet import exact as X
from condorcet.profiles import InvalidDimension

OUT_DIR_ENV = "CONDORCET_OUT_DIR"
RATE_COLUMNS = ["n", "m", "method", "value", "stderr", "samples", "seed"]
# fields that legitimately differ between replays of the same run
VOLATILE = {"wall_time_s", "seconds"}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunRecord:
    command: str
    params: dict
    result: Any
    kind: str  # estimate | exact | ratefit | scalar | check
    timestamp: str
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps({"command": self.command, "params": self.params, "kind": self.kind,
                           "result": self.result, "timestamp": self.timestamp,
                           "version": self.version}, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        return cls(d["command"], d["params"], d["result"], d["kind"], d["timestamp"], d["version"])

    def parsed(self):
        """The embedded result as a library object."""
        if self.kind == "estimate":
            return E.Estimate.from_dict(self.result)
        if self.kind == "exact":
            return X.ExactResult.from_dict(self.result)
        if self.kind == "ratefit":
            return A.RateFit.from_dict(self.result)
        return self.result


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def count(text: str) -> int:
    """Positive integer count; accepts ``1e6`` style input."""
    try:
        v = float(text) if any(c in text for c in "eE.") else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def count_list(text: str) -> list[int]:
    return [count(t) for t in text.split(",") if t]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="append JSON lines here instead of stdout")
    common.add_argument("--workers", type=count, default=1, help="threads; never changes values")

    p = _Parser(prog="condorcet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("exact", parents=[common], help="exact Q(m, n) by enumeration")
    s.add_argument("--m", type=count, required=True)
    s.add_argument("--n", type=count, required=True)
    s.add_argument("--target", choices=["winner", "loser"], default="winner")
    s.add_argument("--budget", type=count, default=X.DEFAULT_BUDGET)

    s = sub.add_parser("mc", parents=[common], help="Monte Carlo estimate of Q(m, n)")
    s.add_argument("--m", type=count, required=True)
    s.add_argument("--n", type=count, required=True)
    s.add_argument("--samples", type=count, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--method", choices=["plain", "conditional"], default="conditional")
    s.add_argument("--chunk-size", type=count, default=E.DEFAULT_CHUNK)
    s.add_argument("--target", choices=["winner", "loser"], default="winner")

    s = sub.add_parser("qn", parents=[common], help="limit integral Q_n")
    s.add_argument("--n", type=count, required=True)
    s.add_argument("--route", choices=["direct", "jn"], default="direct")
    s.add_argument("--abs-tol", type=float, default=A.DEFAULT_SPEC.abs_tol)
    s.add_argument("--rel-tol", type=float, default=A.DEFAULT_SPEC.rel_tol)
    s.add_argument("--halfwidth", type=float, default=None)

    s = sub.add_parser("ck", parents=[common], help="constant C_k")
    s.add_argument("--k", type=count, required=True)
    s.add_argument("--method", choices=["nested-quadrature", "importance-mc"],
                   default="nested-quadrature")
    s.add_argument("--samples", type=count, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--proposal", choices=["dirichlet", "exponential"], default="dirichlet")
    s.add_argument("--chunk-size", type=count, default=E.DEFAULT_CHUNK)

    s = sub.add_parser("rate-scan", parents=[common], help="estimates over n, CSV + rate fit")
    s.add_argument("--m", type=count, default=3)
    s.add_argument("--ns", type=count_list, default=list(checks.RATE_NS))
    s.add_argument("--samples", type=count_list, default=[10**6],
                   help="one count, or one per n")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--method", choices=["plain", "conditional", "qn"], default="conditional")
    s.add_argument("--chunk-size", type=count, default=E.DEFAULT_CHUNK)
    s.add_argument("--csv", default="rate_scan.csv")

    s = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    s.add_argument("--level", choices=["quick", "full"], default="quick")
    s.add_argument("--csv", default="verify_rate_scan.csv")
    return p


def _out_path(name: Optional[str]) -> Optional[Path]:
    if name is None:
        return None
    path = Path(name)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def execute(command: str, params: dict) -> tuple[list[RunRecord], int]:
    """Run one subcommand from its parameter map; returns records and exit code."""
    p = params
    stamp = _now()
    rec = lambda kind, result: RunRecord(command, dict(params), result, kind, stamp)
    workers = p.get("workers", 1)
    if command == "exact":
        r = X.exact_probability(p["m"], p["n"], p["target"], p["budget"], workers=workers)
        return [rec("exact", r.to_dict())], 0
    if command == "mc":
        est = E.estimate(p["method"], p["m"], p["n"], p["samples"], p["seed"], p["chunk_size"],
                         workers, p["target"])
        return [rec("estimate", est.to_dict())], 0
    if command == "qn":
        spec = A.QuadratureSpec(p["abs_tol"], p["rel_tol"], p["halfwidth"])
        v = A.qn(p["n"], spec) if p["route"] == "direct" else A.qn_via_jn(p["n"], spec)
        return [rec("scalar", {"n": p["n"], "value": v, "route": p["route"], "tol": spec.abs_tol})], 0
    if command == "ck":
        est = A.ck(p["k"], p["method"], p["samples"], p["seed"], p["chunk_size"], workers,
                   p["proposal"])
        return [rec("estimate", est.to_dict())], 0
    if command == "rate-scan":
        return _rate_scan(p, rec)
    if command == "verify":
        return _verify(p, rec)
    raise UsageError(f"unknown command {command!r}")


def _rate_scan(p: dict, rec) -> tuple[list[RunRecord], int]:
    ns, samples = p["ns"], p["samples"]
    if len(samples) == 1:
        samples = samples * len(ns)
    if len(samples) != len(ns):
        raise UsageError("--samples needs one value or one per --ns entry")
    rows, records = [], []
    for n, s in zip(ns, samples):
        if p["method"] == "qn":
            v = A.qn(n)
            row = {"n": n, "m": "inf", "method": "qn", "value": v,
                   "stderr": A.DEFAULT_SPEC.abs_tol, "samples": 0, "seed": ""}
            records.append(rec("scalar", row))
        else:
            est = E.estimate(p["method"], p["m"], n, s, p["seed"], p["chunk_size"], p.get("workers", 1))
            row = {k: getattr(est, k) for k in RATE_COLUMNS}
            records.append(rec("estimate", est.to_dict()))
        rows.append(row)
    path = _out_path(p["csv"])
    A.write_csv(path, rows, RATE_COLUMNS)
    if len(rows) >= 3 and all(r["value"] > 0 for r in rows):
        records.append(rec("ratefit", A.rate_fit([(r["n"], r["value"]) for r in rows]).to_dict()))
    return records, 0


def _verify(p: dict, rec) -> tuple[list[RunRecord], int]:
    if p["level"] == "quick":
        results = checks.trivial_checks()
    else:
        results = checks.full_checks(workers=p.get("workers", 1))
        for r in results:
            if r.name.startswith("4 ") and "rows" in r.detail:
                A.write_csv(_out_path(p["csv"]), r.detail["rows"], RATE_COLUMNS)
    for r in results:
        print(r.line(), file=sys.stderr)
    records = [rec("check", r.to_dict()) for r in results]
    return records, 0 if all(r.passed for r in results) else 2


def _emit(records: list[RunRecord], out: Optional[str]) -> None:
    path = _out_path(out)
    lines = "".join(r.to_json() + "\n" for r in records)
    if path is None:
        sys.stdout.write(lines)
        sys.stdout.flush()
    else:
        with open(path, "a") as fh:
            fh.write(lines)


def run(argv: Optional[list[str]] = None) -> tuple[int, list[RunRecord]]:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1, []
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "out")}
    try:
        records, code = execute(ns.command, params)
    except (UsageError, InvalidDimension, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1, []
    except (X.BudgetExceeded, A.ToleranceNotMet, A.Nonconvergence) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2, []
    _emit(records, ns.out)
    return code, records


def replay(record: RunRecord) -> list[RunRecord]:
    """Re-run a record's command with its stored parameters."""
    records, _ = execute(record.command, record.params)
    return records


def strip_volatile(obj):
    if isinstance(obj, dict):
        return {k: strip_volatile(v) for k, v in obj.items() if k not in VOLATILE}
    if isinstance(obj, list):
        return [strip_volatile(v) for v in obj]
    return obj


def main(argv: Optional[list[str]] = None) -> None:
    try:
        code, _ = run(argv)
    except SystemExit as e:  # --help / --version
        code = e.code if isinstance(e.code, int) else 0
    sys.exit(code)


if __name__ == "__main__":
    main()
