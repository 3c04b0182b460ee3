"""Command-line front end.

    zetagaps verify   [--mode M] [--r X] [--c X] [--f1=..] [--f2=..|off]
    zetagaps optimize [--mode M] [--deg1 N] [--deg2 N|off] [--r a:b:step] [--c a:b]
    zetagaps oracle   [--mode M] [--T 1e6,1e8] [--r X] [--c X] [--f1=..] [--f2=..]
    zetagaps scan     [--mode M] [--deg1 N] [--deg2 N|off] --r a:b:step --c a:b:step

A human-readable summary goes to stdout; ``--out PATH`` additionally writes
JSON or CSV (``--out -`` writes it to stdout instead of the summary).
``--config PATH`` reads a JSON object with the same field names; explicit
flags win.  Negative coefficient lists need ``=``: ``--f1=-3.54,-42.94``.

Exit status: 0 success, 1 a witness check failed, 2 bad configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from . import optimizer as opt
from .errors import BracketError, DomainError, QuadratureError, SieveSizeError
from .functionals import Mode, Poly, h_value
from .optimizer import FormFamily, arange_inclusive, scan_r, target
from .oracle import convergence_table
from .witnesses import WITNESSES

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = ("verify", "optimize", "oracle", "scan")
FIELDS = ("mode", "r", "c", "f1", "f2", "deg1", "deg2", "T", "out", "format", "threads")

log = logging.getLogger("zetagaps")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    mode: Optional[Mode] = None
    r: Any = None            # float or (lo, hi, step)
    c: Any = None            # float, (lo, hi) bracket or (lo, hi, step) grid
    f1: Optional[Poly] = None
    f2: Optional[Poly] = None
    deg1: Optional[int] = None
    deg2: Any = "unset"      # int, None (off) or "unset"
    T: List[float] = field(default_factory=list)
    out: Optional[str] = None
    format: str = "json"
    threads: int = 1


# -- parsing ------------------------------------------------------------------

def _floats(text: str, what: str) -> List[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"--{what}: expected comma-separated numbers, got {text!r}") from exc


def _poly(value, what: str) -> Poly:
    if isinstance(value, (list, tuple)):
        vals = [float(v) for v in value]
    elif str(value).strip().lower() in ("off", "0", "none"):
        vals = [0.0]
    else:
        vals = _floats(value, what)
    if not vals:
        raise ConfigError(f"--{what}: empty coefficient list")
    return Poly(tuple(vals))


def _range(value, what: str, allow_pair: bool):
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, (list, tuple)):
        parts = [float(v) for v in value]
    else:
        text = str(value)
        if ":" not in text:
            try:
                return float(text)
            except ValueError as exc:
                raise ConfigError(f"--{what}: not a number: {text!r}") from exc
        try:
            parts = [float(t) for t in text.split(":")]
        except ValueError as exc:
            raise ConfigError(f"--{what}: malformed range {text!r}") from exc
    if len(parts) == 2 and allow_pair:
        return tuple(parts)
    if len(parts) == 3:
        return tuple(parts)
    if len(parts) == 1:
        return parts[0]
    raise ConfigError(f"--{what}: expected x, a:b or a:b:step, got {value!r}")


def _grid(value, default_step: float, what: str) -> List[float]:
    if isinstance(value, float):
        return [value]
    if len(value) == 2:
        value = (value[0], value[1], default_step)
    lo, hi, step = value
    if step <= 0:
        raise ConfigError(f"--{what}: step must be positive")
    grid = arange_inclusive(lo, hi, step).tolist()
    if not grid:
        raise ConfigError(f"--{what}: empty grid {lo}:{hi}:{step}")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zetagaps", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--mode", choices=[m.value for m in Mode])
        p.add_argument("--r")
        p.add_argument("--c")
        p.add_argument("--f1")
        p.add_argument("--f2")
        p.add_argument("--deg1", type=int)
        p.add_argument("--deg2")
        p.add_argument("--T")
        p.add_argument("--out")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--threads", type=int)
        p.add_argument("--config")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Merge config file and flags, then validate everything up front."""
    raw: Dict[str, Any] = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(doc) - set(FIELDS) - {"command", "output_path"}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "output_path" in doc:
            doc.setdefault("out", doc.pop("output_path"))
        raw.update({k: v for k, v in doc.items() if k != "command"})
    for key in FIELDS:
        val = getattr(ns, key, None)
        if val is not None:
            raw[key] = val

    cfg = RunConfig(ns.command)
    if raw.get("mode") is not None:
        try:
            cfg.mode = Mode(raw["mode"])
        except ValueError as exc:
            raise ConfigError(f"--mode must be plain or liouville, got {raw['mode']!r}") from exc
    if cfg.command in ("optimize", "scan", "oracle") and cfg.mode is None:
        cfg.mode = Mode.PLAIN
    if raw.get("r") is not None:
        cfg.r = _range(raw["r"], "r", allow_pair=False)
    if raw.get("c") is not None:
        cfg.c = _range(raw["c"], "c", allow_pair=True)
    if raw.get("f1") is not None:
        cfg.f1 = _poly(raw["f1"], "f1")
    if raw.get("f2") is not None:
        cfg.f2 = _poly(raw["f2"], "f2")
    if raw.get("deg1") is not None:
        cfg.deg1 = int(raw["deg1"])
        if cfg.deg1 < 0:
            raise ConfigError("--deg1 must be >= 0")
    if "deg2" in raw and raw["deg2"] is not None:
        d2 = raw["deg2"]
        if str(d2).lower() == "off":
            cfg.deg2 = None
        else:
            try:
                cfg.deg2 = int(d2)
            except ValueError as exc:
                raise ConfigError(f"--deg2 must be an integer or 'off', got {d2!r}") from exc
            if cfg.deg2 < 0:
                raise ConfigError("--deg2 must be >= 0 or 'off'")
    if raw.get("T") is not None:
        Ts = raw["T"]
        cfg.T = [float(t) for t in Ts] if isinstance(Ts, list) else _floats(Ts, "T")
    cfg.out = raw.get("out")
    cfg.format = raw.get("format") or "json"
    if cfg.format not in ("json", "csv"):
        raise ConfigError("--format must be json or csv")
    cfg.threads = int(raw["threads"]) if raw.get("threads") is not None else 1
    if cfg.threads < 1:
        raise ConfigError("--threads must be >= 1")

    # command-specific requirements
    if cfg.command in ("verify", "oracle"):
        if isinstance(cfg.r, tuple) or isinstance(cfg.c, tuple):
            raise ConfigError(f"{cfg.command} takes single values for --r and --c")
        if cfg.r is not None and cfg.r < 1:
            raise ConfigError("--r must be >= 1")
        if cfg.c is not None and cfg.c <= 0:
            raise ConfigError("--c must be > 0")
    if cfg.command == "oracle":
        if not cfg.T:
            cfg.T = [1e6, 1e8]
        if any(t <= 3 for t in cfg.T):
            raise ConfigError("--T values must exceed e")
    if cfg.command in ("optimize", "scan"):
        if cfg.f1 is not None or cfg.f2 is not None:
            raise ConfigError(f"{cfg.command} chooses f1/f2 itself; drop --f1/--f2")
        d1, d2 = opt.DEFAULT_DEGREES[cfg.mode]
        if cfg.deg1 is None:
            cfg.deg1 = d1
        if cfg.deg2 == "unset":
            cfg.deg2 = d2
        if cfg.r is None:
            if cfg.command == "scan":
                raise ConfigError("scan needs --r (x or a:b:step)")
            cfg.r = opt.DEFAULT_R_GRIDS[cfg.mode]
        grid = _grid(cfg.r, 0.05, "r")
        if any(r < 1 for r in grid):
            raise ConfigError("--r values must be >= 1")
    if cfg.command == "optimize" and cfg.c is not None:
        if not (isinstance(cfg.c, tuple) and len(cfg.c) == 2 and 0 < cfg.c[0] < cfg.c[1]):
            raise ConfigError("optimize takes a c bracket a:b with 0 < a < b")
    if cfg.command == "scan":
        if cfg.c is None:
            raise ConfigError("scan needs --c (x, a:b or a:b:step)")
        cgrid = _grid(cfg.c, opt.SCAN_STEP, "c")
        if any(c <= 0 for c in cgrid):
            raise ConfigError("--c values must be > 0")
    return cfg


# -- output -------------------------------------------------------------------

def _fmt(obj):
    """Round every float to 12 significant digits, recursively."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float) or hasattr(obj, "__float__"):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, dict):
        return {k: _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt(v) for v in obj]
    return obj


def to_json(report: Dict[str, Any]) -> str:
    return json.dumps(_fmt(report), indent=2) + "\n"


def to_csv(rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        out = []
        for col in columns:
            v = _fmt(row.get(col))
            if isinstance(v, list):
                v = ";".join(f"{x:.12g}" for x in v)
            elif isinstance(v, float):
                v = f"{v:.12g}"
            out.append(v)
        writer.writerow(out)
    return buf.getvalue()


def _emit(cfg: RunConfig, report: Dict[str, Any], rows, columns, summary: str):
    if cfg.out == "-":
        sys.stdout.write(to_json(report) if cfg.format == "json" else to_csv(rows, columns))
        return
    sys.stdout.write(summary)
    if cfg.out:
        text = to_json(report) if cfg.format == "json" else to_csv(rows, columns)
        with open(cfg.out, "w") as fh:
            fh.write(text)


def _mode_label(mode: Mode) -> str:
    return "lambda >= c (h < 1)" if mode is Mode.PLAIN else "mu <= c (h > 1)"


# -- commands -----------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    modes = [cfg.mode] if cfg.mode is not None else [Mode.PLAIN, Mode.LIOUVILLE]
    cases = []
    failed = False
    lines = []
    for mode in modes:
        w = WITNESSES[mode]
        r = cfg.r if cfg.r is not None else w.r
        c = cfg.c if cfg.c is not None else w.c
        f1 = cfg.f1 if cfg.f1 is not None else w.f1
        f2 = cfg.f2 if cfg.f2 is not None else w.f2
        t0 = time.perf_counter()
        hb = h_value(f1, f2, r, c, mode)
        elapsed = time.perf_counter() - t0
        if w.matches(mode, r, c, f1, f2):
            check = "PASS" if hb.certifies else "FAIL"
            failed |= check == "FAIL"
        else:
            check = "SKIPPED"
        cases.append({
            "case": w.name if check != "SKIPPED" else f"{mode.value}-custom",
            "mode": mode.value, "r": r, "c": c,
            "f1": list(f1.coeffs), "f2": list(f2.coeffs),
            "d1": hb.d1, "d2": hb.d2, "d3": hb.d3,
            "n1": hb.n1, "n2": hb.n2, "n3": hb.n3, "n4": hb.n4,
            "h": hb.h, "certifies": hb.certifies, "witness_check": check,
            "seconds": round(elapsed, 3),
        })
        lines.append(
            f"[{mode.value}] r={r:g} c={c:g}  {_mode_label(mode)}\n"
            f"  D1={hb.d1:.10g} D2={hb.d2:.10g} D3={hb.d3:.10g}\n"
            f"  N1={hb.n1:.10g} N2={hb.n2:.10g} N3={hb.n3:.10g} N4={hb.n4:.10g}\n"
            f"  h(c)={hb.h:.12g}  certifies={hb.certifies}  witness check: {check}\n"
        )
    for case in cases:
        case.pop("seconds")
    report = {"command": "verify", "cases": cases}
    cols = ["case", "mode", "r", "c", "f1", "f2", "d1", "d2", "d3", "n1", "n2", "n3", "n4",
            "h", "certifies", "witness_check"]
    _emit(cfg, report, cases, cols, "".join(lines))
    return EXIT_FAIL if failed else EXIT_OK


def _opt_row(res: opt.OptResult) -> Dict[str, Any]:
    return {"r": res.r, "c_star": res.c_star, "h_at_c_star": res.h_at_c_star,
            "bound_kind": res.bound_kind, "f1": list(res.f1.coeffs), "f2": list(res.f2.coeffs)}


def cmd_optimize(cfg: RunConfig) -> int:
    grid = _grid(cfg.r, 0.05, "r")
    refine = 0.01 if len(grid) > 1 else None
    bracket = cfg.c if isinstance(cfg.c, tuple) else None
    res = scan_r(grid, cfg.deg1, cfg.deg2, cfg.mode, c_bracket=bracket,
                 threads=cfg.threads, refine=refine)
    rows = [_opt_row(x) for x in res.rows]
    best = _opt_row(res.best)
    report = {
        "command": "optimize", "mode": cfg.mode.value, "deg1": cfg.deg1,
        "deg2": cfg.deg2 if cfg.deg2 is not None else "off",
        "best": best, "rows": rows,
        "failures": [{"r": r, "error": msg} for r, msg in res.failures],
    }
    lines = [f"{'r':>8} {'c_star':>14} {'h(c_star)':>14}\n"]
    for row in rows:
        mark = "  <== best" if row["r"] == best["r"] else ""
        lines.append(f"{row['r']:8.4f} {row['c_star']:14.8f} {row['h_at_c_star']:14.10f}{mark}\n")
    sym = "lambda >=" if cfg.mode is Mode.PLAIN else "mu <="
    lines.append(f"best: r={best['r']:g}  {sym} {best['c_star']:.8f}\n"
                 f"  f1={best['f1']}\n  f2={best['f2']}\n")
    for r, msg in res.failures:
        lines.append(f"failed at r={r:g}: {msg}\n")
    cols = ["r", "c_star", "h_at_c_star", "bound_kind", "f1", "f2"]
    _emit(cfg, report, rows, cols, "".join(lines))
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    from .oracle import OracleParams

    w = WITNESSES[cfg.mode]
    r = cfg.r if cfg.r is not None else w.r
    c = cfg.c if cfg.c is not None else w.c
    f1 = cfg.f1 if cfg.f1 is not None else w.f1
    f2 = cfg.f2 if cfg.f2 is not None else w.f2
    params = OracleParams(min(cfg.T), c, r, f1, f2, cfg.mode)
    for T in cfg.T:
        OracleParams(T, c, r, f1, f2, cfg.mode)  # validates every K up front
    rows = convergence_table(params, cfg.T, threads=cfg.threads)
    report = {"command": "oracle", "mode": cfg.mode.value, "r": r, "c": c,
              "f1": list(f1.coeffs), "f2": list(f2.coeffs), "rows": rows}
    lines = [f"{'T':>10} {'K':>10} {'h_direct':>14} {'h_asymptotic':>14} {'deviation':>12}\n"]
    for row in rows:
        lines.append(f"{row['T']:10.3g} {row['K']:10d} {row['h_direct']:14.10f} "
                     f"{row['h_asymptotic']:14.10f} {row['deviation']:12.6g}\n")
    cols = ["T", "K", "h_direct", "h_asymptotic", "deviation", "h_asymptotic_logK",
            "deviation_logK"]
    _emit(cfg, report, rows, cols, "".join(lines))
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    rgrid = _grid(cfg.r, 0.05, "r")
    cgrid = _grid(cfg.c, opt.SCAN_STEP, "c")
    rows = []
    for r in rgrid:
        fam = FormFamily(r, cfg.deg1, cfg.deg2)
        ratios = fam.max_ratio(cgrid)
        targets = target(cgrid, cfg.mode)
        for c, m, t in zip(cgrid, ratios, targets):
            rows.append({"r": r, "c": c, "max_rayleigh": float(m), "target": float(t),
                         "g": float(m - t)})
    cols = ["r", "c", "max_rayleigh", "target", "g"]
    report = {"command": "scan", "mode": cfg.mode.value, "deg1": cfg.deg1,
              "deg2": cfg.deg2 if cfg.deg2 is not None else "off", "rows": rows}
    if cfg.out is None and cfg.format == "csv":
        cfg.out = "-"
    _emit(cfg, report, rows, cols, to_csv(rows, cols))
    return EXIT_OK


HANDLERS = {"verify": cmd_verify, "optimize": cmd_optimize, "oracle": cmd_oracle,
            "scan": cmd_scan}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(ns)
    except (ConfigError, DomainError) as exc:
        print(f"zetagaps {ns.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return HANDLERS[cfg.command](cfg)
    except SieveSizeError as exc:
        print(f"zetagaps {cfg.command}: sieve sizing error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"zetagaps {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BracketError, QuadratureError, ArithmeticError) as exc:
        print(f"zetagaps {cfg.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
