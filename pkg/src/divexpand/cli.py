"""Command line: `divexpand chowla | spectrum | verify`.

Settings come from defaults, then an optional key=value file (--config), then
flags. Every report carries the resolved config, the seed and a build id (a
hash of the package source), and contains no timestamps, so identical configs
give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class ExperimentConfig:
    N: int = 1024
    H0: int = 11
    H: int = 31
    K: float = 2.0
    ell: int = 3
    k: int = 2
    seed: int = 0
    mask: bool = True
    dense: bool = False
    fft: str = "auto"  # auto | on | off
    iters: int = 3000
    tol: float = 1e-10
    schedule: str = "1e3,1e4,1e5,1e6,1e7"
    w: float = 0.0  # window variant of the Chowla sum when > e
    out: str = ""

    @classmethod
    def field_types(cls) -> dict[str, type]:
        return {f.name: type(f.default) for f in dataclasses.fields(cls)}

    def update(self, values: dict[str, str]) -> "ExperimentConfig":
        types = self.field_types()
        for key, raw in values.items():
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            setattr(self, key, _coerce(types[key], raw, key))
        return self

    def echo(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(tp: type, raw, key: str):
    if not isinstance(raw, str):
        return tp(raw)
    try:
        if tp is bool:
            low = raw.strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError
            return low in ("1", "true", "yes", "on")
        if tp is int:
            return int(float(raw)) if "e" in raw.lower() else int(raw)
        return tp(raw.strip())
    except ValueError:
        raise ValueError(f"bad value {raw!r} for {key}") from None


def read_config_file(path: str | Path) -> dict[str, str]:
    """Plain key=value lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def build_id() -> str:
    h = hashlib.sha256()
    for p in sorted(Path(__file__).parent.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()[:12]


def parse_schedule(text: str) -> list[int]:
    xs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        v = float(part)
        if not math.isfinite(v) or v != int(v) or v < 3:
            raise ValueError(f"schedule entry {part!r} must be an integer >= 3")
        xs.append(int(v))
    if not xs:
        raise ValueError("empty schedule")
    return sorted(set(xs))


def _header(cfg: ExperimentConfig, command: str) -> dict:
    return {"command": command, "build": build_id(), "seed": cfg.seed, "config": cfg.echo()}


def _emit(text: str, cfg: ExperimentConfig):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_chowla(cfg: ExperimentConfig) -> int:
    from .arith import log_chowla_series, log_chowla_window

    xs = parse_schedule(cfg.schedule)
    rows = log_chowla_series(xs)
    buf = io.StringIO()
    for key, val in _header(cfg, "chowla").items():
        buf.write(f"# {key}={json.dumps(val, sort_keys=True)}\n")
    wr = csv.writer(buf, lineterminator="\n")
    use_w = cfg.w > math.e
    wr.writerow(["x", "log_chowla_sum"] + (["window_sum"] if use_w else []))
    for x, v in rows:
        row = [x, repr(v)]
        if use_w:
            row.append(repr(log_chowla_window(x, cfg.w)) if cfg.w <= x else "")
        wr.writerow(row)
    _emit(buf.getvalue(), cfg)
    return EXIT_OK


def spectrum_report(cfg: ExperimentConfig) -> dict:
    from .arith import PrimeSet, RegimeParams, build_window, primes_between
    from .divgraph import (DivisibilityOperator, build_mask, dense_matrix,
                           estimate_extreme_eigenvalue)

    report = _header(cfg, "spectrum")
    ps = primes_between(cfg.H0, cfg.H)
    ps = ps[ps < cfg.N]
    if len(ps) == 0:
        report.update(primes=0, scriptL=0.0, value=0.0, spectral_radius=0.0, ratio=0.0,
                      residual=0.0, converged=True, mask_excluded=0, mask_fraction=0.0,
                      regime={}, note="empty prime set: A is the zero operator")
        return report
    P = PrimeSet.from_primes(ps, H0=cfg.H0, H=cfg.H)
    win = build_window(cfg.N, P)
    fft = None if cfg.fft == "auto" else cfg.fft == "on"
    op = DivisibilityOperator(win, use_fft=fft)
    mask = None
    excluded, predicted = 0, float("nan")
    if cfg.mask:
        vm = build_mask(win, cfg.K, cfg.ell)
        mask, excluded, predicted = vm.bits, vm.excluded_count, vm.predicted
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        regime = RegimeParams(cfg.N, cfg.k, cfg.K, cfg.ell).check(P, warn=False)
    est = estimate_extreme_eigenvalue(op, mask, iters=cfg.iters, seed=cfg.seed, tol=cfg.tol)
    scale = math.sqrt(cfg.K * P.scriptL)
    report.update(primes=len(P.primes), scriptL=P.scriptL, value=est.value,
                  spectral_radius=abs(est.value), ratio=abs(est.value) / scale,
                  residual=est.residual, converged=est.converged, mask_excluded=excluded,
                  mask_fraction=excluded / cfg.N,
                  mask_predicted=None if math.isnan(predicted) else predicted,
                  max_omega_P=int(win.omega_P.max()), regime=regime,
                  regime_ok=all(regime.values()), fft=op.use_fft)
    if cfg.dense:
        if cfg.N > 4096:
            raise ValueError("dense oracle limited to N <= 4096")
        w = np.linalg.eigvalsh(dense_matrix(win, mask))
        report["dense_spectral_radius"] = float(np.abs(w).max())
    return report


def cmd_spectrum(cfg: ExperimentConfig) -> int:
    t0 = time.perf_counter()
    report = spectrum_report(cfg)
    _emit(json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n", cfg)
    print(f"spectrum: {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return EXIT_OK


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    raise TypeError(type(x))


def cmd_verify(cfg: ExperimentConfig, suites: list[str]) -> int:
    from .verify import SUITES, run_suite

    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        print(f"unknown suite(s) {', '.join(unknown)}; available: {', '.join(SUITES)}",
              file=sys.stderr)
        return EXIT_USAGE
    results = {}
    failed = 0
    for name in suites:
        checks = run_suite(name)
        results[name] = [{"check": c, "ok": ok, "detail": d} for c, ok, d in checks]
        for c, ok, d in checks:
            failed += not ok
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {c} ({d})", file=sys.stderr)
    report = _header(cfg, "verify")
    report.update(suites=results, failed=failed)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", cfg)
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    for f in dataclasses.fields(ExperimentConfig):
        if f.name == "schedule":
            continue
        common.add_argument(f"--{f.name}", dest=f.name, default=None,
                            help=f"default {f.default!r}")
    p = argparse.ArgumentParser(prog="divexpand", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("chowla", parents=[common], help="logarithmic Chowla sums as CSV")
    c.add_argument("--schedule", default=None, help="comma-separated x values, e.g. 1e3,1e4")
    sub.add_parser("spectrum", parents=[common], help="extreme eigenvalue of the masked operator")
    v = sub.add_parser("verify", parents=[common], help="run invariant suites")
    v.add_argument("--suite", action="append", default=None,
                   help="suite name (repeatable); default: all")
    return p


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        cfg.update(read_config_file(args.config))
    flags = {f.name: getattr(args, f.name, None) for f in dataclasses.fields(ExperimentConfig)}
    cfg.update({k: v for k, v in flags.items() if v is not None})
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "chowla":
            parse_schedule(cfg.schedule)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))  # exits with status 2
    try:
        if args.command == "chowla":
            return cmd_chowla(cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        from .verify import SUITES

        return cmd_verify(cfg, args.suite or list(SUITES))
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
