"""Command-line entry point: run verification suites, print the constants
table, and sweep Rayleigh quotients over parameter grids.

Usage
-----
    hplap verify --group heisenberg:1 --k 1 --p 2 --suite lemma1 --out reports/
    hplap constants --group heisenberg:1 --k 1 --p 2
    hplap sweep --group heisenberg:1 --k 1,2 --p 1.5,2,3 --alpha -1,0,1 --out sweep.csv

Configuration precedence: command-line flags > environment variables
(prefix ``HPLAP_``, e.g. ``HPLAP_SEED=7``) > config file (plain-text
``key = value`` lines, selected with --config or ``HPLAP_CONFIG``) >
built-in defaults.

``verify`` writes one report document per suite to
``<out>/<suite>-<group>-<stamp>.kv`` (colons in the group id become
underscores) and prints a one-line summary per suite.  Exit status: 0 if
every check passed, 1 if any check failed, 2 on configuration errors.
Report documents are bit-identical across reruns with the same seed;
wall-clock time appears only on the console.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from dataclasses import dataclass

from . import closedform as cf
from .algebra import OperatorParams, resolve_group
from .report import to_kv
from .verify import (
    SUITES,
    SuiteConfig,
    build_hardy_corpus,
    hardy_ratio,
    run_suite,
    sharp_hardy_constant,
    sharpness_test_function,
)

__all__ = ["CliConfig", "cmd_verify", "cmd_constants", "cmd_sweep", "main"]

_ENV_PREFIX = "HPLAP_"

_DEFAULTS = {
    "group": "heisenberg:1",
    "k": "1",
    "p": "2",
    "alpha": "0",
    "beta": "0",
    "suite": "all",
    "seed": "20240",
    "samples": "1000000",
    "corpus_samples": "60000",
    "out": "reports",
    "format": "kv",
    "mode": "hardy",
    "stamp": "",
}


@dataclass
class CliConfig:
    """Resolved configuration for one invocation.  The parameter fields
    hold raw strings so that ``sweep`` can receive comma-separated grids;
    single-value commands parse them through the ``*_f`` properties."""

    group: str
    k: str
    p: str
    alpha: str
    beta: str
    suites: list
    seed: int
    samples: int
    corpus_samples: int
    out: str
    format: str
    mode: str
    stamp: str

    @property
    def k_f(self) -> float:
        return float(self.k)

    @property
    def p_f(self) -> float:
        return float(self.p)

    @property
    def alpha_f(self) -> float:
        return float(self.alpha)

    @property
    def beta_f(self) -> float:
        return float(self.beta)

    def suite_config(self, **over) -> SuiteConfig:
        kw = dict(
            group=self.group,
            k=self.k_f,
            p=self.p_f,
            alpha=self.alpha_f,
            beta=self.beta_f,
            n_samples=self.samples,
            corpus_samples=self.corpus_samples,
            seed=self.seed,
        )
        kw.update(over)
        return SuiteConfig(**kw)


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"malformed config line: {line!r}")
            out[key.strip()] = val.strip()
    return out


def _resolve(args: argparse.Namespace) -> CliConfig:
    values = dict(_DEFAULTS)
    cfg_path = args.config or os.environ.get(_ENV_PREFIX + "CONFIG")
    if cfg_path:
        values.update(_read_config_file(cfg_path))
    for key in _DEFAULTS:
        env = os.environ.get(_ENV_PREFIX + key.upper())
        if env is not None:
            values[key] = env
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    suites = [s.strip() for s in str(values["suite"]).split(",") if s.strip()]
    if "all" in suites:
        suites = list(SUITES)
    for s in suites:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}; available: {', '.join(SUITES)}, all")
    return CliConfig(
        group=str(values["group"]),
        k=str(values["k"]),
        p=str(values["p"]),
        alpha=str(values["alpha"]),
        beta=str(values["beta"]),
        suites=suites,
        seed=int(values["seed"]),
        samples=int(float(values["samples"])),
        corpus_samples=int(float(values["corpus_samples"])),
        out=str(values["out"]),
        format=str(values["format"]),
        mode=str(values["mode"]),
        stamp=str(values["stamp"]),
    )


def _validate(cfg: CliConfig, grid: bool = False) -> None:
    alg = resolve_group(cfg.group)  # raises on unknown ids
    if cfg.format not in ("kv", "csv"):
        raise ValueError(f"unknown output format {cfg.format!r} (kv or csv)")
    combos = (
        [(k, p, a) for k in _parse_grid(cfg.k) for p in _parse_grid(cfg.p) for a in _parse_grid(cfg.alpha)]
        if grid
        else [(cfg.k_f, cfg.p_f, cfg.alpha_f)]
    )
    for k, p, a in combos:
        params = OperatorParams.of(alg, k=k, p=p, alpha=a, beta=cfg.beta_f)
        if a != 0.0 or cfg.beta_f != 0.0:
            params.validate_weighted()


def _stamp(cfg: CliConfig) -> str:
    return cfg.stamp or time.strftime("%Y%m%dT%H%M%S")


def _fname_group(group: str) -> str:
    return group.replace(":", "_")


def _report_csv(report) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check_id", "kind", "observed", "target", "tolerance", "stderr", "margin", "passed"])
    for c in report.checks:
        writer.writerow(
            [c.check_id, c.kind, repr(c.observed), repr(c.target), repr(c.tolerance),
             repr(c.stderr), repr(c.margin), "true" if c.passed else "false"]
        )
    return buf.getvalue()


def cmd_verify(cfg: CliConfig) -> int:
    os.makedirs(cfg.out, exist_ok=True)
    stamp = _stamp(cfg)
    all_pass = True
    for name in cfg.suites:
        report = run_suite(name, cfg.suite_config())
        all_pass &= report.overall_pass
        path = os.path.join(cfg.out, f"{name}-{_fname_group(cfg.group)}-{stamp}.{cfg.format}")
        with open(path, "w") as fh:
            fh.write(to_kv(report) if cfg.format == "kv" else _report_csv(report))
        print(report.summary_line() + f" -> {path}")
    return 0 if all_pass else 1


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def cmd_constants(cfg: CliConfig) -> int:
    alg = resolve_group(cfg.group)
    params = OperatorParams.of(alg, k=cfg.k_f, p=cfg.p_f, alpha=cfg.alpha_f, beta=cfg.beta_f)
    weighted = cfg.alpha_f != 0.0 or cfg.beta_f != 0.0
    spec = cf.fundamental_solution(params, weighted=weighted)
    rows = [
        ("m, q", f"{alg.m}, {alg.q}"),
        ("Q = m + 2kq", _fmt(params.Q)),
        ("sigma" + ("_{p,beta}" if weighted else "_p"), _fmt(cf.sigma_p_beta(params) if weighted else cf.sigma_p(params))),
        ("solution kind", spec.kind),
        ("solution exponent", _fmt(spec.exponent) if spec.kind == "power" else "log(1/d)"),
        ("solution constant", _fmt(spec.constant)),
    ]
    if cfg.p_f < params.Q + cfg.alpha_f:
        rows.append(("sharp Hardy constant", _fmt(sharp_hardy_constant(params))))
    else:
        rows.append(("sharp Hardy constant", "n/a (requires p < Q + alpha)"))
    width = max(len(r[0]) for r in rows)
    print(f"group={cfg.group} k={_fmt(cfg.k_f)} p={_fmt(cfg.p_f)} alpha={_fmt(cfg.alpha_f)} beta={_fmt(cfg.beta_f)}")
    for name, val in rows:
        print(f"  {name:<{width}}  {val}")
    return 0


def _parse_grid(text: str) -> list:
    return [float(x) for x in str(text).split(",") if x.strip()]


def cmd_sweep(cfg: CliConfig, k_grid, p_grid, a_grid, out_path: str, j_index: int = 8) -> int:
    alg = resolve_group(cfg.group)
    corpus_phi = build_hardy_corpus()[0]
    rows = []
    combo = 0
    for k in k_grid:
        for p in p_grid:
            for a in a_grid:
                params = OperatorParams.of(alg, k=k, p=p, alpha=a)
                if not p < params.Q + a:
                    continue
                sharp = sharp_hardy_constant(params)
                phi = corpus_phi if cfg.mode == "hardy" else sharpness_test_function(params, j_index)
                res = hardy_ratio(
                    alg, params, phi, cfg.corpus_samples, cfg.seed, spawn_key=(9, combo)
                )
                rows.append(
                    {
                        "k": repr(k),
                        "p": repr(p),
                        "alpha": repr(a),
                        "ratio": repr(res.ratio),
                        "stderr": repr(res.stderr),
                        "sharp_constant": repr(sharp),
                        "margin": repr(res.ratio - sharp),
                    }
                )
                combo += 1
    fieldnames = ["k", "p", "alpha", "ratio", "stderr", "sharp_constant", "margin"]
    fh = open(out_path, "w", newline="") if out_path != "-" else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    print(f"sweep: {len(rows)} configurations -> {out_path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hplap", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--group", help="group id: heisenberg:n, quaternionic:n, custom:<file>")
        sp.add_argument("--k", help="field parameter k >= 1")
        sp.add_argument("--p", help="p-Laplacian exponent p > 1")
        sp.add_argument("--alpha", help="norm-power weight exponent")
        sp.add_argument("--beta", help="gradient-weight exponent")
        sp.add_argument("--seed", help="base seed for all random streams")
        sp.add_argument("--samples", help="Monte Carlo samples per region")
        sp.add_argument("--corpus-samples", dest="corpus_samples", help="samples per test function")
        sp.add_argument("--config", help="plain-text key = value config file")
        sp.add_argument("--out", help="output directory (verify) or file (sweep)")
        sp.add_argument("--format", help="report format: kv or csv")
        sp.add_argument("--stamp", help="fixed timestamp string for output filenames")

    sp = sub.add_parser("verify", help="run verification suites and write reports")
    common(sp)
    sp.add_argument("--suite", action="append", help="suite name (repeatable) or 'all'")

    sp = sub.add_parser("constants", help="print the constants table for a configuration")
    common(sp)

    sp = sub.add_parser("sweep", help="sweep Rayleigh quotients over a (k, p, alpha) grid")
    common(sp)
    sp.add_argument("--mode", help="hardy (corpus function) or sharpness (u_j)")
    sp.add_argument("--j", default="8", help="sequence index for sharpness mode")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "suite", None) is not None:
        args.suite = ",".join(args.suite)
    else:
        if hasattr(args, "suite"):
            args.suite = None
    try:
        cfg = _resolve(args)
        _validate(cfg, grid=args.command == "sweep")
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "constants":
            return cmd_constants(cfg)
        if args.command == "sweep":
            out = cfg.out if cfg.out != _DEFAULTS["out"] else "sweep.csv"
            return cmd_sweep(
                cfg,
                _parse_grid(cfg.k),
                _parse_grid(cfg.p),
                _parse_grid(cfg.alpha),
                out,
                j_index=int(args.j),
            )
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
