"""``catfilter`` command line: regenerate figure data as CSV/JSON and run checks.

Exit status: 0 on success, 1 when a numerical check fails, 2 for a bad
configuration or usage.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import opo
from .filters import (
    DegenerateRatesError,
    FilterParams,
    closed_hr_r,
    closed_hr_rr,
    filter_response,
    filter_scan,
    heralded_mode,
)
from .fock import DEFAULT_CUTOFF
from .opo import OpoParams
from .signals import Grid, SignalError, both_side_exp, conjugate, convolve, normalize, time_reverse
from .verify import run_checks
from .wavepacket import equiv_loss_curve, pair_mode_ladder

ENV_OUT = "CATFILTER_OUT"
FMT = "%.12e"

# per-command axis defaults: (min, max, points, log)
AXIS_DEFAULTS = {
    "equivloss": (0.01, 100.0, 41, True),
    "modematch": (0.05, 10.0, 50, True),
}
TRACE_HALF_WIDTH = 5.0
TRACE_STEP = 0.01
OVERSAMPLE = 8


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    gamma: float = 1.0
    epsilon_list: list = field(default_factory=lambda: [0.03, 0.3, 0.7])
    gamma_rel_min: float | None = None
    gamma_rel_max: float | None = None
    gamma_rel_points: int | None = None
    gamma_rel_log: bool | None = None
    big_gamma: float = 0.4
    cutoff: int = DEFAULT_CUTOFF
    output_dir: str | None = None
    format: str = "csv"
    tolerance_scale: float = 1.0

    def validate(self):
        if not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if not self.epsilon_list:
            raise ConfigError("at least one epsilon is needed")
        for e in self.epsilon_list:
            if not 0 <= e < self.gamma:
                raise ConfigError(f"epsilon={e} must satisfy 0 <= epsilon < gamma={self.gamma}")
        if not self.big_gamma > 0:
            raise ConfigError("big-gamma must be positive")
        if self.cutoff < 4:
            raise ConfigError("cutoff must be at least 4")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if not self.tolerance_scale >= 0:
            raise ConfigError("tolerance-scale must be non-negative")
        return self

    def axis(self, command: str) -> np.ndarray:
        lo, hi, n, log = AXIS_DEFAULTS[command]
        lo = lo if self.gamma_rel_min is None else self.gamma_rel_min
        hi = hi if self.gamma_rel_max is None else self.gamma_rel_max
        n = n if self.gamma_rel_points is None else self.gamma_rel_points
        log = log if self.gamma_rel_log is None else self.gamma_rel_log
        if n < 2:
            raise ConfigError("need at least 2 points")
        if not 0 < lo < hi:
            raise ConfigError("need 0 < gamma-rel-min < gamma-rel-max")
        if log:
            return 10.0 ** np.linspace(math.log10(lo), math.log10(hi), n)
        return np.linspace(lo, hi, n)

    def out_path(self) -> Path:
        return Path(self.output_dir or os.environ.get(ENV_OUT) or ".")


_CONFIG_KEYS = {
    "gamma": float,
    "epsilon": lambda s: [float(x) for x in s.split(",") if x.strip()],
    "big_gamma": float,
    "gamma_rel_min": float,
    "gamma_rel_max": float,
    "gamma_rel_points": int,
    "gamma_rel_log": lambda s: _parse_bool(s),
    "cutoff": int,
    "out": str,
    "format": str,
    "tolerance_scale": float,
}
_FIELD_FOR = {"epsilon": "epsilon_list", "out": "output_dir"}


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; dashes and underscores are interchangeable."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[_FIELD_FOR.get(key, key)] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


# ----------------------------------------------------------------------------
# writers


def _fmt(x) -> str:
    if isinstance(x, str):
        return '"' + x.replace('"', '""') + '"'
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FMT % x


def _json_value(x):
    if x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return None if math.isnan(x) else x


def write_table(cfg: RunConfig, stem: str, columns, rows) -> Path:
    out = cfg.out_path()
    out.mkdir(parents=True, exist_ok=True)
    if cfg.format == "json":
        path = out / f"{stem}.json"
        data = {"columns": list(columns), "rows": [[_json_value(v) for v in r] for r in rows]}
        text = json.dumps(data, indent=1) + "\n"
    else:
        path = out / f"{stem}.csv"
        lines = [",".join(columns)] + [",".join(_fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _stem(base: str, cfg: RunConfig, eps: float) -> str:
    if len(cfg.epsilon_list) == 1:
        return base
    return f"{base}_eps{eps:g}"


def _trace_axis(gamma: float):
    """Output times ``k * step / gamma`` for ``|t| <= half_width / gamma``."""
    k = np.arange(-round(TRACE_HALF_WIDTH / TRACE_STEP), round(TRACE_HALF_WIDTH / TRACE_STEP) + 1)
    return k, k * TRACE_STEP / gamma


def _trace_values(f, gamma: float) -> np.ndarray:
    """Real part of ``f`` on the trace axis; a jump at ``t = 0`` shows its midpoint."""
    k, _ = _trace_axis(gamma)
    grid = Grid(k[0] * TRACE_STEP / gamma, TRACE_STEP / gamma, k.size)
    return np.real(f.sample(grid).values)


def _trace_grid(gamma: float, slow_rate: float) -> Grid:
    """Computation grid whose every ``OVERSAMPLE``-th node is an output time."""
    step = TRACE_STEP / gamma / OVERSAMPLE
    half = 2**16
    while half * step * slow_rate < 40:
        half *= 2
    return Grid(-half * step, step, 2 * half + 1)


# ----------------------------------------------------------------------------
# commands


def cmd_spectrum(cfg: RunConfig) -> list[Path]:
    omega = np.linspace(-10 * cfg.gamma, 10 * cfg.gamma, 2001)
    paths = []
    for eps in cfg.epsilon_list:
        p = OpoParams(cfg.gamma, eps)
        rows = zip(omega, opo.v_plus(p, omega), opo.v_minus(p, omega), opo.squeezing_db(p, omega),
                   opo.r_tilde(p, omega), opo.phase(p, omega))
        paths.append(write_table(cfg, _stem("spectrum", cfg, eps),
                                 ["omega", "v_plus", "v_minus", "v_plus_db", "r_tilde", "phi"], rows))
    return paths


class NumericCheckError(RuntimeError):
    pass


def cmd_correlation(cfg: RunConfig) -> list[Path]:
    k, t = _trace_axis(cfg.gamma)
    paths = []
    for eps in cfg.epsilon_list:
        p = OpoParams(cfg.gamma, eps)
        grid = _trace_grid(cfg.gamma, cfg.gamma - eps)
        r = opo.correlation_time(p, grid)
        centre = grid.zero_index()
        values = r.values[centre + OVERSAMPLE * k]
        if np.max(np.abs(np.imag(values))) >= 1e-9:
            raise NumericCheckError("correlation has an imaginary part above 1e-9")
        paths.append(write_table(cfg, _stem("correlation", cfg, eps), ["t", "value"],
                                 zip(t, np.real(values))))
    return paths


def cmd_equivloss(cfg: RunConfig) -> list[Path]:
    rows = []
    for eps in cfg.epsilon_list:
        p = OpoParams(cfg.gamma, eps)
        for gr, loss in equiv_loss_curve(p, cfg.axis("equivloss")):
            rows.append((gr, loss, eps / cfg.gamma))
    return [write_table(cfg, "equivloss", ["gamma_rel", "L", "epsilon_over_gamma"], rows)]


def _filtered_modes(gamma: float, big_gamma: float):
    try:
        return closed_hr_r(gamma, big_gamma), closed_hr_rr(gamma, big_gamma)
    except DegenerateRatesError:
        hr = heralded_mode(OpoParams(gamma, 0.0), FilterParams(big_gamma))
        return hr, normalize(convolve(hr, both_side_exp(gamma)))


def cmd_modefuncs(cfg: RunConfig) -> list[Path]:
    _, t = _trace_axis(cfg.gamma)
    r = both_side_exp(cfg.gamma)
    n_r = normalize(r)
    n_rr = normalize(convolve(r, r))
    bare = write_table(cfg, "modefuncs_bare", ["t", "n_r", "n_rr"],
                       zip(t, _trace_values(n_r, cfg.gamma), _trace_values(n_rr, cfg.gamma)))

    hr_r, hr_rr = _filtered_modes(cfg.gamma, cfg.big_gamma)
    n_h = normalize(conjugate(time_reverse(filter_response(FilterParams(cfg.big_gamma)))))
    filt = write_table(cfg, "modefuncs", ["t", "n_hr_r", "n_hr_rr", "n_hr"],
                       zip(t, *(_trace_values(f, cfg.gamma) for f in (hr_r, hr_rr, n_h))))

    ladder = pair_mode_ladder(n_r, r, depth=6)
    rows = [(k, c.real, c.imag, complex(d).real, complex(d).imag)
            for k, (c, d) in enumerate(zip(ladder.diag_coeffs, ladder.offdiag_coeffs))]
    lad = write_table(cfg, "ladder", ["k", "c_kk_re", "c_kk_im", "c_kk1_re", "c_kk1_im"], rows)
    return [bare, filt, lad]


def cmd_modematch(cfg: RunConfig) -> list[Path]:
    reports = filter_scan(OpoParams(cfg.gamma, 0.0), cfg.axis("modematch"))
    rows = [(x.gamma_rel_inv, x.m_closed, x.m_numeric, x.discrepancy) for x in reports]
    return [write_table(cfg, "modematch", ["inv_gamma_rel", "m_closed", "m_numeric", "discrepancy"], rows)]


def cmd_verify(cfg: RunConfig) -> bool:
    checks = run_checks(cfg.gamma, cfg.epsilon_list, cfg.big_gamma, cfg.cutoff,
                        tolerance_scale=cfg.tolerance_scale)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    write_table(cfg, "verify", ["name", "value", "tolerance", "passed"],
                [(c.name, c.value, c.tolerance, int(c.passed)) for c in checks])
    return failed == 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "correlation": cmd_correlation,
    "equivloss": cmd_equivloss,
    "modefuncs": cmd_modefuncs,
    "modematch": cmd_modematch,
    "verify": cmd_verify,
}


# ----------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=float, help="OPO half-bandwidth (default 1)")
    common.add_argument("--epsilon", type=float, action="append",
                        help="pump amplitude; repeat for several (default 0.03, 0.3, 0.7)")
    common.add_argument("--big-gamma", type=float, help="filter decay rate (default 0.4)")
    common.add_argument("--gamma-rel-min", type=float)
    common.add_argument("--gamma-rel-max", type=float)
    common.add_argument("--gamma-rel-points", type=int)
    common.add_argument("--gamma-rel-log", dest="gamma_rel_log", action="store_true", default=None)
    common.add_argument("--gamma-rel-linear", dest="gamma_rel_log", action="store_false")
    common.add_argument("--cutoff", type=int, help=f"Fock cutoff (default {DEFAULT_CUTOFF})")
    common.add_argument("--out", help=f"output directory (fallback: ${ENV_OUT}, then .)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--tolerance-scale", type=float, help="multiply every verify tolerance")

    parser = argparse.ArgumentParser(prog="catfilter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then config file, then flags."""
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **read_config(args.config))
    flags = {
        "gamma": args.gamma,
        "epsilon_list": args.epsilon,
        "big_gamma": args.big_gamma,
        "gamma_rel_min": args.gamma_rel_min,
        "gamma_rel_max": args.gamma_rel_max,
        "gamma_rel_points": args.gamma_rel_points,
        "gamma_rel_log": args.gamma_rel_log,
        "cutoff": args.cutoff,
        "output_dir": args.out,
        "format": args.format,
        "tolerance_scale": args.tolerance_scale,
    }
    cfg = replace(cfg, **{k: v for k, v in flags.items() if v is not None})
    return cfg.validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command in AXIS_DEFAULTS:
            cfg.axis(args.command)
    except ConfigError as exc:
        print(f"catfilter: error: {exc}", file=sys.stderr)
        return 2
    try:
        result = COMMANDS[args.command](cfg)
    except (NumericCheckError, SignalError) as exc:
        print(f"catfilter: numerical failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"catfilter: cannot write output: {exc}", file=sys.stderr)
        return 2
    if args.command == "verify":
        return 0 if result else 1
    for path in result:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
