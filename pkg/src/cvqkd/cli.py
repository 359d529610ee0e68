"""Command-line front end: parameter sweeps to CSV/SVG, single-point
evaluation, and the numerical verification suite.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .keyrate import KeyRatePoint, Reconciliation, key_rate, sweep
from .models import ChannelParams, ModelKind, ParameterError, SourceParams
from .verify import cross_model_checks, eb_pm_equivalence_check, w_monotonicity_check

ALL_MODELS = (
    ModelKind.NEUTRAL_PARTY,
    ModelKind.BEAM_SPLITTER,
    ModelKind.UNTRUSTED_SOURCE,
)

_MODEL_ALIASES = {
    "neutral-party": ModelKind.NEUTRAL_PARTY,
    "neutral": ModelKind.NEUTRAL_PARTY,
    "beam-splitter": ModelKind.BEAM_SPLITTER,
    "bs": ModelKind.BEAM_SPLITTER,
    "untrusted-source": ModelKind.UNTRUSTED_SOURCE,
    "untrusted": ModelKind.UNTRUSTED_SOURCE,
}

_RECON_ALIASES = {
    "reverse": Reconciliation.REVERSE,
    "rr": Reconciliation.REVERSE,
    "direct": Reconciliation.DIRECT,
    "dr": Reconciliation.DIRECT,
}

# Standard sweep configurations: attenuation/amplification source noise in
# reverse/direct reconciliation, V=20, channel excess noise 0.04, source
# excess noise 0.1, T from 0.01 to 1.00 in steps of 0.01, all three models.
PRESETS: dict[str, dict] = {
    "fig2a": {"recon": "reverse", "TA": 0.9},
    "fig2b": {"recon": "reverse", "TA": 1.1},
    "fig3a": {"recon": "direct", "TA": 0.9},
    "fig3b": {"recon": "direct", "TA": 1.1},
}
_PRESET_COMMON = {
    "V": 20.0,
    "eps": 0.04,
    "epsA": 0.1,
    "t_min": 0.01,
    "t_max": 1.0,
    "t_step": 0.01,
}

CSV_HEADER = "model,recon,T,i_ab,holevo,key_rate,feasible"


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters shared by the subcommands."""

    V: float = 20.0
    eps: float = 0.04
    epsA: float = 0.1
    TA: float = 0.9
    models: tuple[ModelKind, ...] = ALL_MODELS
    recon: Reconciliation = Reconciliation.REVERSE
    t_min: float = 0.01
    t_max: float = 1.0
    t_step: float = 0.01
    beta: float = 1.0
    clamp_zero: bool = False
    out: Path = Path("sweep.csv")
    fmt: str = "csv"
    T: float | None = None

    def validate(self) -> None:
        if self.t_min <= 0.0:
            raise ParameterError(f"t-min > 0 required (got {self.t_min})")
        if self.t_max > 1.0:
            raise ParameterError(f"t-max <= 1 required (got {self.t_max})")
        if self.t_step <= 0.0:
            raise ParameterError(f"t-step > 0 required (got {self.t_step})")
        if self.t_max < self.t_min:
            raise ParameterError(f"t-max >= t-min required (got {self.t_min}..{self.t_max})")
        if not 0.0 < self.beta <= 1.0:
            raise ParameterError(f"beta in (0, 1] required (got {self.beta})")
        if not self.models:
            raise ParameterError("at least one --model is required")
        if self.fmt not in ("csv", "svg", "both"):
            raise ParameterError(f"format must be csv, svg or both (got {self.fmt!r})")

    def source(self) -> SourceParams:
        return SourceParams.from_excess_noise(self.V, self.TA, self.epsA)

    def t_grid(self) -> list[float]:
        count = int(round((self.t_max - self.t_min) / self.t_step)) + 1
        grid = [round(self.t_min + k * self.t_step, 12) for k in range(count)]
        return [t for t in grid if t <= self.t_max + 1e-12]


def _parse_models(values: list[str]) -> tuple[ModelKind, ...]:
    names: list[str] = []
    for v in values:
        names.extend(part.strip() for part in v.split(",") if part.strip())
    if not names:
        raise ParameterError("at least one --model is required")
    kinds: list[ModelKind] = []
    for name in names:
        key = name.lower()
        if key not in _MODEL_ALIASES:
            raise ParameterError(
                f"unknown model {name!r}; choose from {sorted(set(_MODEL_ALIASES))}"
            )
        kind = _MODEL_ALIASES[key]
        if kind not in kinds:
            kinds.append(kind)
    return tuple(kinds)


def _read_config_file(path: Path) -> dict[str, str]:
    """Key=value lines; blank lines and #-comments ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _config_from_args(args: argparse.Namespace, base: RunConfig | None = None) -> RunConfig:
    config = base if base is not None else RunConfig()
    if getattr(args, "preset", None):
        if args.preset not in PRESETS:
            raise ParameterError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        merged = {**_PRESET_COMMON, **PRESETS[args.preset]}
        config = replace(
            config,
            V=merged["V"],
            eps=merged["eps"],
            epsA=merged["epsA"],
            TA=merged["TA"],
            recon=_RECON_ALIASES[merged["recon"]],
            t_min=merged["t_min"],
            t_max=merged["t_max"],
            t_step=merged["t_step"],
            models=ALL_MODELS,
        )
    if getattr(args, "config", None):
        file_values = _read_config_file(Path(args.config))
        config = _apply_options(config, file_values)
    flag_values = {
        key: getattr(args, attr)
        for key, attr in [
            ("V", "V"),
            ("eps", "eps"),
            ("epsA", "epsA"),
            ("TA", "TA"),
            ("model", "model"),
            ("recon", "recon"),
            ("t-min", "t_min"),
            ("t-max", "t_max"),
            ("t-step", "t_step"),
            ("beta", "beta"),
            ("out", "out"),
            ("format", "format"),
            ("T", "T"),
        ]
        if hasattr(args, attr) and getattr(args, attr) is not None
    }
    if getattr(args, "clamp_zero", False):
        flag_values["clamp-zero"] = "true"
    return _apply_options(config, flag_values)


def _apply_options(config: RunConfig, values: dict) -> RunConfig:
    updates: dict = {}
    for key, value in values.items():
        if key in ("V", "eps", "epsA", "TA", "t-min", "t-max", "t-step", "beta", "T"):
            attr = key.replace("-", "_")
            updates[attr] = float(value)
        elif key == "model":
            raw = value if isinstance(value, list) else [str(value)]
            updates["models"] = _parse_models(raw)
        elif key == "recon":
            name = str(value).lower()
            if name not in _RECON_ALIASES:
                raise ParameterError(f"unknown reconciliation {value!r}; use reverse or direct")
            updates["recon"] = _RECON_ALIASES[name]
        elif key == "clamp-zero":
            updates["clamp_zero"] = str(value).lower() in ("1", "true", "yes", "on")
        elif key == "out":
            updates["out"] = Path(str(value))
        elif key == "format":
            updates["fmt"] = str(value).lower()
        else:
            raise ParameterError(f"unknown configuration key {key!r}")
    return replace(config, **updates)


def _presented_rate(key_rate: float, clamp_zero: bool) -> float:
    if clamp_zero and not math.isnan(key_rate):
        return max(key_rate, 0.0)
    return key_rate


def format_csv_rows(points: list[KeyRatePoint], clamp_zero: bool = False) -> list[str]:
    """CSV rows (no header), 12 significant digits, sorted by (model, T)."""
    rows = []
    for p in sorted(points, key=lambda p: (p.model.value, p.T)):
        rate = _presented_rate(p.key_rate, clamp_zero)
        rows.append(
            f"{p.model.value},{p.recon.value},{p.T:.12g},{p.i_ab:.12g},"
            f"{p.holevo:.12g},{rate:.12g},{'true' if p.feasible else 'false'}"
        )
    return rows


def cmd_sweep(config: RunConfig) -> int:
    config.validate()
    src = config.source()
    points = sweep(config.models, config.recon, src, config.eps, config.t_grid(), config.beta)
    csv_path = config.out if config.out.suffix == ".csv" else config.out.with_suffix(".csv")
    svg_path = csv_path.with_suffix(".svg")
    if config.fmt in ("csv", "both"):
        body = "\n".join([CSV_HEADER, *format_csv_rows(points, config.clamp_zero)]) + "\n"
        csv_path.write_text(body, newline="\n")
        print(f"wrote {csv_path}")
    if config.fmt in ("svg", "both"):
        from .plotting import render_key_rate_figure

        render_key_rate_figure(
            points,
            svg_path,
            clamp_zero=config.clamp_zero,
            title=f"{config.recon.value} reconciliation, T_A={config.TA:g}, "
                  f"eps={config.eps:g}, eps_A={config.epsA:g}, V={config.V:g}",
        )
        print(f"wrote {svg_path}")
    return 0


def cmd_point(config: RunConfig) -> int:
    config.validate()
    if config.T is None:
        raise ParameterError("point requires --T")
    src = config.source()
    ch = ChannelParams.from_excess_noise(config.T, config.eps)
    for kind in config.models:
        p = key_rate(kind, config.recon, src, ch, beta=config.beta)
        rate = _presented_rate(p.key_rate, config.clamp_zero)
        print(
            f"model={p.model.value} recon={p.recon.value} T={p.T:.12g} "
            f"i_ab={p.i_ab:.12g} holevo={p.holevo:.12g} key_rate={rate:.12g} "
            f"beta={p.beta:.12g} feasible={'true' if p.feasible else 'false'}"
        )
    return 0


def cmd_verify(config: RunConfig, rr_tol: float = 1e-8, dr_tol: float = 1e-10,
               w_tol: float = 1e-10, eb_pm_tol: float = 1e-10) -> int:
    """Run all verification checks and print the report; 0 iff everything passed.

    The tolerance arguments exist as a test hook; the command line always uses
    the defaults.
    """
    config.validate()
    src = config.source()
    report = eb_pm_equivalence_check(src, tol=eb_pm_tol)
    mid_t = min(max(0.5, config.t_min), config.t_max)
    report = report.merged_with(
        w_monotonicity_check(
            src, ChannelParams.from_excess_noise(mid_t, config.eps), tol=w_tol
        )
    )
    report = report.merged_with(
        cross_model_checks(src, config.eps, config.t_grid(), rr_tol=rr_tol, dr_tol=dr_tol)
    )
    print(str(report))
    summary = "all checks passed" if report.passed else "some checks FAILED"
    print(f"# {sum(r.passed for r in report.results)}/{len(report.results)} checks passed; {summary}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvqkd",
        description=(
            "Secret-key-rate security bounds for continuous-variable QKD with "
            "trusted Gaussian source noise (no-switching protocol)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--V", type=float, help="EPR variance (shot-noise units, >= 1)")
        p.add_argument("--eps", type=float, help="channel excess noise epsilon = T*chi - 1 + T")
        p.add_argument("--epsA", type=float, help="source excess noise epsilon_A")
        p.add_argument("--TA", type=float, help="source transmittance/gain T_A")
        p.add_argument(
            "--model",
            action="append",
            help="model to evaluate (neutral-party | beam-splitter | untrusted-source); "
                 "repeatable or comma-separated",
        )
        p.add_argument("--recon", help="reconciliation direction (reverse | direct)")
        p.add_argument("--beta", type=float, help="reconciliation efficiency in (0, 1]")
        p.add_argument("--clamp-zero", action="store_true", help="report negative key rates as 0")
        p.add_argument("--config", help="key=value configuration file; flags override it")

    p_sweep = sub.add_parser("sweep", help="key rates over a transmittance grid, to CSV/SVG")
    add_common(p_sweep)
    p_sweep.add_argument("--t-min", type=float, dest="t_min", help="grid start (default 0.01)")
    p_sweep.add_argument("--t-max", type=float, dest="t_max", help="grid end (default 1.0)")
    p_sweep.add_argument("--t-step", type=float, dest="t_step", help="grid step (default 0.01)")
    p_sweep.add_argument("--preset", help=f"named configuration: {', '.join(sorted(PRESETS))}")
    p_sweep.add_argument("--out", help="output path; .csv is written, the figure next to it")
    p_sweep.add_argument("--format", help="csv | svg | both (default csv)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_point = sub.add_parser("point", help="one key-rate evaluation printed as key=value pairs")
    add_common(p_point)
    p_point.add_argument("--T", type=float, help="channel transmittance of the point")
    p_point.set_defaults(func=cmd_point)

    p_verify = sub.add_parser("verify", help="run the numerical verification suite")
    add_common(p_verify)
    p_verify.add_argument("--t-min", type=float, dest="t_min")
    p_verify.add_argument("--t-max", type=float, dest="t_max")
    p_verify.add_argument("--t-step", type=float, dest="t_step")
    p_verify.add_argument("--preset", help=f"named configuration: {', '.join(sorted(PRESETS))}")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    base = None
    if args.func is cmd_verify:
        base = RunConfig(t_min=0.05, t_max=1.0, t_step=0.05)
    elif args.func is cmd_point:
        base = RunConfig(models=(ModelKind.NEUTRAL_PARTY,))
    try:
        config = _config_from_args(args, base)
        return args.func(config)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
