"""Executable numerical checks backing the security-bound constructions.

Three families of checks, all reported in a machine-readable, line-oriented
format so CI (and the ``cvqkd verify`` subcommand) can gate on them:

* entanglement-based vs prepare-and-measure equivalence of the source;
* monotonicity of Bob's conditional entropy in the measurement-splitting
  weight w, with the minimum at w = 1/2 (heterodyne);
* cross-model bound consistency: the reverse-reconciliation bound of the
  neutral-party model coincides with the beam-splitter model, and its
  direct-reconciliation bound is never tighter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaussian import (
    CovarianceMatrix,
    DisplacementVector,
    ModePartition,
    condition_on_heterodyne,
    von_neumann_entropy,
)
from .keyrate import Reconciliation, _holevo_flagged
from .models import ChannelParams, ModelKind, ParameterError, SourceParams, build_gamma_ab

__all__ = [
    "WPoint",
    "CheckResult",
    "VerificationReport",
    "eb_pm_equivalence_check",
    "gamma_b_af_of_w",
    "w_monotonicity_check",
    "cross_model_checks",
]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single named check: deviation measured against a tolerance."""

    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name} deviation={self.deviation:.6g} tolerance={self.tolerance:.6g}"
        if self.detail:
            text += f" ({self.detail})"
        return text


@dataclass(frozen=True)
class VerificationReport:
    """An ordered collection of check results."""

    results: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def __str__(self) -> str:
        return "\n".join(self.lines())

    def merged_with(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(self.results + other.results)


@dataclass(frozen=True)
class WPoint:
    """Bob's conditional covariance at one measurement-splitting weight w."""

    w: float
    gamma_b_af: CovarianceMatrix

    def __post_init__(self) -> None:
        if not 0.0 < self.w < 1.0:
            raise ValueError(f"w must lie strictly inside (0, 1), got {self.w}")


def eb_pm_equivalence_check(src: SourceParams, tol: float = 1e-10) -> VerificationReport:
    """Check that heterodyning Alice's half of the noisy EPR source prepares
    exactly the displaced thermal states of the prepare-and-measure protocol.

    Conditioning the pre-channel two-mode source state on Alice's heterodyne
    must leave Bob with covariance T_A*(chi_A + 1)*I, and the conditional mean
    must be sqrt(2*T_A*(V - 1)/(V + 1)) * (X_A, -P_A) for outcome (X_A, P_A);
    the sign flip on the p component is asserted explicitly.
    """
    pre_channel = ChannelParams(T=1.0, chi=0.0)
    gamma = build_gamma_ab(src, pre_channel)
    conditional = condition_on_heterodyne(gamma, ModePartition(kept=(1,), measured=(0,)))
    expected_cov = src.T_A * (src.chi_A + 1.0) * np.eye(2)
    dev_cov = float(np.max(np.abs(conditional.data - expected_cov)))

    g = gamma.data
    sigma_ba = g[2:4, 0:2]
    gamma_a = g[0:2, 0:2]
    mean_map = np.sqrt(2.0) * sigma_ba @ np.linalg.inv(gamma_a + np.eye(2))
    # propagate unit outcomes through the conditional-mean rule
    mean_for_x = DisplacementVector(mean_map @ np.array([1.0, 0.0]))
    mean_for_p = DisplacementVector(mean_map @ np.array([0.0, 1.0]))
    coeff = np.sqrt(2.0 * src.T_A * (src.V - 1.0) / (src.V + 1.0))
    dev_mean = float(
        max(
            np.max(np.abs(mean_for_x.data - np.array([coeff, 0.0]))),
            np.max(np.abs(mean_for_p.data - np.array([0.0, -coeff]))),
        )
    )
    p_sign_flipped = bool(mean_for_p.data[1] <= tol) and bool(mean_for_x.data[0] >= -tol)

    results = (
        CheckResult(
            name="eb-pm-conditional-covariance",
            passed=dev_cov <= tol,
            deviation=dev_cov,
            tolerance=tol,
            detail=f"target T_A*(chi_A+1) = {src.T_A * (src.chi_A + 1.0):.12g}",
        ),
        CheckResult(
            name="eb-pm-conditional-mean",
            passed=(dev_mean <= tol) and p_sign_flipped,
            deviation=dev_mean,
            tolerance=tol,
            detail=f"coefficient {coeff:.12g}, p sign inverted: {p_sign_flipped}",
        ),
    )
    return VerificationReport(results)


def gamma_b_af_of_w(src: SourceParams, ch: ChannelParams, w: float) -> CovarianceMatrix:
    """Bob's conditional covariance when the ancilla-side measurement splits
    its precision between the quadratures with weight w in (0, 1).

    Diagonal matrix with
    x: T*(V' + chi) - T*(V'^2 - 1)/(V' - 1 + 1/w) and
    p: T*(V' + chi) - T*(V'^2 - 1)/(V' - 1 + 1/(1 - w)),
    where V' = T_A*(V + chi_A). w = 1/2 reproduces the heterodyne-conditioned
    state; any other weight can only increase the symplectic eigenvalue.
    """
    if not 0.0 < w < 1.0:
        raise ValueError(f"w must lie strictly inside (0, 1), got {w}")
    v_eff = src.T_A * (src.V + src.chi_A)
    top = ch.T * (v_eff ** 2 - 1.0)
    base = ch.T * (v_eff + ch.chi)
    x_entry = base - top / (v_eff - 1.0 + 1.0 / w)
    p_entry = base - top / (v_eff - 1.0 + 1.0 / (1.0 - w))
    return CovarianceMatrix(np.diag([x_entry, p_entry]))


def w_monotonicity_check(
    src: SourceParams,
    ch: ChannelParams,
    samples: int = 99,
    tol: float = 1e-10,
) -> VerificationReport:
    """Check that the conditional entropy over w is minimized at w = 1/2 and is
    monotone on either side of it.

    Samples a uniform grid of the requested size over (0, 1), always extended
    by the near-endpoints 1e-3 and 1 - 1e-3 and by 1/2 itself.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1 (got {samples})")
    grid = sorted({1e-3, 0.5, 1.0 - 1e-3} | set(np.linspace(0.0, 1.0, samples + 2)[1:-1]))
    points = [WPoint(w=w, gamma_b_af=gamma_b_af_of_w(src, ch, w)) for w in grid]
    entropies = [von_neumann_entropy(p.gamma_b_af) for p in points]
    e_half = entropies[grid.index(0.5)]

    min_dev = max(e_half - e for e in entropies)
    min_detail = ""
    if min_dev > tol:
        w_bad = grid[int(np.argmin(entropies))]
        min_detail = f"entropy below the w=1/2 value at w={w_bad:.6g}"

    left = [(w, e) for w, e in zip(grid, entropies) if w <= 0.5]
    right = [(w, e) for w, e in zip(grid, entropies) if w >= 0.5]
    left_dev, left_w = 0.0, None
    for (w0, e0), (w1, e1) in zip(left, left[1:]):
        if e1 - e0 > left_dev:
            left_dev, left_w = e1 - e0, w1
    right_dev, right_w = 0.0, None
    for (w0, e0), (w1, e1) in zip(right, right[1:]):
        if e0 - e1 > right_dev:
            right_dev, right_w = e0 - e1, w1

    results = (
        CheckResult(
            name="w-entropy-minimum-at-half",
            passed=min_dev <= tol,
            deviation=max(min_dev, 0.0),
            tolerance=tol,
            detail=min_detail or f"{len(grid)} grid points",
        ),
        CheckResult(
            name="w-entropy-nonincreasing-left",
            passed=left_dev <= tol,
            deviation=left_dev,
            tolerance=tol,
            detail="" if left_dev <= tol else f"first violation at w={left_w:.6g}",
        ),
        CheckResult(
            name="w-entropy-nondecreasing-right",
            passed=right_dev <= tol,
            deviation=right_dev,
            tolerance=tol,
            detail="" if right_dev <= tol else f"first violation at w={right_w:.6g}",
        ),
    )
    return VerificationReport(results)


def cross_model_checks(
    src: SourceParams,
    eps: float,
    t_grid: list[float],
    rr_tol: float = 1e-8,
    dr_tol: float = 1e-10,
) -> VerificationReport:
    """Compare the neutral-party and beam-splitter Holevo bounds over a grid.

    Reverse reconciliation: the two bounds must coincide within rr_tol at
    every point. Direct reconciliation: the neutral-party bound must not be
    tighter than the beam-splitter bound (neutral >= beam-splitter - dr_tol).
    Per-point results are followed by two whole-grid summary rows.
    """
    if src.T_A == 1.0:
        raise ParameterError("cross-model checks need a beam-splitter regime: T_A != 1 required")
    results: list[CheckResult] = []
    rr_max = 0.0
    dr_min = np.inf
    for t in t_grid:
        ch = ChannelParams.from_excess_noise(t, eps)
        h_rr_n, _ = _holevo_flagged(ModelKind.NEUTRAL_PARTY, Reconciliation.REVERSE, src, ch)
        h_rr_b, _ = _holevo_flagged(ModelKind.BEAM_SPLITTER, Reconciliation.REVERSE, src, ch)
        rr_dev = abs(h_rr_n - h_rr_b)
        rr_max = max(rr_max, rr_dev)
        results.append(
            CheckResult(
                name=f"rr-bound-coincidence[T={t:g}]",
                passed=rr_dev <= rr_tol,
                deviation=rr_dev,
                tolerance=rr_tol,
            )
        )
        h_dr_n, _ = _holevo_flagged(ModelKind.NEUTRAL_PARTY, Reconciliation.DIRECT, src, ch)
        h_dr_b, _ = _holevo_flagged(ModelKind.BEAM_SPLITTER, Reconciliation.DIRECT, src, ch)
        margin = h_dr_n - h_dr_b
        dr_min = min(dr_min, margin)
        results.append(
            CheckResult(
                name=f"dr-bound-overestimates[T={t:g}]",
                passed=margin >= -dr_tol,
                deviation=max(-margin, 0.0),
                tolerance=dr_tol,
            )
        )
    results.append(
        CheckResult(
            name="rr-bound-coincidence-max",
            passed=rr_max <= rr_tol,
            deviation=rr_max,
            tolerance=rr_tol,
            detail=f"{len(t_grid)} grid points",
        )
    )
    results.append(
        CheckResult(
            name="dr-bound-overestimates-min-margin",
            passed=dr_min >= -dr_tol,
            deviation=max(-float(dr_min), 0.0),
            tolerance=dr_tol,
            detail=f"min margin {dr_min:.6g}",
        )
    )
    return VerificationReport(tuple(results))
