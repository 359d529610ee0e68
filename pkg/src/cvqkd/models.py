"""Covariance-matrix builders for the three source-noise models.

The source is an EPR pair of variance V whose signal half acquires Gaussian
noise described by a transmittance/gain T_A and added noise chi_A (referred
to input) before entering a channel (T, chi). Three ways of accounting for
that noise are built here:

* neutral party: the noise is attributed to an uncharacterized trusted third
  party; bounds are computed from a decoupled-ancilla purification whose
  effective EPR variance is T_A*(V + chi_A);
* beam splitter: an ancillary EPR pair is coupled in, on the signal side for
  attenuation (T_A < 1) or on the retained side for amplification (T_A > 1);
* untrusted source: the noise is attributed to the eavesdropper, leaving the
  bare two-mode Alice-Bob matrix.

Experiments are usually parameterized by excess noise eps = T*chi - 1 + T
rather than chi; both constructors are provided.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gaussian import CovarianceMatrix

__all__ = [
    "ParameterError",
    "FeasibilityWarning",
    "ModelKind",
    "SourceParams",
    "ChannelParams",
    "BsDerivedParams",
    "ModelState",
    "AmplificationFeasibility",
    "params_from_excess_noise",
    "build_gamma_ab",
    "build_gamma_fab_decoupled",
    "build_bs_attenuation",
    "build_bs_amplification",
    "check_amplification_feasibility",
    "build_model_state",
]

_SIGMA_Z = np.diag([1.0, -1.0])


class ParameterError(ValueError):
    """A model parameter violates its defining inequality (quoted in the message)."""


class FeasibilityWarning(UserWarning):
    """Parameters are accepted but violate a physical-realizability constraint."""


class ModelKind(enum.Enum):
    """Which source-noise accounting to use."""

    NEUTRAL_PARTY = "neutral-party"
    BEAM_SPLITTER = "beam-splitter"
    UNTRUSTED_SOURCE = "untrusted-source"


def params_from_excess_noise(t_or_ta: float, epsilon: float) -> float:
    """Added noise chi solving epsilon = T*chi - 1 + T for the given T.

    Works for both channel (T) and source (T_A) parameters.
    """
    if t_or_ta <= 0:
        raise ParameterError(f"transmittance must satisfy T > 0 (got {t_or_ta})")
    if epsilon < 0:
        raise ParameterError(f"excess noise must satisfy epsilon >= 0 (got {epsilon})")
    chi = (epsilon + 1.0 - t_or_ta) / t_or_ta
    if chi < -1e-12:
        raise ParameterError(
            f"T <= 1 + epsilon required for nonnegative added noise: "
            f"chi = (epsilon + 1 - T)/T = {chi:.6g} < 0"
        )
    return max(chi, 0.0)


@dataclass(frozen=True)
class SourceParams:
    """EPR variance V plus the source-noise pair (T_A, chi_A).

    Invariants enforced: V >= 1, T_A > 0, chi_A >= 0, and
    epsilon_A = T_A*chi_A - 1 + T_A >= 0 (no sub-vacuum source noise).
    For T_A > 1 a physically realizable amplifier additionally needs
    chi_A >= (T_A - 1)/T_A; that constraint is reported by
    :meth:`feasibility_violation` rather than enforced, so the standard
    simulation settings (which violate it) remain computable.
    """

    V: float
    T_A: float
    chi_A: float

    def __post_init__(self) -> None:
        if self.V < 1.0:
            raise ParameterError(f"EPR variance must satisfy V >= 1 (got {self.V})")
        if self.T_A <= 0:
            raise ParameterError(f"source transmittance must satisfy T_A > 0 (got {self.T_A})")
        if self.chi_A < -1e-12:
            raise ParameterError(f"source added noise must satisfy chi_A >= 0 (got {self.chi_A})")
        object.__setattr__(self, "chi_A", max(float(self.chi_A), 0.0))
        if self.epsilon_A < -1e-12:
            raise ParameterError(
                f"epsilon_A = T_A*chi_A - 1 + T_A >= 0 required (got {self.epsilon_A:.6g})"
            )

    @classmethod
    def from_excess_noise(cls, V: float, T_A: float, epsilon_A: float) -> "SourceParams":
        return cls(V=V, T_A=T_A, chi_A=params_from_excess_noise(T_A, epsilon_A))

    @property
    def epsilon_A(self) -> float:
        return self.T_A * self.chi_A - 1.0 + self.T_A

    def feasibility_violation(self) -> str | None:
        """Violated realizability inequality as text, or None if none is violated."""
        if self.T_A > 1.0:
            bound = (self.T_A - 1.0) / self.T_A
            if self.chi_A < bound - 1e-12:
                return (
                    f"chi_A >= (T_A - 1)/T_A required for a realizable amplifier: "
                    f"chi_A = {self.chi_A:.6g} < {bound:.6g} "
                    f"(equivalently epsilon_A >= 2*(T_A - 1))"
                )
        return None


@dataclass(frozen=True)
class ChannelParams:
    """Gaussian channel transmittance T in (0, 1] and added noise chi >= (1-T)/T."""

    T: float
    chi: float

    def __post_init__(self) -> None:
        if not 0.0 < self.T <= 1.0:
            raise ParameterError(f"channel transmittance must satisfy 0 < T <= 1 (got {self.T})")
        floor = (1.0 - self.T) / self.T
        if self.chi < floor - 1e-12:
            raise ParameterError(
                f"chi >= (1 - T)/T required (epsilon >= 0): got chi = {self.chi:.6g}, "
                f"floor {floor:.6g}"
            )

    @classmethod
    def from_excess_noise(cls, T: float, epsilon: float) -> "ChannelParams":
        return cls(T=T, chi=params_from_excess_noise(T, epsilon))

    @property
    def epsilon(self) -> float:
        return self.T * self.chi - 1.0 + self.T


@dataclass(frozen=True)
class BsDerivedParams:
    """Derived beam-splitter model parameters.

    Attenuation fills ``N`` (ancilla EPR variance); amplification fills the
    modified parameter set (V_B, T_B, chi_B, N_B).
    """

    N: float | None = None
    V_B: float | None = None
    T_B: float | None = None
    chi_B: float | None = None
    N_B: float | None = None


@dataclass(frozen=True)
class ModelState:
    """A built model matrix plus the roles its modes play."""

    kind: ModelKind
    matrix: CovarianceMatrix
    alice_mode: int
    bob_mode: int
    ancilla_modes: tuple[int, ...]
    mode_labels: tuple[str, ...]
    derived: BsDerivedParams | None = None
    regime: str | None = None


class AmplificationFeasibility(NamedTuple):
    feasible: bool
    polynomial_value: float


def _assemble(n_modes: int, diag: list[np.ndarray], off: dict[tuple[int, int], np.ndarray],
              dtype=float) -> np.ndarray:
    g = np.zeros((2 * n_modes, 2 * n_modes), dtype=dtype)
    for m, blk in enumerate(diag):
        g[2 * m:2 * m + 2, 2 * m:2 * m + 2] = blk
    for (i, j), blk in off.items():
        g[2 * i:2 * i + 2, 2 * j:2 * j + 2] = blk
        g[2 * j:2 * j + 2, 2 * i:2 * i + 2] = blk.T
    return g


def _corr(value: float):
    """sqrt of a correlation-strength value, continued to complex below zero.

    Magnitudes within 1e-12 of zero are snapped to zero so boundary cases
    (vacuum ancilla) stay exactly real.
    """
    if abs(value) <= 1e-12:
        return 0.0
    if value < 0:
        return complex(0.0, float(np.sqrt(-value)))
    return float(np.sqrt(value))


def build_gamma_ab(src: SourceParams, ch: ChannelParams) -> CovarianceMatrix:
    """Two-mode Alice-Bob covariance matrix after source noise and channel.

    [[V*I, c*sz], [c*sz, b*I]] with c = sqrt(T*T_A*(V^2-1)) and
    b = T*(T_A*(V + chi_A) + chi). This is the observable statistics shared
    by all three models.
    """
    c = np.sqrt(ch.T * src.T_A * (src.V ** 2 - 1.0))
    b = ch.T * (src.T_A * (src.V + src.chi_A) + ch.chi)
    g = _assemble(2, [src.V * np.eye(2), b * np.eye(2)], {(0, 1): c * _SIGMA_Z})
    return CovarianceMatrix(g)


def build_gamma_fab_decoupled(src: SourceParams, ch: ChannelParams) -> CovarianceMatrix:
    """Three-mode (F, A, B) matrix of the decoupled-ancilla purification bound.

    The ancilla F is left in vacuum and uncorrelated; the (A, B) block is an
    effective EPR pair of variance V' = T_A*(V + chi_A) sent through the
    channel. With a noiseless channel this state is pure, which is what makes
    it usable as a purification in the security bounds.
    """
    v_eff = src.T_A * (src.V + src.chi_A)
    if v_eff < 1.0:
        raise ParameterError(
            f"effective EPR variance T_A*(V + chi_A) >= 1 required (got {v_eff:.6g})"
        )
    c = np.sqrt(ch.T * (v_eff ** 2 - 1.0))
    b = ch.T * (v_eff + ch.chi)
    g = _assemble(
        3,
        [np.eye(2), v_eff * np.eye(2), b * np.eye(2)],
        {(1, 2): c * _SIGMA_Z},
    )
    return CovarianceMatrix(g)


def build_bs_attenuation(
    src: SourceParams, ch: ChannelParams
) -> tuple[CovarianceMatrix, BsDerivedParams]:
    """Four-mode (F, G, A, B) matrix of the beam-splitter model, attenuation regime.

    An ancillary EPR pair (F, G) of variance N = T_A*chi_A/(1 - T_A) is mixed
    into the signal on a beam splitter of transmittance T_A before the channel.
    N >= 1 exactly when epsilon_A >= 0; epsilon_A = 0 gives a vacuum ancilla.
    """
    if src.T_A >= 1.0:
        raise ParameterError(
            f"beam-splitter attenuation regime requires T_A < 1 (got {src.T_A})"
        )
    V, T_A, chi_A = src.V, src.T_A, src.chi_A
    T, chi = ch.T, ch.chi
    n_anc = T_A * chi_A / (1.0 - T_A)
    if n_anc < 1.0 - 1e-9:
        raise ParameterError(
            f"ancilla variance N = T_A*chi_A/(1 - T_A) >= 1 required (got {n_anc:.6g}); "
            f"this is equivalent to epsilon_A >= 0"
        )
    n_anc = max(n_anc, 1.0)
    diag = [
        n_anc * np.eye(2),
        (T_A * n_anc + (1.0 - T_A) * V) * np.eye(2),
        V * np.eye(2),
        T * (T_A * (V + chi_A) + chi) * np.eye(2),
    ]
    off = {
        (0, 1): _corr(T_A * (n_anc ** 2 - 1.0)) * _SIGMA_Z,
        (0, 3): -_corr(T * (1.0 - T_A) * (n_anc ** 2 - 1.0)) * _SIGMA_Z,
        (1, 2): np.sqrt((1.0 - T_A) * (V ** 2 - 1.0)) * _SIGMA_Z,
        (1, 3): np.sqrt(T * T_A * (1.0 - T_A)) * (V - n_anc) * np.eye(2),
        (2, 3): np.sqrt(T * T_A * (V ** 2 - 1.0)) * _SIGMA_Z,
    }
    return CovarianceMatrix(_assemble(4, diag, off)), BsDerivedParams(N=n_anc)


def build_bs_amplification(
    src: SourceParams, ch: ChannelParams
) -> tuple[CovarianceMatrix, BsDerivedParams]:
    """Four-mode (F, G, A, B) matrix of the beam-splitter model, amplification regime.

    The ancillary EPR pair couples into the retained mode, with the modified
    parameter set V_B = T_A*(V + chi_A), T_B = T_A*(V^2-1)/(T_A^2*(V+chi_A)^2 - 1),
    chi_B = (T_A^2*(V+chi_A)*(V*chi_A+1) - V)/(T_A*(V^2-1)) and ancilla
    variance N_B = T_B*chi_B/(1 - T_B). The reduced (A, B) block equals
    build_gamma_ab for any parameters.

    Realizability needs chi_B >= (1 - T_B)/T_B, i.e. N_B >= 1, which holds
    exactly when chi_A >= (T_A - 1)/T_A. Below that bound a
    FeasibilityWarning is emitted and the matrix is built with the formally
    continued (complex) ancilla correlations; such a matrix is not a physical
    state, but its symplectic spectrum, the conditional states, and the
    resulting bounds remain well defined and real.
    """
    if src.T_A <= 1.0:
        raise ParameterError(
            f"beam-splitter amplification regime requires T_A > 1 (got {src.T_A})"
        )
    V, T_A, chi_A = src.V, src.T_A, src.chi_A
    T, chi = ch.T, ch.chi
    v_b = T_A * (V + chi_A)
    t_b = T_A * (V ** 2 - 1.0) / (T_A ** 2 * (V + chi_A) ** 2 - 1.0)
    if not 0.0 < t_b < 1.0:
        raise ParameterError(
            f"derived beam-splitter transmittance must satisfy 0 < T_B < 1 (got {t_b:.6g}); "
            f"this cannot happen for valid source parameters"
        )
    chi_b = (T_A ** 2 * (V + chi_A) * (V * chi_A + 1.0) - V) / (T_A * (V ** 2 - 1.0))
    n_b = t_b * chi_b / (1.0 - t_b)
    violation = src.feasibility_violation()
    if violation is not None:
        warnings.warn(
            f"amplification parameters are not physically realizable ({violation}); "
            f"building the formally continued model matrix",
            FeasibilityWarning,
            stacklevel=2,
        )
    fg = _corr(t_b * (n_b ** 2 - 1.0))
    fa = _corr((1.0 - t_b) * (n_b ** 2 - 1.0))
    dtype = complex if isinstance(fg, complex) or isinstance(fa, complex) else float
    diag = [
        n_b * np.eye(2),
        (t_b * n_b + (1.0 - t_b) * v_b) * np.eye(2),
        t_b * (v_b + chi_b) * np.eye(2),
        T * (v_b + chi) * np.eye(2),
    ]
    off = {
        (0, 1): fg * _SIGMA_Z,
        (0, 2): -fa * _SIGMA_Z,
        (1, 2): np.sqrt(t_b * (1.0 - t_b)) * (v_b - n_b) * np.eye(2),
        (1, 3): np.sqrt(T * (1.0 - t_b) * (v_b ** 2 - 1.0)) * _SIGMA_Z,
        (2, 3): np.sqrt(T * t_b * (v_b ** 2 - 1.0)) * _SIGMA_Z,
    }
    derived = BsDerivedParams(V_B=v_b, T_B=t_b, chi_B=chi_b, N_B=n_b)
    return CovarianceMatrix(_assemble(4, diag, off, dtype=dtype)), derived


def check_amplification_feasibility(src: SourceParams) -> AmplificationFeasibility:
    """Evaluate the amplification realizability polynomial for T_A > 1.

    chi_A^2 + (V - 1)*chi_A - (T_A*V - 1)*(T_A - 1)/T_A^2 is >= 0 exactly when
    the derived ancilla is physical; it reaches 0 at chi_A = (T_A - 1)/T_A.
    """
    if src.T_A <= 1.0:
        raise ParameterError(f"feasibility check applies to T_A > 1 only (got {src.T_A})")
    value = (
        src.chi_A ** 2
        + (src.V - 1.0) * src.chi_A
        - (src.T_A * src.V - 1.0) * (src.T_A - 1.0) / src.T_A ** 2
    )
    return AmplificationFeasibility(feasible=value >= -1e-12, polynomial_value=float(value))


def build_model_state(kind: ModelKind, src: SourceParams, ch: ChannelParams) -> ModelState:
    """Build the covariance matrix of the requested model with mode roles attached."""
    if kind is ModelKind.NEUTRAL_PARTY:
        return ModelState(
            kind=kind,
            matrix=build_gamma_fab_decoupled(src, ch),
            alice_mode=1,
            bob_mode=2,
            ancilla_modes=(0,),
            mode_labels=("F", "A", "B"),
        )
    if kind is ModelKind.BEAM_SPLITTER:
        if src.T_A == 1.0:
            raise ParameterError(
                "beam-splitter model is undefined at T_A = 1 (the ancilla variance "
                "T_A*chi_A/(1 - T_A) diverges); use T_A < 1 or T_A > 1"
            )
        if src.T_A < 1.0:
            matrix, derived = build_bs_attenuation(src, ch)
            regime = "attenuation"
        else:
            matrix, derived = build_bs_amplification(src, ch)
            regime = "amplification"
        return ModelState(
            kind=kind,
            matrix=matrix,
            alice_mode=2,
            bob_mode=3,
            ancilla_modes=(0, 1),
            mode_labels=("F", "G", "A", "B"),
            derived=derived,
            regime=regime,
        )
    if kind is ModelKind.UNTRUSTED_SOURCE:
        return ModelState(
            kind=kind,
            matrix=build_gamma_ab(src, ch),
            alice_mode=0,
            bob_mode=1,
            ancilla_modes=(),
            mode_labels=("A", "B"),
        )
    raise ParameterError(f"unknown model kind: {kind!r}")
