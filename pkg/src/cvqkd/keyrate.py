"""Mutual information, Holevo bounds, and secret key rates for the
no-switching protocol (coherent states, heterodyne detection at both ends),
under each source-noise model and reconciliation direction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gaussian import (
    CovarianceMatrix,
    ModePartition,
    condition_on_heterodyne,
    formal_entropy,
)
from .models import (
    ChannelParams,
    ModelKind,
    ParameterError,
    SourceParams,
    build_gamma_ab,
    build_model_state,
)

__all__ = [
    "Reconciliation",
    "KeyRatePoint",
    "ProtocolMismatchError",
    "mutual_information_no_switching",
    "holevo_bound",
    "key_rate",
    "sweep",
]

_FORM_TOL = 1e-9


class ProtocolMismatchError(ValueError):
    """The two-mode matrix is not of the phase-symmetric form the protocol needs."""


class Reconciliation(enum.Enum):
    """Post-processing direction: keys from Bob's data (reverse) or Alice's (direct)."""

    REVERSE = "reverse"
    DIRECT = "direct"


@dataclass(frozen=True)
class KeyRatePoint:
    """One sweep sample. key_rate = beta * i_ab - holevo by construction.

    ``feasible`` is False when the point required either invalid parameters
    (values are NaN, see ``note``) or the formal continuation of an
    unphysical state (values are present, ``note`` says why).
    """

    T: float
    model: ModelKind
    recon: Reconciliation
    i_ab: float
    holevo: float
    key_rate: float
    beta: float
    feasible: bool = True
    note: str = ""


def _ab_coefficients(gamma_ab: CovarianceMatrix) -> tuple[float, float, float]:
    """Extract (a, b, c) from [[a*I, c*sz], [c*sz, b*I]], validating the form."""
    if gamma_ab.n_modes != 2:
        raise ProtocolMismatchError(
            f"expected a two-mode Alice-Bob matrix, got {gamma_ab.n_modes} modes"
        )
    if not gamma_ab.is_real:
        raise ProtocolMismatchError("Alice-Bob matrix must be real")
    g = gamma_ab.data
    a = (g[0, 0] + g[1, 1]) / 2.0
    b = (g[2, 2] + g[3, 3]) / 2.0
    c = (g[0, 2] - g[1, 3]) / 2.0
    expected = np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ]
    )
    dev = float(np.max(np.abs(g - expected)))
    if dev > _FORM_TOL:
        raise ProtocolMismatchError(
            f"two-mode matrix is not of the phase-symmetric EPR form "
            f"[[a*I, c*sz], [c*sz, b*I]] (max deviation {dev:.3e})"
        )
    return float(a), float(b), float(c)


def mutual_information_no_switching(gamma_ab: CovarianceMatrix) -> float:
    """Classical mutual information I(a:b) in bits when both parties heterodyne.

    Each heterodyne output has per-quadrature variance (v + 1)/2, so the two
    independent quadratures contribute (1/2)*log2 of the measured-to-
    conditional variance ratio each:
    I = log2[(b + 1) / (b + 1 - c^2/(a + 1))].
    """
    a, b, c = _ab_coefficients(gamma_ab)
    denominator = b + 1.0 - c * c / (a + 1.0)
    return float(np.log2((b + 1.0) / denominator))


def _holevo_flagged(
    kind: ModelKind, recon: Reconciliation, src: SourceParams, ch: ChannelParams
) -> tuple[float, bool]:
    """Holevo bound plus a flag saying whether every state involved was physical."""
    state = build_model_state(kind, src, ch)
    measured = state.bob_mode if recon is Reconciliation.REVERSE else state.alice_mode
    kept = tuple(m for m in range(state.matrix.n_modes) if m != measured)
    s_total, phys_total = formal_entropy(state.matrix)
    conditional = condition_on_heterodyne(state.matrix, ModePartition(kept, (measured,)))
    s_cond, phys_cond = formal_entropy(conditional)
    value = s_total - s_cond
    if value < -1e-9:
        raise RuntimeError(
            f"Holevo bound came out negative ({value:.3e}) for {kind.value}/{recon.value}; "
            f"this indicates an internal error"
        )
    return value, phys_total and phys_cond


def holevo_bound(
    kind: ModelKind, recon: Reconciliation, src: SourceParams, ch: ChannelParams
) -> float:
    """Upper bound on Eve's information about the reconciliation side's data, in bits.

    Computed as S(E) - S(E|m) where m is Bob's (reverse) or Alice's (direct)
    heterodyne outcome and Eve purifies the model state: the global entropy of
    the model matrix minus the entropy after heterodyne-conditioning away the
    measured mode. For the neutral-party model in reverse reconciliation this
    bound is tight; in direct reconciliation it overestimates Eve.
    """
    value, _ = _holevo_flagged(kind, recon, src, ch)
    return value


def key_rate(
    kind: ModelKind,
    recon: Reconciliation,
    src: SourceParams,
    ch: ChannelParams,
    beta: float = 1.0,
) -> KeyRatePoint:
    """Secret key rate beta*I(a:b) - holevo for one parameter point.

    Negative rates are reported as-is; clamping is a presentation choice left
    to callers. I(a:b) always comes from the observable Alice-Bob matrix,
    whatever the model.
    """
    if not 0.0 < beta <= 1.0:
        raise ParameterError(f"reconciliation efficiency must satisfy 0 < beta <= 1 (got {beta})")
    i_ab = mutual_information_no_switching(build_gamma_ab(src, ch))
    holevo, physical = _holevo_flagged(kind, recon, src, ch)
    note = ""
    if not physical:
        note = (
            "entropies evaluated by formal continuation: the model state violates "
            "the uncertainty relation at these source settings"
        )
    return KeyRatePoint(
        T=ch.T,
        model=kind,
        recon=recon,
        i_ab=i_ab,
        holevo=holevo,
        key_rate=beta * i_ab - holevo,
        beta=beta,
        feasible=physical,
        note=note,
    )


def sweep(
    kinds: Iterable[ModelKind],
    recon: Reconciliation,
    src: SourceParams,
    eps: float,
    t_grid: Sequence[float],
    beta: float = 1.0,
) -> list[KeyRatePoint]:
    """Key rates over a transmittance grid for each model.

    The channel added noise is recomputed from the fixed excess noise eps at
    every T. Points whose parameters are invalid for the selected model are
    returned flagged infeasible (NaN values, error text in ``note``) and the
    sweep continues. Output is deterministically ordered by (model, T).
    """
    kinds = list(kinds)
    if not kinds:
        raise ParameterError("at least one model kind is required")
    for t in t_grid:
        if not 0.0 < t <= 1.0:
            raise ParameterError(f"grid transmittances must lie in (0, 1] (got {t})")
    points: list[KeyRatePoint] = []
    for kind in sorted(set(kinds), key=lambda k: k.value):
        for t in sorted(t_grid):
            try:
                ch = ChannelParams.from_excess_noise(t, eps)
                points.append(key_rate(kind, recon, src, ch, beta=beta))
            except ParameterError as exc:
                points.append(
                    KeyRatePoint(
                        T=float(t),
                        model=kind,
                        recon=recon,
                        i_ab=math.nan,
                        holevo=math.nan,
                        key_rate=math.nan,
                        beta=beta,
                        feasible=False,
                        note=str(exc),
                    )
                )
    return points
