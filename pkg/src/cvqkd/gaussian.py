"""Gaussian-state linear algebra: covariance matrices, symplectic spectra,
entropies, and measurement conditioning.

Conventions: quadrature ordering is (x1, p1, x2, p2, ...) and the vacuum is
normalized to the identity (vacuum variance = 1). All quantities are pure
functions of immutable values; results are safe to share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "CovarianceMatrix",
    "DisplacementVector",
    "ModePartition",
    "Quadrature",
    "UnphysicalStateError",
    "symplectic_form",
    "symplectic_eigenvalues",
    "g_function",
    "von_neumann_entropy",
    "formal_entropy",
    "condition_on_heterodyne",
    "condition_on_homodyne",
    "is_physical",
]

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9
PINV_RCOND = 1e-10
PAIRING_TOL = 1e-8


class UnphysicalStateError(ValueError):
    """A covariance matrix violates the uncertainty relation (some nu < 1)."""


class Quadrature(enum.Enum):
    """Which quadrature a homodyne detector measures."""

    X = 0
    P = 1


@dataclass(frozen=True)
class CovarianceMatrix:
    """Second moments of an n-mode Gaussian state.

    ``data`` is a symmetric 2n x 2n matrix in (x1, p1, x2, p2, ...) ordering
    with the vacuum normalized to the identity. Entries are real for any
    physical state; complex entries are admitted only for the formally
    continued beam-splitter amplification matrices (see models), which are
    never physical and are handled by :func:`formal_entropy`.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"covariance matrix must be square, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[0] % 2 != 0:
            raise ValueError(
                f"covariance dimension must be a positive even number (two quadratures "
                f"per mode), got {arr.shape[0]}"
            )
        if np.iscomplexobj(arr):
            if arr.size and np.max(np.abs(arr.imag)) <= SYMMETRY_TOL:
                arr = np.ascontiguousarray(arr.real.astype(float))
            else:
                arr = arr.astype(complex)
        else:
            arr = arr.astype(float)
        dev = np.max(np.abs(arr - arr.T))
        if dev > SYMMETRY_TOL:
            raise ValueError(f"covariance matrix is not symmetric (max |g - g^T| = {dev:.3e})")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n_modes(self) -> int:
        return self.data.shape[0] // 2

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.data)

    def block(self, modes: Sequence[int]) -> np.ndarray:
        """Sub-matrix restricted to the given modes (copy)."""
        idx = _quad_indices(modes, self.n_modes)
        return self.data[np.ix_(idx, idx)].copy()


@dataclass(frozen=True)
class DisplacementVector:
    """First moments of an n-mode Gaussian state, same quadrature ordering."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 1 or arr.size == 0 or arr.size % 2 != 0:
            raise ValueError(f"displacement must have even positive length, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n_modes(self) -> int:
        return self.data.size // 2


@dataclass(frozen=True)
class ModePartition:
    """Split of a state's modes into kept and measured sets."""

    kept: tuple[int, ...]
    measured: tuple[int, ...]

    def __post_init__(self) -> None:
        kept = tuple(int(m) for m in self.kept)
        measured = tuple(int(m) for m in self.measured)
        if any(m < 0 for m in kept + measured):
            raise ValueError("mode indices must be nonnegative")
        if len(set(kept)) != len(kept) or len(set(measured)) != len(measured):
            raise ValueError("mode lists must not repeat indices")
        if set(kept) & set(measured):
            raise ValueError(f"kept and measured modes overlap: {set(kept) & set(measured)}")
        object.__setattr__(self, "kept", kept)
        object.__setattr__(self, "measured", measured)

    def validate_for(self, n_modes: int) -> None:
        if not self.measured:
            raise ValueError("at least one mode must be measured")
        out_of_range = [m for m in self.kept + self.measured if m >= n_modes]
        if out_of_range:
            raise ValueError(f"mode indices {out_of_range} out of range for {n_modes} modes")


def _quad_indices(modes: Sequence[int], n_modes: int) -> list[int]:
    for m in modes:
        if not 0 <= m < n_modes:
            raise ValueError(f"mode index {m} out of range for {n_modes} modes")
    return [q for m in modes for q in (2 * m, 2 * m + 1)]


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(gamma: CovarianceMatrix) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, sorted descending.

    The n values are the moduli of the eigenvalue pairs of Omega*gamma. The
    moduli are sorted and consumed in adjacent pairs; if a pair disagrees by
    more than 1e-8 the input was not a (possibly continued) covariance matrix
    and a RuntimeError is raised.
    """
    ev = np.linalg.eigvals(symplectic_form(gamma.n_modes) @ gamma.data)
    mods = np.sort(np.abs(ev))
    lo, hi = mods[0::2], mods[1::2]
    worst = float(np.max(np.abs(hi - lo)))
    if worst > PAIRING_TOL:
        raise RuntimeError(
            f"symplectic eigenvalue pairing failed (pair deviation {worst:.3e}); "
            f"the matrix does not have a symplectic spectrum"
        )
    return np.sort((lo + hi) / 2.0)[::-1]


def g_function(x: float) -> float:
    """Bosonic entropy kernel (x+1)*log2(x+1) - x*log2(x), in bits.

    The x*log2(x) term takes its limit 0 at x = 0; inputs in [-1e-12, 0) are
    clamped to 0 and anything lower is a domain error.
    """
    if x < -1e-12:
        raise ValueError(f"g_function requires x >= 0 (got {x})")
    if x <= 0.0:
        return 0.0
    return float((x + 1.0) * np.log2(x + 1.0) - x * np.log2(x))


def _g_continued(x: float) -> float:
    """Real-part continuation of the entropy kernel through x in (-1/2, 0).

    Used only to evaluate the formal curves at source settings that violate
    the uncertainty relation; agrees with g_function for x >= 0.
    """
    if x >= 0.0:
        return g_function(x)
    if x < -0.5 - 1e-9:
        raise ValueError(f"continued entropy kernel undefined below -1/2 (got {x})")
    return float((x + 1.0) * np.log2(x + 1.0) - x * np.log2(-x))


def von_neumann_entropy(gamma: CovarianceMatrix) -> float:
    """Entropy of a Gaussian state in bits: sum of g((nu_k - 1)/2).

    Symplectic eigenvalues in [1 - 1e-9, 1] are clamped to 1; anything lower
    raises UnphysicalStateError. Pure states give 0.
    """
    if not gamma.is_real:
        raise UnphysicalStateError("covariance matrix has complex entries; not a physical state")
    nus = symplectic_eigenvalues(gamma)
    if nus[-1] < 1.0 - PHYSICALITY_TOL:
        raise UnphysicalStateError(
            f"unphysical covariance matrix: symplectic eigenvalue {nus[-1]:.12g} < 1 - 1e-9"
        )
    return float(sum(g_function(max(nu - 1.0, 0.0) / 2.0) for nu in nus))


def formal_entropy(gamma: CovarianceMatrix) -> tuple[float, bool]:
    """Entropy functional with sub-vacuum continuation, plus a physicality flag.

    Returns ``(value, physical)``. On a physical state this equals
    :func:`von_neumann_entropy` and ``physical`` is True. Otherwise the kernel
    is continued through nu < 1 (and complex-symmetric continued matrices are
    accepted), ``physical`` is False, and the value reproduces the formal
    curves at infeasible source settings.
    """
    nus = symplectic_eigenvalues(gamma)
    physical = gamma.is_real and nus[-1] >= 1.0 - PHYSICALITY_TOL
    total = 0.0
    for nu in nus:
        if nu >= 1.0 - PHYSICALITY_TOL:
            total += g_function(max(nu - 1.0, 0.0) / 2.0)
        else:
            total += _g_continued((nu - 1.0) / 2.0)
    return total, physical


def condition_on_heterodyne(gamma: CovarianceMatrix, partition: ModePartition) -> CovarianceMatrix:
    """State of the kept modes after heterodyne detection of the measured modes.

    Computes gamma_kept - sigma (gamma_meas + I)^-1 sigma^T, where sigma is
    the kept-measured correlation block. The result is independent of the
    measurement outcome.
    """
    partition.validate_for(gamma.n_modes)
    ki = _quad_indices(partition.kept, gamma.n_modes)
    mi = _quad_indices(partition.measured, gamma.n_modes)
    g = gamma.data
    kept = g[np.ix_(ki, ki)]
    sigma = g[np.ix_(ki, mi)]
    meas = g[np.ix_(mi, mi)]
    cond = kept - sigma @ np.linalg.solve(meas + np.eye(len(mi)), sigma.T)
    cond = (cond + cond.T) / 2.0
    return CovarianceMatrix(cond)


def condition_on_homodyne(
    gamma: CovarianceMatrix, partition: ModePartition, quadrature: Quadrature
) -> CovarianceMatrix:
    """State of the kept modes after homodyne detection of the measured modes.

    Each measured mode is read out in the given quadrature. The measured block
    is projected onto the measured quadratures and inverted with a
    Moore-Penrose pseudoinverse (singular values below 1e-10 of the largest
    are treated as zero), which handles the rank deficiency by construction.
    """
    partition.validate_for(gamma.n_modes)
    ki = _quad_indices(partition.kept, gamma.n_modes)
    mi = _quad_indices(partition.measured, gamma.n_modes)
    g = gamma.data
    kept = g[np.ix_(ki, ki)]
    sigma = g[np.ix_(ki, mi)]
    meas = g[np.ix_(mi, mi)].copy()
    # zero the rows/columns of the unmeasured quadrature of every measured mode
    drop = slice(1, None, 2) if quadrature is Quadrature.X else slice(0, None, 2)
    meas[drop, :] = 0.0
    meas[:, drop] = 0.0
    cond = kept - sigma @ np.linalg.pinv(meas, rcond=PINV_RCOND) @ sigma.T
    cond = (cond + cond.T) / 2.0
    return CovarianceMatrix(cond)


def is_physical(gamma: CovarianceMatrix, tol: float = PHYSICALITY_TOL) -> bool:
    """True iff the matrix is real and its smallest symplectic eigenvalue is >= 1 - tol."""
    if not gamma.is_real:
        return False
    return bool(symplectic_eigenvalues(gamma)[-1] >= 1.0 - tol)
