from __future__ import annotations

import numpy as np
import pytest

from cvqkd.gaussian import CovarianceMatrix


def random_physical_cm(rng: np.random.Generator, n_modes: int, scale: float = 1.0) -> CovarianceMatrix:
    """Random physical covariance matrix: M M^T + I is always above vacuum
    (gamma >= I implies gamma + i*Omega >= 0)."""
    m = rng.normal(size=(2 * n_modes, 2 * n_modes)) * scale
    g = m @ m.T + np.eye(2 * n_modes)
    return CovarianceMatrix((g + g.T) / 2)


def single_mode_rotations(rng: np.random.Generator, n_modes: int) -> np.ndarray:
    """Block-diagonal of independent phase rotations; symplectic by construction."""
    blocks = []
    for _ in range(n_modes):
        theta = rng.uniform(0, 2 * np.pi)
        c, s = np.cos(theta), np.sin(theta)
        blocks.append(np.array([[c, s], [-s, c]]))
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k, b in enumerate(blocks):
        out[2 * k:2 * k + 2, 2 * k:2 * k + 2] = b
    return out


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)
