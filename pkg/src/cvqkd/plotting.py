"""Figure rendering for key-rate sweeps.

matplotlib is imported lazily so the CSV-only path never pays its import
cost. Figures use the object-oriented API (no pyplot, no global state) and
are written with empty date metadata so SVG output is byte-deterministic.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

from .keyrate import KeyRatePoint
from .models import ModelKind

_LINE_STYLES = {
    ModelKind.NEUTRAL_PARTY: "-",
    ModelKind.BEAM_SPLITTER: "--",
    ModelKind.UNTRUSTED_SOURCE: ":",
}


def render_key_rate_figure(
    points: Sequence[KeyRatePoint],
    path: str | Path,
    clamp_zero: bool = False,
    title: str | None = None,
) -> Path:
    """Plot key rate vs channel transmittance, one line per model, to ``path``.

    NaN-valued (parameter-infeasible) points are skipped. Returns the path.
    """
    import matplotlib
    from matplotlib.figure import Figure

    path = Path(path)
    fig = Figure(figsize=(8.0, 6.0))
    ax = fig.subplots()
    for kind in sorted({p.model for p in points}, key=lambda k: k.value):
        series = [
            (p.T, max(p.key_rate, 0.0) if clamp_zero else p.key_rate)
            for p in sorted((p for p in points if p.model is kind), key=lambda p: p.T)
            if not math.isnan(p.key_rate)
        ]
        if series:
            xs, ys = zip(*series)
            ax.plot(xs, ys, _LINE_STYLES.get(kind, "-"), label=kind.value)
    ax.set_xlabel("channel transmittance T")
    ax.set_ylabel("secret key rate (bits per channel use)")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    if path.suffix.lower() == ".svg":
        # fixed id salt + no date metadata make the SVG byte-deterministic
        with matplotlib.rc_context({"svg.hashsalt": "cvqkd"}):
            fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path)
    return path
