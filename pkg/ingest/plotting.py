"""
Plotting - Static SVG comparison of precision-recall curves
Uses the object-oriented matplotlib API so plots can be drawn from worker threads
"""
from typing import Mapping, Sequence, TextIO, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import rc_context
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from core.errors import NoCurves
from core.evaluation import PrCurve

NamedCurves = Union[Mapping[str, PrCurve], Sequence[Tuple[str, PrCurve]]]

CURVE_ID_PREFIX = "pr-curve-"

# Fixed salt and no date keep the SVG bytes identical between runs
SVG_PARAMS = {
    "svg.hashsalt": "dtilink",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "axes.unicode_minus": False,
}

TICKS = np.round(np.linspace(0.0, 1.0, 11), 1)


def _items(curves: NamedCurves) -> Sequence[Tuple[str, PrCurve]]:
    if isinstance(curves, Mapping):
        return list(curves.items())
    return list(curves)


def emit_plot(curves: NamedCurves, stream: TextIO, title: str = "Precision-recall"):
    """Draw one line per named curve (a marker for single-point curves)"""
    items = _items(curves)
    if not items:
        raise NoCurves()

    with rc_context(SVG_PARAMS):
        figure = Figure(figsize=(6.4, 4.8))
        FigureCanvasSVG(figure)
        ax = figure.add_subplot(1, 1, 1)

        for i, (name, curve) in enumerate(items):
            if len(curve) == 1:
                (line,) = ax.plot(curve.recall, curve.precision, linestyle="none", marker="o", label=name)
            else:
                (line,) = ax.plot(curve.recall, curve.precision, linewidth=1.5, label=name)
            line.set_gid(f"{CURVE_ID_PREFIX}{i}")

        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.0)
        ax.set_xticks(TICKS)
        ax.set_yticks(TICKS)
        ax.set_xlabel("Recall")
        ax.set_ylabel("Precision")
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right", fontsize=8)

        figure.savefig(stream, format="svg", metadata={"Date": None})
