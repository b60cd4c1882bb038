"""
Unit tests for SVG precision-recall plots
"""
import io
import re

import numpy as np
import pytest

from core.errors import NoCurves
from core.evaluation import PrCurve
from ingest.plotting import CURVE_ID_PREFIX, emit_plot

CURVE_ID = re.compile(r'id="(pr-curve-\d+)"')


def _svg(curves) -> str:
    buffer = io.StringIO()
    emit_plot(curves, buffer)
    return buffer.getvalue()


@pytest.fixture
def curves():
    return {
        "cn-path": PrCurve(np.array([1.0, 0.5, 2 / 3]), np.array([1 / 3, 1 / 3, 2 / 3])),
        "katz-0.01": PrCurve(np.array([0.5, 0.5]), np.array([0.25, 0.5])),
        "baseline": PrCurve(np.array([0.9]), np.array([0.1])),
    }


class TestEmitPlot:
    """Test SVG output"""

    def test_one_element_per_curve(self, curves):
        """Each curve is tagged with its own id"""
        ids = set(CURVE_ID.findall(_svg(curves)))
        assert ids == {f"{CURVE_ID_PREFIX}{i}" for i in range(3)}

    def test_single_point_uses_marker(self, curves):
        """A one-point curve is drawn as a marker, longer curves as a path"""
        svg = _svg(curves)
        single = re.search(r'<g id="pr-curve-2">(.*?)</g>', svg, re.S).group(1)
        line = re.search(r'<g id="pr-curve-0">(.*?)</g>', svg, re.S).group(1)
        assert "<use" in single
        assert "<use" not in line

    def test_legend_names(self, curves):
        """Curve names appear as legend text"""
        svg = _svg(curves)
        for name in curves:
            assert name in svg

    def test_deterministic(self, curves):
        """The same curves give the same bytes"""
        assert _svg(curves) == _svg(curves)

    def test_accepts_pairs(self, curves):
        """A list of (name, curve) pairs works like a mapping"""
        assert _svg(list(curves.items())) == _svg(curves)

    def test_no_curves(self):
        """Nothing to draw raises NoCurves"""
        with pytest.raises(NoCurves):
            _svg({})
