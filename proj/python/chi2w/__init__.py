import json

from ._core import (
    Chi2wError,
    DensityMax,
    DerivedStats,
    EvalConfig,
    Spectrum,
    cdf,
    cf,
    density_max,
    derived_stats,
    pdf,
    sample,
)
from ._core import bound_report as _bound_report


def bound_report(spectrum, config=None):
    """Bound report as a dict."""
    return json.loads(_bound_report(spectrum, config or EvalConfig()))


__all__ = [
    "Chi2wError",
    "DensityMax",
    "DerivedStats",
    "EvalConfig",
    "Spectrum",
    "bound_report",
    "cdf",
    "cf",
    "density_max",
    "derived_stats",
    "pdf",
    "sample",
]
