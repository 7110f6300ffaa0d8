"""Quality-of-transmission estimation.

Two nonlinear-interference estimators share one interface: a fast
closed-form evaluator (:func:`nli_closed_form`) that ignores modulation
statistics and a slow full-form evaluator (:func:`nli_full_form`) that
numerically integrates the interference spectrum with constellation-shape
corrections. Both are pure functions of a path snapshot and channel set.
"""

from .base import (
    ChannelState,
    Estimator,
    QotResult,
    ase_power_w,
    effective_length_km,
    evaluate_path,
    linear_osnr_db,
    total_osnr_db,
)
from .closed_form import nli_closed_form
from .full_form import nli_full_form

__all__ = [
    "ChannelState",
    "Estimator",
    "QotResult",
    "ase_power_w",
    "effective_length_km",
    "evaluate_path",
    "linear_osnr_db",
    "total_osnr_db",
    "nli_closed_form",
    "nli_full_form",
]
