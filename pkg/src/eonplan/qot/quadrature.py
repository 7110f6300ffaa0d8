"""Deterministic adaptive 2D quadrature over the unit square.

Panels are refined breadth-first with a fixed child order and summed in a
fixed sequence, so results are bit-reproducible for a given tolerance. The
integrand is vector-valued; refinement is driven by the first component.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import EstimatorError

_GL_ORDER = 9
_gl_x, _gl_w = leggauss(_GL_ORDER)
#: Tensor nodes/weights on the reference [0,1]^2 panel.
_NODE_X = np.tile((_gl_x + 1.0) / 2.0, _GL_ORDER)
_NODE_Y = np.repeat((_gl_x + 1.0) / 2.0, _GL_ORDER)
_NODE_W = (np.tile(_gl_w, _GL_ORDER) * np.repeat(_gl_w, _GL_ORDER)) / 4.0

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _panel_estimates(fn: Integrand, x0: np.ndarray, y0: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Gauss-Legendre estimates for a batch of square panels; shape (m, n_panels)."""
    xs = x0[:, None] + h[:, None] * _NODE_X[None, :]
    ys = y0[:, None] + h[:, None] * _NODE_Y[None, :]
    values = fn(xs.ravel(), ys.ravel())
    values = values.reshape(values.shape[0], len(x0), len(_NODE_X))
    return (values * _NODE_W[None, None, :]).sum(axis=2) * (h**2)[None, :]


def integrate_adaptive(
    fn: Integrand,
    rel_tol: float = 1e-3,
    abs_tol: float = 0.0,
    max_panels: int = 200000,
    max_depth: int = 18,
) -> np.ndarray:
    """Integrate a vector integrand over [0,1]^2 to the requested tolerance.

    ``fn(x, y)`` maps flat coordinate arrays to an (m, n_points) array. The
    first component drives the error control; all components are accumulated
    over the same accepted panels. ``abs_tol`` is an absolute floor on the
    first component's error, letting callers skip deep refinement of regions
    they already know to be negligible. Raises :class:`EstimatorError` when
    the refinement budget is exhausted before the tolerance is met.
    """
    x0 = np.array([0.0])
    y0 = np.array([0.0])
    h = np.array([1.0])
    coarse = _panel_estimates(fn, x0, y0, h)
    m = coarse.shape[0]
    accepted = np.zeros(m)
    panels_used = 1

    for _depth in range(max_depth):
        n = len(x0)
        panels_used += 4 * n
        if panels_used > max_panels:
            raise EstimatorError(
                f"quadrature exceeded its panel budget ({max_panels}) before converging"
            )
        # Children in fixed SW, SE, NW, NE order.
        h2 = h / 2.0
        cx = np.concatenate([x0, x0 + h2, x0, x0 + h2])
        cy = np.concatenate([y0, y0, y0 + h2, y0 + h2])
        ch = np.concatenate([h2, h2, h2, h2])
        child = _panel_estimates(fn, cx, cy, ch)
        fine = child.reshape(m, 4, n).sum(axis=1)

        global_scale = abs(accepted[0] + fine[0].sum())
        err = np.abs(fine[0] - coarse[0])
        budget = max(rel_tol * global_scale, abs_tol, 1e-300) * h**2
        done = err <= budget
        if done.any():
            accepted += fine[:, done].sum(axis=1)
        if done.all():
            return accepted
        keep = ~done
        keep4 = np.concatenate([keep, keep, keep, keep])
        x0, y0, h = cx[keep4], cy[keep4], ch[keep4]
        coarse = child[:, keep4]

    raise EstimatorError(f"quadrature failed to converge within depth {max_depth}")
