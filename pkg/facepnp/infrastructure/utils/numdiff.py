"""A module containing central finite-difference helpers used by the gradient audit."""

from typing import Callable

import numpy as np

from facepnp.core.domain.geometry import FloatArray


def central_difference_jacobian(
    fn: Callable[[FloatArray], FloatArray],
    x: FloatArray,
    step: float,
) -> FloatArray:
    """Return the (M, len(x)) central-difference Jacobian of a vector function.

    A scalar function yields a single row.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    columns = []
    for i in range(x.size):
        forward, backward = x.copy(), x.copy()
        forward[i] += step
        backward[i] -= step
        diff = np.atleast_1d(fn(forward)) - np.atleast_1d(fn(backward))
        columns.append(diff / (2.0 * step))
    return np.stack(columns, axis=-1)


def relative_error(analytic: FloatArray, numeric: FloatArray) -> float:
    """Return ||analytic - numeric|| / max(||numeric||, 1e-12) over the whole block."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    return float(np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12))
