"""Adjoint and finite-difference checks for linear maps."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from pyrope.numkit.rng import SeededRng, gaussian

LinearMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GradCheckReport:
    """Outcome of :func:`finite_diff_check`."""

    passed: bool
    inner_product_deviation: float
    jacobian_deviation: float
    tol: float
    trials: int

    @property
    def max_deviation(self) -> float:
        return max(self.inner_product_deviation, self.jacobian_deviation)


def finite_diff_check(
    f: LinearMap,
    adjoint: LinearMap,
    dim: int,
    tol: float,
    rng: Optional[SeededRng] = None,
    trials: int = 4,
    step: float = 0.5,
) -> GradCheckReport:
    """
    Check that ``adjoint`` is the transpose of the linear map ``f``.

    Two tests run: the inner-product identity ``<f(u), v> = <u, adjoint(v)>``
    on ``trials`` random pairs, and a central-difference Jacobian of ``f`` at a
    random point compared column by column against the rows produced by
    ``adjoint``. ``step`` is a power of two so that the difference quotient of
    a linear map is exact up to rounding.

    Args:
        f: Linear map on ``dim``-vectors
        adjoint: Candidate adjoint of ``f``
        dim: Vector dimension
        tol: Largest accepted absolute deviation
        rng: Random stream for the test vectors (defaults to seed 0)
        trials: Number of random ``(u, v)`` pairs
        step: Central-difference step

    Returns:
        GradCheckReport carrying both maximum deviations
    """
    rng = rng or SeededRng(0)

    inner_dev = 0.0
    for trial in range(trials):
        u = gaussian(rng.child(2 * trial), dim)
        v = gaussian(rng.child(2 * trial + 1), dim)
        lhs = float(np.dot(f(u), v))
        rhs = float(np.dot(u, adjoint(v)))
        inner_dev = max(inner_dev, abs(lhs - rhs))

    point = gaussian(rng.child(2 * trials), dim)
    eye = np.eye(dim)
    # row i of the Jacobian is adjoint(e_i)
    adjoint_jacobian = np.array([adjoint(eye[i]) for i in range(dim)])
    jac_dev = 0.0
    for j in range(dim):
        column = (f(point + step * eye[j]) - f(point - step * eye[j])) / (2.0 * step)
        jac_dev = max(jac_dev, float(np.max(np.abs(column - adjoint_jacobian[:, j]))))

    return GradCheckReport(
        passed=inner_dev <= tol and jac_dev <= tol,
        inner_product_deviation=inner_dev,
        jacobian_deviation=jac_dev,
        tol=tol,
        trials=trials,
    )
