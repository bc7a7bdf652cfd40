import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List

import numpy as np
from scipy.integrate import RK45
# private step helpers of RK45; scipy is pinned in requirements.txt for them
from scipy.integrate._ivp.rk import MAX_FACTOR, MIN_FACTOR, SAFETY, norm, rk_step

from .exceptions import QuadratureError

logger = logging.getLogger(__name__)

Rhs = Callable[[float, np.ndarray], np.ndarray]


class DormandPrincePI(RK45):
    """
    Dormand–Prince 5(4) pair with a proportional-integral step controller.

    Steps are propagated with the fifth order solution. The local error of the
    embedded fourth order solution is measured on the state scaled component
    by component (atol + rtol*|y|), so channels that grow like exp(x^2) keep
    their relative accuracy. The absolute local error estimates of accepted
    steps are summed per component in `error_accumulated`.
    """
    # Gustafsson/Hairer stabilised controller: h_new = h * SAFETY * err^-alpha * err_prev^beta
    beta = 0.04
    alpha = 1 / (RK45.error_estimator_order + 1) - 0.75 * beta

    def __init__(self, fun, t0, y0, t_bound, **kwargs):
        super().__init__(fun, t0, y0, t_bound, **kwargs)
        self.previous_error_norm = 1e-4
        self.error_accumulated = np.zeros(self.n)
        self.accepted_steps = 0
        self.rejected_steps = 0

    def _step_impl(self):
        t = self.t
        y = self.y

        min_step = 10 * np.abs(np.nextafter(t, self.direction * np.inf) - t)
        h_abs = min(max(self.h_abs, min_step), self.max_step)

        step_rejected = False
        while True:
            if h_abs < min_step:
                return False, self.TOO_SMALL_STEP

            h = h_abs * self.direction
            t_new = t + h
            if self.direction * (t_new - self.t_bound) > 0:
                t_new = self.t_bound
            h = t_new - t
            h_abs = np.abs(h)

            y_new, f_new = rk_step(self.fun, t, y, self.f, h, self.A, self.B, self.C, self.K)
            scale = self.atol + np.maximum(np.abs(y), np.abs(y_new)) * self.rtol
            error = self._estimate_error(self.K, h)
            error_norm = norm(error / scale)

            if error_norm < 1:
                break

            # plain I-control on rejection; nan norms shrink the step as well
            if np.isfinite(error_norm):
                h_abs *= max(MIN_FACTOR, SAFETY * error_norm ** self.error_exponent)
            else:
                h_abs *= MIN_FACTOR
            step_rejected = True
            self.rejected_steps += 1

        if error_norm == 0:
            factor = MAX_FACTOR
        else:
            factor = SAFETY * error_norm ** -self.alpha * self.previous_error_norm ** self.beta
            factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
        if step_rejected:
            factor = min(1, factor)

        self.previous_error_norm = max(error_norm, 1e-4)
        self.error_accumulated += np.abs(error)
        self.accepted_steps += 1

        self.h_previous = h
        self.y_old = y
        self.t = t_new
        self.y = y_new
        self.h_abs = h_abs * factor
        self.f = f_new
        return True, None


@dataclass(frozen=True)
class IvpSolution:
    x: float
    y: np.ndarray
    error: np.ndarray
    steps: int


def integrate_ivp(rhs: Rhs, y0, x_end: float, *, rtol: float, atol: float,
                  max_steps: int, x_start: float = 0.0) -> IvpSolution:
    """Integrates y' = rhs(x, y) from x_start to x_end and returns the end state"""
    y0 = np.asarray(y0, dtype=float)
    if x_end == x_start:
        return IvpSolution(x=x_end, y=y0.copy(), error=np.zeros_like(y0), steps=0)

    solver = DormandPrincePI(rhs, x_start, y0, x_end, rtol=rtol, atol=atol)
    message = None
    while solver.status == "running":
        if solver.accepted_steps >= max_steps:
            raise QuadratureError(
                f"step budget of {max_steps} exhausted at x={solver.t!r} before reaching {x_end!r}"
            )
        with np.errstate(over="ignore", invalid="ignore"):
            message = solver.step()
        if not np.all(np.isfinite(solver.y)):
            raise QuadratureError(f"non-finite state at x={solver.t!r}")

    if solver.status == "failed":
        raise QuadratureError(f"integration failed at x={solver.t!r}: {message}")

    logger.debug(
        "integrated %d channels on [%r, %r]: %d accepted, %d rejected steps",
        solver.n, x_start, x_end, solver.accepted_steps, solver.rejected_steps,
    )
    return IvpSolution(x=x_end, y=solver.y.copy(), error=solver.error_accumulated.copy(),
                       steps=solver.accepted_steps)


def integrate_through(rhs: Rhs, y0, points: Iterable[float], *, rtol: float, atol: float,
                      max_steps: int, x_start: float = 0.0) -> List[IvpSolution]:
    """
    Integrates once through ascending `points`, stopping exactly at each of
    them, and returns the state at every point in order.
    """
    solutions = []
    state = np.asarray(y0, dtype=float)
    error = np.zeros_like(state)
    steps = 0
    x = x_start
    for point in points:
        if point < x:
            raise ValueError("points must be ascending")
        segment = integrate_ivp(rhs, state, point, rtol=rtol, atol=atol,
                                max_steps=max_steps, x_start=x)
        state = segment.y
        error = error + segment.error
        steps += segment.steps
        x = point
        solutions.append(IvpSolution(x=point, y=state, error=error, steps=steps))
    return solutions
