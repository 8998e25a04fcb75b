"""Quasi-Newton (BFGS) minimization of the training objective.

The optimizer keeps a dense inverse-curvature approximation and uses a
bisection line search enforcing sufficient decrease plus a weak curvature
condition, so accepted steps keep the approximation positive definite.  When
the line search stalls it falls back to a steepest-descent step and resets
the curvature approximation; updates whose curvature product is not safely
positive are skipped.  Iteration stops on the infinity norm of the gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .encoder import EncodedDataset
from .errors import ConfigError, TrainingError
from .network import (
    Network,
    ObjectiveParams,
    accuracy,
    eq1_satisfied,
    objective_and_gradient,
    pack_gradient,
    pack_weights,
    with_weights,
)


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int = 2500
    gradient_tolerance: float = 1e-5
    sufficient_decrease: float = 1e-4
    curvature: float = 0.9
    seed: int = 0
    required_accuracy: float = 0.9
    record_trace: bool = False

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise ConfigError("max_iterations must be positive")
        if self.gradient_tolerance <= 0:
            raise ConfigError("gradient_tolerance must be positive")
        if not 0 < self.sufficient_decrease < self.curvature < 1:
            raise ConfigError(
                "need 0 < sufficient_decrease < curvature < 1, got "
                f"{self.sufficient_decrease}, {self.curvature}"
            )


@dataclass
class MinimizeResult:
    x: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool
    line_search_failures: int
    trace: list[float] = field(default_factory=list)


@dataclass
class TrainReport:
    iterations: int
    objective: float
    grad_norm: float
    train_accuracy: float
    eq1_rate: float
    converged: bool
    trace: list[float] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [
            f"iterations: {self.iterations}",
            f"objective: {self.objective!r}",
            f"grad_norm: {self.grad_norm!r}",
            f"train_accuracy: {self.train_accuracy!r}",
            f"eq1_rate: {self.eq1_rate!r}",
            f"converged: {self.converged}",
        ]
        return "\n".join(lines) + "\n"


_MAX_LINE_SEARCH = 30


def _line_search(fun_grad, x, f, d, gd, c1, c2):
    """Bisection search for a step passing Armijo and weak curvature.

    Returns (alpha, f_new, g_new) or (None, None, None).  If the bisection
    budget runs out, the best Armijo-satisfying point seen is returned; the
    caller's curvature guard then decides whether to update.
    """
    lo, hi = 0.0, np.inf
    alpha = 1.0
    best = None
    for _ in range(_MAX_LINE_SEARCH):
        f_new, g_new = fun_grad(x + alpha * d)
        armijo = np.isfinite(f_new) and f_new <= f + c1 * alpha * gd
        if not armijo:
            hi = alpha
        elif float(g_new @ d) < c2 * gd:
            best = (alpha, f_new, g_new)
            lo = alpha
        else:
            return alpha, f_new, g_new
        alpha = 2.0 * lo if np.isinf(hi) else 0.5 * (lo + hi)
        if alpha <= 1e-14:
            break
    return best if best is not None else (None, None, None)


def minimize(fun_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
             x0: np.ndarray, cfg: TrainConfig) -> MinimizeResult:
    """Dense BFGS; `fun_grad` returns (value, gradient)."""
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun_grad(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise TrainingError(f"objective not finite at start: f={f}")
    dim = x.size
    H = np.eye(dim)
    trace = [f] if cfg.record_trace else []
    failures = 0
    c1, c2 = cfg.sufficient_decrease, cfg.curvature

    it = 0
    while it < cfg.max_iterations:
        gnorm = float(np.max(np.abs(g))) if dim else 0.0
        if gnorm <= cfg.gradient_tolerance:
            return MinimizeResult(x, f, gnorm, it, True, failures, trace)

        d = -H @ g
        gd = float(g @ d)
        if not np.isfinite(gd) or gd >= 0:
            H = np.eye(dim)
            d = -g
            gd = float(g @ d)

        alpha, f_new, g_new = _line_search(fun_grad, x, f, d, gd, c1, c2)
        if alpha is None:
            failures += 1
            H = np.eye(dim)
            d = -g
            gd = float(g @ d)
            alpha, f_new, g_new = _line_search(fun_grad, x, f, d, gd, c1, c2)
            if alpha is None:
                break  # no decrease along steepest descent; stop here
        if not np.all(np.isfinite(g_new)):
            raise TrainingError(f"gradient not finite at iteration {it}")

        s = alpha * d
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * max(1.0, float(np.linalg.norm(s)) *
                            float(np.linalg.norm(y))):
            rho = 1.0 / sy
            Hy = H @ y
            H = (H
                 - rho * np.outer(s, Hy)
                 - rho * np.outer(Hy, s)
                 + (rho * rho * float(y @ Hy) + rho) * np.outer(s, s))
        x = x + s
        f, g = f_new, g_new
        if cfg.record_trace:
            trace.append(f)
        it += 1

    gnorm = float(np.max(np.abs(g))) if dim else 0.0
    return MinimizeResult(x, f, gnorm, it, gnorm <= cfg.gradient_tolerance,
                          failures, trace)


def train(net: Network, data: EncodedDataset, params: ObjectiveParams,
          cfg: TrainConfig) -> tuple[Network, TrainReport]:
    """Minimize the objective over the unmasked weights of `net`.

    Optimization starts from the network's current weights, so calling this
    again after pruning is a warm-started retrain; masks are honored
    throughout.
    """
    def fun_grad(theta):
        candidate = with_weights(net, theta)
        value, gw, gv = objective_and_gradient(candidate, data, params)
        return value, pack_gradient(candidate, gw, gv)

    result = minimize(fun_grad, pack_weights(net), cfg)
    trained = with_weights(net, result.x)
    report = TrainReport(
        iterations=result.iterations,
        objective=result.value,
        grad_norm=result.grad_norm,
        train_accuracy=accuracy(trained, data),
        eq1_rate=float(np.mean(eq1_satisfied(trained, data, params.eta1))),
        converged=result.converged,
        trace=result.trace,
    )
    return trained, report


def retrain(net: Network, data: EncodedDataset, params: ObjectiveParams,
            cfg: TrainConfig) -> tuple[Network, TrainReport]:
    """Warm-started retraining after pruning; masks stay fixed."""
    return train(net, data, params, cfg)
