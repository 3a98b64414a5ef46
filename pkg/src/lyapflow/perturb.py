"""Bounded input perturbations and robustness runs.

Two envelope shapes for the componentwise offset bound B_i:

* vanishing:  B_i = M * |x_i|**alpha  -- shrinks with the input entry; this
  is the admissible class for which the perturbed settling certificate
  (c = (k_min - M) * gamma) holds.
* amplitude:  B_i = M  -- flat envelope; runs execute but carry no
  certificate.

Offsets are drawn uniformly from (-B_i, B_i), re-drawn every
``redraw_every`` integration steps and held in between.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import GammaEstimate, estimate_gamma, settling_bound
from .dynamics import EpochFlow, TheoryFlow, dataset_loss, integrate
from .errors import GuaranteeError
from .losses import LyapunovLoss
from .net import forward

__all__ = ["PerturbationSpec", "perturb_input", "robustness_run"]


@dataclass(frozen=True)
class PerturbationSpec:
    mode: str  # "vanishing" | "amplitude"
    M: float
    alpha: float | None = None
    seed: int = 0
    redraw_every: int = 1

    def __post_init__(self):
        if self.mode not in ("vanishing", "amplitude"):
            raise ValueError(f"mode must be 'vanishing' or 'amplitude', got {self.mode!r}")
        if not (self.M >= 0 and math.isfinite(self.M)):
            raise ValueError(f"M must be finite and >= 0, got {self.M}")
        if self.mode == "vanishing":
            if self.alpha is None or not 0.0 <= self.alpha < 1.0:
                raise ValueError("vanishing mode needs alpha in [0, 1)")
        if self.redraw_every < 1:
            raise ValueError("redraw_every must be >= 1")

    def bound_for(self, x) -> np.ndarray:
        """Componentwise envelope B_i the offsets are drawn from."""
        x = np.asarray(x, dtype=float)
        if self.mode == "vanishing":
            return self.M * np.abs(x) ** self.alpha
        return np.full_like(x, self.M)

    def apply(self, x, rng) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        b = self.bound_for(x)
        return x + rng.uniform(-b, b)


def perturb_input(x, spec: PerturbationSpec, rng=None) -> np.ndarray:
    """One perturbed copy of x; with rng=None the spec's seed is used fresh,
    so repeated calls return the identical draw."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    return spec.apply(x, rng)


def robustness_run(mlp, mode, spec: PerturbationSpec, gains, loss, integ, stop,
                   gamma: GammaEstimate | None = None, law: str = "auto"):
    """Integrate under input perturbations and certify if possible.

    Returns (trajectory, bound); bound is None when the certificate is
    refused -- amplitude-mode noise, or a level M >= k_min.  E0 for the
    certificate is the loss at the initial weights on the *unperturbed*
    inputs.
    """
    if isinstance(mode, TheoryFlow):
        e0_errs = forward(mlp, mode.x).y - mode.y_star
        E0 = loss.evaluate(e0_errs)
        if gamma is None:
            gamma = estimate_gamma(mode.x[None, :])
    elif isinstance(mode, EpochFlow):
        E0, _ = dataset_loss(mlp, mode.dataset, loss)
        if gamma is None:
            gamma = estimate_gamma(mode.dataset)
    else:
        raise TypeError(f"unknown train mode {type(mode).__name__}")

    bound = None
    if spec.mode == "vanishing" and isinstance(loss, LyapunovLoss) and E0 > 0:
        try:
            bound = settling_bound(E0, gains, gamma, loss, flavor="perturbed",
                                   M=spec.M)
        except GuaranteeError:
            bound = None

    traj = integrate(mlp, mode, loss, gains, integ, stop, law=law, noise=spec)
    return traj, bound
