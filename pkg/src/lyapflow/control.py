"""Weight-update laws, phrased as control signals on the weight state.

Three laws live here:

* ``single_neuron_update`` -- the sign-based law for one sigmoid unit whose
  magnitude is the reciprocal sigmoid slope.  It drives the output error at
  a constant rate, so the unit settles in finite time.
* ``mlp_update`` -- the layered law: each weight moves against the signed
  fractional power of its own loss sensitivity, scaled by E**beta.
* ``gradient_flow_update`` -- plain gradient flow, used for L1/L2 baselines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .losses import LyapunovLoss, sgnpow
from .net import PREACT_CLAMP, ForwardTrace

__all__ = [
    "GainSchedule",
    "ControlSignal",
    "signal_norm",
    "lyapunov_rate_scale",
    "single_neuron_update",
    "mlp_update",
    "gradient_flow_update",
]

# A control signal is one rate matrix per weight layer, shaped like the weights.
ControlSignal = list


@dataclass(frozen=True)
class GainSchedule:
    """Positive gains, either one scalar for everything or one matrix per layer."""

    scalar: float | None = None
    matrices: tuple | None = None

    def __post_init__(self):
        if (self.scalar is None) == (self.matrices is None):
            raise ValueError("provide exactly one of scalar / matrices")
        if self.scalar is not None:
            if not (np.isfinite(self.scalar) and self.scalar > 0):
                raise ValueError(f"gain must be finite and > 0, got {self.scalar}")
        else:
            mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
            for m in mats:
                if not (np.all(np.isfinite(m)) and np.all(m > 0)):
                    raise ValueError("every gain entry must be finite and > 0")
            object.__setattr__(self, "matrices", mats)

    @classmethod
    def uniform(cls, k: float) -> "GainSchedule":
        return cls(scalar=float(k))

    @classmethod
    def per_weight(cls, matrices) -> "GainSchedule":
        return cls(scalar=None, matrices=tuple(matrices))

    @property
    def k_min(self) -> float:
        if self.scalar is not None:
            return self.scalar
        return float(min(m.min() for m in self.matrices))

    def layer(self, index: int):
        """Gain factor for weight layer `index` (scalar or full matrix)."""
        if self.scalar is not None:
            return self.scalar
        return self.matrices[index]


def signal_norm(signal: ControlSignal) -> float:
    """Flat 2-norm over every rate entry."""
    return float(np.sqrt(sum(float(np.sum(u * u)) for u in signal)))


def lyapunov_rate_scale(alpha: float) -> float:
    """Constant (alpha+1)**(-alpha/(alpha+1)) applied to the single-unit law.

    The loss carries a 1/(alpha+1) normalisation, so the raw law decreases E
    at rate |e|**alpha * sum(k|x|) rather than E**beta * sum(k|x|).  The two
    differ by exactly this constant; folding it into the law makes the
    integrated loss follow dE/dt = -c * E**beta with c = sum(k_i |x_i|), the
    same constant the settling-time certificate is stated in.
    """
    return float((alpha + 1.0) ** (-alpha / (alpha + 1.0)))


def single_neuron_update(x, e_bar: float, z: float, gains: GainSchedule,
                         rate_scale: float = 1.0) -> ControlSignal:
    """Rate law for a single sigmoid unit; the bias weight is frozen.

    u_i = -k_i * sign(x_i) * sign(e) * (exp(z) + 2 + exp(-z)) * rate_scale,
    where exp(z) + 2 + exp(-z) is 1/sigma'(z), evaluated with z clamped to
    +/-30.  With rate_scale=1 the induced loss rate is exactly
    -|e|**alpha * sum(k_i |x_i|); see :func:`lyapunov_rate_scale` for the
    scale that restates it in terms of E**beta.
    """
    x = np.asarray(x, dtype=float)
    zc = float(np.clip(z, -PREACT_CLAMP, PREACT_CLAMP))
    mag = np.exp(zc) + 2.0 + np.exp(-zc)
    k = gains.layer(0)
    if isinstance(k, np.ndarray):
        k = k[0, :-1]
    u = -k * np.sign(x) * np.sign(e_bar) * mag * rate_scale
    return [np.append(u, 0.0)[None, :]]


def mlp_update(deltas, trace: ForwardTrace, E: float, gains: GainSchedule,
               loss: LyapunovLoss) -> ControlSignal:
    """Layered law: dW_l/dt = -K_l * sgnpow(delta_l z_l^T, alpha) * E**beta.

    Bias columns are updated like any other weight (their activation entry
    is the constant 1).  Valid for alpha + beta < 1.
    """
    if E < 0:
        raise ValueError(f"E must be >= 0, got {E}")
    if loss.alpha + loss.beta >= 1.0:
        raise ValueError(
            f"layered law needs alpha + beta < 1, got {loss.alpha} + {loss.beta}"
        )
    scale = E ** loss.beta
    signal = []
    for l, d in enumerate(deltas):
        sens = np.outer(d, trace.acts[l])
        signal.append(-gains.layer(l) * sgnpow(sens, loss.alpha) * scale)
    return signal


def gradient_flow_update(grad, gains: GainSchedule) -> ControlSignal:
    """Baseline: dW_l/dt = -K_l * dE/dW_l."""
    return [-gains.layer(l) * g for l, g in enumerate(grad)]
