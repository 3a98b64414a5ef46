"""Why alpha = 0 is fenced behind an unsafe flag.

At alpha = 0 the error exponent collapses to a pure signum and the update
law becomes bang-bang: the error crosses zero, the sign flips, and the
trajectory rattles around the origin at the step scale forever instead of
settling.  Any alpha in (0, 1) tapers the magnitude near zero and glides
in.  Both runs below use the same neuron, gain, and step size; only alpha
differs.  Plotted on a log scale the chatter shows up as a flat noise
floor, against the fractional law's clean descent.
"""

from pathlib import Path

import numpy as np

from lyapflow import (
    GainSchedule,
    Integrator,
    LyapunovLoss,
    Mlp,
    StoppingRule,
    TheoryFlow,
    integrate,
)
from lyapflow.svgplot import write_svg

x = np.array([1.0, -0.6, 0.8, 0.4])
y_star = np.array([0.48])
gains = GainSchedule.uniform(1.0)
integ = Integrator(method="euler", dt=7.14e-7, t_max=0.01, record_stride=1)
stop = StoppingRule(1e-9)

series = []
for alpha in (0.0, 0.7):
    loss = LyapunovLoss.single_neuron(alpha, allow_unsafe_alpha=True)
    traj = integrate(Mlp.zeros((4, 1)), TheoryFlow(x, y_star), loss, gains,
                     integ, stop)
    rises = traj.monotone_violations()
    settled = (f"settled at {traj.settled_at:.4e}"
               if traj.settled_at is not None else "never settled")
    print(f"alpha = {alpha:3.1f}: {rises:5d} monotone violations, {settled}, "
          f"final E = {traj.E[-1]:.3e}")
    abs_err = np.maximum(np.abs(traj.errors[:, 0]), 1e-12)
    series.append((f"alpha={alpha:g}", traj.t.tolist(), abs_err.tolist()))

out = Path("demo_out")
out.mkdir(exist_ok=True)
write_svg(out / "alpha_zero_chatter.svg", series,
          title="signum chatter vs fractional settling", y_label="|error|",
          log_y=True)
print(f"wrote {out / 'alpha_zero_chatter.svg'}")
