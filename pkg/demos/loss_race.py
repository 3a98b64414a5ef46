"""Race the settling loss against l1 and l2 gradient flows.

Same neuron, same gain, same starting point; only the loss (and with it
the update law) differs.  The quadratic flow decays exponentially and
never quite arrives; the settling loss reaches the epsilon band in finite
time.  Near the sigmoid's saturated region the gradient flows crawl
(their rate carries a sigma'**2 factor), which is exactly where the
settling law's 1/sigma' magnitude keeps pushing.
"""

from pathlib import Path

import numpy as np

from lyapflow import (
    GainSchedule,
    Integrator,
    L1Loss,
    L2Loss,
    LyapunovLoss,
    Mlp,
    StoppingRule,
    TheoryFlow,
    integrate,
)
from lyapflow.svgplot import write_svg

x = np.array([1.0, 0.5])
y_star = np.array([0.1])
gains = GainSchedule.uniform(1.0)
integ = Integrator(method="euler", dt=5e-5, t_max=1.0, record_stride=20)
stop = StoppingRule(1e-6)

series = []
for loss in (LyapunovLoss.single_neuron(0.7), L1Loss(), L2Loss()):
    traj = integrate(Mlp.zeros((2, 1)), TheoryFlow(x, y_star), loss, gains,
                     integ, stop)
    state = (f"settled at t = {traj.settled_at:.4f}"
             if traj.settled_at is not None
             else f"E = {traj.E[-1]:.3e} at t_max = {integ.t_max}")
    print(f"{loss.name:9s} {state}")
    series.append((loss.name, traj.t.tolist(), traj.E.tolist()))

out = Path("demo_out")
out.mkdir(exist_ok=True)
write_svg(out / "loss_race.svg", series, title="one neuron, three losses",
          y_label="loss E", log_y=True)
print(f"wrote {out / 'loss_race.svg'}")
