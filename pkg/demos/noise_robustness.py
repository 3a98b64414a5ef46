"""Settling under admissible input noise, and where the guarantee ends.

Vanishing-bound noise perturbs each input inside +/- M|x|**alpha, redrawn
every step.  As long as M stays below the smallest gain, the settling
guarantee survives with the degraded constant c = (k_min - M) * gamma.
At M >= k_min the tool refuses to certify: the run still executes, but
nothing is promised.  The sweep below walks M across that line.
"""

from pathlib import Path

import numpy as np

from lyapflow import (
    GainSchedule,
    Integrator,
    LyapunovLoss,
    Mlp,
    PerturbationSpec,
    StoppingRule,
    TheoryFlow,
    robustness_run,
    verify_decrease,
)
from lyapflow.svgplot import write_svg

mode = TheoryFlow(np.array([5e4, 5e4]), np.array([0.2]))
loss = LyapunovLoss.single_neuron(0.7)
gains = GainSchedule.uniform(1.0)
integ = Integrator(method="euler", dt=1.5e-10, t_max=2e-5, record_stride=2200)
stop = StoppingRule(1e-8)

series = []
print(f"{'M':>6} {'certified':>9} {'T_bound':>12} {'settled_at':>12} {'slopes':>7}")
for M in (0.1, 0.3, 0.5, 1.0):
    spec = PerturbationSpec(mode="vanishing", M=M, alpha=0.7, seed=6,
                            redraw_every=1)
    traj, bound = robustness_run(Mlp.zeros((2, 1)), mode, spec, gains, loss,
                                 integ, stop)
    if bound is not None:
        check = verify_decrease(traj, c=bound.c, beta=bound.beta)
        slope = "ok" if check.ok else "FAIL"
        t_bound = f"{bound.T:.4e}"
    else:
        slope, t_bound = "-", "refused"
    settled = f"{traj.settled_at:.4e}" if traj.settled_at is not None else "none"
    print(f"{M:6.2f} {str(bound is not None):>9} {t_bound:>12} {settled:>12} "
          f"{slope:>7}")
    series.append((f"M={M:g}", traj.t.tolist(), traj.E.tolist()))

out = Path("demo_out")
out.mkdir(exist_ok=True)
write_svg(out / "noise_robustness.svg", series,
          title="settling under vanishing-bound noise", y_label="loss E")
print(f"wrote {out / 'noise_robustness.svg'}")
