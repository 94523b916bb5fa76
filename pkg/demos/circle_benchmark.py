"""Unit circle under Willmore flow, both methods against the exact radius.

The radius obeys r' = 1 / (2 r^3), so r(t) = (1 + 2t)^(1/4) from r(0) = 1.
Run with ``python demos/circle_benchmark.py``; takes about a minute.
"""

import numpy as np

from willmore.harness import ExperimentSpec, run_eoc, run_experiment
from willmore.levelset import extract_zero_set
from willmore.shapes import circle_radius_exact


def main():
    lag = run_experiment(ExperimentSpec.from_preset("lagrangian", "circle"))
    ls = run_experiment(ExperimentSpec.from_preset("levelset", "circle"))
    print("   t    exact   lagrangian  level set")
    for a, b in zip(lag.states, ls.states):
        r_lag = np.hypot(*a.nodes.T).mean()
        r_ls = np.hypot(*np.vstack(extract_zero_set(b)).T).mean()
        print(f"{a.t:5.2f}  {circle_radius_exact(a.t):.5f}  {r_lag:.5f}     {r_ls:.5f}")

    rep = run_eoc("lagrangian", levels=(10, 20, 40))
    print("\nLagrangian convergence on [0, 2.56]")
    for (h, l2, _), rate in zip(rep.rows, [None, *rep.eoc()]):
        print(f"h={h:.4f}  L2={l2:.5f}  EOC={'' if rate is None else f'{rate:.3f}'}")


if __name__ == "__main__":
    main()
