"""A circle inside an ellipse: the annulus between them pinches and splits.

The thin gaps at the ends of the short axis close first, so the inside
region goes from one component to two.  Uses the explicit scheme with
adaptive Runge-Kutta-Merson steps; about four minutes.
"""

from willmore.harness import ExperimentSpec, run_experiment


def main():
    result = run_experiment(ExperimentSpec.from_preset("levelset", "circle_in_ellipse"))
    s = result.summary
    for t, n in s["inside_components"]:
        print(f"t={t:.4f}: {n} inside component(s)")
    solver = s["solver"]
    print(f"{solver['rkm_steps']} accepted steps, dt in [{solver['dt_min']:.1e}, {solver['dt_max']:.1e}]")


if __name__ == "__main__":
    main()
