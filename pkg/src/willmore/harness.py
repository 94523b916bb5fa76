"""Experiment presets, error norms, convergence studies and run persistence."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from . import lagrangian as lag
from .curve import (
    DegenerateCurveError,
    DiscreteCurve,
    elastic_energy,
    init_from_parametric,
    read_curves_csv,
    write_curves_csv,
    write_polylines_csv,
)
from .levelset import contour
from .levelset.field import LevelSetField, field_from_sdf, write_field
from .levelset.scheme import LevelSetConfig, LevelSetStats, phase_field_init
from .levelset.scheme import evolve as ls_evolve
from .linsolve import SolverError
from .shapes import SHAPE_IDS, circle_radius_exact, make_shape

SCHEMA_VERSION = 1
METHODS = ("lagrangian", "levelset")
LAGRANGIAN_NORMS = ("parameter", "arclength")
LEVELSET_NORMS = ("arclength", "normalized")


class HarnessError(ValueError):
    """Invalid experiment request (maps to a usage error)."""


class NumericalFailure(RuntimeError):
    """A run aborted by a solver failure; ``summary_path`` holds the record."""

    def __init__(self, message: str, summary_path: Path | None = None):
        super().__init__(message)
        self.summary_path = summary_path


# -- presets ----------------------------------------------------------------

# per-figure parameters; entries marked in the decision ledger are chosen
PRESETS: dict[str, dict[str, dict]] = {
    "circle": {
        "lagrangian": dict(n=100, tau=0.002, T=0.5, omega=0.0, save_times=(0.1, 0.2, 0.3, 0.4, 0.5)),
        "levelset": dict(domain=(-2.0, 2.0), h=0.04, tau=0.002, T=0.5, epsilon=0.001, redist=None,
                         save_times=(0.1, 0.2, 0.3, 0.4, 0.5)),
    },
    "ellipse": {
        "lagrangian": dict(n=100, tau=0.002, T=2.56, omega=1.0, save_times=(0.64, 1.28, 1.92, 2.56)),
        "levelset": dict(domain=(-4.0, 4.0), h=0.08, tau=0.01, T=2.56, epsilon=0.001, redist=1.28,
                         save_times=(0.64, 1.28, 1.92, 2.56)),
    },
    "flower": {
        "lagrangian": dict(n=100, tau=1e-5, T=0.01, omega=1.0, save_times=(0.001, 0.005, 0.01)),
        "levelset": dict(domain=(-2.0, 2.0), h=0.04, tau=2.5e-5, T=0.01, epsilon=0.001, redist=0.001,
                         save_times=(0.001, 0.005, 0.01)),
    },
    "square": {
        "lagrangian": dict(n=100, tau=1e-7, T=0.01, omega=1.0, save_times=(0.001, 0.005, 0.01)),
        "levelset": dict(domain=(-2.0, 2.0), h=0.04, tau=2.5e-5, T=0.01, epsilon=1e-5, redist=0.01,
                         save_times=(0.001, 0.005, 0.01)),
    },
    "astroid": {
        "lagrangian": dict(n=100, tau=1e-7, T=0.01, omega=1.0, save_times=(0.001, 0.005, 0.01)),
        "levelset": dict(domain=(-2.0, 2.0), h=0.04, tau=2.5e-5, T=0.01, epsilon=1e-5, redist=0.01,
                         save_times=(0.001, 0.005, 0.01)),
    },
    "circle_in_ellipse": {
        "levelset": dict(domain=(-1.2, 1.2), h=0.0333, tau=2e-5, T=0.008, epsilon=0.2, redist=None,
                         scheme="explicit", delta=None, rkm_tol=1e-6, shape_params={"radius": 0.55},
                         save_times=(0.0005, 0.001, 0.002, 0.004, 0.008)),
    },
}


@dataclass
class ExperimentSpec:
    """Complete parameter set of one run.

    ``n`` is the node count (Lagrangian) and ``h`` the grid spacing (level
    set); for the level-set method ``n`` may be given instead of ``h`` and
    then counts finite volumes per direction.
    """

    method: str
    preset: str
    n: int | None = None
    h: float | None = None
    tau: float = 0.0
    T: float = 0.0
    omega: float = 1.0
    epsilon: float | None = None
    redist: float | None = None
    scheme: str = "semi-implicit"
    solver: str | None = None
    out: Path | None = None
    save_every: int = 0
    save_times: tuple = ()
    domain: tuple[float, float] = (-2.0, 2.0)
    delta: float | None = None
    rkm_tol: float = 1e-6
    redist_init: str = "crossing"
    curvature_init: str = "turning-angle"
    shape_params: dict = field(default_factory=dict)

    @classmethod
    def from_preset(cls, method: str, preset: str, **overrides) -> "ExperimentSpec":
        if method not in METHODS:
            raise HarnessError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
        if preset not in SHAPE_IDS:
            raise HarnessError(f"unknown preset {preset!r}; expected one of {', '.join(SHAPE_IDS)}")
        if method not in PRESETS[preset]:
            raise HarnessError(f"preset {preset!r} is not available for the {method} method")
        values = dict(PRESETS[preset][method])
        values.update({k: v for k, v in overrides.items() if v is not None})
        if method == "levelset" and overrides.get("n") is not None and overrides.get("h") is None:
            lo, hi = values.get("domain", (-2.0, 2.0))
            values["h"] = (hi - lo) / int(overrides["n"])
        spec = cls(method=method, preset=preset, **values)
        spec.validate()
        return spec

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise HarnessError(msg)

        need(self.tau > 0, "tau must be positive")
        need(self.T > 0, "T must be positive")
        need(self.save_every >= 0, "save stride must be non-negative")
        if self.method == "lagrangian":
            need(self.n is not None and self.n >= 8, "lagrangian runs need n >= 8 nodes")
            need(self.omega >= 0, "omega must be non-negative")
            need(self.solver in (None, "gauss-seidel", "direct"), f"unknown solver {self.solver!r}")
        else:
            need(self.h is not None and self.h > 0, "level-set runs need a positive h")
            need(self.epsilon is not None and self.epsilon > 0, "epsilon must be positive")
            need(self.redist is None or self.redist > 0, "redistancing period must be positive")
            need(self.scheme in ("semi-implicit", "explicit"), f"unknown scheme {self.scheme!r}")
            need(self.solver in (None, "lu", "gmres-ilut"), f"unknown solver {self.solver!r}")
            lo, hi = self.domain
            need(hi > lo and round((hi - lo) / self.h) >= 5, "grid too coarse")

    @property
    def cells(self) -> int:
        lo, hi = self.domain
        return int(round((hi - lo) / self.h))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["out"] = None if self.out is None else str(self.out)
        d["save_times"] = list(self.save_times)
        d["domain"] = list(self.domain)
        return d


# -- error norms ------------------------------------------------------------


class SpaceTimeError:
    """Accumulates ``(sum_j tau sum_i w_i |e_i^j|^2)^(1/2)`` and ``max |e_i^j|``."""

    def __init__(self, tau: float):
        self.tau = tau
        self._sq = 0.0
        self.linf = 0.0
        self.levels = 0

    def add(self, err: np.ndarray, weights: np.ndarray) -> None:
        err = np.abs(np.asarray(err, dtype=float))
        self._sq += self.tau * float(np.sum(weights * err**2))
        self.linf = max(self.linf, float(err.max()))
        self.levels += 1

    @property
    def l2(self) -> float:
        return math.sqrt(self._sq)


def curve_radius_error(curve: DiscreteCurve, r0: float = 1.0) -> np.ndarray:
    return np.linalg.norm(curve.nodes, axis=1) - circle_radius_exact(curve.t, r0)


def lagrangian_weights(curve: DiscreteCurve, norm: str = "parameter") -> np.ndarray:
    """Quadrature weights of the nodes: ``1/n`` (parameter) or ``r_i`` (arclength)."""
    if norm == "parameter":
        return np.full(curve.n, 1.0 / curve.n)
    if norm == "arclength":
        return curve.r
    raise HarnessError(f"unknown lagrangian norm {norm!r}")


def polyline_weights(poly: np.ndarray, norm: str = "arclength") -> np.ndarray:
    """Vertex weights of a polyline: half the adjacent edge lengths.

    ``"normalized"`` rescales them to sum to one.
    """
    seg = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    w = np.zeros(len(poly))
    w[:-1] += 0.5 * seg
    w[1:] += 0.5 * seg
    if norm == "normalized":
        return w / w.sum()
    if norm != "arclength":
        raise HarnessError(f"unknown level-set norm {norm!r}")
    return w


def zero_set_radius_error(field: LevelSetField, norm: str = "arclength", r0: float = 1.0):
    """Radius errors at all zero-set vertices and their weights."""
    contours = contour.extract_zero_set(field)
    if not contours:
        raise NumericalFailure(f"zero set vanished at t={field.t:g}")
    errs, weights = [], []
    exact = circle_radius_exact(field.t, r0)
    for poly in contours:
        errs.append(np.linalg.norm(poly, axis=1) - exact)
        weights.append(polyline_weights(poly, norm))
    return np.concatenate(errs), np.concatenate(weights)


# -- geometric helpers --------------------------------------------------------


def spectral_energy(poly: np.ndarray, h: float, samples: int = 4096) -> float:
    """``1/2 int k^2 ds`` of a closed polyline, low-pass filtered at the grid scale.

    The polyline is resampled uniformly in arclength and differentiated with
    the FFT.  Wavelengths above ``8h`` are kept, those below ``8h/3`` dropped,
    with a cosine-squared taper in between.  Marching-squares vertices carry
    errors at the grid scale that would otherwise dominate the curvature.
    The result does not depend on the starting vertex, and it varies
    continuously when vertices appear or vanish and as the length changes.
    """
    seg = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    s = np.r_[0.0, np.cumsum(seg)]
    length = s[-1]
    t = np.arange(samples) * length / samples
    z = np.interp(t, s, poly[:, 0]) + 1j * np.interp(t, s, poly[:, 1])
    Z = np.fft.fft(z)
    m = np.fft.fftfreq(samples, d=1.0 / samples)
    x = np.abs(m) * 4.0 * h / length
    Z *= np.where(x <= 0.5, 1.0, np.where(x >= 1.5, 0.0, np.cos(0.5 * np.pi * (x - 0.5)) ** 2))
    omega = 2 * np.pi * m / length
    z1 = np.fft.ifft(1j * omega * Z)
    z2 = np.fft.ifft(-(omega**2) * Z)
    speed = np.abs(z1)
    k = np.imag(np.conj(z1) * z2) / speed**3
    return 0.5 * float(np.sum(k**2 * speed)) * length / samples


def zero_set_energy(field: LevelSetField) -> float:
    """Elastic energy of the closed zero-set contours (open pieces are skipped)."""
    return sum(spectral_energy(p, field.h) for p in contour.extract_zero_set(field)
               if contour.is_closed(p) and len(p) > 4)


def densify(poly: np.ndarray, spacing: float, closed: bool = False) -> np.ndarray:
    """Insert points so that consecutive points are at most `spacing` apart."""
    pts = np.vstack([poly, poly[:1]]) if closed else poly
    out = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        m = max(1, int(math.ceil(np.linalg.norm(b - a) / spacing)))
        s = np.arange(1, m + 1)[:, None] / m
        out.append(a + s * (b - a))
    return np.vstack(out)


def curve_distances(a: list[np.ndarray], b: list[np.ndarray], spacing: float) -> tuple[float, float]:
    """Symmetric Hausdorff and mean distance between two sets of polylines."""
    pa = np.vstack([densify(p, spacing) for p in a])
    pb = np.vstack([densify(p, spacing) for p in b])
    dab, _ = cKDTree(pb).query(pa)
    dba, _ = cKDTree(pa).query(pb)
    return float(max(dab.max(), dba.max())), float(0.5 * (dab.mean() + dba.mean()))


# -- runs ---------------------------------------------------------------------


@dataclass
class RunResult:
    directory: Path | None
    summary: dict
    states: list = field(default_factory=list)


def _times_key(t: float) -> str:
    return f"{t:.10g}"


def _lagrangian_run(spec: ExperimentSpec, out: Path | None, plot_data: bool) -> RunResult:
    shape, _ = make_shape(spec.preset, **spec.shape_params)
    curve = init_from_parametric(shape, spec.n, spec.curvature_init)
    cfg = lag.LagrangianConfig(tau=spec.tau, omega=spec.omega, solver=spec.solver or "gauss-seidel")
    # E L >= 4 pi^2 and E does not increase, so L stays above 4 pi^2 / E(0)
    min_length = 0.5 * 4 * math.pi**2 / elastic_energy(curve)

    def guard(c):
        if not c.total_length >= min_length:
            raise DegenerateCurveError(f"curve collapsed at t={c.t:g} (length {c.total_length:.3g})")

    start = time.perf_counter()
    summary = {"status": "ok"}
    try:
        traj = lag.evolve(curve, cfg, spec.T, save_every=spec.save_every, save_times=spec.save_times,
                          callback=guard)
    except (SolverError, DegenerateCurveError) as exc:
        summary.update(status="failed", error=str(exc))
        traj = None
    wall = time.perf_counter() - start
    if traj is not None:
        final = traj.states[-1]
        energies = np.asarray(traj.energies)
        rel_inc = np.diff(energies) / np.maximum(np.abs(energies[:-1]), 1e-300)
        gs = [s.curvature.iterations for s in traj.stats] + [s.position.iterations for s in traj.stats]
        summary.update(
            final_time=final.t,
            final_energy=elastic_energy(final),
            final_length=final.total_length,
            max_relative_energy_increase=float(max(0.0, rel_inc.max(initial=0.0))),
            length_ratio=float(final.r.max() / final.r.min()),
            steps=len(traj.stats),
            solver={
                "method": cfg.solver,
                "mean_iterations": float(np.mean(gs)) if gs else 0.0,
                "max_iterations": int(max(gs)) if gs else 0,
                "max_residual": float(max((s.position.residual for s in traj.stats), default=0.0)),
            },
            saved_times=[s.t for s in traj.states],
        )
        if out is not None:
            write_curves_csv(out / "curves.csv", traj.states)
            if plot_data:
                for s in traj.states:
                    _write_plot(out / f"curve_t{_times_key(s.t)}.dat", [np.vstack([s.nodes, s.nodes[:1]])])
    summary["wall_time"] = wall
    return RunResult(out, summary, [] if traj is None else traj.states)


def initial_field(spec: ExperimentSpec) -> LevelSetField:
    _, sdf = make_shape(spec.preset, **spec.shape_params)
    lo, hi = spec.domain
    f = field_from_sdf(sdf, lo, lo + spec.cells * spec.h, spec.cells)
    if spec.scheme == "explicit":
        f = f.replace(u=phase_field_init(f.u, levelset_delta(spec)))
    return f


def levelset_delta(spec: ExperimentSpec) -> float:
    return spec.delta if spec.delta is not None else 10.0 * spec.h


def levelset_config(spec: ExperimentSpec) -> LevelSetConfig:
    return LevelSetConfig(
        tau=spec.tau,
        epsilon=spec.epsilon,
        redistance_period=spec.redist,
        redistance_init=spec.redist_init,
        scheme=spec.scheme,
        solver=spec.solver or "lu",
        delta=levelset_delta(spec) if spec.scheme == "explicit" else None,
        rkm_tol=spec.rkm_tol,
    )


def _levelset_run(spec: ExperimentSpec, out: Path | None, plot_data: bool) -> RunResult:
    f0 = initial_field(spec)
    cfg = levelset_config(spec)
    energies, before = [], {}
    stats = LevelSetStats(on_redistance=lambda b, a: before.__setitem__(_times_key(b.t), zero_set_energy(b)))

    # (t, count) whenever the inside-region component count changes
    topology = [(f0.t, contour.inside_components(f0))]

    def track(f):
        energies.append(zero_set_energy(f))
        n = contour.inside_components(f)
        if n != topology[-1][1]:
            topology.append((f.t, n))

    energies.append(zero_set_energy(f0))
    start = time.perf_counter()
    summary = {"status": "ok"}
    try:
        saved = ls_evolve(f0, cfg, spec.T, spec.save_times, spec.save_every, track, stats)
    except SolverError as exc:
        summary.update(status="failed", error=str(exc))
        saved = None
    wall = time.perf_counter() - start
    if saved is not None:
        final = saved[-1]
        e = np.asarray(energies)
        times = [f0.t + spec.tau * j for j in range(len(e))]
        # energy after the flow step, before any redistancing of that step
        flow = np.array([before.get(_times_key(t), ej) for t, ej in zip(times, e)])
        rel_inc = (flow[1:] - e[:-1]) / np.maximum(np.abs(e[:-1]), 1e-300)
        jumps = [abs(e[j] - flow[j]) / max(abs(flow[j]), 1e-300) for j in range(len(e)) if flow[j] != e[j]]
        contours = contour.extract_zero_set(final)
        if not contours:
            summary.update(status="failed", error=f"zero set vanished by t={final.t:g}")
        summary.update(
            final_time=final.t,
            final_energy=float(e[-1]),
            final_length=float(sum(np.linalg.norm(np.diff(c, axis=0), axis=1).sum() for c in contours)),
            max_relative_energy_increase=float(max(0.0, rel_inc.max(initial=0.0))),
            max_redistance_energy_change=float(max(jumps, default=0.0)),
            components=len(contours),
            inside_components=[[float(t), n] for t, n in topology],
            steps=int(round(spec.T / spec.tau)),
            solver={
                "method": cfg.solver if cfg.scheme == "semi-implicit" else "rkm",
                "mean_iterations": float(np.mean([r.iterations for r in stats.linear])) if stats.linear else 0.0,
                "max_residual": float(max((r.residual for r in stats.linear), default=0.0)),
                "rkm_steps": stats.rkm_steps,
                "rkm_rejected": stats.rkm_rejected,
                "dt_min": None if not stats.rkm_steps else stats.dt_min,
                "dt_max": None if not stats.rkm_steps else stats.dt_max,
            },
            redistance_times=list(stats.redistance_times),
            saved_times=[s.t for s in saved],
        )
        if out is not None:
            fields_dir = out / "fields"
            fields_dir.mkdir(exist_ok=True)
            levels = []
            for k, s in enumerate(saved):
                write_field(fields_dir / f"u_{k:04d}.txt", s)
                levels.append((s.t, contour.extract_zero_set(s)))
                if plot_data:
                    _write_plot(out / f"zeroset_t{_times_key(s.t)}.dat", levels[-1][1])
            write_polylines_csv(out / "contours.csv", levels)
    summary["wall_time"] = wall
    return RunResult(out, summary, saved or [])


def _write_plot(path: Path, polylines: list[np.ndarray]) -> None:
    """Two-column gnuplot data; blank lines separate polylines."""
    with open(path, "w", encoding="utf-8") as fh:
        for k, p in enumerate(polylines):
            if k:
                fh.write("\n\n")
            for x, y in p:
                fh.write(f"{x:.12g} {y:.12g}\n")


def run_experiment(spec: ExperimentSpec, plot_data: bool = False) -> RunResult:
    """Run one experiment and persist its outputs under ``spec.out``.

    Writes ``curves.csv`` (Lagrangian) or ``fields/`` plus ``contours.csv``
    (level set), and ``summary.json``.  Raises :class:`NumericalFailure`
    after recording the failure when a solver gives up.
    """
    spec.validate()
    out = None if spec.out is None else Path(spec.out)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    runner = _lagrangian_run if spec.method == "lagrangian" else _levelset_run
    result = runner(spec, out, plot_data)
    result.summary = {"schema_version": SCHEMA_VERSION, "method": spec.method, "preset": spec.preset,
                      "spec": spec.to_dict(), **result.summary}
    path = None
    if out is not None:
        path = out / "summary.json"
        path.write_text(json.dumps(result.summary, indent=2, default=float), encoding="utf-8")
    if result.summary["status"] != "ok":
        raise NumericalFailure(result.summary["error"], path)
    return result


# -- convergence studies --------------------------------------------------------


@dataclass
class EocReport:
    method: str
    norm: str
    rows: list = field(default_factory=list)  # (h, l2, linf)
    failure: str | None = None

    def eoc(self, column: int = 1) -> list[float]:
        """``log2(e(h) / e(h/2))`` between consecutive rows (0 for equal errors)."""
        out = []
        for a, b in zip(self.rows[:-1], self.rows[1:]):
            ea, eb = a[column], b[column]
            ratio = a[0] / b[0]
            out.append(0.0 if ea == eb else math.log(ea / eb) / math.log(ratio if ratio != 1 else 2.0))
        return out

    @property
    def eoc_l2(self) -> list[float]:
        return self.eoc(1)

    @property
    def eoc_linf(self) -> list[float]:
        return self.eoc(2)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "method": self.method,
            "norm": self.norm,
            "rows": [{"h": h, "l2": l2, "linf": li} for h, l2, li in self.rows],
            "eoc_l2": self.eoc_l2,
            "eoc_linf": self.eoc_linf,
            "failure": self.failure,
        }

    def format_table(self) -> str:
        lines = [f"{'h':>10} {'L2':>12} {'EOC':>7} {'Linf':>12} {'EOC':>7}"]
        e2, ei = [None] + self.eoc_l2, [None] + self.eoc_linf
        for (h, l2, li), a, b in zip(self.rows, e2, ei):
            fa = "" if a is None else f"{a:.3f}"
            fb = "" if b is None else f"{b:.3f}"
            lines.append(f"{h:>10.5g} {l2:>12.5f} {fa:>7} {li:>12.5f} {fb:>7}")
        return "\n".join(lines)


def lagrangian_circle_error(n: int, T: float = 2.56, norm: str = "parameter", omega: float = 1.0,
                            curvature_init: str = "turning-angle") -> tuple[float, float]:
    """Space-time errors of the Lagrangian scheme on the unit circle with ``tau = (1/n)^2``."""
    h = 1.0 / n
    shape, _ = make_shape("circle")
    curve = init_from_parametric(shape, n, curvature_init)
    cfg = lag.LagrangianConfig(tau=h * h, omega=omega)
    acc = SpaceTimeError(cfg.tau)
    lag.evolve(curve, cfg, T, callback=lambda c: acc.add(curve_radius_error(c), lagrangian_weights(c, norm)))
    return acc.l2, acc.linf


def levelset_eoc_parameters(n: int, rule: str = "grid") -> dict:
    """``tau = h^2, eps^2 = 2h, tau_redist = h/4`` on ``[-2, 2]^2`` split into ``n^2`` volumes.

    ``rule="grid"`` evaluates the rules with the grid spacing ``h = 4/n``;
    ``rule="nominal"`` uses ``h = 1/n`` instead.
    """
    if rule not in ("nominal", "grid"):
        raise HarnessError(f"unknown parameter rule {rule!r}")
    hr = 1.0 / n if rule == "nominal" else 4.0 / n
    return dict(h=4.0 / n, tau=hr * hr, epsilon=math.sqrt(2.0 * hr), redist=0.25 * hr)


def levelset_circle_error(n: int, T: float = 0.5, norm: str = "normalized", rule: str = "grid",
                          solver: str = "lu", redist_init: str = "crossing") -> tuple[float, float]:
    p = levelset_eoc_parameters(n, rule)
    spec = ExperimentSpec(method="levelset", preset="circle", h=p["h"], tau=p["tau"], T=T,
                          epsilon=p["epsilon"], redist=p["redist"], solver=solver,
                          domain=(-2.0, 2.0), redist_init=redist_init)
    acc = SpaceTimeError(spec.tau)

    def track(f):
        err, w = zero_set_radius_error(f, norm)
        acc.add(err, w)

    ls_evolve(initial_field(spec), levelset_config(spec), T, callback=track)
    return acc.l2, acc.linf


def run_eoc(method: str, levels=(10, 20, 40, 80), T: float | None = None, norm: str | None = None,
            **kwargs) -> EocReport:
    """Convergence study on the circle benchmark.

    Parameters
    ----------
    method : {"lagrangian", "levelset"}
    levels : sequence of int
        Node counts (Lagrangian) or volumes per direction (level set).
    T : float, optional
        Final time; 2.56 (Lagrangian) or 0.5 (level set) by default.
    norm : str, optional
        Quadrature of the space-time norm, see :func:`lagrangian_weights`
        and :func:`polyline_weights`.

    A solver failure stops the study; the rows computed so far are kept and
    the message is stored in ``failure``.
    """
    levels = list(levels)
    if len(levels) < 2:
        raise HarnessError("need at least two grid levels")
    if method == "lagrangian":
        T = 2.56 if T is None else T
        norm = norm or "parameter"
        if norm not in LAGRANGIAN_NORMS:
            raise HarnessError(f"unknown lagrangian norm {norm!r}")

        def err(n):
            return lagrangian_circle_error(n, T, norm, **kwargs)

        def spacing(n):
            return 1.0 / n
    elif method == "levelset":
        T = 0.5 if T is None else T
        norm = norm or "normalized"
        if norm not in LEVELSET_NORMS:
            raise HarnessError(f"unknown level-set norm {norm!r}")

        def err(n):
            return levelset_circle_error(n, T, norm, **kwargs)

        def spacing(n):
            return 4.0 / n
    else:
        raise HarnessError(f"unknown method {method!r}")
    report = EocReport(method, norm)
    for n in levels:
        try:
            l2, linf = err(n)
        except (SolverError, NumericalFailure) as exc:
            report.failure = f"level n={n}: {exc}"
            break
        report.rows.append((spacing(n), l2, linf))
    return report


# -- cross-method comparison ------------------------------------------------------


def _match_time(t: float, available) -> float | None:
    for a in available:
        if abs(a - t) <= 1e-9 * max(1.0, abs(t)):
            return a
    return None


def load_run_curves(directory: Path | str) -> tuple[dict, dict]:
    """``({t: [polylines]}, summary)`` of a saved run."""
    directory = Path(directory)
    summary = json.loads((directory / "summary.json").read_text(encoding="utf-8"))
    name = "curves.csv" if summary["method"] == "lagrangian" else "contours.csv"
    curves = read_curves_csv(directory / name)
    if summary["method"] == "lagrangian":
        curves = {t: [np.vstack([p, p[:1]]) for p in ps] for t, ps in curves.items()}
    return curves, summary


def compare_curves(lagrangian: dict, levelset: dict, times, h: float) -> dict:
    """Per-time Hausdorff and mean distances between two ``{t: polylines}`` maps."""
    rows = []
    for t in times:
        ta, tb = _match_time(t, lagrangian), _match_time(t, levelset)
        if ta is None or tb is None:
            have = sorted(set(map(float, lagrangian)) & set(map(float, levelset)))
            raise HarnessError(f"time {t:g} not saved by both runs; common times: {have}")
        haus, mean = curve_distances(lagrangian[ta], levelset[tb], spacing=h / 20)
        rows.append({"t": t, "hausdorff": haus, "mean_distance": mean, "hausdorff_over_h": haus / h})
    return {"schema_version": SCHEMA_VERSION, "h": h, "times": rows}


def compare_methods(lagrangian_dir, levelset_dir, times=None, out: Path | str | None = None,
                    plot_data: bool = False) -> dict:
    """Compare saved Lagrangian and level-set runs at common times.

    Without `times` every time saved by both runs is compared.
    """
    a, sa = load_run_curves(lagrangian_dir)
    b, sb = load_run_curves(levelset_dir)
    if sa["method"] != "lagrangian" or sb["method"] != "levelset":
        raise HarnessError("expected a lagrangian run and a levelset run")
    if times is None:
        times = [t for t in sorted(a) if _match_time(t, b) is not None]
    report = compare_curves(a, b, times, float(sb["spec"]["h"]))
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.json").write_text(json.dumps(report, indent=2), encoding="utf-8")
        if plot_data:
            with open(out / "hausdorff.dat", "w", encoding="utf-8") as fh:
                for row in report["times"]:
                    fh.write(f"{row['t']:.10g} {row['hausdorff']:.10g}\n")
    return report


def with_overrides(spec: ExperimentSpec, **changes) -> ExperimentSpec:
    new = replace(spec, **changes)
    new.validate()
    return new
