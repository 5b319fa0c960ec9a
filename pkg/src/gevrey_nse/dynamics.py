"""Time integration of the Galerkin-truncated system, in real time and
along complex-time rays t0 + rho e^{i theta}.

The stepper is integrating-factor RK4: the stiff Stokes part is applied
exactly modewise through e^{-nu A e^{i theta} rho}, RK4 handles the force
and the quadratic term.  With the quadratic term switched off the scheme
is exact to rounding.  Rays are restricted to |theta| <= pi/4 so the
linear factor keeps decaying (Re e^{i theta} >= sqrt(2)/2).
"""
import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .bounds import sobolev_radius_log
from .gevrey import gevrey_norm
from .spectral import (GridSpec, SpectralField, _lattice, bilinear_advect,
                       hermitian_inner, leray_project)


class BlowUpError(RuntimeError):
    """Norm overflow during integration; carries the last finite state."""

    def __init__(self, message, last_state=None, t=None):
        super().__init__(message)
        self.last_state = last_state
        self.t = t


@dataclass
class IntegratorConfig:
    dt: float
    t_end: float
    theta: float = 0.0
    b: float = 0.0
    save_every: int = 1
    linear_only: bool = False
    scheme: str = "IFRK4"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if abs(self.theta) > math.pi / 4 + 1e-15:
            raise ValueError("|theta| must not exceed pi/4")
        if self.scheme != "IFRK4":
            raise ValueError("only the IFRK4 scheme is implemented")


def _phase(theta):
    return cmath.exp(1j * theta) if theta else 1.0


def _linear_factors(grid, nu, dt, theta):
    _, _, ksq, _ = _lattice(grid.K)
    z = nu * grid.kappa0 ** 2 * ksq * _phase(theta) * dt
    return np.exp(-z)[:, :, None], np.exp(-0.5 * z)[:, :, None]


def _cfl_guard(grid, nu, dt):
    stiff = dt * nu * grid.kappa0 ** 2 * 2.0 * grid.K ** 2
    if stiff > 50.0:
        raise ValueError(
            f"dt too large for K={grid.K}: dt*nu*kappa0^2*(K*sqrt(2))^2 = "
            f"{stiff:.3g} > 50")


def _mul_factors(u, fac, reality):
    return SpectralField(u.grid, u.coeffs * fac, reality=reality,
                         validate=False)


def step(u, g, nu, dt, theta=0.0, linear_only=False, backend=None,
         _factors=None):
    """One IFRK4 step of du/drho = e^{i theta} (g - nu A u - B(u, u))."""
    _cfl_guard(u.grid, nu, dt)
    e_full, e_half = _factors if _factors is not None else \
        _linear_factors(u.grid, nu, dt, theta)
    phase = _phase(theta)
    real_out = u.reality and g.reality and theta == 0.0

    def nonlin(w):
        if linear_only:
            return phase * g
        return phase * (g - bilinear_advect(w, w, backend=backend))

    k1 = nonlin(u)
    u_a = _mul_factors(u + (dt / 2.0) * k1, e_half, real_out)
    n_a = nonlin(u_a)
    u_b = _mul_factors(u, e_half, real_out) + (dt / 2.0) * n_a
    n_b = nonlin(u_b)
    u_c = _mul_factors(u, e_full, real_out) \
        + dt * _mul_factors(n_b, e_half, real_out)
    n_c = nonlin(u_c)
    out = _mul_factors(u, e_full, real_out) + (dt / 6.0) * (
        _mul_factors(k1, e_full, real_out)
        + 2.0 * _mul_factors(n_a + n_b, e_half, real_out)
        + n_c)
    nrm = out.norm()
    if not math.isfinite(nrm) or nrm > 1e300:
        raise BlowUpError("norm overflow during step", last_state=u)
    return out


@dataclass
class Trajectory:
    """Saved states with per-state diagnostics along a (possibly complex) ray."""

    theta: float
    b: float
    rhos: np.ndarray
    states: List[SpectralField] = field(repr=False)
    norms: np.ndarray = field(repr=False, default=None)
    h1_norms: np.ndarray = field(repr=False, default=None)
    gnorms: np.ndarray = field(repr=False, default=None)
    energies: np.ndarray = field(repr=False, default=None)
    dissipations: np.ndarray = field(repr=False, default=None)
    injections: np.ndarray = field(repr=False, default=None)

    @property
    def times(self):
        return self.rhos * _phase(self.theta)

    @property
    def final(self):
        return self.states[-1]

    def energy_residuals(self):
        """Relative residual of d(|u|^2/2)/dt + nu |A^{1/2}u|^2 - (g, u),
        with d/dt from the 4th-order central 5-point stencil.

        Defined for real-time runs saved every step; size len-4.
        """
        if self.theta != 0.0:
            raise ValueError("energy audit applies to real-time runs")
        h = self.rhos[1] - self.rhos[0]
        e = self.energies
        dedt = (-e[4:] + 8 * e[3:-1] - 8 * e[1:-3] + e[:-4]) / (12.0 * h)
        mid = slice(2, len(e) - 2)
        resid = dedt + self.dissipations[mid] - self.injections[mid]
        scale = np.maximum(np.abs(self.dissipations[mid])
                           + np.abs(self.injections[mid]), 1e-300)
        return resid / scale


def integrate(u0, g, nu, cfg, backend=None):
    """March u0 to t_end, saving every cfg.save_every steps (plus the
    initial state); diagnostics per saved state: |u|, |A^{1/2}u|, |u|_b,
    and the three energy-balance ingredients."""
    n_steps = int(round(cfg.t_end / cfg.dt))
    if abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * max(cfg.t_end, 1.0):
        raise ValueError("t_end must be an integer multiple of dt")
    factors = _linear_factors(u0.grid, nu, cfg.dt, cfg.theta)
    u = u0
    rhos = [0.0]
    states = [u]
    diag = {k: [] for k in ("n", "h1", "g", "E", "D", "P")}

    def record(w):
        diag["n"].append(w.norm())
        diag["h1"].append(w.sobolev_norm(1))
        diag["g"].append(gevrey_norm(w, cfg.b) if cfg.b else w.norm())
        diag["E"].append(0.5 * w.energy())
        diag["D"].append(nu * w.sobolev_norm(1) ** 2)
        diag["P"].append(hermitian_inner(g, w).real)

    record(u)
    for i in range(1, n_steps + 1):
        try:
            u = step(u, g, nu, cfg.dt, theta=cfg.theta,
                     linear_only=cfg.linear_only, backend=backend,
                     _factors=factors)
        except BlowUpError as err:
            err.t = i * cfg.dt
            raise
        if i % cfg.save_every == 0 or i == n_steps:
            rhos.append(i * cfg.dt)
            states.append(u)
            record(u)
    return Trajectory(theta=cfg.theta, b=cfg.b, rhos=np.array(rhos),
                      states=states,
                      norms=np.array(diag["n"]), h1_norms=np.array(diag["h1"]),
                      gnorms=np.array(diag["g"]), energies=np.array(diag["E"]),
                      dissipations=np.array(diag["D"]),
                      injections=np.array(diag["P"]))


def random_initial_condition(grid, nu, rng, kmax=4):
    """Random solenoidal state: modes |k|_inf <= kmax, coefficient
    components uniform in [-nu kappa0, nu kappa0], Leray-projected."""
    kmax = min(kmax, grid.K)
    amp = nu * grid.kappa0
    n = grid.n
    c = np.zeros((n, n, 2), np.complex128)
    lo, hi = grid.K - kmax, grid.K + kmax + 1
    shape = (2 * kmax + 1, 2 * kmax + 1, 2)
    c[lo:hi, lo:hi] = rng.uniform(-amp, amp, shape) \
        + 1j * rng.uniform(-amp, amp, shape)
    c[grid.K, grid.K] = 0.0
    c = 0.5 * (c + np.conj(c[::-1, ::-1]))
    return leray_project(c, grid)


def _worker_count(n_tasks):
    env = os.environ.get("GEVREY_NSE_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


@dataclass
class AttractorSample:
    """Post-transient ensemble states approximating the attractor."""

    fields: List[SpectralField]
    min_norm: float
    max_norm: float
    min_gnorm: float
    max_gnorm: float
    failures: List[str]

    def distance_to_zero(self):
        return self.min_norm

    def sobolev_slack_table(self, bound_set, alpha_max=4):
        """Rows (alpha, ln max |A^{(alpha+1)/2}u|, ln bound, slack) comparing
        sample norms against R_{alpha+1} nu kappa0^{alpha+1}."""
        nu, kappa0 = bound_set.nu, bound_set.kappa0
        small = {1: bound_set.Rt1, 2: bound_set.Rt2, 3: bound_set.Rt3}
        rows = []
        for alpha in range(0, alpha_max + 1):
            m = alpha + 1
            lhs = max(u.sobolev_norm(m) for u in self.fields)
            log_lhs = math.log(lhs) if lhs > 0 else -math.inf
            log_r = math.log(small[m]) if m <= 3 else \
                sobolev_radius_log(float(m), bound_set)
            log_bound = log_r + math.log(nu) + m * math.log(kappa0)
            rows.append((alpha, log_lhs, log_bound, log_bound - log_lhs))
        return rows


def attractor_sample(g, nu, ensemble_size, t_transient, t_sample, cfg,
                     seed=0, n_samples=1):
    """Integrate an ensemble of random initial states past the transient and
    collect n_samples states per member, spaced t_sample apart.

    Deterministic for a given seed: member m uses default_rng([seed, m]),
    and results are gathered in member order regardless of scheduling.
    Blow-ups are reported per member without aborting the ensemble.
    """
    grid = g.grid

    def run(member):
        rng = np.random.default_rng([seed, member])
        u = random_initial_condition(grid, nu, rng)
        out = []
        cfg_tr = IntegratorConfig(dt=cfg.dt, t_end=t_transient, b=cfg.b,
                                  save_every=10 ** 9)
        u = integrate(u, g, nu, cfg_tr).final
        out.append(u)
        cfg_s = IntegratorConfig(dt=cfg.dt, t_end=t_sample, b=cfg.b,
                                 save_every=10 ** 9)
        for _ in range(n_samples - 1):
            u = integrate(u, g, nu, cfg_s).final
            out.append(u)
        return out

    fields, failures = [], []
    with ThreadPoolExecutor(max_workers=_worker_count(ensemble_size)) as pool:
        futures = [pool.submit(run, m) for m in range(ensemble_size)]
        for m, fut in enumerate(futures):
            try:
                fields.extend(fut.result())
            except BlowUpError as err:
                failures.append(f"member {m}: {err}")
    if not fields:
        raise BlowUpError("every ensemble member blew up")
    norms = [u.norm() for u in fields]
    gn = [gevrey_norm(u, cfg.b) if cfg.b else u.norm() for u in fields]
    return AttractorSample(fields=fields,
                           min_norm=min(norms), max_norm=max(norms),
                           min_gnorm=min(gn), max_gnorm=max(gn),
                           failures=failures)


@dataclass
class RayProfile:
    theta: float
    rhos: np.ndarray
    gnorms: np.ndarray
    sup_gnorm: float
    reached_delta: bool
    failure: Optional[str] = None


def gevrey_along_ray(u0, g, nu, delta, b, cfg,
                     thetas=(-math.pi / 4, -math.pi / 8, 0.0,
                             math.pi / 8, math.pi / 4)):
    """Track |u(t0 + rho e^{i theta})|_b until |Im| reaches delta.

    The theta = 0 ray has no imaginary part and is integrated to rho =
    4 delta for reference.  A blow-up before the target is reported as an
    empirically narrower strip.
    """

    def run(theta):
        rho_max = 4.0 * delta if theta == 0.0 else delta / abs(math.sin(theta))
        n_steps = max(1, math.ceil(rho_max / cfg.dt))
        ray_cfg = IntegratorConfig(dt=rho_max / n_steps, t_end=rho_max,
                                   theta=theta, b=b,
                                   save_every=cfg.save_every)
        try:
            traj = integrate(u0, g, nu, ray_cfg)
            return RayProfile(theta=theta, rhos=traj.rhos, gnorms=traj.gnorms,
                              sup_gnorm=float(np.max(traj.gnorms)),
                              reached_delta=True)
        except BlowUpError as err:
            return RayProfile(theta=theta, rhos=np.array([]),
                              gnorms=np.array([]), sup_gnorm=math.inf,
                              reached_delta=False, failure=str(err))

    with ThreadPoolExecutor(max_workers=_worker_count(len(thetas))) as pool:
        return list(pool.map(run, thetas))
