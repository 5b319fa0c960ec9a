"""Command-line entry point.

Subcommands: constants, criterion, kolmogorov, simulate, gevrey-diag.
Every run writes its outputs plus a run.meta echoing the configuration,
package/library versions, and the seed, so a run can be reproduced
bit-for-bit.  CSV files carry a header row and a trailing ``# checksum``
line over the data rows.

Exit codes: 0 success, 2 input error, 3 numerical failure (blow-up or
overflow-flagged state).
"""
import argparse
import configparser
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import HAS_NUMBA, resolve_backend
from .bounds import bound_chain, grashof, strip_gevrey_bound
from .dynamics import BlowUpError, IntegratorConfig, integrate
from .fieldio import FieldFormatError, read_field, write_field
from .gevrey import (GevreyWeight, check_advection_gevrey_bound,
                     check_power_log_bound, fit_growth_certificate,
                     gevrey_norm, normalized_growth_log)
from .kolmogorov import eigen_force, equilibrium_verdict, scalar_series
from .spectral import (GridSpec, inequality_audit, random_solenoidal_field,
                       zero_field)
from .taylor import (ConformalMap, criterion_verdict, radius_estimate,
                     taylor_coefficients)


def _fmt(v):
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    lines = [",".join(_fmt(x) for x in row) for row in rows]
    blob = "\n".join(lines).encode()
    digest = hashlib.sha256(blob).hexdigest()
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for line in lines:
            fh.write(line + "\n")
        fh.write(f"# checksum=sha256:{digest}\n")


def write_meta(out_dir, subcommand, params):
    import numpy
    lines = [f"subcommand={subcommand}"]
    for key in sorted(params):
        lines.append(f"{key}={params[key]}")
    lines.append(f"version={__version__}")
    lines.append(f"numpy={numpy.__version__}")
    if HAS_NUMBA:
        import numba
        lines.append(f"numba={numba.__version__}")
    else:
        lines.append("numba=absent")
    lines.append(f"backend={resolve_backend()}")
    (Path(out_dir) / "run.meta").write_text("\n".join(lines) + "\n")


def _build_force(args, grid):
    kind = args.force
    if kind == "zero":
        return zero_field(grid)
    if kind == "eigen":
        return eigen_force(tuple(args.k), args.amplitude, grid).field
    if kind == "random":
        rng = np.random.default_rng(args.seed)
        g = random_solenoidal_field(grid, rng, kmax=args.force_kmax,
                                    decay=lambda r: np.exp(-0.5 * r))
        if g.norm() > 0:
            g = (args.amplitude / g.norm()) * g
        return g
    if kind == "file":
        if not args.force_file:
            raise ValueError("--force file requires --force-file")
        return read_field(args.force_file)
    raise ValueError(f"unknown force kind {kind!r}")


# ----------------------------------------------------------------- constants

def cmd_constants(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.g_file:
        g = read_field(args.g_file)
        G = grashof(g, args.nu, args.kappa0)
    elif args.G is not None:
        G = args.G
    else:
        raise ValueError("provide --G or --g-file")
    bs = bound_chain(G, args.nu, args.kappa0, args.cL, args.cA,
                     gamma_max=args.gamma_max, tail_tol=args.tol)
    rows = bs.as_rows()
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {_fmt(float(value))}")
    if not bs.tail_ok:
        print(f"# warning: product tail {bs.product_tail!r} exceeds "
              f"tolerance {args.tol!r}; raise --gamma-max")
    write_csv(out / "bounds.csv", ["name", "value"],
              [(n, float(v)) for n, v in rows])
    write_csv(out / "gamma.csv", ["gamma", "Gamma", "eps", "eta"],
              [(int(g0), G0, e0, h0) for g0, G0, e0, h0 in bs.gamma_table])
    write_meta(out, "constants", vars(args) | {"G_effective": G})
    return 0


# ----------------------------------------------------------------- criterion

def cmd_criterion(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = GridSpec(args.K, args.kappa0)
    g = _build_force(args, grid)
    G = grashof(g, args.nu, args.kappa0) if g.norm() > 0 else 0.0
    delta = args.delta
    if delta is None:
        if G == 0:
            delta = 0.1
        else:
            delta = bound_chain(G, args.nu, args.kappa0, args.cL,
                                args.cA).delta3
    cmap = ConformalMap(delta)
    series = taylor_coefficients(g, args.nu, cmap, args.N, b=args.b)
    bound_m = args.M
    if bound_m is None:
        if G == 0:
            bound_m = 1.0
        else:
            # the certificate constant of the attractor state is approximated
            # by the force certificate (exact up to scale for eigenmode forces)
            bs = bound_chain(G, args.nu, args.kappa0, args.cL, args.cA)
            cert = fit_growth_certificate(g, args.nu)
            gw = GevreyWeight(args.b) if args.b else GevreyWeight(0.0)
            from .gevrey import apply_weight
            from .spectral import stokes_apply
            g_weighted = stokes_apply(apply_weight(g, gw), -0.5).norm()
            sb = strip_gevrey_bound(bs, args.b, delta, g_weighted, cert.c0)
            bound_m = sb.radius * args.nu
    report = criterion_verdict(series, bound_m, margin=args.margin)
    rows = []
    for n in range(1, len(series.coeffs)):
        prev = series.gnorms[n - 1]
        ratio = series.gnorms[n] / prev if prev > 0 else math.nan
        rows.append((n, float(series.gnorms[n]), float(ratio)))
    write_csv(out / "coefficients.csv", ["n", "gnorm", "ratio"], rows)
    print(f"verdict     {report.verdict.value}")
    print(f"trigger     {report.trigger}")
    print(f"rho_hat     {_fmt(report.rho)}")
    print(f"sup_sampled {_fmt(report.sup_sampled)}")
    print(f"bound_M     {_fmt(float(bound_m))}")
    print(f"note        {report.note}")
    if args.snapshots:
        for n, u in enumerate(series.coeffs):
            write_field(out / f"coefficient_{n:03d}.txt", u)
    write_meta(out, "criterion", vars(args) | {
        "delta_effective": delta, "M_effective": float(bound_m),
        "verdict": report.verdict.value})
    return 0


# ---------------------------------------------------------------- kolmogorov

def cmd_kolmogorov(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    K = max(abs(args.k[0]), abs(args.k[1]), 1)
    grid = GridSpec(K, args.kappa0)
    force = eigen_force(tuple(args.k), args.amplitude, grid)
    witness, series = equilibrium_verdict(force, args.nu, delta=args.delta,
                                          n_terms=args.N)
    rows = [(n, float(series.values[n]), int(series.signs[n]),
             float(series.log_mags[n]))
            for n in range(1, len(series.values))]
    write_csv(out / "pn.csv", ["n", "p_n", "sign", "log_mag"], rows)
    print(f"verdict                  {witness.verdict}")
    print(f"lambda                   {_fmt(witness.lam)}")
    print(f"equilibrium_norm         {_fmt(witness.equilibrium.norm())}")
    print(f"stationarity_residual    {_fmt(witness.stationarity_residual)}")
    print(f"self_advection_residual  {_fmt(witness.self_advection_residual)}")
    print(f"tail_exponent            {_fmt(witness.tail_exponent)}")
    print(f"abs_sum_divergent        {witness.abs_sum_is_divergent}")
    write_meta(out, "kolmogorov", vars(args))
    return 0


# ------------------------------------------------------------------ simulate

def cmd_simulate(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = GridSpec(args.K, args.kappa0)
    g = _build_force(args, grid)
    if args.u0 == "zero":
        u0 = zero_field(grid)
    elif args.u0 == "random":
        from .dynamics import random_initial_condition
        rng = np.random.default_rng(args.seed + 1)
        u0 = random_initial_condition(grid, args.nu, rng)
    else:
        u0 = read_field(args.u0)
    cfg = IntegratorConfig(dt=args.dt, t_end=args.t_end, theta=args.theta,
                           b=args.b, save_every=args.save_every)
    traj = integrate(u0, g, args.nu, cfg)
    resid = np.full(len(traj.rhos), math.nan)
    if args.theta == 0.0 and args.save_every == 1 and len(traj.rhos) >= 5:
        resid[2:-2] = traj.energy_residuals()
    rows = [(float(traj.rhos[i]), float(traj.norms[i]),
             float(traj.h1_norms[i]), float(traj.gnorms[i]), float(resid[i]))
            for i in range(len(traj.rhos))]
    write_csv(out / "trajectory.csv",
              ["t", "norm", "h1_norm", "gnorm", "energy_residual"], rows)
    write_field(out / "final_state.txt", traj.final)
    write_meta(out, "simulate", vars(args))
    print(f"steps       {len(traj.rhos) - 1}")
    print(f"final_norm  {_fmt(traj.final.norm())}")
    return 0


# --------------------------------------------------------------- gevrey-diag

def cmd_gevrey_diag(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.field:
        u = read_field(args.field)
    else:
        grid = GridSpec(args.K, args.kappa0)
        rng = np.random.default_rng(args.seed)
        u = random_solenoidal_field(grid, rng,
                                    decay=lambda r: np.exp(-0.3 * r))
    cert = fit_growth_certificate(u, args.nu, alpha_max=args.alpha_max)
    rows = []
    for i, alpha in enumerate(range(1, args.alpha_max + 1)):
        ld = float(cert.log_values[i])
        lb = cert.log_c0 + cert.sigma * alpha ** 2
        d_lin = math.exp(ld) if ld < 709 else math.inf
        b_lin = math.exp(lb) if lb < 709 else math.inf
        rows.append((alpha, d_lin, b_lin, ld, lb))
    write_csv(out / "certificate.csv",
              ["alpha", "d_alpha", "bound", "log_d_alpha", "log_bound"], rows)
    bs = np.linspace(0.0, args.b_max, args.b_steps)
    write_csv(out / "weights.csv", ["b", "norm"],
              [(float(b), float(gevrey_norm(u, b))) for b in bs])
    audit = inequality_audit(u, c_l=args.cL, c_a=args.cA)
    plb = check_power_log_bound(u, cert, args.epsilon, args.nu)
    adv = check_advection_gevrey_bound(u, args.b, c_a=args.cA)
    print(f"sigma                {_fmt(cert.sigma)}")
    print(f"c0                   {_fmt(cert.c0)}")
    print(f"poincare_residual    {_fmt(audit.poincare_residual)}")
    print(f"c_L_empirical        {_fmt(audit.c_l_empirical)}")
    print(f"c_A_empirical        {_fmt(audit.c_a_empirical)}")
    print(f"power_log_bound      pass={plb.passed} ratio={_fmt(plb.ratio)}")
    print(f"advection_bound      pass={adv.passed} ratio={_fmt(adv.ratio)}")
    write_meta(out, "gevrey-diag", vars(args))
    return 0


# ------------------------------------------------------------------- parsing

def _add_common(p):
    p.add_argument("--out-dir", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="rng seed")
    p.add_argument("--config", default=None,
                   help="key=value config file; section [<subcommand>]")


def _add_force_opts(p):
    p.add_argument("--force", default="zero",
                   choices=["zero", "eigen", "random", "file"])
    p.add_argument("--force-file", default=None)
    p.add_argument("--k", type=int, nargs=2, default=(1, 0),
                   metavar=("K1", "K2"))
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--force-kmax", type=int, default=4)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="gevrey-nse",
        description="Spectral Gevrey toolkit for the 2D periodic "
                    "Navier-Stokes equations")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("constants", help="evaluate the a-priori bound chain")
    p.add_argument("--G", type=float, default=None)
    p.add_argument("--g-file", default=None)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--kappa0", type=float, default=1.0)
    p.add_argument("--cL", type=float, default=1.0)
    p.add_argument("--cA", type=float, default=1.0)
    p.add_argument("--gamma-max", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-8)
    _add_common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("criterion",
                       help="complex-time series criterion for 0 in the attractor")
    _add_force_opts(p)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--kappa0", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=None,
                   help="strip half-width (default: delta3 from the chain)")
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--K", type=int, default=16)
    p.add_argument("--M", type=float, default=None,
                   help="uniform Gevrey bound (default: strip bound)")
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--cL", type=float, default=1.0)
    p.add_argument("--cA", type=float, default=1.0)
    p.add_argument("--snapshots", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("kolmogorov",
                       help="closed-form resolution for eigenmode forcing")
    p.add_argument("--k", type=int, nargs=2, default=(1, 0),
                   metavar=("K1", "K2"))
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--kappa0", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--N", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_kolmogorov)

    p = sub.add_parser("simulate", help="integrate the truncated system")
    _add_force_opts(p)
    p.add_argument("--u0", default="zero",
                   help="'zero', 'random', or a field snapshot path")
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--kappa0", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--save-every", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gevrey-diag",
                       help="growth certificate, inequality audit, weight sweep")
    p.add_argument("--field", default=None, help="field snapshot path")
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--kappa0", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--alpha-max", type=int, default=12)
    p.add_argument("--b", type=float, default=0.1)
    p.add_argument("--b-max", type=float, default=0.5)
    p.add_argument("--b-steps", type=int, default=11)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--cL", type=float, default=1.0)
    p.add_argument("--cA", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_gevrey_diag)
    return ap


def _apply_config(argv):
    """Turn [section] key=value pairs into leading flags (user flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    sub = argv[0]
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise FileNotFoundError(f"config file not found: {path}")
    tokens = []
    if cp.has_section(sub):
        for key, value in cp.items(sub):
            flag = "--" + key.replace("_", "-")
            tokens.extend([flag] + value.split())
    return [sub] + tokens + argv[1:]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and not argv[0].startswith("-"):
            argv = _apply_config(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (ValueError, FieldFormatError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (BlowUpError, OverflowError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
