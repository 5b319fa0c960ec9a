"""Text snapshot format for spectral fields.

Layout:
    # gevrey-nse field v1 K=<K> kappa0=<val> reality=<0|1>
    k1 k2 re1 im1 re2 im2
    ...

Only nonzero modes are written.  Readers reject snapshots that violate the
divergence-free or conjugate-symmetry invariants beyond the tolerance.
"""
import re

import numpy as np

from .spectral import GridSpec, SpectralField

_HEADER = re.compile(
    r"^# gevrey-nse field v1 K=(\d+) kappa0=([^ ]+) reality=([01])$")


class FieldFormatError(ValueError):
    pass


def write_field(path, u):
    with open(path, "w") as fh:
        fh.write(f"# gevrey-nse field v1 K={u.grid.K} "
                 f"kappa0={u.grid.kappa0!r} reality={int(u.reality)}\n")
        K = u.grid.K
        for i1 in range(u.grid.n):
            for i2 in range(u.grid.n):
                c1, c2 = u.coeffs[i1, i2]
                if c1 == 0 and c2 == 0:
                    continue
                fh.write(f"{i1 - K} {i2 - K} "
                         f"{float(c1.real)!r} {float(c1.imag)!r} "
                         f"{float(c2.real)!r} {float(c2.imag)!r}\n")


def read_field(path, tol=1e-9):
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        m = _HEADER.match(header)
        if not m:
            raise FieldFormatError(f"bad header line: {header!r}")
        K = int(m.group(1))
        kappa0 = float(m.group(2))
        reality = bool(int(m.group(3)))
        grid = GridSpec(K, kappa0)
        c = np.zeros((grid.n, grid.n, 2), np.complex128)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 6:
                raise FieldFormatError(f"line {lineno}: expected 6 columns")
            k1, k2 = int(parts[0]), int(parts[1])
            if k1 == 0 and k2 == 0:
                raise FieldFormatError(f"line {lineno}: k=0 mode not allowed")
            if abs(k1) > K or abs(k2) > K:
                raise FieldFormatError(f"line {lineno}: mode outside grid")
            vals = [float(p) for p in parts[2:]]
            c[k1 + K, k2 + K] = (vals[0] + 1j * vals[1], vals[2] + 1j * vals[3])
    u = SpectralField(grid, c, reality=reality, validate=False)
    if u.divergence_residual() > tol:
        raise FieldFormatError("snapshot violates the divergence-free invariant")
    if reality and u.conjugate_symmetry_residual() > tol:
        raise FieldFormatError("snapshot violates conjugate symmetry")
    return u
