"""Hot convolution kernels for the spectral advection term.

All backends compute the same raw (unprojected, unscaled) lattice sum

    t_m(k) = sum_{h+j=k} (uhat(h) . j) vhat_m(j),   |k|_inf <= k_out,

over coefficient arrays of shape (2*k_in+1, 2*k_in+1, 2) indexed by k + k_in.

Backends:
  numba  -- @njit direct summation (default when numba imports)
  numpy  -- pure-numpy direct summation, vectorized over the j lattice
  fft    -- zero-padded FFT convolution (accelerated path; must match the
            direct sum to ~1e-12 relative)

Selection: GEVREY_NSE_BACKEND env var (auto|numba|numpy|fft), or per-call
``backend=`` argument.
"""
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False


def _conv_direct_numpy(u, v, k_in, k_out):
    n_out = 2 * k_out + 1
    out = np.zeros((n_out, n_out, 2), dtype=np.complex128)
    j1 = np.arange(-k_in, k_in + 1, dtype=np.float64)[:, None]
    j2 = np.arange(-k_in, k_in + 1, dtype=np.float64)[None, :]
    for h1 in range(-k_in, k_in + 1):
        lo1, hi1 = max(-k_out - h1, -k_in), min(k_out - h1, k_in)
        if lo1 > hi1:
            continue
        for h2 in range(-k_in, k_in + 1):
            a0 = u[h1 + k_in, h2 + k_in, 0]
            a1 = u[h1 + k_in, h2 + k_in, 1]
            if a0 == 0 and a1 == 0:
                continue
            lo2, hi2 = max(-k_out - h2, -k_in), min(k_out - h2, k_in)
            if lo2 > hi2:
                continue
            s1 = slice(lo1 + k_in, hi1 + k_in + 1)
            s2 = slice(lo2 + k_in, hi2 + k_in + 1)
            scal = a0 * j1[s1] + a1 * j2[:, s2]
            t1 = slice(lo1 + h1 + k_out, hi1 + h1 + k_out + 1)
            t2 = slice(lo2 + h2 + k_out, hi2 + h2 + k_out + 1)
            out[t1, t2] += scal[:, :, None] * v[s1, s2]
    return out


if HAS_NUMBA:

    @njit(cache=True)
    def _conv_direct_numba(u, v, k_in, k_out):  # pragma: no cover - compiled
        n_out = 2 * k_out + 1
        out = np.zeros((n_out, n_out, 2), dtype=np.complex128)
        for i1 in range(n_out):
            k1 = i1 - k_out
            h1lo = max(-k_in, k1 - k_in)
            h1hi = min(k_in, k1 + k_in)
            for i2 in range(n_out):
                k2 = i2 - k_out
                h2lo = max(-k_in, k2 - k_in)
                h2hi = min(k_in, k2 + k_in)
                acc0 = 0.0 + 0.0j
                acc1 = 0.0 + 0.0j
                for h1 in range(h1lo, h1hi + 1):
                    j1 = k1 - h1
                    for h2 in range(h2lo, h2hi + 1):
                        j2 = k2 - h2
                        s = (u[h1 + k_in, h2 + k_in, 0] * j1
                             + u[h1 + k_in, h2 + k_in, 1] * j2)
                        acc0 += s * v[j1 + k_in, j2 + k_in, 0]
                        acc1 += s * v[j1 + k_in, j2 + k_in, 1]
                out[i1, i2, 0] = acc0
                out[i1, i2, 1] = acc1
        return out


def _conv_fft(u, v, k_in, k_out):
    # circular convolution is alias-free for modes |k| <= k_out once
    # m > 2*k_in + k_out; power-of-two padding keeps the FFTs cheap
    m = 2 * k_in + k_out + 1
    m = 1 << int(np.ceil(np.log2(m)))
    idx = np.arange(-k_in, k_in + 1) % m
    j1 = np.arange(-k_in, k_in + 1, dtype=np.float64)
    pu = np.zeros((m, m, 2), dtype=np.complex128)
    pu[np.ix_(idx, idx)] = u
    # jv[..., l, c] = j_l * vhat_c(j)
    jv = np.zeros((m, m, 2, 2), dtype=np.complex128)
    jv[np.ix_(idx, idx)] = np.stack(
        (j1[:, None, None] * v, j1[None, :, None] * v), axis=2)
    fu = np.fft.fft2(pu, axes=(0, 1))
    fjv = np.fft.fft2(jv, axes=(0, 1))
    prod = (fu[:, :, 0, None] * fjv[:, :, 0, :]
            + fu[:, :, 1, None] * fjv[:, :, 1, :])
    conv = np.fft.ifft2(prod, axes=(0, 1))
    oidx = np.arange(-k_out, k_out + 1) % m
    return np.ascontiguousarray(conv[np.ix_(oidx, oidx)])


def _conv_sym_numpy(u, v, k_in, k_out):
    n_out = 2 * k_out + 1
    out = np.zeros((n_out, n_out, 2), dtype=np.complex128)
    j1 = np.arange(-k_in, k_in + 1, dtype=np.float64)[:, None]
    j2 = np.arange(-k_in, k_in + 1, dtype=np.float64)[None, :]
    for h1 in range(-k_in, k_in + 1):
        lo1, hi1 = max(-k_out - h1, -k_in), min(k_out - h1, k_in)
        if lo1 > hi1:
            continue
        for h2 in range(-k_in, k_in + 1):
            a0 = u[h1 + k_in, h2 + k_in, 0]
            a1 = u[h1 + k_in, h2 + k_in, 1]
            b0 = v[h1 + k_in, h2 + k_in, 0]
            b1 = v[h1 + k_in, h2 + k_in, 1]
            if a0 == 0 and a1 == 0 and b0 == 0 and b1 == 0:
                continue
            lo2, hi2 = max(-k_out - h2, -k_in), min(k_out - h2, k_in)
            if lo2 > hi2:
                continue
            s1 = slice(lo1 + k_in, hi1 + k_in + 1)
            s2 = slice(lo2 + k_in, hi2 + k_in + 1)
            scal_u = a0 * j1[s1] + a1 * j2[:, s2]
            scal_v = b0 * j1[s1] + b1 * j2[:, s2]
            t1 = slice(lo1 + h1 + k_out, hi1 + h1 + k_out + 1)
            t2 = slice(lo2 + h2 + k_out, hi2 + h2 + k_out + 1)
            out[t1, t2] += (scal_u[:, :, None] * v[s1, s2]
                            + scal_v[:, :, None] * u[s1, s2])
    return out


if HAS_NUMBA:

    @njit(cache=True)
    def _conv_sym_numba(u, v, k_in, k_out):  # pragma: no cover - compiled
        n_out = 2 * k_out + 1
        out = np.zeros((n_out, n_out, 2), dtype=np.complex128)
        for i1 in range(n_out):
            k1 = i1 - k_out
            h1lo = max(-k_in, k1 - k_in)
            h1hi = min(k_in, k1 + k_in)
            for i2 in range(n_out):
                k2 = i2 - k_out
                h2lo = max(-k_in, k2 - k_in)
                h2hi = min(k_in, k2 + k_in)
                acc0 = 0.0 + 0.0j
                acc1 = 0.0 + 0.0j
                for h1 in range(h1lo, h1hi + 1):
                    j1 = k1 - h1
                    for h2 in range(h2lo, h2hi + 1):
                        j2 = k2 - h2
                        su = (u[h1 + k_in, h2 + k_in, 0] * j1
                              + u[h1 + k_in, h2 + k_in, 1] * j2)
                        sv = (v[h1 + k_in, h2 + k_in, 0] * j1
                              + v[h1 + k_in, h2 + k_in, 1] * j2)
                        acc0 += su * v[j1 + k_in, j2 + k_in, 0] \
                            + sv * u[j1 + k_in, j2 + k_in, 0]
                        acc1 += su * v[j1 + k_in, j2 + k_in, 1] \
                            + sv * u[j1 + k_in, j2 + k_in, 1]
                out[i1, i2, 0] = acc0
                out[i1, i2, 1] = acc1
        return out


def available_backends():
    names = ["numpy", "fft"]
    if HAS_NUMBA:
        names.insert(0, "numba")
    return names


def resolve_backend(name=None):
    name = name or os.environ.get("GEVREY_NSE_BACKEND", "auto").lower()
    if name == "auto":
        name = "numba" if HAS_NUMBA else "numpy"
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    if name not in ("numba", "numpy", "fft"):
        raise ValueError(f"unknown backend {name!r}")
    return name


def convolve_raw(u, v, k_in, k_out, backend=None):
    """Dispatch the raw advection convolution to the selected backend."""
    name = resolve_backend(backend)
    if name == "numba":
        return _conv_direct_numba(u, v, k_in, k_out)
    if name == "fft":
        return _conv_fft(u, v, k_in, k_out)
    return _conv_direct_numpy(u, v, k_in, k_out)


def convolve_raw_sym(u, v, k_in, k_out, backend=None):
    """Symmetrized raw sum t(u, v) + t(v, u) in a single (fused) pass."""
    name = resolve_backend(backend)
    if name == "numba":
        return _conv_sym_numba(u, v, k_in, k_out)
    if name == "fft":
        return _conv_fft(u, v, k_in, k_out) + _conv_fft(v, u, k_in, k_out)
    return _conv_sym_numpy(u, v, k_in, k_out)
