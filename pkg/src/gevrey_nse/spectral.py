"""Truncated Fourier representation of 2D periodic, mean-zero,
divergence-free vector fields, and the exact spectral operators on them.

A field u on [0, L]^2 is stored through its Fourier coefficients uhat(k),
k in Z^2 \\ {0}, |k|_inf <= K, as a dense complex array of shape
(2K+1, 2K+1, 2) indexed by k + K.  The base wavenumber is kappa0 = 2*pi/L
and the Stokes operator acts modewise with eigenvalue kappa0^2 |k|^2.

Fields are immutable after construction (the coefficient array is marked
read-only), so every operation here is a pure function and safe to run
concurrently.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from ._kernels import convolve_raw, convolve_raw_sym


class Dealias(Enum):
    """Output-mode policy for the quadratic term."""

    TRUNCATE = "truncate"   # keep |k|_inf <= K (Galerkin dynamics)
    EXTEND = "extend"       # keep the full convolution support |k|_inf <= 2K


@dataclass(frozen=True)
class GridSpec:
    """Truncation radius K and base wavenumber kappa0 = 2*pi/L."""

    K: int
    kappa0: float = 1.0
    dealias: Dealias = Dealias.TRUNCATE

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if not self.kappa0 > 0:
            raise ValueError("kappa0 must be positive")

    @property
    def n(self):
        return 2 * self.K + 1

    @property
    def length(self):
        return 2.0 * math.pi / self.kappa0

    def compatible(self, other):
        return self.K == other.K and self.kappa0 == other.kappa0


@lru_cache(maxsize=None)
def _lattice(K):
    """Shared integer-lattice helper arrays for truncation K."""
    r = np.arange(-K, K + 1, dtype=np.float64)
    k1 = r[:, None]
    k2 = r[None, :]
    ksq = k1 * k1 + k2 * k2
    ksq_safe = ksq.copy()
    ksq_safe[K, K] = 1.0  # center sentinel; the k=0 coefficient is always 0
    for a in (k1, k2, ksq, ksq_safe):
        a.setflags(write=False)
    return k1, k2, ksq, ksq_safe


class SpectralField:
    """Immutable coefficient container; see module docstring for layout."""

    __slots__ = ("grid", "coeffs", "reality", "_energy")

    def __init__(self, grid, coeffs, reality=True, validate=True):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != (grid.n, grid.n, 2):
            raise ValueError(f"coefficient array must have shape {(grid.n, grid.n, 2)}")
        if validate and np.any(coeffs[grid.K, grid.K] != 0):
            raise ValueError("the k=0 coefficient must be absent (mean-zero field)")
        coeffs = np.ascontiguousarray(coeffs)
        coeffs.setflags(write=False)
        self.grid = grid
        self.coeffs = coeffs
        self.reality = bool(reality)
        self._energy = None

    # -- norms ---------------------------------------------------------

    def energy(self):
        """|u|^2 = L^2 sum |uhat(k)|^2, computed exactly in that form."""
        if self._energy is None:
            self._energy = self.grid.length ** 2 * float(
                np.sum(np.abs(self.coeffs) ** 2))
        return self._energy

    def norm(self):
        return math.sqrt(self.energy())

    def sobolev_norm(self, alpha):
        """|A^{alpha/2} u| with A the Stokes operator."""
        _, _, _, ksq_safe = _lattice(self.grid.K)
        lam = (self.grid.kappa0 ** 2 * ksq_safe) ** alpha
        s = np.sum(lam[:, :, None] * np.abs(self.coeffs) ** 2)
        return math.sqrt(self.grid.length ** 2 * float(s))

    # -- invariant diagnostics ------------------------------------------

    def divergence_residual(self):
        """max_k |k . uhat(k)| relative to |k| |uhat(k)|."""
        k1, k2, _, _ = _lattice(self.grid.K)
        dot = k1 * self.coeffs[:, :, 0] + k2 * self.coeffs[:, :, 1]
        scale = np.sqrt(k1 ** 2 + k2 ** 2) * np.abs(self.coeffs).max(axis=2)
        scale = np.maximum(scale, 1e-300)
        return float(np.max(np.abs(dot) / scale))

    def conjugate_symmetry_residual(self):
        c = self.coeffs
        diff = np.abs(c - np.conj(c[::-1, ::-1]))
        scale = max(float(np.abs(c).max()), 1e-300)
        return float(diff.max()) / scale

    def n_active_modes(self):
        return int(np.count_nonzero(np.abs(self.coeffs).sum(axis=2)))

    # -- arithmetic ------------------------------------------------------

    def _like(self, coeffs, reality):
        return SpectralField(self.grid, coeffs, reality=reality, validate=False)

    def __add__(self, other):
        if not self.grid.compatible(other.grid):
            raise ValueError("grid mismatch")
        return self._like(self.coeffs + other.coeffs,
                          self.reality and other.reality)

    def __sub__(self, other):
        if not self.grid.compatible(other.grid):
            raise ValueError("grid mismatch")
        return self._like(self.coeffs - other.coeffs,
                          self.reality and other.reality)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        real_factor = scalar.imag == 0.0
        if real_factor:
            return self._like(self.coeffs * scalar.real, self.reality)
        return self._like(self.coeffs * scalar, False)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.coeffs, self.reality)


def zero_field(grid, reality=True):
    return SpectralField(grid, np.zeros((grid.n, grid.n, 2), np.complex128),
                         reality=reality, validate=False)


def field_from_modes(grid, modes, reality=True, tol=1e-12):
    """Build a field from a sparse map {(k1, k2): (c1, c2)}.

    With reality=True the conjugate partner of any mode given only once is
    filled in automatically.  Modes must be solenoidal: k . uhat(k) = 0.
    """
    c = np.zeros((grid.n, grid.n, 2), np.complex128)
    K = grid.K
    for (k1, k2), vec in modes.items():
        if k1 == 0 and k2 == 0:
            raise ValueError("mode k=0 is not representable (mean-zero field)")
        if abs(k1) > K or abs(k2) > K:
            raise ValueError(f"mode {(k1, k2)} outside |k|_inf <= {K}")
        vec = np.asarray(vec, dtype=np.complex128)
        dot = k1 * vec[0] + k2 * vec[1]
        if abs(dot) > tol * max(1.0, float(np.abs(vec).max())):
            raise ValueError(f"mode {(k1, k2)} is not divergence-free")
        c[k1 + K, k2 + K] = vec
    if reality:
        for (k1, k2), vec in list(modes.items()):
            if (-k1, -k2) not in modes:
                c[-k1 + K, -k2 + K] = np.conj(np.asarray(vec, np.complex128))
        mirror = np.conj(c[::-1, ::-1])
        if np.abs(c - mirror).max() > tol * max(1.0, np.abs(c).max()):
            raise ValueError("modes violate conjugate symmetry for a real field")
    return SpectralField(grid, c, reality=reality, validate=False)


def _project_coeffs(c, K):
    """Remove the component along k from every coefficient, in place."""
    k1, k2, _, ksq_safe = _lattice(K)
    dot = (k1 * c[:, :, 0] + k2 * c[:, :, 1]) / ksq_safe
    c[:, :, 0] -= dot * k1
    c[:, :, 1] -= dot * k2
    return c


def leray_project(raw, grid, reality=True):
    """Helmholtz-Leray projection of raw coefficients onto solenoidal fields.

    ``raw`` is a sparse map {(k1, k2): (c1, c2)} or a dense coefficient
    array; an entry at k=0 is rejected.
    """
    if isinstance(raw, dict):
        if (0, 0) in raw:
            raise ValueError("entry at k=0 is not allowed")
        c = np.zeros((grid.n, grid.n, 2), np.complex128)
        K = grid.K
        for (k1, k2), vec in raw.items():
            if abs(k1) > K or abs(k2) > K:
                raise ValueError(f"mode {(k1, k2)} outside |k|_inf <= {K}")
            c[k1 + K, k2 + K] = np.asarray(vec, np.complex128)
    else:
        c = np.array(raw, dtype=np.complex128, copy=True)
        if c.shape != (grid.n, grid.n, 2):
            raise ValueError("bad coefficient array shape")
        if np.any(c[grid.K, grid.K] != 0):
            raise ValueError("entry at k=0 is not allowed")
    _project_coeffs(c, grid.K)
    return SpectralField(grid, c, reality=reality, validate=False)


def stokes_apply(u, sigma):
    """A^sigma u: multiply uhat(k) by (kappa0^2 |k|^2)^sigma."""
    if sigma == 0:
        return u
    _, _, _, ksq_safe = _lattice(u.grid.K)
    factor = (u.grid.kappa0 ** 2 * ksq_safe) ** sigma
    return SpectralField(u.grid, u.coeffs * factor[:, :, None],
                         reality=u.reality, validate=False)


def inner_product(u, v):
    """(u, v) = L^2 sum_k uhat(k) . vhat(-k) (no conjugation).

    Real-valued (up to rounding) when both fields carry reality=True.
    """
    if not u.grid.compatible(v.grid):
        raise ValueError("grid mismatch")
    s = np.sum(u.coeffs * v.coeffs[::-1, ::-1, :])
    return u.grid.length ** 2 * complex(s)


def hermitian_inner(u, v):
    """Hermitian pairing L^2 sum_k uhat(k) . conj(vhat(k)).

    Coincides with inner_product for real fields; this is the inner
    product under which norm() is the length of complexified fields.
    """
    if not u.grid.compatible(v.grid):
        raise ValueError("grid mismatch")
    s = np.sum(u.coeffs * np.conj(v.coeffs))
    return u.grid.length ** 2 * complex(s)


def embed(u, K_new):
    """Zero-pad onto a larger truncation radius (same kappa0)."""
    if K_new < u.grid.K:
        raise ValueError("K_new must be >= current K")
    if K_new == u.grid.K:
        return u
    grid = GridSpec(K_new, u.grid.kappa0, u.grid.dealias)
    c = np.zeros((grid.n, grid.n, 2), np.complex128)
    off = K_new - u.grid.K
    c[off:off + u.grid.n, off:off + u.grid.n] = u.coeffs
    return SpectralField(grid, c, reality=u.reality, validate=False)


def restrict(u, K_new):
    """Drop modes with |k|_inf > K_new."""
    if K_new > u.grid.K:
        raise ValueError("K_new must be <= current K")
    if K_new == u.grid.K:
        return u
    grid = GridSpec(K_new, u.grid.kappa0, u.grid.dealias)
    off = u.grid.K - K_new
    c = u.coeffs[off:off + grid.n, off:off + grid.n]
    return SpectralField(grid, c.copy(), reality=u.reality, validate=False)


def bilinear_advect(u, v, dealias=None, backend=None):
    """Projected advection term B(u, v) = P((u . grad) v).

    In coefficients: what(k) = P_k[ sum_{h+j=k} i*kappa0 (uhat(h) . j) vhat(j) ],
    with output support set by the dealias policy (TRUNCATE keeps
    |k|_inf <= K, EXTEND keeps the full finite convolution support <= 2K).
    Complexified inputs (reality=False) use the same convolution.
    """
    if not u.grid.compatible(v.grid):
        raise ValueError("grid mismatch")
    policy = dealias if dealias is not None else u.grid.dealias
    K = u.grid.K
    K_out = 2 * K if policy is Dealias.EXTEND else K
    raw = convolve_raw(u.coeffs, v.coeffs, K, K_out, backend=backend)
    c = 1j * u.grid.kappa0 * raw
    c[K_out, K_out] = 0.0
    _project_coeffs(c, K_out)
    grid_out = u.grid if K_out == K else GridSpec(K_out, u.grid.kappa0, u.grid.dealias)
    return SpectralField(grid_out, c, reality=u.reality and v.reality,
                         validate=False)


def bilinear_advect_pair(u, v, dealias=None, backend=None):
    """B(u, v) + B(v, u) in one fused convolution pass."""
    if not u.grid.compatible(v.grid):
        raise ValueError("grid mismatch")
    policy = dealias if dealias is not None else u.grid.dealias
    K = u.grid.K
    K_out = 2 * K if policy is Dealias.EXTEND else K
    raw = convolve_raw_sym(u.coeffs, v.coeffs, K, K_out, backend=backend)
    c = 1j * u.grid.kappa0 * raw
    c[K_out, K_out] = 0.0
    _project_coeffs(c, K_out)
    grid_out = u.grid if K_out == K else GridSpec(K_out, u.grid.kappa0, u.grid.dealias)
    return SpectralField(grid_out, c, reality=u.reality and v.reality,
                         validate=False)


def random_solenoidal_field(grid, rng, kmax=None, scale=1.0, decay=None,
                            reality=True):
    """Random divergence-free field; reproducible from the supplied rng.

    decay, if given, is a callable on |k| applied as a radial amplitude
    profile.
    """
    kmax = grid.K if kmax is None else min(kmax, grid.K)
    n = grid.n
    c = np.zeros((n, n, 2), np.complex128)
    lo, hi = grid.K - kmax, grid.K + kmax + 1
    block = rng.standard_normal((2 * kmax + 1, 2 * kmax + 1, 2)) \
        + 1j * rng.standard_normal((2 * kmax + 1, 2 * kmax + 1, 2))
    c[lo:hi, lo:hi] = scale * block
    if decay is not None:
        _, _, _, ksq_safe = _lattice(grid.K)
        c *= decay(np.sqrt(ksq_safe))[:, :, None]
    c[grid.K, grid.K] = 0.0
    if reality:
        c = 0.5 * (c + np.conj(c[::-1, ::-1]))
    _project_coeffs(c, grid.K)
    return SpectralField(grid, c, reality=reality, validate=False)


def eval_physical(u, resolution=None):
    """Sample u on an M x M physical grid, x_j = (L/M) j.

    M >= 4K+1 (the default) makes trapezoid quadrature of |u|^4 exact.
    """
    K = u.grid.K
    M = resolution if resolution is not None else 4 * K + 1
    if M < 2 * K + 1:
        raise ValueError("resolution must resolve all modes (M >= 2K+1)")
    idx = np.arange(-K, K + 1) % M
    w = np.zeros((M, M, 2), np.complex128)
    w[np.ix_(idx, idx)] = u.coeffs
    vals = np.fft.ifft2(w, axes=(0, 1)) * (M * M)
    if u.reality:
        return np.real(vals)
    return vals


@dataclass
class InequalityAudit:
    """Residuals lhs - rhs of the three classical inequalities (<= 0 passes)."""

    poincare_residual: float
    ladyzhenskaya_residual: float
    agmon_residual: float
    c_l_empirical: float
    c_a_empirical: float
    l2_norm: float
    l4_norm: float
    linf_norm: float


def inequality_audit(u, c_l=1.0, c_a=1.0, resolution=None):
    """Audit Poincare / Ladyzhenskaya / Agmon inequalities on a real field.

    The Poincare residual is nonpositive for every input; the other two
    residuals are nonpositive whenever c_l, c_a are large enough, and the
    reported empirical constants calibrate them.
    """
    if not u.reality:
        raise ValueError("inequality audit is defined for real fields")
    K = u.grid.K
    M = resolution if resolution is not None else 4 * K + 1
    if M < 4 * K:
        raise ValueError("resolution must be at least 4K points per axis")
    vals = eval_physical(u, M)
    mag2 = vals[:, :, 0] ** 2 + vals[:, :, 1] ** 2
    cell = (u.grid.length / M) ** 2
    l4 = float(np.sum(mag2 ** 2) * cell) ** 0.25
    linf = float(np.sqrt(mag2.max()))
    l2 = u.norm()
    h1 = u.sobolev_norm(1)
    h2 = u.sobolev_norm(2)
    lady_rhs = math.sqrt(2.0) * c_l * math.sqrt(l2) * math.sqrt(h1)
    agmon_rhs = c_a * math.sqrt(l2) * math.sqrt(h2)
    denom_l = math.sqrt(2.0) * math.sqrt(l2) * math.sqrt(h1)
    denom_a = math.sqrt(l2) * math.sqrt(h2)
    return InequalityAudit(
        poincare_residual=u.grid.kappa0 * l2 - h1,
        ladyzhenskaya_residual=l4 - lady_rhs,
        agmon_residual=linf - agmon_rhs,
        c_l_empirical=l4 / denom_l if denom_l > 0 else 0.0,
        c_a_empirical=linf / denom_a if denom_a > 0 else 0.0,
        l2_norm=l2, l4_norm=l4, linf_norm=linf)


@dataclass
class BoundCheck:
    """Outcome of evaluating both sides of an inequality."""

    passed: bool
    lhs: float
    rhs: float
    ratio: float
    degenerate: bool = False


def check_advection_inner_bound(u, v, w, alpha, c_a=1.0):
    """Check |(B(u,v), A^alpha w)| against the interpolation bound

        2^alpha c_A (|u|^{1/2}|Au|^{1/2} |A^{(1+alpha)/2} v|
                     + |A^{alpha/2} u| |A^{1/2} v|^{1/2} |A^{3/2} v|^{1/2})
        * |A^{alpha/2} w|,

    with prefactor 2^{alpha+3/2} when any field is complexified.
    Requires alpha > 3.
    """
    if alpha <= 3:
        raise ValueError("alpha must exceed 3")
    any_complex = not (u.reality and v.reality and w.reality)
    pref = 2.0 ** (alpha + 1.5) if any_complex else 2.0 ** alpha
    b = bilinear_advect(u, v, dealias=Dealias.EXTEND)
    w_ext = embed(w, b.grid.K)
    lhs = abs(hermitian_inner(b, stokes_apply(w_ext, alpha)))
    rhs = pref * c_a * (
        math.sqrt(u.norm()) * math.sqrt(u.sobolev_norm(2)) * v.sobolev_norm(1 + alpha)
        + u.sobolev_norm(alpha) * math.sqrt(v.sobolev_norm(1)) * math.sqrt(v.sobolev_norm(3))
    ) * w.sobolev_norm(alpha)
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return BoundCheck(passed=lhs <= rhs * (1 + 1e-12), lhs=lhs, rhs=rhs, ratio=ratio)
