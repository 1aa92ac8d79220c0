"""Extension fields on the upper half-plane and their complex dilatations.

Given a boundary datum w, the boundary curve is gamma(x) = integral of e^w
from 0 to x, and the extension is F = U + iV with U = gamma * phi_y and
V = gamma * psi_y.  The partials come from the kernel identities

    U_x = e^w * phi_y            V_x = e^w * psi_y
    U_y = gamma * d(phi_y)/dy    V_y = gamma * d(psi_y)/dy

and the complex derivatives from the fixed kernels Alpha and Beta:

    F_zbar = e^w * alpha_y       F_z = e^w * beta_y
    mu = F_zbar / F_z

For periodic data, gamma splits into a linear part (integrated in closed
form) plus a periodic part obtained by spectral antiderivative, and every
convolution against the data lattice becomes one circular FFT convolution
per kernel per level.  The vertical partials are convolved against the
periodic part of gamma directly, so the identity U_y = V_x / 2 is checked
between two genuinely independent quadrature routes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels as kq
from ._workers import run_indexed
from .data import SampledFunction
from .errors import CoverageError, DomainError, ResolutionError, SingularDenominatorError
from .kernels import (ALPHA, BETA, DEFAULT_QUADRATURE, PHI, PHI_SECOND, PSI,
                      QuadratureSpec, _V_RATE)

SINGULAR_THRESHOLD = 1e-12


@dataclass(frozen=True)
class HalfPlaneGrid:
    """Tensor grid on the upper half-plane: uniform x nodes (right endpoint
    excluded) and log-spaced y levels, ascending."""

    x_min: float
    x_max: float
    nx: int
    y_levels: np.ndarray = field(repr=False)

    def __post_init__(self):
        ys = np.ascontiguousarray(np.asarray(self.y_levels, dtype=float))
        object.__setattr__(self, "y_levels", ys)
        if self.nx < 64:
            raise DomainError(f"grid needs nx >= 64, got {self.nx}")
        if self.x_max <= self.x_min:
            raise DomainError("grid needs x_max > x_min")
        if ys.ndim != 1 or ys.size < 2:
            raise DomainError("need at least two y levels")
        if not (np.all(ys > 0) and np.all(np.diff(ys) > 0)):
            raise DomainError("y levels must be positive and strictly increasing")

    @staticmethod
    def build(x_min: float = 0.0, x_max: float = 1.0, nx: int = 2048,
              y_min: float = 1e-3, y_max: float = 4.0,
              levels_per_octave: int = 8) -> "HalfPlaneGrid":
        """Levels y_max * 2^(-k/levels_per_octave), descending until the
        first level <= y_min is included."""
        if y_min <= 0 or y_max <= y_min:
            raise DomainError("need 0 < y_min < y_max")
        K = int(np.ceil(levels_per_octave * np.log2(y_max / y_min) - 1e-9))
        ys = y_max * 2.0 ** (-np.arange(K, -1, -1) / levels_per_octave)
        return HalfPlaneGrid(x_min, x_max, nx, ys)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (self.x_max - self.x_min) * np.arange(self.nx) / self.nx

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def ny(self) -> int:
        return self.y_levels.size

    @property
    def y_min(self) -> float:
        return float(self.y_levels[0])


@dataclass(frozen=True)
class ExtensionField:
    """F = U + iV with its partials and complex derivatives on a grid.

    Arrays are (ny, nx), row j at height y_levels[j].  `gamma` holds the
    boundary curve at the x nodes.  `identity_residuals` records the sup of
    |U_y - V_x/2| and of |V_y - U_x - e^w * (phi''/2)_y| over the grid, the
    two-route consistency checks of the construction.
    """

    grid: HalfPlaneGrid
    datum: SampledFunction
    gamma: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    U_x: np.ndarray = field(repr=False)
    V_x: np.ndarray = field(repr=False)
    U_y: np.ndarray = field(repr=False)
    V_y: np.ndarray = field(repr=False)
    F_z: np.ndarray = field(repr=False)
    F_zbar: np.ndarray = field(repr=False)
    identity_residuals: dict = field(default_factory=dict)
    partials_via: str = "kernel_identities"

    @property
    def F(self) -> np.ndarray:
        return self.U + 1j * self.V

    @property
    def jacobian(self) -> np.ndarray:
        return np.abs(self.F_z) ** 2 - np.abs(self.F_zbar) ** 2

    @property
    def periodic(self) -> bool:
        return self.datum.periodic


@dataclass(frozen=True)
class BeltramiField:
    """Complex dilatation samples on a half-plane (or disk) grid."""

    grid: object
    values: np.ndarray = field(repr=False)
    denom_mag: np.ndarray | None = field(default=None, repr=False)
    periodic: bool = False

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def quasiconformal(self) -> bool:
        return self.sup_norm < 1.0

    @property
    def denom_min(self) -> float:
        if self.denom_mag is None:
            return float("nan")
        return float(np.min(self.denom_mag))


# ---------------------------------------------------------------------------
# gamma

def _periodic_parts(w: SampledFunction):
    """Split gamma' = e^w into scale * (mhat + p0') with p0 periodic.

    Returns (scale, mhat, ew, p0) where scale = exp(mean w), ew is the
    recentered weight e^(w - mean w) on the lattice, mhat its mean, and p0
    the spectral antiderivative of ew - mhat with p0(start of lattice) = 0.
    """
    wbar = complex(np.mean(w.values))
    ew = np.exp(w.values - wbar)
    scale_const = np.exp(wbar)
    n = w.n
    L = w.domain.length
    spec = np.fft.fft(ew)
    k = np.fft.fftfreq(n, d=1.0 / n)
    divisor = 2j * np.pi * k / L
    divisor[0] = 1.0
    phat = spec / divisor
    phat[0] = 0.0
    p = np.fft.ifft(phat)
    p0 = p - p[0]
    mhat = spec[0] / n
    return scale_const, mhat, ew, p0


def _periodic_eval(w: SampledFunction, p0: np.ndarray, x):
    """Evaluate the periodic antiderivative part at arbitrary x (Fourier sum)."""
    n = w.n
    L = w.domain.length
    coef = np.fft.fft(p0) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    x = np.asarray(x, dtype=float)
    phase = np.exp(2j * np.pi * np.outer(x, k) / L)
    return phase @ coef


def gamma_of(w: SampledFunction, x: float) -> complex:
    """Boundary curve value gamma(x) = integral of e^w over [0, x].

    Periodic data extend over all of R; plain line data must contain
    [0, x] (gamma(0) = 0 convention), integrated by cumulative trapezoid.
    """
    if w.periodic:
        scale_const, mhat, _, p0 = _periodic_parts(w)
        px = _periodic_eval(w, p0, [x, 0.0])
        return complex(scale_const * (mhat * x + px[0] - px[1]))
    a, b = w.domain.a, w.domain.b
    lo, hi = min(0.0, x), max(0.0, x)
    if lo < a - 1e-12 or hi > b + 1e-12:
        raise CoverageError(
            f"gamma_of needs [{lo:.6g}, {hi:.6g}] inside [{a:.6g}, {b:.6g}]",
            missing=(lo, hi),
        )
    ew = np.exp(w.values)
    h = w.h
    cum = np.concatenate([[0.0 + 0j], np.cumsum((ew[1:] + ew[:-1]) * (h / 2))])

    def at(t):
        j = int(np.floor((t - a) / h + 1e-12))
        j = min(max(j, 0), w.n - 1)
        t0 = a + j * h
        if j == w.n - 1:
            return cum[j]
        # partial cell: trapezoid of the linear interpolant
        frac = (t - t0) / h
        ev_t = ew[j] + (ew[j + 1] - ew[j]) * frac
        return cum[j] + (ew[j] + ev_t) * (t - t0) / 2

    return complex(at(x) - at(0.0))


# ---------------------------------------------------------------------------
# convolution engines

class _CircleEngine:
    """All per-level lattice convolutions for periodic data.

    When the grid's x nodes coincide with the data lattice (up to a shift),
    each convolution is a single circular FFT convolution; otherwise the
    lattice sum runs pointwise.
    """

    def __init__(self, w: SampledFunction, grid: HalfPlaneGrid, q: QuadratureSpec):
        self.w = w
        self.grid = grid
        self.q = q
        self.scale, self.mhat, self.ew, self.p0 = _periodic_parts(w)
        L = w.domain.length
        h = L / w.n
        self.period = L
        aligned = (
            abs((grid.x_max - grid.x_min) - L) < 1e-12
            and grid.nx == w.n
            and abs((grid.x_min - w.domain.a) / h - round((grid.x_min - w.domain.a) / h)) < 1e-9
        )
        self.aligned = aligned
        nodes_at_bottom = 2 * q.R * grid.y_min * w.n / L
        if nodes_at_bottom < q.min_samples_per_window - 1e-9:
            raise ResolutionError(
                f"data lattice gives {nodes_at_bottom:.1f} samples per window at "
                f"y={grid.y_min:g}; need {q.min_samples_per_window} "
                f"(refine the datum or raise y_min)"
            )
        if aligned:
            self.shift = int(round((grid.x_min - w.domain.a) / h)) % w.n
            self._fft_ew = np.fft.fft(self.ew)
            self._fft_p0 = np.fft.fft(self.p0)
        else:
            self.x_nodes = grid.x

    def _conv(self, data_fft_or_vals, kern, y, pointwise_data=None):
        R = kq.effective_radius(kern, self.q)
        if self.aligned:
            weights = kq.wrapped_lattice_weights(kern, y, self.w.n, self.period, R)
            row = np.fft.ifft(data_fft_or_vals * np.fft.fft(weights))
            if self.shift:
                row = np.roll(row, -self.shift)
            return row
        out = np.empty(self.grid.nx, dtype=complex)
        for i, x in enumerate(self.x_nodes):
            out[i] = kq._periodic_point_sum(self.w, kern, x, y, R, pointwise_data)
        return out

    def conv_ew(self, kern, y):
        return self._conv(self._fft_ew if self.aligned else None, kern, y, self.ew)

    def conv_p0(self, kern, y):
        return self._conv(self._fft_p0 if self.aligned else None, kern, y, self.p0)

    def gamma_at_nodes(self):
        x = self.grid.x
        if self.aligned:
            idx = (self.shift + np.arange(self.grid.nx)) % self.w.n
            p0x = self.p0[idx]
        else:
            p0x = _periodic_eval(self.w, self.p0, x)
        return self.scale * (self.mhat * x + p0x)


class _LineEngine:
    """Windowed lattice sums for non-periodic data; gamma by cumulative
    trapezoid anchored at the left end (an additive constant, immaterial
    for the dilatation)."""

    def __init__(self, w: SampledFunction, grid: HalfPlaneGrid, q: QuadratureSpec):
        self.w = w
        self.grid = grid
        self.q = q
        self.ew = np.exp(w.values)
        h = w.h
        self.gamma_lattice = np.concatenate(
            [[0.0 + 0j], np.cumsum((self.ew[1:] + self.ew[:-1]) * (h / 2))]
        )
        self.scale = 1.0
        y_top = grid.y_levels[-1]
        R = q.R
        lo = grid.x[0] - R * y_top
        hi = grid.x[-1] + R * y_top
        if lo < w.domain.a - 1e-12 or hi > w.domain.b + 1e-12:
            raise CoverageError(
                f"grid window [{lo:.6g}, {hi:.6g}] exits data domain "
                f"[{w.domain.a:.6g}, {w.domain.b:.6g}] at grid point "
                f"x={grid.x[0] if lo < w.domain.a else grid.x[-1]:.6g}, y={y_top:.6g}",
                missing=(lo, hi),
            )

    def _window_sum(self, data, kern, x, y):
        R = kq.effective_radius(kern, self.q)
        a = self.w.domain.a
        h = self.w.h
        j0 = max(0, int(np.ceil((x - R * y - a) / h - 1e-12)))
        j1 = min(self.w.n - 1, int(np.floor((x + R * y - a) / h + 1e-12)))
        t = a + h * np.arange(j0, j1 + 1)
        kern_vals = kern.evaluator((x - t) / y) / y
        weights = np.full(t.size, h)
        weights[0] = weights[-1] = h / 2
        return np.dot(data[j0:j1 + 1] * weights, kern_vals)

    def conv_ew(self, kern, y):
        return np.array([self._window_sum(self.ew, kern, x, y) for x in self.grid.x])

    def conv_gamma(self, kern, y):
        return np.array(
            [self._window_sum(self.gamma_lattice, kern, x, y) for x in self.grid.x]
        )

    def gamma_at_nodes(self):
        return np.interp(self.grid.x, self.w.x, self.gamma_lattice.real) + 1j * np.interp(
            self.grid.x, self.w.x, self.gamma_lattice.imag
        )


# ---------------------------------------------------------------------------
# field construction

def extend(w: SampledFunction, grid: HalfPlaneGrid,
           q: QuadratureSpec = DEFAULT_QUADRATURE) -> ExtensionField:
    """Build the extension field of w with all partials on `grid`."""
    ny, nx = grid.ny, grid.nx
    U = np.empty((ny, nx), dtype=complex)
    V = np.empty((ny, nx), dtype=complex)
    U_x = np.empty((ny, nx), dtype=complex)
    V_x = np.empty((ny, nx), dtype=complex)
    U_y = np.empty((ny, nx), dtype=complex)
    V_y = np.empty((ny, nx), dtype=complex)
    F_z = np.empty((ny, nx), dtype=complex)
    F_zbar = np.empty((ny, nx), dtype=complex)
    vy_check = np.empty((ny, nx), dtype=complex)
    ys = grid.y_levels
    x = grid.x

    if w.periodic:
        eng = _CircleEngine(w, grid, q)
        s, mhat = eng.scale, eng.mhat
        gamma = eng.gamma_at_nodes()

        def level(j):
            y = ys[j]
            U[j] = s * (mhat * x + eng.conv_p0(PHI, y))
            V[j] = s * (mhat * y + eng.conv_p0(PSI, y))
            U_x[j] = s * eng.conv_ew(PHI, y)
            V_x[j] = s * eng.conv_ew(PSI, y)
            U_y[j] = (s / y) * 0.5 * eng.conv_p0(PHI_SECOND, y)
            V_y[j] = s * (mhat + eng.conv_p0(_V_RATE, y) / y)
            F_zbar[j] = s * eng.conv_ew(ALPHA, y)
            F_z[j] = s * eng.conv_ew(BETA, y)
            vy_check[j] = s * 0.5 * eng.conv_ew(PHI_SECOND, y)

    else:
        eng = _LineEngine(w, grid, q)
        gamma = eng.gamma_at_nodes()

        def level(j):
            y = ys[j]
            U[j] = eng.conv_gamma(PHI, y)
            V[j] = eng.conv_gamma(PSI, y)
            U_x[j] = eng.conv_ew(PHI, y)
            V_x[j] = eng.conv_ew(PSI, y)
            U_y[j] = 0.5 / y * eng.conv_gamma(PHI_SECOND, y)
            V_y[j] = eng.conv_gamma(_V_RATE, y) / y
            F_zbar[j] = eng.conv_ew(ALPHA, y)
            F_z[j] = eng.conv_ew(BETA, y)
            vy_check[j] = 0.5 * eng.conv_ew(PHI_SECOND, y)

    run_indexed(level, ny)

    residuals = {
        "uy_half_vx": float(np.max(np.abs(U_y - 0.5 * V_x))),
        "vy_identity": float(np.max(np.abs(V_y - U_x - vy_check))),
    }
    return ExtensionField(grid, w, gamma, U, V, U_x, V_x, U_y, V_y, F_z, F_zbar,
                          residuals)


def _local_real_means(w: SampledFunction, grid: HalfPlaneGrid) -> np.ndarray:
    """Mean of Re w over I(x, y) = (x-y, x+y) at every grid point (periodic
    data only; used to report the recentered denominator magnitude)."""
    n = w.n
    u = w.values.real
    h = w.domain.length / n
    shift = int(round((grid.x_min - w.domain.a) / h)) % n
    out = np.empty((grid.ny, grid.nx))
    base = np.roll(u, -shift)
    csum = np.concatenate([[0.0], np.cumsum(np.tile(base, 3))])
    global_mean = float(np.mean(u))
    for j, y in enumerate(grid.y_levels):
        m = int(np.floor(y / h))
        if 2 * m + 1 >= n:
            out[j] = global_mean  # window covers the whole period
            continue
        width = 2 * m + 1
        i = np.arange(grid.nx) + n  # center copy
        out[j] = (csum[i + m + 1] - csum[i - m]) / width
    return out


def beltrami(w: SampledFunction, grid: HalfPlaneGrid,
             q: QuadratureSpec = DEFAULT_QUADRATURE) -> BeltramiField:
    """Complex dilatation mu = (e^w * alpha_y) / (e^w * beta_y) on `grid`.

    The ratio is evaluated with the weight recentered by a constant (the
    mean of w), which leaves mu unchanged and keeps e^w in floating range;
    the recorded denominator magnitude is the fully recentered
    |beta_y * e^(w - w_I(x,y))|.  A magnitude below 1e-12 raises
    SingularDenominatorError carrying the offending (x, y).
    """
    ny, nx = grid.ny, grid.nx
    num = np.empty((ny, nx), dtype=complex)
    den = np.empty((ny, nx), dtype=complex)
    ys = grid.y_levels

    if w.periodic:
        eng = _CircleEngine(w, grid, q)

        def level(j):
            y = ys[j]
            num[j] = eng.conv_ew(ALPHA, y)
            den[j] = eng.conv_ew(BETA, y)

        run_indexed(level, ny)
        wbar_re = float(np.mean(w.values.real))
        if eng.aligned:
            u_means = _local_real_means(w, grid)
        else:
            u_means = np.full((ny, nx), wbar_re)
        denom_mag = np.exp(wbar_re - u_means) * np.abs(den)
        periodic = abs((grid.x_max - grid.x_min) - w.domain.length) < 1e-12
    else:
        eng = _LineEngine(w, grid, q)

        def level(j):
            y = ys[j]
            num[j] = eng.conv_ew(ALPHA, y)
            den[j] = eng.conv_ew(BETA, y)

        run_indexed(level, ny)
        denom_mag = np.abs(den)
        periodic = False

    flat = int(np.argmin(denom_mag))
    if denom_mag.flat[flat] < SINGULAR_THRESHOLD:
        jj, ii = np.unravel_index(flat, denom_mag.shape)
        raise SingularDenominatorError(
            f"dilatation denominator {denom_mag.flat[flat]:.3e} below "
            f"{SINGULAR_THRESHOLD:g} at (x, y) = ({grid.x[ii]:.6g}, {ys[jj]:.6g})",
            x=float(grid.x[ii]), y=float(ys[jj]),
            magnitude=float(denom_mag.flat[flat]),
        )
    return BeltramiField(grid, num / den, denom_mag, periodic=periodic)


def beltrami_fd_oracle(extension: ExtensionField) -> BeltramiField:
    """Independent dilatation estimate by central differences of F.

    Second-order stencils in x (periodic wrap when the datum wraps) and in
    the non-uniform y levels; requires at least 3 levels per octave.
    """
    grid = extension.grid
    ys = grid.y_levels
    if ys.size < 3:
        raise ResolutionError("finite-difference oracle needs >= 3 y levels")
    ratios = ys[1:] / ys[:-1]
    if np.max(ratios) > 2.0 ** (1.0 / 3.0) + 1e-9:
        raise ResolutionError(
            "finite-difference oracle needs >= 3 y levels per octave; "
            f"coarsest spacing ratio is {np.max(ratios):.4f}"
        )
    F = extension.F
    hx = grid.hx
    if extension.periodic and abs((grid.x_max - grid.x_min) - extension.datum.domain.length) < 1e-12:
        # F is periodic only up to the period mass of gamma: F(x+1) = F(x) + mass
        scale_const, mhat, _, _ = _periodic_parts(extension.datum)
        mass = scale_const * mhat * extension.datum.domain.length
        F_plus = np.roll(F, -1, axis=1)
        F_plus[:, -1] += mass
        F_minus = np.roll(F, 1, axis=1)
        F_minus[:, 0] -= mass
        F_x = (F_plus - F_minus) / (2 * hx)
    else:
        F_x = np.gradient(F, hx, axis=1, edge_order=2)
    F_y = np.gradient(F, ys, axis=0, edge_order=2)
    F_zbar = 0.5 * (F_x + 1j * F_y)
    F_z = 0.5 * (F_x - 1j * F_y)
    mag = np.abs(F_z)
    if np.min(mag) < SINGULAR_THRESHOLD:
        jj, ii = np.unravel_index(int(np.argmin(mag)), mag.shape)
        raise SingularDenominatorError(
            "finite-difference F_z vanished",
            x=float(grid.x[ii]), y=float(ys[jj]), magnitude=float(np.min(mag)),
        )
    return BeltramiField(grid, F_zbar / F_z, mag, periodic=extension.periodic)


# ---------------------------------------------------------------------------
# classical box-kernel baseline

def _interval_integral(h_vals: np.ndarray, xs: np.ndarray, lo: float, hi: float) -> float:
    """Exact integral of the piecewise-linear interpolant of (xs, h_vals)
    over [lo, hi] (lo <= hi, both inside the sample range)."""
    step = xs[1] - xs[0]
    cum = np.concatenate([[0.0], np.cumsum((h_vals[1:] + h_vals[:-1]) * (step / 2))])

    def anti(t):
        j = int(np.floor((t - xs[0]) / step + 1e-12))
        j = min(max(j, 0), xs.size - 2)
        t0 = xs[j]
        frac = (t - t0) / step
        v_t = h_vals[j] + (h_vals[j + 1] - h_vals[j]) * frac
        return cum[j] + (h_vals[j] + v_t) * (t - t0) / 2

    return anti(hi) - anti(lo)


def classical_ba_extend(h: SampledFunction, r: float, grid: HalfPlaneGrid) -> ExtensionField:
    """Box-kernel extension baseline: U averages h over [x-y, x+y] and V is
    (r/2y) times the difference of the right and left half-window integrals.
    Partials are filled by central differences (flagged on the field)."""
    if r <= 0:
        raise DomainError(f"classical extension needs r > 0, got {r}")
    if not h.is_real:
        raise DomainError("classical extension needs a real-valued datum")
    hu = h.values.real
    if np.any(np.diff(hu) <= 0):
        raise DomainError("classical extension needs strictly increasing data")
    if h.periodic:
        raise DomainError("classical baseline is defined for line-interval data")
    xs = h.x
    ny, nx = grid.ny, grid.nx
    U = np.empty((ny, nx), dtype=complex)
    V = np.empty((ny, nx), dtype=complex)
    a, b = h.domain.a, h.domain.b
    ys = grid.y_levels
    gx = grid.x
    lo_needed, hi_needed = gx[0] - ys[-1], gx[-1] + ys[-1]
    if lo_needed < a - 1e-12 or hi_needed > b + 1e-12:
        raise CoverageError(
            f"windows [{lo_needed:.6g}, {hi_needed:.6g}] exit data domain "
            f"[{a:.6g}, {b:.6g}]",
            missing=(lo_needed, hi_needed),
        )

    def level(j):
        y = ys[j]
        for i, x in enumerate(gx):
            left = _interval_integral(hu, xs, x - y, x)
            right = _interval_integral(hu, xs, x, x + y)
            U[j, i] = (left + right) / (2 * y)
            V[j, i] = (r / (2 * y)) * (right - left)

    run_indexed(level, ny)

    F = U + 1j * V
    U_x = np.gradient(U, grid.hx, axis=1, edge_order=2)
    V_x = np.gradient(V, grid.hx, axis=1, edge_order=2)
    U_y = np.gradient(U, ys, axis=0, edge_order=2)
    V_y = np.gradient(V, ys, axis=0, edge_order=2)
    F_x = U_x + 1j * V_x
    F_y = U_y + 1j * V_y
    gamma = np.interp(gx, xs, hu) + 0j
    return ExtensionField(grid, h, gamma, U, V, U_x, V_x, U_y, V_y,
                          0.5 * (F_x - 1j * F_y), 0.5 * (F_x + 1j * F_y),
                          identity_residuals={},
                          partials_via="finite_differences")
