"""Gaussian kernel family and the quadrature engine for (e^w * k_y)(x).

The family is built from the heat kernel phi(s) = exp(-s^2)/sqrt(pi) and its
derivative psi = phi'.  The complex kernels Alpha and Beta are the fixed
combinations that produce the anti-holomorphic and holomorphic derivatives
of the extension field when convolved against e^w:

    alpha(s) = -phi''(s)/4 + (3i/4) psi(s) = ((1/2 - s^2) - (3i/2) s) phi(s)
    beta(s)  = phi(s) + phi''(s)/4 + (i/4) psi(s) = ((1/2 + s^2) - (i/2) s) phi(s)

They follow from expanding F_zbar = ((U_x - V_y) + i U_y + i V_x)/2 and
F_z = U_x + (-(U_x - V_y) - i U_y + i V_x)/2 with the convolution identities
U_x = e^u * phi_y, V_x = e^u * psi_y, U_y = V_x / 2, and
V_y = U_x + e^u * (phi''/2)_y.  Moments: integral of alpha is 0, of beta
is 1, and the first moment of psi is -1 (which pins F = id for u = 0).

All kernels are scaled by a_y(t) = a(t/y) / y.  Convolutions are plain
trapezoid sums on the data lattice; periodic data are handled by summing
the kernel over integer translates of the period (exact for period-1
lifts), which turns the quadrature into a circular convolution.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .data import SampledFunction
from .errors import CoverageError, DomainError

SQRT_PI = np.sqrt(np.pi)


class KernelId(str, enum.Enum):
    Phi = "Phi"
    Psi = "Psi"
    Alpha = "Alpha"
    Beta = "Beta"
    PhiSecond = "PhiSecond"


def _gauss(s):
    return np.exp(-np.square(s)) / SQRT_PI


@dataclass(frozen=True)
class Kernel:
    """One member of the kernel family.

    `evaluator` maps real s to the (complex) kernel value; `gauss_factor`
    is the polynomial P with k(s) = P(s) exp(-s^2)/sqrt(pi), used by the
    Gauss-Hermite rule.  `truncation_radius` is the default half-width of
    the integration window in units of s = t/y; `moment0`/`moment1` are
    the analytic values of the zeroth and first moments.
    """

    id: KernelId | str
    evaluator: Callable[[np.ndarray], np.ndarray]
    gauss_factor: Callable[[np.ndarray], np.ndarray]
    truncation_radius: float
    moment0: complex
    moment1: complex


PHI = Kernel(KernelId.Phi, lambda s: _gauss(s) + 0j, lambda s: np.ones_like(s) + 0j, 8.0, 1.0, 0.0)
PSI = Kernel(KernelId.Psi, lambda s: -2.0 * s * _gauss(s) + 0j, lambda s: -2.0 * s + 0j, 8.0, 0.0, -1.0)
PHI_SECOND = Kernel(
    KernelId.PhiSecond,
    lambda s: (4.0 * np.square(s) - 2.0) * _gauss(s) + 0j,
    lambda s: 4.0 * np.square(s) - 2.0 + 0j,
    8.0,
    0.0,
    0.0,
)
ALPHA = Kernel(
    KernelId.Alpha,
    lambda s: ((0.5 - np.square(s)) - 1.5j * s) * _gauss(s),
    lambda s: (0.5 - np.square(s)) - 1.5j * s,
    8.0,
    0.0,
    -0.75j,
)
BETA = Kernel(
    KernelId.Beta,
    lambda s: ((0.5 + np.square(s)) - 0.5j * s) * _gauss(s),
    lambda s: (0.5 + np.square(s)) - 0.5j * s,
    8.0,
    1.0,
    -0.25j,
)

# Rate-of-change kernel for the vertical derivative of V: the y-derivative
# of psi_y equals (1/y) e_y with e(s) = 4 s (1 - s^2) phi(s).  Internal use.
_V_RATE = Kernel(
    "_VRate",
    lambda s: 4.0 * s * (1.0 - np.square(s)) * _gauss(s) + 0j,
    lambda s: 4.0 * s * (1.0 - np.square(s)) + 0j,
    8.0,
    0.0,
    -1.0,
)

KERNELS: dict[KernelId, Kernel] = {
    KernelId.Phi: PHI,
    KernelId.Psi: PSI,
    KernelId.Alpha: ALPHA,
    KernelId.Beta: BETA,
    KernelId.PhiSecond: PHI_SECOND,
}


def eval_kernel(k: Kernel, s) -> complex | np.ndarray:
    """Kernel value at s (scalar or array); a total function."""
    out = k.evaluator(np.asarray(s, dtype=float))
    if np.isscalar(s) or np.asarray(s).ndim == 0:
        return complex(out)
    return out


def scale(k: Kernel, y: float, t) -> complex | np.ndarray:
    """Scaled kernel k_y(t) = k(t/y) / y; y must be positive."""
    if y <= 0:
        raise DomainError(f"kernel scale requires y > 0, got {y}")
    return eval_kernel(k, np.asarray(t, dtype=float) / y) / y


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature parameters for the convolution engine.

    R is the truncation multiplier: the window is [x - R*y, x + R*y]
    (widened to the kernel's own truncation radius if larger).
    """

    rule: str = "trapezoid_on_grid"
    R: float = 8.0
    min_samples_per_window: int = 32

    def __post_init__(self):
        if self.rule not in ("trapezoid_on_grid", "gauss_hermite"):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.R < 6:
            raise DomainError(f"truncation multiplier must be >= 6, got {self.R}")
        if self.min_samples_per_window < 32:
            raise DomainError(
                f"min_samples_per_window must be >= 32, got {self.min_samples_per_window}"
            )


DEFAULT_QUADRATURE = QuadratureSpec()


def effective_radius(k: Kernel, q: QuadratureSpec) -> float:
    return max(k.truncation_radius, q.R)


# ---------------------------------------------------------------------------
# lattice machinery

def wrapped_lattice_weights(k: Kernel, y: float, n: int, period: float = 1.0,
                            R: float = 8.0) -> np.ndarray:
    """Trapezoid weights h * sum_m k_y(l*h + m*period) on the periodic lattice.

    Index l runs over 0..n-1 and is read modulo n, so convolving data with
    this vector circularly reproduces the full lattice sum over all integer
    translates within R*y + 3 periods.
    """
    if y <= 0:
        raise DomainError(f"need y > 0, got {y}")
    h = period / n
    l = np.arange(n)
    delta = ((l * h + period / 2) % period) - period / 2
    m_max = int(np.ceil((R * y) / period)) + 3
    m = np.arange(-m_max, m_max + 1) * period
    offs = delta[None, :] + m[:, None]
    vals = k.evaluator(offs / y) / y
    return h * vals.sum(axis=0)


def circular_convolve(data: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """(data ⊛ weights)_i = sum_j data_j * weights_{(i-j) mod n}."""
    return np.fft.ifft(np.fft.fft(data) * np.fft.fft(weights))


def _periodic_point_sum(w: SampledFunction, k: Kernel, x: float, y: float,
                        R: float, data: np.ndarray) -> complex:
    n = w.n
    period = w.domain.length
    h = period / n
    t = w.domain.a + h * np.arange(n)
    delta = x - t
    delta = ((delta + period / 2) % period) - period / 2
    m_max = int(np.ceil((R * y) / period)) + 3
    m = np.arange(-m_max, m_max + 1) * period
    offs = delta[None, :] + m[:, None]
    kern = (k.evaluator(offs / y) / y).sum(axis=0)
    return complex(h * np.dot(data, kern))


def _spline_evaluator(w: SampledFunction):
    """Cubic interpolant of the raw samples of w (periodic where the data are)."""
    if w.periodic:
        xs = np.append(w.x, w.domain.b)
        vals = np.append(w.values, w.values[0])
        re = CubicSpline(xs, vals.real, bc_type="periodic")
        im = CubicSpline(xs, vals.imag, bc_type="periodic")
        period = w.domain.length
        a = w.domain.a

        def ev(t):
            tt = a + ((np.asarray(t, dtype=float) - a) % period)
            return re(tt) + 1j * im(tt)

        return ev
    re = CubicSpline(w.x, w.values.real)
    im = CubicSpline(w.x, w.values.imag)
    return lambda t: re(np.asarray(t, dtype=float)) + 1j * im(np.asarray(t, dtype=float))


def convolve(w: SampledFunction, k: Kernel, x: float, y: float,
             q: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """Numeric (e^w * k_y)(x); deterministic for fixed inputs and spec.

    Periodic data wrap; line data must cover the truncated window, else
    a CoverageError names the missing range.  If the window holds fewer
    lattice nodes than `min_samples_per_window`, the window is re-sampled
    on a finer uniform grid through a cubic interpolant of w.
    """
    if y <= 0:
        raise DomainError(f"convolve requires y > 0, got {y}")
    R = effective_radius(k, q)

    if q.rule == "gauss_hermite":
        return _gauss_hermite(w, k, x, y, q)

    if w.periodic:
        window_nodes = 2 * R * y * w.n / w.domain.length
        if window_nodes >= q.min_samples_per_window or window_nodes >= w.n:
            data = np.exp(w.values)
            return _periodic_point_sum(w, k, x, y, R, data)
        return _refined_window_sum(w, k, x, y, R, q.min_samples_per_window)

    lo, hi = x - R * y, x + R * y
    a, b = w.domain.a, w.domain.b
    if lo < a - 1e-12 or hi > b + 1e-12:
        missing = (lo, a) if lo < a else (b, hi)
        raise CoverageError(
            f"window [{lo:.6g}, {hi:.6g}] exits domain [{a:.6g}, {b:.6g}]; "
            f"missing range [{missing[0]:.6g}, {missing[1]:.6g}]",
            missing=missing,
        )
    h = w.h
    j0 = int(np.ceil((lo - a) / h - 1e-12))
    j1 = int(np.floor((hi - a) / h + 1e-12))
    count = j1 - j0 + 1
    if count < q.min_samples_per_window:
        return _refined_window_sum(w, k, x, y, R, q.min_samples_per_window)
    t = a + h * np.arange(j0, j1 + 1)
    kern = k.evaluator((x - t) / y) / y
    vals = np.exp(w.values[j0:j1 + 1]) * kern
    weights = np.full(count, h)
    weights[0] = weights[-1] = h / 2
    return complex(np.dot(vals, weights))


def _refined_window_sum(w: SampledFunction, k: Kernel, x: float, y: float,
                        R: float, n_min: int) -> complex:
    ev = _spline_evaluator(w)
    m = max(n_min, 32)
    t = np.linspace(x - R * y, x + R * y, m + 1)
    if not w.periodic:
        a, b = w.domain.a, w.domain.b
        if t[0] < a - 1e-12 or t[-1] > b + 1e-12:
            raise CoverageError(
                f"window [{t[0]:.6g}, {t[-1]:.6g}] exits domain [{a:.6g}, {b:.6g}]",
                missing=(t[0], t[-1]),
            )
    vals = np.exp(ev(t)) * (k.evaluator((x - t) / y) / y)
    return complex(np.trapezoid(vals, t))


def _gauss_hermite(w: SampledFunction, k: Kernel, x: float, y: float,
                   q: QuadratureSpec) -> complex:
    m = max(q.min_samples_per_window, 64)
    nodes, weights = np.polynomial.hermite.hermgauss(m)
    t = x - y * nodes
    if not w.periodic:
        a, b = w.domain.a, w.domain.b
        if t.min() < a - 1e-12 or t.max() > b + 1e-12:
            raise CoverageError(
                f"Gauss-Hermite window [{t.min():.6g}, {t.max():.6g}] exits "
                f"domain [{a:.6g}, {b:.6g}]",
                missing=(float(t.min()), float(t.max())),
            )
    ev = _spline_evaluator(w)
    integrand = np.exp(ev(t)) * k.gauss_factor(nodes)
    return complex(np.dot(weights, integrand) / SQRT_PI)


# ---------------------------------------------------------------------------
# diagnostics

def numeric_moment(k: Kernel, order: int = 0, R: float = 10.0, n: int = 40001) -> complex:
    """Dense trapezoid of s^order * k(s) over [-R, R]; independent check of
    the analytic moment attributes."""
    s = np.linspace(-R, R, n)
    vals = (s ** order) * k.evaluator(s)
    return complex(np.trapezoid(vals, s))


def envelope_constant(k: Kernel, s_min: float = 4.0, s_max: float = 30.0,
                      n: int = 4001) -> float:
    """Smallest C with |k(s)| <= C exp(-|s|) on |s| >= s_min (sampled)."""
    s = np.linspace(s_min, s_max, n)
    s = np.concatenate([-s[::-1], s])
    return float(np.max(np.abs(k.evaluator(s)) * np.exp(np.abs(s))))
