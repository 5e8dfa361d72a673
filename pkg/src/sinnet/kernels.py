"""Closed-form NNGP and NTK evaluation for sine networks, plus reference
low-pass kernels and a Gaussian-profile diagnostic fit.

Conventions (all under the NTK-parametrized network with unit-variance
parameter sampling and unit bias variance):

    base case              Sigma0(x, x~) = omega^2 (x.x~ + 1)
    NNGP recursion         Sigma_L = 1/2 e^{-(Sxx+Stt)/2}(e^{Sxt} - e^{-Sxt}) + 1
    cosine counterpart     Sdot_L  = 1/2 e^{-(Sxx+Stt)/2}(e^{Sxt} + e^{-Sxt})
    NTK recursion          Theta_L = Theta_{L-1} * Sdot_L + T_L

where T_L is the current layer's own parameter-gradient block,
E[sin u sin v] + 1. For Gaussian weights T_L equals the NNGP Sigma_L; for
uniform SIREN weights the NNGP carries an extra c^2/3 on its sin-covariance
term while T_L does not (the gradient with respect to a weight has no c
factor). Sdot has no +1: it is an expectation of a product of cosines, and
the bias of layer L already enters through T_L.

The exponentials are evaluated in the differenced form
e^{-(Sxx -/+ 2Sxt + Stt)/2}, whose exponents are <= 0 whenever Sigma is a
valid covariance, so the recursion cannot overflow.

Shallow closed forms (L = 1), with A = omega^2 (x.x~ + 1), E = e^{-2 omega^2},
G-/G+ the Gaussians of |x -/+ x~| and S-/S+ the sinc products:

    SSN:    Theta1 = 1/2 (A+1) G-  +  1/2 (A-1) G+ E  +  1
    SIREN:  Theta1 = A c^2/6 (S- + E S+)  +  1/2 (S- - E S+)  +  1

These match the recursion to machine precision and the finite-width
parameter-gradient inner product to its sampling error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class KernelFamily(Enum):
    SSN = "ssn"
    SIREN = "siren"


class ReferenceKind(Enum):
    GAUSSIAN = "gaussian"
    SINC = "sinc"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel identity: family x hidden depth x omega (x uniform bound c)."""

    family: KernelFamily
    depth: int
    omega: float
    c: float = float(np.sqrt(6.0))
    bias_variance: float = 1.0

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.family is KernelFamily.SIREN and not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.bias_variance != 1.0:
            raise ValueError("bias variance is fixed at 1.0")


@dataclass(frozen=True)
class KernelSlice:
    """Kernel values along offsets from a fixed center x~."""

    center: np.ndarray
    offsets: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.offsets) != len(self.values):
            raise ValueError("offsets and values must have equal length")


def sinc(t: np.ndarray | float) -> np.ndarray | float:
    """Unnormalized sinc, sin(t)/t, with the removable singularity patched
    by its Taylor value 1 - t^2/6 for |t| < 1e-8."""
    t = np.asarray(t, dtype=np.float64)
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    out = np.where(small, 1.0 - t * t / 6.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def _check_pair(x, x_tilde):
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    xt = np.atleast_1d(np.asarray(x_tilde, dtype=np.float64))
    if x.shape != xt.shape or x.ndim != 1:
        raise ValueError(f"x and x~ must be equal-length vectors, got {x.shape} vs {xt.shape}")
    return x, xt


def _siren_base(spec: KernelSpec, x, xt):
    """SIREN first-layer quantities: NNGP Sigma1, NTK additive term T1, Sdot1."""
    w, c = spec.omega, spec.c
    e = math.exp(-2.0 * w * w)
    s_minus = float(np.prod(sinc(c * w * (x - xt))))
    s_plus = float(np.prod(sinc(c * w * (x + xt))))
    sin_cov = 0.5 * (s_minus - e * s_plus)       # E[sin u sin v]
    cos_cov = 0.5 * (s_minus + e * s_plus)       # E[cos u cos v]
    sigma1 = (c * c / 3.0) * sin_cov + 1.0
    t1 = sin_cov + 1.0
    sdot1 = (c * c / 3.0) * cos_cov
    return sigma1, t1, sdot1


def _gauss_step(sxx: float, stt: float, sxt: float):
    """One NNGP recursion step; returns (sin-cov, cos-cov) of the next layer."""
    em = math.exp(-0.5 * (sxx - 2.0 * sxt + stt))
    ep = math.exp(-0.5 * (sxx + 2.0 * sxt + stt))
    if not (math.isfinite(em) and math.isfinite(ep)):
        raise FloatingPointError("non-finite intermediate in kernel recursion")
    return 0.5 * (em - ep), 0.5 * (em + ep)


def _diag_step(s: float) -> float:
    return 0.5 * (1.0 - math.exp(-2.0 * s)) + 1.0


def nngp(spec: KernelSpec, x, x_tilde) -> float:
    """Infinite-width output covariance Sigma^(L)(x, x~)."""
    x, xt = _check_pair(x, x_tilde)
    w = spec.omega
    sxx = w * w * (float(x @ x) + 1.0)
    stt = w * w * (float(xt @ xt) + 1.0)
    sxt = w * w * (float(x @ xt) + 1.0)
    start = 1
    if spec.family is KernelFamily.SIREN:
        sigma1, _, _ = _siren_base(spec, x, xt)
        sxx = _siren_diag(spec, x)
        stt = _siren_diag(spec, xt)
        sxt = sigma1
        start = 2
    for _ in range(start, spec.depth + 1):
        sin_cov, _ = _gauss_step(sxx, stt, sxt)
        sxt = sin_cov + 1.0
        sxx = _diag_step(sxx)
        stt = _diag_step(stt)
    return sxt


def _siren_diag(spec: KernelSpec, x) -> float:
    w, c = spec.omega, spec.c
    e = math.exp(-2.0 * w * w)
    s_plus = float(np.prod(sinc(2.0 * c * w * x)))
    return (c * c / 3.0) * 0.5 * (1.0 - e * s_plus) + 1.0


def ntk(spec: KernelSpec, x, x_tilde) -> float:
    """Deterministic-limit neural tangent kernel Theta^(L)(x, x~)."""
    x, xt = _check_pair(x, x_tilde)
    w = spec.omega
    theta = w * w * (float(x @ xt) + 1.0)
    sxx = w * w * (float(x @ x) + 1.0)
    stt = w * w * (float(xt @ xt) + 1.0)
    sxt = theta
    start = 1
    if spec.family is KernelFamily.SIREN:
        sigma1, t1, sdot1 = _siren_base(spec, x, xt)
        theta = theta * sdot1 + t1
        sxx = _siren_diag(spec, x)
        stt = _siren_diag(spec, xt)
        sxt = sigma1
        start = 2
    for _ in range(start, spec.depth + 1):
        sin_cov, cos_cov = _gauss_step(sxx, stt, sxt)
        theta = theta * cos_cov + sin_cov + 1.0
        sxt = sin_cov + 1.0
        sxx = _diag_step(sxx)
        stt = _diag_step(stt)
    return theta


def ntk_shallow_closed(spec: KernelSpec, x, x_tilde) -> float:
    """L = 1 closed form; must agree with ntk() to 1e-12."""
    if spec.depth != 1:
        raise ValueError("closed form is defined for depth 1")
    x, xt = _check_pair(x, x_tilde)
    w = spec.omega
    a = w * w * (float(x @ xt) + 1.0)
    e = math.exp(-2.0 * w * w)
    if spec.family is KernelFamily.SSN:
        g_minus = math.exp(-0.5 * w * w * float(np.sum((x - xt) ** 2)))
        g_plus = math.exp(-0.5 * w * w * float(np.sum((x + xt) ** 2)))
        return 0.5 * (a + 1.0) * g_minus + 0.5 * (a - 1.0) * g_plus * e + 1.0
    c = spec.c
    s_minus = float(np.prod(sinc(c * w * (x - xt))))
    s_plus = float(np.prod(sinc(c * w * (x + xt))))
    return a * (c * c / 6.0) * (s_minus + e * s_plus) + 0.5 * (s_minus - e * s_plus) + 1.0


def nngp_shallow_closed(spec: KernelSpec, x, x_tilde) -> float:
    """L = 1 NNGP closed form."""
    if spec.depth != 1:
        raise ValueError("closed form is defined for depth 1")
    x, xt = _check_pair(x, x_tilde)
    w = spec.omega
    e = math.exp(-2.0 * w * w)
    if spec.family is KernelFamily.SSN:
        g_minus = math.exp(-0.5 * w * w * float(np.sum((x - xt) ** 2)))
        g_plus = math.exp(-0.5 * w * w * float(np.sum((x + xt) ** 2)))
        return 0.5 * (g_minus - g_plus * e) + 1.0
    c = spec.c
    s_minus = float(np.prod(sinc(c * w * (x - xt))))
    s_plus = float(np.prod(sinc(c * w * (x + xt))))
    return (c * c / 6.0) * (s_minus - e * s_plus) + 1.0


def kernel_slice(spec: KernelSpec, center, offsets, kind: str = "ntk") -> KernelSlice:
    """Evaluate ntk or nngp along center + offsets (offsets on axis 0 when
    the center is multi-dimensional)."""
    center = np.atleast_1d(np.asarray(center, dtype=np.float64))
    offsets = np.asarray(offsets, dtype=np.float64)
    fn = ntk if kind == "ntk" else nngp
    values = np.empty(len(offsets))
    for i, dx in enumerate(offsets):
        point = center.copy()
        point[0] += dx
        values[i] = fn(spec, point, center)
    return KernelSlice(center=center, offsets=offsets, values=values)


def reference_kernel(kind: ReferenceKind, omega: float, c: float, dx) -> float:
    """Idealized low-pass profiles: Gaussian e^{-w^2|dx|^2/2} or the per-axis
    sinc product of a uniform first layer."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    dx = np.atleast_1d(np.asarray(dx, dtype=np.float64))
    if kind is ReferenceKind.GAUSSIAN:
        return float(np.exp(-0.5 * omega * omega * np.sum(dx * dx)))
    return float(np.prod(sinc(c * omega * dx)))


@dataclass(frozen=True)
class GaussianFit:
    peak: float
    width: float
    baseline: float
    rms_residual: float


def gaussian_fit(slc: KernelSlice, gn_steps: int = 1) -> GaussianFit:
    """Least-squares a*exp(-dx^2/(2 w^2)) + b over a kernel slice.

    Initialized by log-domain linear least squares on the points at or above
    10% of the peak (baseline seeded at the slice minimum), then refined by
    Gauss-Newton on all points.
    """
    dx = np.asarray(slc.offsets, dtype=np.float64)
    y = np.asarray(slc.values, dtype=np.float64)
    if len(y) < 5:
        raise ValueError("slice needs at least 5 points spanning the peak")
    b = float(np.min(y))
    peak = float(np.max(y)) - b
    if peak <= 0:
        raise ValueError("slice has no peak above its baseline")
    mask = (y - b) >= 0.1 * peak
    if mask.sum() < 3:
        raise ValueError("fewer than 3 points above 10% of peak")
    z = np.log(y[mask] - b + 1e-300)
    design = np.stack([np.ones(int(mask.sum())), dx[mask] ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(design, z, rcond=None)
    if coef[1] >= 0:
        raise ValueError("log-domain fit produced a non-decaying profile")
    a = float(np.exp(coef[0]))
    w = float(np.sqrt(-0.5 / coef[1]))

    def sse(pa, pw, pb):
        g = np.exp(-dx * dx / (2.0 * pw * pw))
        return float(np.sum((pa * g + pb - y) ** 2))

    for _ in range(gn_steps):
        g = np.exp(-dx * dx / (2.0 * w * w))
        resid = a * g + b - y
        jac = np.stack([g, a * g * dx * dx / w**3, np.ones_like(dx)], axis=1)
        step, *_ = np.linalg.lstsq(jac, -resid, rcond=None)
        # backtrack the GN direction: a full step can overshoot when the
        # profile is far from Gaussian (sinc side lobes)
        base = sse(a, w, b)
        scale = 1.0
        for _ in range(12):
            ca, cw, cb = a + scale * step[0], w + scale * step[1], b + scale * step[2]
            if np.isfinite(ca) and np.isfinite(cw) and cw > 0 and sse(ca, cw, cb) < base:
                a, w, b = ca, cw, cb
                break
            scale *= 0.5
    if not (np.isfinite(a) and np.isfinite(w) and w > 0):
        raise FloatingPointError("Gaussian fit diverged")
    g = np.exp(-dx * dx / (2.0 * w * w))
    rms = float(np.sqrt(np.mean((a * g + b - y) ** 2)))
    return GaussianFit(peak=a, width=w, baseline=b, rms_residual=rms)
