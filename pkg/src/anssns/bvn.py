"""Deterministic bivariate normal probabilities (Genz's 20-node rule).

Vectorized translation of the classical BVND algorithm: Gauss-Legendre
quadrature of the tetrachoric integrand for |rho| < 0.925 and the
asymptotic-corrected form near |rho| = 1. Absolute accuracy is around
5e-16, and the computation is branch-stable and fully deterministic.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

__all__ = ["bvn_upper", "bvn_cdf", "gaussian_rectangle_mass"]

# 20-point Gauss-Legendre nodes/weights on [-1, 1] (half listed, symmetric).
_X20 = np.array([
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
    0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
    0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
    0.0765265211334973,
])
_W20 = np.array([
    0.0176140071391521, 0.0406014298003869, 0.0626720483341091,
    0.0832767415767048, 0.1019301198172404, 0.1181945319615184,
    0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
    0.1527533871307259,
])
_NODES = np.concatenate([-_X20, _X20])
_WEIGHTS = np.concatenate([_W20, _W20])

# Standardized bounds beyond this are numerically 0/1 under ndtr.
_CLIP = 37.5


def bvn_upper(h, k, rho):
    """P(X > h, Y > k) for standard bivariate normal with correlation rho."""
    h = np.clip(np.asarray(h, dtype=float), -_CLIP, _CLIP)
    k = np.clip(np.asarray(k, dtype=float), -_CLIP, _CLIP)
    h, k, rho = np.broadcast_arrays(h, k, np.asarray(rho, dtype=float))
    out = np.empty(h.shape)

    low = np.abs(rho) < 0.925
    if np.any(low):
        out[low] = _bvnu_low(h[low], k[low], rho[low])
    if np.any(~low):
        out[~low] = _bvnu_high(h[~low], k[~low], rho[~low])
    return np.clip(out, 0.0, 1.0)


def _bvnu_low(h, k, rho):
    hk = h * k
    hs = 0.5 * (h * h + k * k)
    asr = np.arcsin(rho)
    sn = np.sin(0.5 * asr[..., None] * (_NODES + 1.0))
    terms = np.exp((sn * hk[..., None] - hs[..., None]) / (1.0 - sn * sn))
    integral = (terms * _WEIGHTS).sum(axis=-1) * asr / (4.0 * np.pi)
    return integral + ndtr(-h) * ndtr(-k)


def _bvnu_high(h, k, rho):
    twopi = 2.0 * np.pi
    neg = rho < 0.0
    k = np.where(neg, -k, k)
    hk = h * k
    bvn = np.zeros(h.shape)

    not_unit = np.abs(rho) < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ass = (1.0 - rho) * (1.0 + rho)
        a = np.sqrt(np.where(not_unit, ass, 1.0))
        bs = (h - k) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        asr = -0.5 * (bs / np.where(ass > 0, ass, 1.0) + hk)
        t1 = a * np.exp(np.maximum(asr, -745.0)) * (
            1.0 - c * (bs - ass) * (1.0 - d * bs / 5.0) / 3.0 + c * d * ass * ass / 5.0
        )
        bvn = np.where(not_unit & (asr > -100.0), t1, bvn)

        b = np.sqrt(bs)
        sp = np.sqrt(twopi) * ndtr(-b / np.where(a > 0, a, 1.0))
        t2 = np.exp(np.maximum(-0.5 * hk, -745.0)) * sp * b * (
            1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0
        )
        bvn = np.where(not_unit & (-hk < 100.0), bvn - t2, bvn)

        ah = 0.5 * a
        xs = (ah[..., None] * (_NODES + 1.0)) ** 2
        rs = np.sqrt(np.maximum(1.0 - xs, 0.0))
        asr1 = -0.5 * (bs[..., None] / np.where(xs > 0, xs, 1.0) + hk[..., None])
        ep = np.exp(
            -0.5 * hk[..., None] * (1.0 - rs) / (1.0 + rs)
        ) / np.where(rs > 0, rs, 1.0)
        sp1 = 1.0 + c[..., None] * xs * (1.0 + d[..., None] * xs)
        inner = np.where(
            asr1 > -100.0, np.exp(np.maximum(asr1, -745.0)) * (ep - sp1), 0.0
        )
        quad = ah * (inner * _WEIGHTS).sum(axis=-1)
        bvn = np.where(not_unit, bvn + quad, bvn)

    bvn = -bvn / twopi
    pos_tail = ndtr(-np.maximum(h, k))
    neg_tail = np.maximum(0.0, ndtr(-h) - ndtr(-k))
    return np.where(~neg, bvn + pos_tail, neg_tail - bvn)


def bvn_cdf(h, k, rho):
    """P(X <= h, Y <= k) for standard bivariate normal with correlation rho."""
    return bvn_upper(-np.asarray(h, dtype=float), -np.asarray(k, dtype=float), rho)


def gaussian_rectangle_mass(lo1, hi1, lo2, hi2, rho):
    """Standardized-bound rectangle mass by inclusion-exclusion over bvn_cdf."""
    lo1, hi1, lo2, hi2, rho = np.broadcast_arrays(lo1, hi1, lo2, hi2, rho)
    h = np.stack([hi1, lo1, hi1, lo1])
    k = np.stack([hi2, hi2, lo2, lo2])
    terms = bvn_cdf(h, k, np.broadcast_to(rho, h.shape))
    return np.clip(terms[0] - terms[1] - terms[2] + terms[3], 0.0, 1.0)
