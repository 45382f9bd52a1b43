"""Normal distribution truncated to [0, 1]: pdf/cdf/quantile and tail means.

All closed forms are written in terms of the standard-normal pdf/cdf
(scipy.special ndtr/ndtri) and broadcast over numpy arrays.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr, ndtri

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _phi(z):
    return np.exp(-0.5 * z * z) / _SQRT_2PI


class TruncatedNormal:
    """N(mu, sigma^2) restricted to [lo, hi] (defaults: the unit interval)."""

    def __init__(self, mu, var, lo=0.0, hi=1.0):
        var = np.asarray(var, dtype=float)
        if np.any(var <= 0):
            raise ValueError("variance must be positive")
        self.mu = np.asarray(mu, dtype=float)
        self.var = var
        self.sigma = np.sqrt(var)
        self.lo, self.hi = lo, hi
        self.alpha = (lo - self.mu) / self.sigma
        self.beta = (hi - self.mu) / self.sigma
        self.cdf_alpha = ndtr(self.alpha)
        self.mass = ndtr(self.beta) - self.cdf_alpha

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mu) / self.sigma
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, _phi(z) / (self.sigma * self.mass), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mu) / self.sigma
        raw = (ndtr(z) - self.cdf_alpha) / self.mass
        return np.clip(raw, 0.0, 1.0)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise ValueError("quantile argument must lie in [0, 1]")
        z = ndtri(self.cdf_alpha + p * self.mass)
        return np.clip(self.mu + self.sigma * z, self.lo, self.hi)

    def mean(self):
        return self.mu + self.sigma * (_phi(self.alpha) - _phi(self.beta)) / self.mass

    def lower_tail_mean(self, t):
        """E[x | x <= t] for t inside the support."""
        zt = (np.asarray(t, dtype=float) - self.mu) / self.sigma
        denom = ndtr(zt) - self.cdf_alpha
        denom = np.where(denom <= 0, np.nan, denom)
        val = self.mu + self.sigma * (_phi(self.alpha) - _phi(zt)) / denom
        return np.where(np.isnan(val), np.asarray(t, dtype=float), np.clip(val, self.lo, self.hi))

    def upper_tail_mean(self, t):
        """E[x | x >= t] for t inside the support."""
        zt = (np.asarray(t, dtype=float) - self.mu) / self.sigma
        denom = ndtr(self.beta) - ndtr(zt)
        denom = np.where(denom <= 0, np.nan, denom)
        val = self.mu + self.sigma * (_phi(zt) - _phi(self.beta)) / denom
        return np.where(np.isnan(val), np.asarray(t, dtype=float), np.clip(val, self.lo, self.hi))
