"""Random feasible problem instances for benchmarks and tests.

Feasibility is guaranteed by construction: draw a random banded symmetric
block-circulant precision, load its diagonal until positive definite, invert
it and read off the band — the inverse itself is then a positive definite
circulant completion of that band.  The AR route draws random stable
autoregression coefficients instead, which pins the spectral-factor radius
(useful for decay studies where the band must not depend on N).
"""

from __future__ import annotations

import numpy as np

from .blockcirc import BandData, BlockCirculant, _sym, circ_inverse, dft_spectrum, _hermitize
from .errors import BadInput
from .toeplitz import band_from_ar, spectral_radius


def random_feasible_band(m: int, n: int, N: int, rng, margin: float = 0.3) -> BandData:
    """Band of the inverse of a random banded circulant precision.

    ``margin`` is the smallest eigenvalue the loaded precision is pushed to;
    larger values give better-conditioned instances.
    """
    if N < 2 * n + 2:
        raise BadInput(f"N={N} < 2n+2={2 * n + 2}")
    row = np.zeros((N, m, m))
    row[0] = np.eye(m) + 0.3 * _sym(rng.standard_normal((m, m)))
    for d in range(1, n + 1):
        blk = rng.standard_normal((m, m)) * 0.4 / (d + 1)
        row[d] = blk
        row[N - d] = blk.T
    prec = BlockCirculant(m, N, row)
    eigs = np.linalg.eigvalsh(_hermitize(dft_spectrum(prec).psi))
    lift = margin - float(eigs.min())
    if lift > 0:
        row[0] += lift * np.eye(m)
        prec = BlockCirculant(m, N, row)
    sigma = circ_inverse(prec)
    blocks = np.zeros((n + 1, m, m))
    blocks[0] = sigma.first_row[0]
    for k in range(1, n + 1):
        blocks[k] = sigma.first_row[k].T
    return BandData(m, n, blocks)


def random_stable_ar(m: int, n: int, rng, radius: float = 0.6, identity_innovation: bool = False):
    """Random AR coefficients rescaled to the requested companion radius.

    Scaling coefficient k by s^k scales every root of the matrix polynomial
    by s, so the radius is hit exactly (up to the eigenvalue computation).
    Returns (coeffs, innovation).
    """
    if not 0.0 < radius < 1.0:
        raise BadInput(f"radius={radius} outside (0, 1)")
    coeffs = np.zeros((n + 1, m, m))
    coeffs[0] = np.eye(m)
    for k in range(1, n + 1):
        coeffs[k] = rng.standard_normal((m, m)) * 0.5 / k
    if n > 0:
        rho = _companion_radius(coeffs)
        if rho > 0:
            s = radius / rho
            for k in range(1, n + 1):
                coeffs[k] *= s ** k
    if identity_innovation:
        innovation = np.eye(m)
    else:
        g = rng.standard_normal((m, m))
        innovation = g @ g.T + 0.5 * np.eye(m)
    return coeffs, innovation


def random_ar_band(m: int, n: int, rng, radius: float = 0.6) -> BandData:
    """Covariance band of a random stable AR model (radius pinned)."""
    coeffs, innovation = random_stable_ar(m, n, rng, radius=radius)
    return band_from_ar(coeffs, innovation)


def _companion_radius(coeffs: np.ndarray) -> float:
    n = coeffs.shape[0] - 1
    m = coeffs.shape[1]
    d = n * m
    a = np.zeros((d, d))
    if n > 1:
        a[: d - m, m:] = np.eye(d - m)
    for k in range(n):
        a[d - m:, k * m:(k + 1) * m] = -coeffs[n - k]
    return spectral_radius(a)
