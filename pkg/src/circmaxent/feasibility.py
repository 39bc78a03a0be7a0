"""Feasibility analysis for the circulant completion problem.

For scalar data with bandwidth 1 there is a sharp closed-form test: a
positive definite circulant completion of (sigma_0, sigma_1) at size N
exists iff |sigma_1| < sigma_0 for N even, and
cos((N-1)pi/N) * sigma_0 < sigma_1 < sigma_0 for N odd.  For general scalar
bands the eigenvalues of any symmetric circulant completion are affine in
the unknown entries, so the feasible set is an intersection of half-spaces;
the affine forms are exposed for region analysis.  Matrix-valued feasibility
is delegated to the solver (plus the sufficient condition of a positive
definite circulant approximant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockcirc import BandData
from .errors import AsymmetricRow, BadInput, BandTooWide


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Closed-form verdict with signed distance of sigma_1 to the boundary."""

    feasible: bool
    margin: float
    lower: float
    upper: float


@dataclass(frozen=True)
class AffineEigForm:
    """One circulant eigenvalue as an affine function of the unknown entries.

    The eigenvalue at frequency k is
        constant + sum_d coeffs[d] * x_d
    over the unknown circular distances ``distances`` (n+1 .. floor(N/2)).
    """

    k: int
    constant: float
    distances: np.ndarray
    coeffs: np.ndarray

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != self.distances.shape:
            raise BadInput(f"expected {len(self.distances)} unknowns, got {x.shape}")
        return float(self.constant + self.coeffs @ x)


def scalar_bw1_feasible(sigma0: float, sigma1: float, N: int) -> FeasibilityVerdict:
    """Closed-form feasibility test for scalar bandwidth-1 data.

    Raises
    ------
    BadInput
        For N < 4 or sigma0 <= 0.
    """
    if N < 4:
        raise BadInput(f"N={N} < 4")
    if sigma0 <= 0:
        raise BadInput(f"sigma0={sigma0} must be positive")
    if N % 2 == 0:
        lower, upper = -float(sigma0), float(sigma0)
    else:
        lower, upper = math.cos((N - 1) * math.pi / N) * float(sigma0), float(sigma0)
    margin = float(min(upper - sigma1, sigma1 - lower))
    return FeasibilityVerdict(feasible=margin > 0, margin=margin, lower=lower, upper=upper)


def eig_affine_forms(band: BandData, N: int) -> list:
    """Eigenvalues of scalar circulant completions as affine forms.

    Returns the ceil((N+1)/2) distinct forms (conjugate pairs merged),
    indexed k = 0 .. floor(N/2).  The unknown at circular distance d enters
    form k with coefficient 2 cos(2 pi k d / N), halved when d = N/2 (that
    entry appears once per row); the constant term collects the given band
    the same way.

    Raises
    ------
    BadInput
        For matrix-valued data (m > 1), where eigenvalues are not affine in
        the unknowns.
    """
    if band.m != 1:
        raise BadInput("affine eigenvalue forms exist only for scalar data")
    n = band.n
    if N < 2 * n + 2:
        raise BandTooWide(f"N={N} < 2n+2={2 * n + 2}")
    sig = band.blocks[:, 0, 0]
    distances = np.arange(n + 1, N // 2 + 1)
    forms = []
    for k in range(N // 2 + 1):
        const = sig[0] + sum(
            2.0 * math.cos(2.0 * math.pi * k * j / N) * sig[j] for j in range(1, n + 1)
        )
        coeffs = np.array(
            [
                (1.0 if 2 * d == N else 2.0) * math.cos(2.0 * math.pi * k * d / N)
                for d in distances
            ]
        )
        forms.append(AffineEigForm(k=k, constant=float(const), distances=distances, coeffs=coeffs))
    return forms


@dataclass(frozen=True)
class CandidateReport:
    pd: bool
    min_eig: float


def check_candidate(first_row) -> CandidateReport:
    """Positive definiteness of a full scalar circulant given its first row.

    Raises
    ------
    AsymmetricRow
        If the row is not palindromic (row[k] != row[N-k]).
    """
    row = np.asarray(first_row, dtype=float)
    if row.ndim != 1 or len(row) < 2:
        raise BadInput("expected a 1-D first row of length >= 2")
    N = len(row)
    scale = max(1.0, float(np.abs(row).max()))
    if np.abs(row - row[(-np.arange(N)) % N]).max() > 1e-12 * scale:
        raise AsymmetricRow("first row is not palindromic; matrix would not be symmetric")
    eigs = np.fft.fft(row).real
    min_eig = float(eigs.min())
    return CandidateReport(pd=min_eig > 0.0, min_eig=min_eig)
