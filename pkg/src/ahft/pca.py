"""Principal component analysis of the PSF correlation matrix.

Pipeline: standardize the selected columns (the fatigue response is kept
in by default, giving a 9-variable analysis on the bundled case study),
form the Pearson correlation matrix, and eigendecompose it with a cyclic
Jacobi iteration.  Variance proportions come from the spectrum
(lambda_i / sum(lambda)); factor selection keeps the smallest leading
block of components that explains the requested variance share and ranks
the PSFs inside it by eigenvalue-weighted absolute loading.

The Jacobi solver is written out here rather than delegated to a LAPACK
wrapper because the surrounding contract is part of the package API:
a deterministic eigenvector sign convention (largest-magnitude entry
positive, ties broken by lowest index), an explicit iteration budget with
diagnostics on failure, and a tie flag for degenerate spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, correlation_matrix, normalize_name
from .errors import AllZeroSpectrum, InputError, NoConvergence, NotSymmetric

SYMMETRY_TOL = 1e-10
EIGENVALUE_TIE_TOL = 1e-10
NEGATIVE_CLAMP_TOL = 1e-10


def eigen_symmetric(
    m: np.ndarray,
    tol: float = 1e-13,
    max_sweeps: int = 60,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with eigenvalues sorted descending and
    one orthonormal eigenvector per column.  Each vector is oriented so
    its largest-magnitude entry is positive (first such entry on ties).

    Raises :class:`NotSymmetric` when ``max|m - m.T| > 1e-10`` and
    :class:`NoConvergence` (with diagnostics) when the off-diagonal mass
    has not fallen below ``tol * max(1, max|m|)`` after ``max_sweeps``
    full sweeps.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix entries must be finite")
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(f"matrix is asymmetric by {asym:.3e} (> {SYMMETRY_TOL:.0e})")

    n = m.shape[0]
    a = (m + m.T) / 2.0
    v = np.eye(n)
    threshold = tol * max(1.0, float(np.max(np.abs(a)))) if n else tol

    def max_offdiag(x: np.ndarray) -> float:
        if n < 2:
            return 0.0
        off = np.abs(x - np.diag(np.diag(x)))
        return float(off.max())

    sweeps = 0
    while sweeps < max_sweeps and max_offdiag(a) > threshold:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= threshold:
                    continue
                # Rotation angle annihilating a[p, q]: the numerically
                # stable tangent formula.
                app, aqq = a[p, p], a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # A <- J'AJ, done as a column mix then a row mix.
                col_p = c * a[:, p] - s * a[:, q]
                col_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = col_p, col_q
                row_p = c * a[p, :] - s * a[q, :]
                row_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = row_p, row_q
                # The rotated 2x2 block is known in closed form; writing it
                # explicitly keeps the zero and the symmetry exact.
                a[p, q] = a[q, p] = 0.0
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                vec_p = c * v[:, p] - s * v[:, q]
                vec_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vec_p, vec_q

    final_off = max_offdiag(a)
    if final_off > threshold:
        raise NoConvergence(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps",
            diagnostics={"sweeps": sweeps, "max_offdiag": final_off},
        )

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for j in range(n):
        k = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[k, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return values, vectors


@dataclass(frozen=True, eq=False)
class PcaResult:
    """Eigen analysis of a correlation matrix.

    ``eigenvectors`` holds one unit-norm column per eigenvalue, row order
    matching ``column_names``; entries are the component loadings.
    ``has_ties`` flags degenerate spectra (two eigenvalues within 1e-10),
    in which case loadings inside a tied block are an arbitrary basis of
    the shared eigenspace and should not be compared entrywise.
    """

    column_names: tuple[str, ...]
    eigenvalues: np.ndarray        # descending
    eigenvectors: np.ndarray       # columns, orthonormal
    proportions: np.ndarray
    cumulative: np.ndarray
    has_ties: bool

    def loading(self, column: str, component: int) -> float:
        """Loading of ``column`` on the 1-based ``component``."""
        name = normalize_name(column)
        if name not in self.column_names:
            raise InputError(f"column {column!r} is not part of this analysis")
        if not (1 <= component <= len(self.eigenvalues)):
            raise InputError(
                f"component must lie in 1..{len(self.eigenvalues)}, got {component}"
            )
        row = self.column_names.index(name)
        return float(self.eigenvectors[row, component - 1])


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of threshold-based factor selection."""

    retained_components: int
    threshold: float
    selected_factors: tuple[tuple[str, float], ...]  # (name, score), ranked

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.selected_factors)


# Cumulative-threshold comparisons tolerate last-bit rounding so that a
# threshold of exactly 1.0 retains the full spectrum.
_THRESHOLD_EPS = 1e-9


def variance_proportions(eigenvalues) -> tuple[np.ndarray, np.ndarray]:
    """Per-component share of total variance, and its running sum.

    proportions[i] = lambda_i / sum(lambda); cumulative[i] is the sum of
    the first i+1 proportions.  Eigenvalues must be nonnegative and not
    all zero.
    """
    values = np.asarray(eigenvalues, dtype=float)
    if values.size == 0 or np.any(values < 0):
        raise InputError("eigenvalues must be a nonempty, nonnegative sequence")
    total = float(values.sum())
    if total <= 0.0:
        raise AllZeroSpectrum("all eigenvalues are zero")
    proportions = values / total
    return proportions, np.cumsum(proportions)


def run_pca(dataset: Dataset, columns=None) -> PcaResult:
    """PCA of the correlation matrix of the selected columns.

    ``columns`` defaults to every dataset column, fatigue included —
    the response rides along so its loadings show how strongly each
    component carries it.  Pass an explicit list to opt out.
    """
    if columns is None:
        columns = list(dataset.column_names)
    columns = [normalize_name(c) for c in columns]
    r = correlation_matrix(dataset, columns)
    values, vectors = eigen_symmetric(r)
    if np.any(values < -NEGATIVE_CLAMP_TOL):
        raise InputError(
            f"correlation matrix has eigenvalue {values.min():.3e} < -1e-10"
        )
    values = np.where(values < 0.0, 0.0, values)
    proportions, cumulative = variance_proportions(values)
    has_ties = bool(np.any(np.abs(np.diff(values)) <= EIGENVALUE_TIE_TOL))
    return PcaResult(
        column_names=tuple(columns),
        eigenvalues=values,
        eigenvectors=vectors,
        proportions=proportions,
        cumulative=cumulative,
        has_ties=has_ties,
    )


def select_factors(pca: PcaResult, threshold: float, response: str) -> SelectionResult:
    """Retain leading components, then rank the PSFs they weight.

    The smallest k with cumulative explained variance >= ``threshold``
    is retained.  Each non-response column is scored by
    sum over retained components c of lambda_c * |loading|, and the
    columns are returned in descending score order (ties keep the
    original column order).
    """
    if not (0.0 < threshold <= 1.0):
        raise InputError(f"threshold must lie in (0, 1], got {threshold!r}")
    response = normalize_name(response)
    if response not in pca.column_names:
        raise InputError(f"response column {response!r} not in the analysis")

    k = int(np.searchsorted(pca.cumulative, threshold - _THRESHOLD_EPS, side="left")) + 1
    k = min(k, len(pca.cumulative))

    names = [c for c in pca.column_names if c != response]
    scores = []
    for name in names:
        row = pca.column_names.index(name)
        loadings = np.abs(pca.eigenvectors[row, :k])
        scores.append(float(np.sum(pca.eigenvalues[:k] * loadings)))
    order = np.argsort(-np.asarray(scores), kind="stable")
    ranked = tuple((names[i], scores[i]) for i in order)
    return SelectionResult(retained_components=k, threshold=threshold,
                           selected_factors=ranked)
