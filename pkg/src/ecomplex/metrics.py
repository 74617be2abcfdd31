"""Complexity metrics on a binary country-product matrix.

Three families:

* TDI/TSI: standardized log-diversification and negative standardized
  log-ubiquity. Cheap, monotone in the raw counts.
* ECI/PCI: second-dominant eigenvectors of the row- and column-averaging
  operators W W* and W* W, standardized and sign-oriented.
* Fitness/Q: the normalized harmonic-mean fixed point, iterated to a
  relative-change tolerance.

All vectors are standardized with the population (divide by N) standard
deviation so the mean-0/std-1 contract is exact, not approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateSpectrum,
    DegenerateVector,
    DisconnectedMatrix,
    NonConvergence,
    NumericalUnderflow,
)
from .matrix import BinaryMatrix

__all__ = [
    "CountryMetrics",
    "ProductMetrics",
    "EigenReport",
    "standardize",
    "tdi",
    "tsi",
    "eci_pci",
    "fitness_iterations",
    "fitness_complexity",
    "compute_metrics",
]

_FLOOR = 1e-300
_EIGEN_TIE_TOL = 1e-10


@dataclass(frozen=True)
class CountryMetrics:
    country_labels: tuple[str, ...]
    diversification: np.ndarray
    tdi: np.ndarray
    eci: np.ndarray
    fitness: np.ndarray


@dataclass(frozen=True)
class ProductMetrics:
    product_labels: tuple[str, ...]
    ubiquity: np.ndarray
    tsi: np.ndarray
    pci: np.ndarray
    q: np.ndarray


@dataclass(frozen=True)
class EigenReport:
    """Diagnostics from the spectral computation.

    ``leading_eigenvalue`` should be 1 up to solver tolerance (the
    averaging operators are row-stochastic). ``second_eigenvalue`` is the
    one whose eigenvector becomes ECI. Sign flags record whether the raw
    solver output had to be negated to satisfy the orientation rule.
    """

    leading_eigenvalue: float
    second_eigenvalue: float
    eci_sign_flipped: bool
    pci_sign_flipped: bool
    solver: str = "dense symmetric"


def standardize(v) -> np.ndarray:
    """Shift to mean 0 and scale to population std 1.

    Raises DegenerateVector when the input has zero variance, since no
    affine map can then spread it.
    """
    v = np.asarray(v, dtype=float)
    if v.size < 2:
        raise DegenerateVector("need at least two values to standardize")
    mu = v.mean()
    sigma = v.std()
    if sigma == 0:
        raise DegenerateVector("zero variance")
    return (v - mu) / sigma


def tdi(m: BinaryMatrix) -> np.ndarray:
    """Standardized log-diversification, one value per country."""
    d = m.diversification
    if np.any(d < 1):
        raise DegenerateVector("prune zero-diversification countries first")
    return standardize(np.log(d))


def tsi(m: BinaryMatrix) -> np.ndarray:
    """Negative standardized log-ubiquity, one value per product.

    Rare products (low u) score high.
    """
    u = m.ubiquity
    if np.any(u < 1):
        raise DegenerateVector("prune zero-ubiquity products first")
    return -standardize(np.log(u))


def _rank(v: np.ndarray) -> np.ndarray:
    """Average ranks, the tie convention Spearman needs."""
    import scipy.stats

    return scipy.stats.rankdata(v)


def _spearman_sign(a: np.ndarray, b: np.ndarray) -> float:
    ra, rb = _rank(a), _rank(b)
    ra = ra - ra.mean()
    rb = rb - rb.mean()
    denom = np.sqrt((ra * ra).sum() * (rb * rb).sum())
    if denom == 0:
        return 0.0
    return float((ra * rb).sum() / denom)


def eci_pci(m: BinaryMatrix) -> tuple[np.ndarray, np.ndarray, EigenReport]:
    """Second-dominant eigenvectors of the two averaging operators.

    The country operator is W W* with w_ij = m_ij/d_i and w*_ji = m_ij/u_j.
    It is similar to the symmetric matrix S = A A^T where
    A = D^{-1/2} M U^{-1/2}, so the spectrum is computed with a symmetric
    solver on S and the eigenvectors mapped back through D^{-1/2}. The
    product-side vector is obtained by propagating the country vector
    through W*, which lands exactly on the corresponding eigenvector of
    W* W (same eigenvalue) without a second decomposition.

    Signs are fixed so that ECI co-ranks with diversification and PCI
    counter-ranks with ubiquity.
    """
    n_c, n_p = m.n_countries, m.n_products
    if n_c < 3 or n_p < 3:
        raise DegenerateVector("need at least 3 countries and 3 products")
    d = m.diversification.astype(float)
    u = m.ubiquity.astype(float)
    if np.any(d < 1) or np.any(u < 1):
        raise DegenerateVector("prune zero-marginal rows/columns first")

    dense = m.to_dense()
    a = dense / np.sqrt(d)[:, None] / np.sqrt(u)[None, :]
    s = a @ a.T
    eigvals, eigvecs = scipy.linalg.eigh(s)
    order = np.argsort(np.abs(eigvals))[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    leading = float(eigvals[0])
    second = float(eigvals[1])

    if abs(second) >= 1.0 - _EIGEN_TIE_TOL:
        raise DisconnectedMatrix(
            "second eigenvalue magnitude is 1; the matrix has several "
            "connected components and the second eigenvector is not unique"
        )
    if n_c > 2:
        third = float(eigvals[2])
        if abs(abs(second) - abs(third)) < _EIGEN_TIE_TOL:
            raise DegenerateSpectrum(
                f"second and third eigenvalue magnitudes tie "
                f"(|{second:.3e}| vs |{third:.3e}|)"
            )

    # Map the symmetric-problem eigenvector back to the similar
    # nonsymmetric operator's eigenvector.
    c_raw = eigvecs[:, 1] / np.sqrt(d)
    eci = standardize(c_raw)
    flip_c = _spearman_sign(eci, d) < 0
    if flip_c:
        eci = -eci

    # W* applied to the country eigenvector gives the product eigenvector.
    p_raw = (dense / u[None, :]).T @ c_raw
    if np.allclose(p_raw, p_raw.mean()):
        raise DegenerateVector("product-side eigenvector is constant")
    pci = standardize(p_raw)
    flip_p = _spearman_sign(pci, u) > 0
    if flip_p:
        pci = -pci

    report = EigenReport(
        leading_eigenvalue=leading,
        second_eigenvalue=second,
        eci_sign_flipped=flip_c,
        pci_sign_flipped=flip_p,
    )
    return eci, pci, report


def fitness_iterations(m: BinaryMatrix):
    """Generator over (F, Q) iterates of the normalized fixed point.

    Yields the normalized pair after each synchronous update, starting
    from the all-ones state (yielded first). Infinite; callers slice or
    drive it via fitness_complexity. Raises NumericalUnderflow if any
    component of the unnormalized state drops below 1e-300.
    """
    dense = m.to_dense()
    n_c, n_p = dense.shape
    c = np.ones(n_c)
    p = np.ones(n_p)
    yield c / c.mean(), p / p.mean()
    while True:
        c_new = (dense @ p) / p.mean()
        p_new = 1.0 / (c.mean() * ((1.0 / c) @ dense))
        if np.any(c_new < _FLOOR) or np.any(p_new < _FLOOR):
            raise NumericalUnderflow(
                "an iterate fell below the positivity floor (1e-300)"
            )
        c, p = c_new, p_new
        yield c / c.mean(), p / p.mean()


def fitness_complexity(
    m: BinaryMatrix, tol: float = 1e-10, max_iter: int = 10000
) -> tuple[np.ndarray, np.ndarray, int]:
    """Iterate the fitness fixed point to a relative-change tolerance.

    Both updates use the previous step's values (synchronous scheme).
    Stops when the largest relative change across the concatenated
    normalized (F, Q) vector drops below tol; raises NonConvergence when
    max_iter synchronous steps do not get there, attaching the last
    iterate for inspection.
    """
    it = fitness_iterations(m)
    f, q = next(it)
    prev = np.concatenate([f, q])
    for n in range(1, max_iter + 1):
        f, q = next(it)
        cur = np.concatenate([f, q])
        change = float(np.max(np.abs(cur - prev) / np.abs(prev)))
        if change < tol:
            return f, q, n
        prev = cur
    raise NonConvergence(
        f"fitness iteration did not converge in {max_iter} steps "
        f"(last relative change {change:.3e})",
        fitness=f,
        q=q,
        iterations=max_iter,
        last_change=change,
    )


def compute_metrics(
    m: BinaryMatrix, tol: float = 1e-10, max_iter: int = 10000
) -> tuple[CountryMetrics, ProductMetrics, EigenReport, int]:
    """All three families at once, on the same matrix."""
    t_c = tdi(m)
    t_p = tsi(m)
    eci, pci, report = eci_pci(m)
    f, q, iters = fitness_complexity(m, tol=tol, max_iter=max_iter)
    cm = CountryMetrics(
        country_labels=m.country_labels,
        diversification=m.diversification.copy(),
        tdi=t_c,
        eci=eci,
        fitness=f,
    )
    pm = ProductMetrics(
        product_labels=m.product_labels,
        ubiquity=m.ubiquity.copy(),
        tsi=t_p,
        pci=pci,
        q=q,
    )
    return cm, pm, report, iters
