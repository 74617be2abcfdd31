"""Country-product matrices: construction, binarization, RCA filtering.

The two core types are thin immutable wrappers over coordinate arrays.
``ExportMatrix`` holds strictly positive export values; ``BinaryMatrix``
holds presence/absence plus the derived diversification and ubiquity
count vectors. Everything downstream (complexity metrics, validation)
consumes a pruned ``BinaryMatrix``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import EmptyMatrix, ZeroMarginal

__all__ = [
    "ExportMatrix",
    "BinaryMatrix",
    "binarize",
    "rca",
    "rca_binarize",
    "prune_degenerate",
]


@dataclass(frozen=True)
class ExportMatrix:
    """Sparse country-by-product matrix of strictly positive export values.

    ``rows``/``cols`` are parallel int arrays of coordinates, ``vals`` the
    matching values. Zeros mean absence and are never stored.
    """

    country_labels: tuple[str, ...]
    product_labels: tuple[str, ...]
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)
    vals: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(set(self.country_labels)) != len(self.country_labels):
            raise ValueError("duplicate country labels")
        if len(set(self.product_labels)) != len(self.product_labels):
            raise ValueError("duplicate product labels")
        if np.any(self.vals <= 0):
            raise ValueError("stored export values must be strictly positive")

    @classmethod
    def from_dense(cls, dense, country_labels=None, product_labels=None) -> "ExportMatrix":
        dense = np.asarray(dense, dtype=float)
        if dense.ndim != 2:
            raise ValueError("expected a 2-d array")
        n, m = dense.shape
        if country_labels is None:
            country_labels = tuple(f"C{i}" for i in range(n))
        if product_labels is None:
            product_labels = tuple(f"P{j}" for j in range(m))
        rows, cols = np.nonzero(dense > 0)
        return cls(
            tuple(country_labels),
            tuple(product_labels),
            rows.astype(np.intp),
            cols.astype(np.intp),
            dense[rows, cols],
        )

    @property
    def n_countries(self) -> int:
        return len(self.country_labels)

    @property
    def n_products(self) -> int:
        return len(self.product_labels)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_countries, self.n_products))
        dense[self.rows, self.cols] = self.vals
        return dense


@dataclass(frozen=True)
class BinaryMatrix:
    """Presence/absence matrix with diversification and ubiquity counts.

    ``diversification[i]`` is the number of entries in row i and
    ``ubiquity[j]`` the number in column j; both are computed once at
    construction. The invariant sum(d) == sum(u) == number of entries
    holds by construction.
    """

    country_labels: tuple[str, ...]
    product_labels: tuple[str, ...]
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(set(self.country_labels)) != len(self.country_labels):
            raise ValueError("duplicate country labels")
        if len(set(self.product_labels)) != len(self.product_labels):
            raise ValueError("duplicate product labels")
        d = np.bincount(self.rows, minlength=self.n_countries).astype(np.intp)
        u = np.bincount(self.cols, minlength=self.n_products).astype(np.intp)
        object.__setattr__(self, "diversification", d)
        object.__setattr__(self, "ubiquity", u)

    diversification: np.ndarray = field(init=False, repr=False)
    ubiquity: np.ndarray = field(init=False, repr=False)

    @classmethod
    def from_dense(cls, dense, country_labels=None, product_labels=None) -> "BinaryMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("expected a 2-d array")
        n, m = dense.shape
        if country_labels is None:
            country_labels = tuple(f"C{i}" for i in range(n))
        if product_labels is None:
            product_labels = tuple(f"P{j}" for j in range(m))
        rows, cols = np.nonzero(dense)
        return cls(tuple(country_labels), tuple(product_labels),
                   rows.astype(np.intp), cols.astype(np.intp))

    @property
    def n_countries(self) -> int:
        return len(self.country_labels)

    @property
    def n_products(self) -> int:
        return len(self.product_labels)

    @property
    def n_entries(self) -> int:
        return len(self.rows)

    @cached_property
    def entries(self) -> frozenset[tuple[int, int]]:
        return frozenset(zip(self.rows.tolist(), self.cols.tolist()))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_countries, self.n_products))
        dense[self.rows, self.cols] = 1.0
        return dense


def binarize(x: ExportMatrix) -> BinaryMatrix:
    """m_ij = 1 exactly where x_ij > 0.

    Positivity is enforced at ExportMatrix construction, so this is a
    straight copy of the coordinates.
    """
    return BinaryMatrix(x.country_labels, x.product_labels,
                        x.rows.copy(), x.cols.copy())


def rca(x: ExportMatrix) -> np.ndarray:
    """Dense matrix of revealed-comparative-advantage ratios.

    RCA_ij = (x_ij / row_i total) / (column_j total / world total), zero
    where x_ij = 0. Raises ZeroMarginal when any retained row or column
    sums to zero, since the ratio is then undefined; prune first.
    """
    if x.n_countries == 0 or x.n_products == 0 or len(x.vals) == 0:
        raise ZeroMarginal("matrix has no positive entries")
    row_tot = np.bincount(x.rows, weights=x.vals, minlength=x.n_countries)
    col_tot = np.bincount(x.cols, weights=x.vals, minlength=x.n_products)
    if np.any(row_tot == 0):
        i = int(np.argmin(row_tot > 0))
        raise ZeroMarginal(f"country {x.country_labels[i]!r} has zero total exports")
    if np.any(col_tot == 0):
        j = int(np.argmin(col_tot > 0))
        raise ZeroMarginal(f"product {x.product_labels[j]!r} has zero total exports")
    world = float(x.vals.sum())
    out = np.zeros((x.n_countries, x.n_products))
    out[x.rows, x.cols] = (x.vals / row_tot[x.rows]) / (col_tot[x.cols] / world)
    return out


def rca_binarize(x: ExportMatrix, threshold: float = 1.0) -> BinaryMatrix:
    """Binary matrix keeping cells whose RCA meets the threshold.

    Ties at the threshold are kept (>=). Only cells with positive exports
    are candidates, so threshold 0 reproduces plain binarization.
    """
    ratios = rca(x)
    keep = ratios[x.rows, x.cols] >= threshold
    return BinaryMatrix(x.country_labels, x.product_labels,
                        x.rows[keep], x.cols[keep])


def prune_degenerate(m: BinaryMatrix) -> BinaryMatrix:
    """Drop countries with d = 0 and products with u = 0.

    For a binary matrix one sweep suffices: removing an empty row deletes
    no entries, so no column count can fall to zero as a consequence (and
    vice versa). The surviving labels keep their original names and order.
    Raises EmptyMatrix when nothing survives. Idempotent.
    """
    keep_c = m.diversification > 0
    keep_p = m.ubiquity > 0
    if not keep_c.any() or not keep_p.any():
        raise EmptyMatrix("no countries or products with entries remain")
    if keep_c.all() and keep_p.all():
        return m
    new_row = np.cumsum(keep_c) - 1
    new_col = np.cumsum(keep_p) - 1
    countries = tuple(lab for lab, k in zip(m.country_labels, keep_c) if k)
    products = tuple(lab for lab, k in zip(m.product_labels, keep_p) if k)
    return BinaryMatrix(countries, products,
                        new_row[m.rows].astype(np.intp),
                        new_col[m.cols].astype(np.intp))
