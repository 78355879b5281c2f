"""Equiprobable partitions built from recursive binary marginal-median splits.

A partition of depth ``s`` over ``d`` dimensions bisects every cell once per
dimension at each of ``s`` recursion levels, producing ``2**(s*d)`` leaf bins
that hold as near to equal sample counts as integer splits allow.  Because the
split planes follow marginal medians, regions of high sample density end up
with small bins and sparse regions with large ones; the bin volumes alone then
carry the information needed for entropy estimation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePartitionError, PreconditionError
from .geometry import BoundingBox, SampleSet

# beyond this depth bivariate bins hold too few samples to be informative
MAX_RECOMMENDED_BIVARIATE_DEPTH = 4


@dataclass(frozen=True)
class Bin:
    """A leaf cell: bounds, the number of samples inside, and its volume."""

    bounds: BoundingBox
    count: int
    volume: float


@dataclass(frozen=True)
class Partition:
    """A complete depth-``s`` binary tree over ``d`` dimensions, kept as its leaves."""

    bins: tuple[Bin, ...]
    depth: int
    dims: int
    cycle_order: tuple[int, ...]
    support: BoundingBox

    @property
    def bin_count(self) -> int:
        return len(self.bins)

    @property
    def counts(self) -> np.ndarray:
        return np.array([b.count for b in self.bins])

    @property
    def total_count(self) -> int:
        return int(self.counts.sum())


def median_split(points, dim: int):
    """Split points at the marginal median of coordinate ``dim``.

    The left subset receives the ceil(m/2) smallest points along ``dim``
    (ties resolved by stable input order), the right subset the remainder.
    The split coordinate is the midpoint of the two straddling order
    statistics.  Returns ``(left, right, split_coordinate)`` with subsets in
    their original row order.
    """
    pts = np.asarray(points, dtype=float)
    squeeze = pts.ndim == 1
    if squeeze:
        pts = pts.reshape(-1, 1)
    m = pts.shape[0]
    if m < 2:
        raise PreconditionError("median split requires at least 2 points")
    if not 0 <= dim < pts.shape[1]:
        raise PreconditionError(f"dimension index {dim} out of range for d={pts.shape[1]}")
    left_idx, right_idx, split = _median_split_indices(pts[:, dim], np.arange(m))
    left, right = pts[left_idx], pts[right_idx]
    if squeeze:
        left, right = left.ravel(), right.ravel()
    return left, right, split


def _median_split_indices(coords: np.ndarray, idx: np.ndarray):
    """Split an index set by the median of ``coords[idx]``; ties keep input-index rank."""
    values = coords[idx]
    order = np.argsort(values, kind="stable")
    k = (len(idx) + 1) // 2
    split = 0.5 * (values[order[k - 1]] + values[order[k]])
    return np.sort(idx[order[:k]]), np.sort(idx[order[k:]]), float(split)


def build_equiprobable(samples: SampleSet, depth: int, cycle_order=None) -> Partition:
    """Build the equiprobable k-d tree partition of ``samples`` to a fixed depth.

    Each recursion level bisects every cell once per dimension, in
    ``cycle_order`` (defaults to 0, 1, ..., d-1).  The support is the tight
    closed bounding box of the samples; requires N >= 2**(depth*d) so every
    leaf holds at least one sample.
    """
    if depth != int(depth) or depth < 0:
        raise PreconditionError(f"depth must be a non-negative integer, got {depth!r}")
    depth = int(depth)
    d = samples.d
    order = tuple(range(d)) if cycle_order is None else tuple(int(i) for i in cycle_order)
    if sorted(order) != list(range(d)):
        raise PreconditionError(f"cycle_order {order!r} is not a permutation of 0..{d - 1}")
    needed = 2 ** (depth * d)
    if samples.n < needed:
        raise PreconditionError(
            f"N={samples.n} < 2^(s*d)={needed} samples required for depth {depth} in {d} dimensions"
        )
    if d == 2 and depth > MAX_RECOMMENDED_BIVARIATE_DEPTH:
        warnings.warn(
            f"depth {depth} exceeds the recommended maximum of "
            f"{MAX_RECOMMENDED_BIVARIATE_DEPTH} for bivariate data; bins will be sample-starved",
            UserWarning,
            stacklevel=2,
        )

    support = samples.bounding_box
    cells = _build_cells(samples.data, support.lower, support.upper, depth, order)
    bins = tuple(
        Bin(bounds=BoundingBox(lo, hi), count=len(idx), volume=float(np.prod(hi - lo)))
        for lo, hi, idx in cells
    )
    return Partition(bins=bins, depth=depth, dims=d, cycle_order=order, support=support)


def _build_cells(data: np.ndarray, lower: np.ndarray, upper: np.ndarray, depth: int, order):
    """Recursively split (bounds, index-set) cells; returns a list of (lo, hi, idx)."""
    cells = [(lower.copy(), upper.copy(), np.arange(data.shape[0]))]
    for _ in range(depth):
        for dim in order:
            split_cells = []
            for lo, hi, idx in cells:
                left_idx, right_idx, split = _median_split_indices(data[:, dim], idx)
                left_hi = hi.copy()
                left_hi[dim] = split
                right_lo = lo.copy()
                right_lo[dim] = split
                split_cells.append((lo, left_hi, left_idx))
                split_cells.append((right_lo, hi, right_idx))
            cells = split_cells
    return cells


def bin_volumes(partition: Partition, normalize: bool = False) -> np.ndarray:
    """Leaf volumes, raw or divided by the total so they sum to one."""
    vols = np.array([b.volume for b in partition.bins])
    if not normalize:
        return vols
    total = vols.sum()
    if total <= 0.0:
        raise DegeneratePartitionError("cannot normalize volumes of a zero-volume partition")
    return vols / total


def partition_to_dict(partition: Partition) -> dict:
    """Plain-data representation of a partition for JSON export."""
    return {
        "support": {
            "lower": partition.support.lower.tolist(),
            "upper": partition.support.upper.tolist(),
        },
        "depth": partition.depth,
        "dims": partition.dims,
        "cycle_order": list(partition.cycle_order),
        "bins": [
            {
                "lower": b.bounds.lower.tolist(),
                "upper": b.bounds.upper.tolist(),
                "count": b.count,
                "volume": b.volume,
            }
            for b in partition.bins
        ],
    }


def partition_from_dict(doc: dict) -> Partition:
    """Rebuild a partition from :func:`partition_to_dict` output."""
    try:
        support = BoundingBox(np.array(doc["support"]["lower"]), np.array(doc["support"]["upper"]))
        bins = tuple(
            Bin(
                bounds=BoundingBox(np.array(b["lower"]), np.array(b["upper"])),
                count=int(b["count"]),
                volume=float(b["volume"]),
            )
            for b in doc["bins"]
        )
        return Partition(
            bins=bins,
            depth=int(doc["depth"]),
            dims=int(doc["dims"]),
            cycle_order=tuple(int(i) for i in doc["cycle_order"]),
            support=support,
        )
    except (KeyError, TypeError) as exc:
        raise PreconditionError(f"malformed partition document: {exc}") from exc
