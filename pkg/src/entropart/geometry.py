"""Sample containers and rigid rotation of sample frames.

Rotations are encoded as Modified Rodrigues Parameters (MRP): a 3-vector
pointing along the rotation axis whose magnitude is tan(theta/4), so the
rotation angle is 4*arctan(norm(mrp)) and lies in [0, 2*pi) for any finite
vector.  Planar (2-D) rotations use an MRP about the z-axis, which
reproduces the usual counterclockwise rotation matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

TWO_PI = 2.0 * np.pi


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned closed box given by per-dimension lower/upper bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _readonly(self.lower)
        upper = _readonly(self.upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise PreconditionError("bounding box bounds must be 1-D vectors of equal length")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise PreconditionError("bounding box bounds must be finite")
        if np.any(lower > upper):
            raise PreconditionError("bounding box requires lower <= upper in every dimension")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, x: np.ndarray) -> np.ndarray:
        """Membership mask for points in the closed box; x has shape (n, d)."""
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower) & (x <= self.upper), axis=1)


class SampleSet:
    """An immutable n-by-d matrix of observations with cached summary geometry.

    The barycentre (per-dimension mean) and tight closed bounding box are
    computed once at construction.  Rows must be finite; a 1-D input is
    treated as a single-feature sample.
    """

    def __init__(self, data):
        arr = np.array(data, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise PreconditionError("sample data must be a 2-D matrix (rows are observations)")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise PreconditionError("sample data must contain at least one row and one column")
        if not np.isfinite(arr).all():
            raise PreconditionError("sample data must be finite in every entry")
        arr.setflags(write=False)
        self._data = arr
        self._barycentre = _readonly(arr.mean(axis=0))
        self._bbox = BoundingBox(arr.min(axis=0), arr.max(axis=0))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def d(self) -> int:
        return self._data.shape[1]

    @property
    def barycentre(self) -> np.ndarray:
        return self._barycentre

    @property
    def bounding_box(self) -> BoundingBox:
        return self._bbox

    def __repr__(self):
        return f"SampleSet(n={self.n}, d={self.d})"


@dataclass(frozen=True)
class Rotation:
    """A rotation encoded as an MRP 3-vector; magnitude is tan(angle/4)."""

    mrp: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        mrp = _readonly(self.mrp)
        if mrp.shape != (3,):
            raise PreconditionError("MRP must be a 3-vector")
        if not np.isfinite(mrp).all():
            raise PreconditionError("MRP must be finite")
        object.__setattr__(self, "mrp", mrp)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.zeros(3))

    @property
    def angle(self) -> float:
        """Rotation angle in radians, in [0, 2*pi)."""
        return float(4.0 * np.arctan(np.linalg.norm(self.mrp)))

    @property
    def is_z_axis(self) -> bool:
        """True when only the z component is nonzero (a planar rotation)."""
        return self.mrp[0] == 0.0 and self.mrp[1] == 0.0


def normalize_angle(theta: float) -> float:
    """Reduce an angle to the canonical [0, 2*pi) range."""
    theta = float(theta) % TWO_PI
    # % can return the modulus itself when the remainder underflows
    return 0.0 if theta == TWO_PI else theta


def mrp_from_angle_2d(theta: float) -> Rotation:
    """MRP for a planar rotation by ``theta`` about the z-axis.

    ``theta`` must already lie in [0, 2*pi); callers composing angles should
    reduce them with :func:`normalize_angle` first.
    """
    if not (0.0 <= theta < TWO_PI):
        raise PreconditionError(f"rotation angle {theta!r} outside [0, 2*pi)")
    return Rotation(np.array([0.0, 0.0, np.tan(theta / 4.0)]))


def rotation_matrix(rot: Rotation, d: int) -> np.ndarray:
    """Orthogonal rotation matrix (determinant +1) realizing ``rot`` in d dims.

    For d=2 the MRP must be z-axis only and the familiar planar matrix
    [[cos, -sin], [sin, cos]] is returned; d=3 uses the general MRP map.
    """
    if d == 2:
        if not rot.is_z_axis:
            raise PreconditionError("2-D rotation requires a z-axis MRP (zero x/y components)")
        theta = rot.angle
        c, s = np.cos(theta), np.sin(theta)
        return np.array([[c, -s], [s, c]])
    if d == 3:
        sigma = rot.mrp
        s2 = float(sigma @ sigma)
        skew = np.array(
            [
                [0.0, -sigma[2], sigma[1]],
                [sigma[2], 0.0, -sigma[0]],
                [-sigma[1], sigma[0], 0.0],
            ]
        )
        denom = (1.0 + s2) ** 2
        return np.eye(3) + (4.0 * (1.0 - s2) / denom) * skew + (8.0 / denom) * (skew @ skew)
    raise PreconditionError(f"rotation matrices are supported for d in {{2, 3}}, got d={d}")


def rotate(samples: SampleSet, rot: Rotation) -> SampleSet:
    """Rotate samples about their barycentre, leaving them centred at the origin.

    The output frame is not translated back: bin volumes and entropy are
    translation-invariant, so keeping the rotated cloud centred simplifies
    composition of successive rotations.
    """
    centred = samples.data - samples.barycentre
    if samples.d == 1:
        # nothing to rotate in one dimension; centring is the whole operation
        return SampleSet(centred)
    if samples.d == 2 and not rot.is_z_axis:
        raise PreconditionError("2-D samples require a z-axis MRP rotation")
    if samples.d > 3:
        raise PreconditionError(f"rotation is supported for d <= 3, got d={samples.d}")
    m = rotation_matrix(rot, samples.d)
    return SampleSet(centred @ m.T)
