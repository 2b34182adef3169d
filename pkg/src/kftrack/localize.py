"""Time-of-arrival ranging and planar trilateration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from . import mat
from .errors import (
    AmbiguousObservationError,
    ArityError,
    DomainError,
    ShapeError,
    SingularMatrixError,
    UnknownAnchorError,
)

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class Anchor:
    id: Hashable
    position: np.ndarray  # 2x1, meters

    def __post_init__(self):
        pos = mat.matrix(self.position)
        if pos.shape != (2, 1):
            raise ShapeError(f"anchor position must be 2x1, got {pos.shape}")
        object.__setattr__(self, "position", pos)

    @classmethod
    def at(cls, id, x: float, y: float) -> "Anchor":
        return cls(id, mat.column([x, y]))


@dataclass(frozen=True)
class ToaObservation:
    anchor_id: Hashable
    toa: float  # seconds

    def __post_init__(self):
        if not math.isfinite(self.toa) or self.toa < 0.0:
            raise DomainError(f"time of arrival must be finite and >= 0, got {self.toa!r}")


def toa_to_range(obs: ToaObservation) -> float:
    if obs.toa < 0.0:
        raise DomainError(f"negative time of arrival {obs.toa!r}")
    return SPEED_OF_LIGHT * obs.toa


def range_to_toa(r: float) -> float:
    return r / SPEED_OF_LIGHT


def trilaterate(anchors: Sequence[Anchor], ranges: Sequence[float]) -> np.ndarray:
    """Least-squares 2-D position from ranges to three or more anchors.

    Subtracting the first circle equation from the others gives the linear
    system ``2 (a_i - a_1)^T x = r_1^2 - r_i^2 + |a_i|^2 - |a_1|^2``, solved
    through its normal equations.
    """
    if len(anchors) < 3:
        raise ArityError(f"trilateration needs at least 3 anchors, got {len(anchors)}")
    if len(ranges) != len(anchors):
        raise ShapeError(f"{len(ranges)} ranges for {len(anchors)} anchors")
    pts = [a.position[:, 0] for a in anchors]
    a1, r1 = pts[0], float(ranges[0])
    rows, rhs = [], []
    for ai, ri in zip(pts[1:], ranges[1:]):
        rows.append(2.0 * (ai - a1))
        rhs.append(r1 * r1 - float(ri) ** 2 + ai @ ai - a1 @ a1)
    m = mat.matrix(rows)
    b = mat.column(rhs)
    mt = mat.mat_transpose(m)
    try:
        normal_inv = mat.mat_inverse(mat.mat_mul(mt, m))
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            exc.column, exc.pivot, "anchors are collinear or coincident"
        ) from exc
    return mat.mat_mul(normal_inv, mat.mat_mul(mt, b))


def fix_position(
    anchors: Sequence[Anchor], observations: Sequence[ToaObservation]
) -> np.ndarray:
    """Trilaterate from ToA observations, matched to anchors by id.

    Anchors are used in the order given by ``anchors``, so the result does
    not depend on the order of ``observations``.
    """
    by_id = {}
    for obs in observations:
        if obs.anchor_id in by_id:
            raise AmbiguousObservationError(
                f"more than one observation for anchor {obs.anchor_id!r}"
            )
        by_id[obs.anchor_id] = obs
    known = {a.id for a in anchors}
    for anchor_id in by_id:
        if anchor_id not in known:
            raise UnknownAnchorError(f"observation references unknown anchor {anchor_id!r}")
    used = [a for a in anchors if a.id in by_id]
    if len(used) < 3:
        raise ArityError(f"need observations from at least 3 anchors, got {len(used)}")
    return trilaterate(used, [toa_to_range(by_id[a.id]) for a in used])
