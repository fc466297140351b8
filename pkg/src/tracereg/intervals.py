"""Interval bookkeeping for perturbed composites.

When the boundary data is noisy, the usable part of the coefficient's
domain is the intersection of the exact image with the perturbed image.
This module computes that intersection, its preimage under the perturbed
composite, and the admissible noise threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateIntersection
from .func1d import CurveComposite, Interval, invert_monotone

_FP_SLACK = 1e-12


@dataclass(frozen=True)
class IntersectionResult:
    """Common interval of two sampled images plus its preimage.

    ``endpoint_gaps`` holds |lo1 - lo2| and |hi1 - hi2| of the two images;
    both are bounded by the sup distance of the composites.
    """

    common: Interval
    preimage: Interval
    endpoint_gaps: tuple[float, float]

    def __post_init__(self) -> None:
        if not (-_FP_SLACK <= self.preimage.lo
                and self.preimage.hi <= 1.0 + _FP_SLACK):
            raise ValueError("preimage must lie inside the parameter interval")
        if min(self.endpoint_gaps) < 0.0:
            raise ValueError("endpoint gaps must be nonnegative")


def intersect_images(phi1: CurveComposite, phi2: CurveComposite,
                     eta: float) -> IntersectionResult:
    """Intersect the images of two monotone composites.

    Requires the sup gap of the two samples to be at most ``eta`` and the
    non-degeneracy condition 2*eta < min of the image lengths; under these
    the intersection is a non-degenerate interval whose endpoints differ
    from either image's endpoints by at most eta.  The preimage is taken
    through ``phi2`` (the perturbed map in the pipeline).
    """
    if eta < 0.0:
        raise ValueError("eta must be nonnegative")
    if phi1.forward.n != phi2.forward.n:
        raise ValueError("composites must share one sampling grid")
    gap = float(np.abs(phi1.forward.values - phi2.forward.values).max())
    if gap > eta * (1.0 + _FP_SLACK) + _FP_SLACK:
        raise ValueError(f"sup gap {gap:.3e} exceeds declared eta {eta:.3e}")

    im1, im2 = phi1.image(), phi2.image()
    if 2.0 * eta >= min(im1.length(), im2.length()):
        raise DegenerateIntersection(
            "2*eta < min image length fails (noise level must stay below "
            "min{(g1-g0)/4, C_g/2}); "
            f"eta={eta:.3e}, lengths=({im1.length():.3e}, {im2.length():.3e})")

    lo = max(im1.lo, im2.lo)
    hi = min(im1.hi, im2.hi)
    common = Interval(lo, hi)
    gaps = (abs(im1.lo - im2.lo), abs(im1.hi - im2.hi))

    t_ends = sorted((float(invert_monotone(phi2, lo)), float(invert_monotone(phi2, hi))))
    preimage = Interval(t_ends[0], t_ends[1])
    return IntersectionResult(common=common, preimage=preimage, endpoint_gaps=gaps)


def admissible_eps(problem) -> float:
    """Strict upper bound for the C1 noise level of a problem instance:
    min{(g1 - g0)/4, C_g/2}.  Experiments must choose eps below this."""
    return min(problem.interval.length() / 4.0, problem.c_g / 2.0)
