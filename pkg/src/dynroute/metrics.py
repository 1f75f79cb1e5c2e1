"""A-posteriori objective-space transformation and 2-D hypervolume indicator
against a clairvoyant reference."""

from __future__ import annotations

from .core import ObjectiveVector, nondominated_filter


def to_aposteriori(obj: ObjectiveVector, appeared: int, total_dynamic: int) -> ObjectiveVector:
    """Count every not-yet-appeared dynamic customer as unvisited so eras and
    the clairvoyant front share one objective space."""
    if not 0 <= appeared <= total_dynamic:
        raise ValueError("need 0 <= appeared <= total_dynamic")
    if obj.unvisited > appeared:
        raise ValueError("unvisited cannot exceed the appeared count")
    return ObjectiveVector(obj.tour_length, obj.unvisited + (total_dynamic - appeared))


def hypervolume_2d(points, ref_point) -> float:
    """Area of objective space dominated by the points and bounded by the
    reference point (both objectives minimized). Points that do not weakly
    dominate the reference are discarded."""
    rx, ry = float(ref_point[0]), float(ref_point[1])
    pts = [(float(p[0]), float(p[1])) for p in points if p[0] <= rx and p[1] <= ry]
    if not pts:
        return 0.0
    keep = nondominated_filter(pts)
    front = sorted({pts[i] for i in keep})
    hv = 0.0
    prev_y = ry
    for x, y in front:
        hv += (rx - x) * (prev_y - y)
        prev_y = y
    return hv


def hv_indicator(p_set, r_set) -> float:
    """Dominated-area shortfall of P against the reference set R; lower is
    better, and 0 exactly when P dominates the same region as R.

    The reference point is the component-wise maximum over P union R plus
    (1, 1) so boundary points contribute area.
    """
    p = [(float(a), float(b)) for a, b in p_set]
    r = [(float(a), float(b)) for a, b in r_set]
    if not p or not r:
        raise ValueError("hv_indicator needs non-empty P and R")
    both = p + r
    ref = (max(x for x, _ in both) + 1.0, max(y for _, y in both) + 1.0)
    return hypervolume_2d(r, ref) - hypervolume_2d(p, ref)


def filter_by_bound(r_set, max_bound: int):
    """Keep only solutions whose unvisited count is within the bound."""
    return [p for p in r_set if p[1] <= max_bound]
