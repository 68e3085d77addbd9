"""Boundary recovery from directional subbands of a reconstruction.

The visible-direction subbands (HL and HLbar) are cleaned into binary
subband grids, their endpoints located on a 3-D skeleton and split by
up/down continuation, grown into neighborhood estimates of the four
invisible directions with rotated candywrap stamps, and stacked into a
13-layer volume whose direction order descends the normal circle twice.
A component bridging the bottom and top copies of the visible layer
certifies one closed boundary; found components are removed and the growth
distance s increases until nothing remains.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import candywrap, cubical, morphology
from .dtcwt import LABELS, SubbandPyramid, direction, dtcwt_forward, normalize_subband, threshold_subband

SOLID3x3 = np.ones((3, 3), bool)


@dataclass(frozen=True)
class TiltConfig:
    level: int = 7  # subband grid is 2**level per side
    threshold: float = 0.09
    line_length: int = 9
    mask_n: int = 64
    s0: float = 1.0
    step: float = 0.5
    s_max: float = 20.0
    endpoint_radius: int = 1
    statement_mode: str = "literal"

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")
        if self.line_length < 3 or self.line_length % 2 == 0:
            raise ValueError("line length must be odd and >= 3")
        if self.s0 <= 0 or self.step <= 0:
            raise ValueError("s0 and step must be positive")
        if self.statement_mode not in ("literal", "relaxed"):
            raise ValueError("statement_mode must be 'literal' or 'relaxed'")

    def depth_for(self, size: int) -> int:
        depth = int(math.log2(size)) - self.level
        if depth < 1:
            raise ValueError(
                f"image size {size} too small for subband grid 2^{self.level}"
            )
        return depth


@dataclass(frozen=True)
class EndpointSet:
    """Endpoint grids per visible direction, split by continuation side."""

    hl_up: np.ndarray
    hl_down: np.ndarray
    hlbar_up: np.ndarray
    hlbar_down: np.ndarray

    def total(self) -> int:
        return int(
            self.hl_up.sum()
            + self.hl_down.sum()
            + self.hlbar_up.sum()
            + self.hlbar_down.sum()
        )


@dataclass
class FoundComponent:
    component_id: int
    birth_s: float
    stack: np.ndarray
    projection: np.ndarray
    curve: np.ndarray | None = None  # closed polyline in image pixel coords


@dataclass
class TiltReport:
    components: list
    config: TiltConfig
    image_size: int
    subband_size: int
    incomplete: bool
    iterations: int
    timings: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        comps = []
        for c in self.components:
            comps.append(
                {
                    "id": c.component_id,
                    "birth_s": c.birth_s,
                    "voxels": int(c.stack.sum()),
                    "projection_rle": cubical.rle_encode(c.projection),
                    "curve": None
                    if c.curve is None
                    else [[float(x), float(y)] for x, y in c.curve],
                }
            )
        return {
            "components": comps,
            "config": {
                "level": self.config.level,
                "threshold": self.config.threshold,
                "line_length": self.config.line_length,
                "mask_n": self.config.mask_n,
                "s0": self.config.s0,
                "step": self.config.step,
                "s_max": self.config.s_max,
                "endpoint_radius": self.config.endpoint_radius,
                "statement_mode": self.config.statement_mode,
            },
            "image_size": self.image_size,
            "subband_size": self.subband_size,
            "incomplete": self.incomplete,
            "iterations": self.iterations,
            "timings": self.timings,
        }


def compute_subbands(image, cfg: TiltConfig, pyramid: SubbandPyramid | None = None):
    """Binary subband grids for the two visible directions.

    Normalize the level-`cfg.level` HL and HLbar magnitudes, threshold,
    open with the direction's line element, then dilate with the solid 3x3
    to close small gaps.
    """
    sb, _ = _subbands_and_magnitude(image, cfg, pyramid)
    return sb


def _subbands_and_magnitude(image, cfg: TiltConfig, pyramid: SubbandPyramid | None = None):
    data = image.data if hasattr(image, "data") else np.asarray(image, float)
    n = data.shape[0]
    depth = cfg.depth_for(n)
    if pyramid is None:
        pyramid = dtcwt_forward(data, depth)
    out = {}
    mag = None
    for label in ("HL", "HLbar"):
        c_prime = normalize_subband(pyramid, label, depth)
        mag = c_prime if mag is None else mag + c_prime
        binary = threshold_subband(c_prime, cfg.threshold)
        line = morphology.make_line(direction(label), cfg.line_length)
        cleaned = morphology.opening(binary, line)
        out[label] = morphology.dilate(cleaned, SOLID3x3)
    return (out["HL"], out["HLbar"]), mag


def _expand_endpoints(seeds: np.ndarray, sb: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return seeds & sb
    box = np.ones((2 * radius + 1, 2 * radius + 1), bool)
    return morphology.dilate(seeds, box) & sb


def find_endpoints(sb_hl: np.ndarray, sb_hlbar: np.ndarray, cfg: TiltConfig) -> EndpointSet:
    """Skeleton endpoints of the stacked subband pair, split up/down.

    The two grids stack into a 2-deep volume (HL below HLbar) so arcs that
    continue from one direction into the other join across layers and only
    true loose ends survive the one-26-neighbor test. Each seed expands to
    its in-layer (2r+1)^2 neighborhood intersected with the subband, and the
    patch inherits the seed's class: up when the skeleton continues in the
    row above, down otherwise.
    """
    if sb_hl.shape != sb_hlbar.shape:
        raise ValueError("subband grids differ in shape")
    stack = np.stack([sb_hl, sb_hlbar], axis=2)
    skel = morphology.skeletonize_stack(stack)

    from scipy import ndimage

    # Seeds are each band's two geodesic ends, classified up/down by the
    # traced path's own direction at the end. The residue skeleton's
    # one-26-neighbor voxels nominally mark the same spots, but on real
    # bands its fragments sprinkle spurious mid-arc tips (whose stamps stack
    # into degenerate bridge columns) while sometimes missing the true ends,
    # and band-thickness asymmetry fools neighborhood-majority rules.
    up_seeds = np.zeros_like(stack)
    down_seeds = np.zeros_like(stack)
    for z in (0, 1):
        layer = sb_hl if z == 0 else sb_hlbar
        labels, count = ndimage.label(layer, structure=np.ones((3, 3)))
        for lab in range(1, count + 1):
            blob = labels == lab
            if blob.sum() < cfg.line_length:
                continue
            path = _trace_arc(blob)
            if path is None or len(path) < 2:
                continue
            k = min(5, len(path) - 1)
            for end, inward in ((path[0], path[k]), (path[-1], path[-1 - k])):
                d = inward - end
                nrm = np.hypot(*d)
                goes_up = nrm > 0 and d[0] <= -0.15 * nrm
                target = up_seeds if goes_up else down_seeds
                target[int(end[0]), int(end[1]), z] = True
    # A tip whose arc continues in the other visible direction is not a loose
    # end; suppress seeds whose counterpart skeleton comes within 2 cells.
    box5 = np.ones((5, 5), bool)
    for z in (0, 1):
        other = skel[:, :, 1 - z]
        if other.any():
            blocked = ~morphology.dilate(other, box5)
            up_seeds[:, :, z] &= blocked
            down_seeds[:, :, z] &= blocked

    grids = {}
    for z, (label, sb) in enumerate((("hl", sb_hl), ("hlbar", sb_hlbar))):
        e_up = _expand_endpoints(up_seeds[:, :, z], sb, cfg.endpoint_radius)
        e_all = _expand_endpoints(up_seeds[:, :, z] | down_seeds[:, :, z], sb, cfg.endpoint_radius)
        grids[label + "_up"] = e_up
        grids[label + "_down"] = e_all & ~e_up
    return EndpointSet(
        hl_up=grids["hl_up"],
        hl_down=grids["hl_down"],
        hlbar_up=grids["hlbar_up"],
        hlbar_down=grids["hlbar_down"],
    )


# DM construction: each invisible direction's neighborhood comes from
# dilating endpoint grids with a rotated basic mask; up endpoints use the
# right-handed masks, down endpoints the left-handed ones.
_DM_RULES = {
    # target: (source, plus_or_minus, rotation radians)
    "HH": ("E_HL", "+", -math.pi / 3),
    "HHbar": ("E_HLbar", "-", math.pi / 6),
    "LH": ("DM_HH", "+", -math.pi / 6),
    "LHbar": ("DM_HHbar", "-", math.pi / 3),
}


def _rotated_stamps(cfg: TiltConfig, s: float) -> dict:
    stamps = {}
    for sign in ("+", "-"):
        for side in ("R", "L"):
            base = candywrap.basic_mask(sign + side, s, cfg.mask_n)
            for _, (_, sgn, rot) in _DM_RULES.items():
                if sgn == sign:
                    stamps[(sign + side, rot)] = candywrap.rotate_mask(base, rot)
    return stamps


def build_dm(endpoints: EndpointSet, s: float, cfg: TiltConfig) -> dict:
    """Neighborhood grids DM_s for the four invisible directions."""
    stamps = _rotated_stamps(cfg, s)

    def dilate_pair(up, down, sign, rot):
        def grow(grid, stamp):
            if not grid.any() or not stamp.any():
                return np.zeros_like(grid)
            return morphology.dilate(grid, stamp)

        return (
            grow(up, stamps[(sign + "R", rot)]),
            grow(down, stamps[(sign + "L", rot)]),
        )

    sign, rot = _DM_RULES["HH"][1], _DM_RULES["HH"][2]
    hh_up, hh_down = dilate_pair(endpoints.hl_up, endpoints.hl_down, sign, rot)
    sign, rot = _DM_RULES["HHbar"][1], _DM_RULES["HHbar"][2]
    hhb_up, hhb_down = dilate_pair(endpoints.hlbar_up, endpoints.hlbar_down, sign, rot)
    sign, rot = _DM_RULES["LH"][1], _DM_RULES["LH"][2]
    lh_up, lh_down = dilate_pair(hh_up, hh_down, sign, rot)
    sign, rot = _DM_RULES["LHbar"][1], _DM_RULES["LHbar"][2]
    lhb_up, lhb_down = dilate_pair(hhb_up, hhb_down, sign, rot)

    return {
        "HH": hh_up | hh_down,
        "HHbar": hhb_up | hhb_down,
        "LH": lh_up | lh_down,
        "LHbar": lhb_up | lhb_down,
    }


# z layout of the 13-layer stack (1-based layers in the derivation):
# layers 1,7,13 = SB_HL; 2,8 = SB_HLbar; 3,9 = DM_HHbar; 4,10 = DM_LHbar;
# 5,11 = DM_LH; 6,12 = DM_HH.
_AS_LAYOUT = (
    "SB_HL", "SB_HLbar", "DM_HHbar", "DM_LHbar", "DM_LH", "DM_HH",
    "SB_HL", "SB_HLbar", "DM_HHbar", "DM_LHbar", "DM_LH", "DM_HH",
    "SB_HL",
)


def assemble_As(sb_hl: np.ndarray, sb_hlbar: np.ndarray, dm: dict) -> np.ndarray:
    grids = {
        "SB_HL": sb_hl,
        "SB_HLbar": sb_hlbar,
        "DM_HHbar": dm["HHbar"],
        "DM_LHbar": dm["LHbar"],
        "DM_LH": dm["LH"],
        "DM_HH": dm["HH"],
    }
    shapes = {g.shape for g in grids.values()}
    if len(shapes) != 1:
        raise ValueError("grid shapes differ")
    return np.stack([grids[name] for name in _AS_LAYOUT], axis=2)


def set_difference(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Clamped set difference: 1 exactly where x is set and y is not."""
    return x & ~y


def run_tilt(image, cfg: TiltConfig, pyramid: SubbandPyramid | None = None) -> TiltReport:
    """The full grow-and-remove loop over candywrap distances."""
    t_start = time.perf_counter()
    data = image.data if hasattr(image, "data") else np.asarray(image, float)
    n = data.shape[0]
    (sb_hl, sb_hlbar), magnitude = _subbands_and_magnitude(data, cfg, pyramid=pyramid)
    endpoints = find_endpoints(sb_hl, sb_hlbar, cfg)
    t_setup = time.perf_counter() - t_start

    s = cfg.s0
    dm = build_dm(endpoints, s, cfg)
    found = []
    incomplete = False
    iterations = 0
    while True:
        iterations += 1
        a_s = assemble_As(sb_hl, sb_hlbar, dm)
        if not a_s.any():
            break
        comp = cubical.bridging_component(a_s, mode=cfg.statement_mode)
        if comp is not None:
            proj = comp.projection()
            found.append(
                FoundComponent(
                    component_id=len(found),
                    birth_s=s,
                    stack=comp.stack,
                    projection=proj,
                )
            )
            # Remove the found boundary from the known subbands. A bridging
            # component carries each visible arc in at least one of its SB
            # layer copies (a single lift orientation splits the arcs across
            # z = 1, 7, 13), so subtract the union of the copies; taking only
            # z = 1 would leave live half-rings that later merge into junk.
            hit_hl = comp.layer(0) | comp.layer(6) | comp.layer(12)
            hit_hlbar = comp.layer(1) | comp.layer(7)
            sb_hl = set_difference(sb_hl, hit_hl)
            sb_hlbar = set_difference(sb_hlbar, hit_hlbar)
            endpoints = EndpointSet(
                hl_up=set_difference(endpoints.hl_up, hit_hl),
                hl_down=set_difference(endpoints.hl_down, hit_hl),
                hlbar_up=set_difference(endpoints.hlbar_up, hit_hlbar),
                hlbar_down=set_difference(endpoints.hlbar_down, hit_hlbar),
            )
            dm = build_dm(endpoints, s, cfg)
        else:
            s += cfg.step
            if s > cfg.s_max:
                incomplete = bool(a_s.any())
                break
            dm = build_dm(endpoints, s, cfg)

    t_loop = time.perf_counter() - t_start - t_setup
    scale = n / float(sb_hl.shape[0])
    for comp in found:
        curve = spline_fill(comp, sb_hl, sb_hlbar, magnitude=magnitude)
        if curve is not None:
            # subband cell (i, j) is centered on image pixel ((i+0.5)*k - 0.5)
            comp.curve = (curve + 0.5) * scale - 0.5
    report = TiltReport(
        components=found,
        config=cfg,
        image_size=n,
        subband_size=sb_hl.shape[0],
        incomplete=incomplete,
        iterations=iterations,
        timings={"setup_s": round(t_setup, 4), "loop_s": round(t_loop, 4)},
    )
    return report


def _trace_arc(arc_mask: np.ndarray) -> np.ndarray | None:
    """Ordered centerline of one thin arc component (row, col floats).

    Thins the band homotopically, then walks the graph diameter (BFS from an
    arbitrary cell to the farthest, then back), which ignores short spurs.
    """
    from collections import deque

    from skimage.morphology import skeletonize as homotopic_thin

    thin = homotopic_thin(arc_mask)
    pts = np.argwhere(thin)
    if len(pts) == 0:
        pts = np.argwhere(arc_mask)
    if len(pts) == 0:
        return None
    if len(pts) <= 2:
        return pts.astype(float)
    pts_set = {tuple(p) for p in pts}
    neigh = {}
    for p in pts_set:
        neigh[p] = [
            (p[0] + di, p[1] + dj)
            for di in (-1, 0, 1)
            for dj in (-1, 0, 1)
            if (di or dj) and (p[0] + di, p[1] + dj) in pts_set
        ]

    def bfs(start):
        prev = {start: None}
        dist = {start: 0}
        queue = deque([start])
        far = start
        while queue:
            cur = queue.popleft()
            if dist[cur] > dist[far]:
                far = cur
            for q in neigh[cur]:
                if q not in dist:
                    dist[q] = dist[cur] + 1
                    prev[q] = cur
                    queue.append(q)
        return far, prev

    a, _ = bfs(min(pts_set))
    b, prev = bfs(a)
    path = []
    cur = b
    while cur is not None:
        path.append(cur)
        cur = prev[cur]
    return np.asarray(path[::-1], float)


def _end_tangent(arc: np.ndarray, at_start: bool, k: int = 5) -> np.ndarray:
    """Unit travel direction at an arc end.

    A secant over the last few points lags a curved arc by half its turn, so
    when enough points exist the tangent comes from a least-squares circle
    through the end region, evaluated at the end point.
    """
    if len(arc) >= 10:
        pts = arc[:15] if at_start else arc[-15:]
        end = arc[0] if at_start else arc[-1]
        x, y = pts[:, 0], pts[:, 1]
        A = np.column_stack([2 * x, 2 * y, np.ones(len(pts))])
        sol, res, rank, _ = np.linalg.lstsq(A, x * x + y * y, rcond=None)
        if rank == 3:
            radial = end - sol[:2]
            nrm = np.hypot(*radial)
            r_fit = math.sqrt(max(sol[2] + sol[:2] @ sol[:2], 0.0))
            if nrm > 1e-9 and r_fit < 1e4:
                d = np.array([-radial[1], radial[0]]) / nrm
                ref = pts[-1] - pts[0]
                if d @ ref < 0:
                    d = -d
                return -d if at_start else d
    pts = arc[:k] if at_start else arc[-k:]
    if len(pts) < 2:
        return np.array([1.0, 0.0])
    d = pts[-1] - pts[0]
    if at_start:
        d = -d  # outward direction at the start end
    nrm = np.hypot(*d)
    return d / nrm if nrm > 0 else np.array([1.0, 0.0])


def _hermite(p0, t0, p1, t1, npts):
    u = np.linspace(0.0, 1.0, npts)[:, None]
    h00 = 2 * u**3 - 3 * u**2 + 1
    h10 = u**3 - 2 * u**2 + u
    h01 = -2 * u**3 + 3 * u**2
    h11 = u**3 - u**2
    return h00 * p0 + h10 * t0 + h01 * p1 + h11 * t1


def _snap_to_ridge(arc: np.ndarray, magnitude: np.ndarray, reach: float = 2.5) -> np.ndarray:
    """Move arc points to the magnitude ridge along their local normals."""
    from scipy.ndimage import map_coordinates

    n = len(arc)
    tang = np.gradient(arc, axis=0)
    norms = np.hypot(tang[:, 0], tang[:, 1])
    norms[norms == 0] = 1.0
    normal = np.column_stack([-tang[:, 1], tang[:, 0]]) / norms[:, None]
    offsets = np.linspace(-reach, reach, 11)
    samples = np.empty((len(offsets), n))
    for k, off in enumerate(offsets):
        pts = arc + off * normal
        samples[k] = map_coordinates(magnitude, pts.T, order=1, mode="nearest")
    best = samples.argmax(axis=0)
    # parabolic sub-step refinement around the peak
    step = offsets[1] - offsets[0]
    shift = offsets[best].copy()
    interior = (best > 0) & (best < len(offsets) - 1)
    idx = np.where(interior)[0]
    lo = samples[best[idx] - 1, idx]
    mid = samples[best[idx], idx]
    hi = samples[best[idx] + 1, idx]
    denom = lo - 2 * mid + hi
    ok = np.abs(denom) > 1e-12
    shift[idx[ok]] += 0.5 * step * ((lo - hi)[ok] / denom[ok])
    return arc + shift[:, None] * normal


def _trim_weak_ends(arc: np.ndarray, magnitude: np.ndarray, keep_frac: float = 0.35) -> np.ndarray:
    """Drop arc-end points whose ridge magnitude falls below a fraction of
    the arc's median; the fading tails near the visibility boundary wander."""
    from scipy.ndimage import map_coordinates

    vals = map_coordinates(magnitude, arc.T, order=1, mode="nearest")
    floor = keep_frac * np.median(vals)
    good = vals >= floor
    if good.sum() < max(6, len(arc) // 3):
        return arc
    first = int(np.argmax(good))
    last = len(good) - int(np.argmax(good[::-1])) - 1
    return arc[first : last + 1]


def spline_fill(
    component,
    sb_hl: np.ndarray,
    sb_hlbar: np.ndarray,
    magnitude: np.ndarray | None = None,
) -> np.ndarray | None:
    """Closed curve through the component's visible arcs.

    Arcs are ordered by angle about the component centroid and chained;
    gaps close with cubic Hermite segments whose end tangents come from the
    last few arc pixels. When the normalized magnitude grid is supplied,
    traced arc points snap to its ridge, removing the thinning bias. Falls
    back to a periodic spline through the projection skeleton when fewer
    than two arcs are available.
    """
    from scipy import ndimage

    st = component.stack
    arcs_mask = st[:, :, 0] | st[:, :, 1] | st[:, :, 6] | st[:, :, 7] | st[:, :, 12]
    labels, count = ndimage.label(arcs_mask, structure=np.ones((3, 3)))
    arcs = []
    for lab in range(1, count + 1):
        tr = _trace_arc(labels == lab)
        if tr is None:
            continue
        if len(tr) > 12:
            tr = tr[2:-2]  # thinning hooks corrupt the very ends
        if len(tr) >= 5:
            tr = ndimage.uniform_filter1d(tr, 5, axis=0, mode="nearest")
            if magnitude is not None:
                tr = _snap_to_ridge(tr, magnitude)
                tr = _trim_weak_ends(tr, magnitude)
                tr = ndimage.uniform_filter1d(tr, 3, axis=0, mode="nearest")
        if len(tr) >= 2:
            arcs.append(tr)

    if len(arcs) < 2:
        proj = component.stack.any(axis=2)
        tr = _trace_arc(proj) if proj.any() else None
        if tr is None or len(tr) < 3:
            return None
        centroid = tr.mean(axis=0)
        ang = np.arctan2(tr[:, 1] - centroid[1], -(tr[:, 0] - centroid[0]))
        tr = tr[np.argsort(ang)]
        return _close_periodic(tr)

    centroid = np.concatenate(arcs).mean(axis=0)

    def angle_of(p):
        return math.atan2(p[1] - centroid[1], -(p[0] - centroid[0]))

    oriented = []
    for arc in arcs:
        a0, a1 = angle_of(arc[0]), angle_of(arc[-1])
        # orient each arc counterclockwise in angle
        span = (a1 - a0) % (2 * math.pi)
        if span > math.pi:
            arc = arc[::-1]
        oriented.append(arc)
    oriented.sort(key=lambda a: angle_of(a[0]))

    # Neighboring visible arcs overlap in angle where directions blend; trim
    # each arc back so consecutive pieces advance monotonically.
    trimmed = []
    for i, arc in enumerate(oriented):
        nxt_start = angle_of(oriented[(i + 1) % len(oriented)][0])
        rel = (np.array([angle_of(p) for p in arc]) - angle_of(arc[0])) % (2 * math.pi)
        limit = (nxt_start - angle_of(arc[0])) % (2 * math.pi)
        if i + 1 < len(oriented) and limit > 0:
            keep = rel <= limit
            if keep.sum() >= 2:
                arc = arc[keep]
        trimmed.append(arc)

    pieces = []
    for i, arc in enumerate(trimmed):
        nxt = trimmed[(i + 1) % len(trimmed)]
        pieces.append(arc)
        p0, p1 = arc[-1], nxt[0]
        chord = p1 - p0
        gap = np.hypot(*chord)
        if gap > 1.5:
            d0 = _end_tangent(arc, at_start=False)
            d1 = -_end_tangent(nxt, at_start=True)
            u = chord / gap
            b0 = math.atan2(u[0] * d0[1] - u[1] * d0[0], u @ d0)
            b1 = math.atan2(u[0] * d1[1] - u[1] * d1[0], u @ d1)
            if b0 * b1 < 0 and max(abs(b0), abs(b1)) < 1.45:
                # Circle-consistent gap (tangents on opposite sides of the
                # chord): symmetrize the chord angles so the two ends'
                # tangent noise cancels, and scale as the matching circular
                # arc (Bezier circle approximation).
                beta = 0.5 * (abs(b0) + abs(b1))
                cb, sb = math.cos(beta), math.sin(beta)
                s0 = math.copysign(sb, b0)
                d0 = np.array([cb * u[0] - s0 * u[1], s0 * u[0] + cb * u[1]])
                d1 = np.array([cb * u[0] + s0 * u[1], -s0 * u[0] + cb * u[1]])
                scale = gap / (0.5 * (1.0 + cb))
                seg = _hermite(p0, d0 * scale, p1, d1 * scale, max(int(2 * gap), 4))
            else:
                # irregular gap: plain chord-magnitude Hermite
                seg = _hermite(p0, d0 * gap, p1, d1 * gap, max(int(2 * gap), 4))
            pieces.append(seg[1:-1])
    curve = np.concatenate(pieces)
    return _resample_closed(curve)


def _close_periodic(pts: np.ndarray) -> np.ndarray:
    from scipy.interpolate import CubicSpline

    closed = np.vstack([pts, pts[:1]])
    t = np.zeros(len(closed))
    t[1:] = np.cumsum(np.hypot(*np.diff(closed, axis=0).T))
    if t[-1] == 0:
        return pts
    cs = CubicSpline(t, closed, bc_type="periodic")
    u = np.linspace(0, t[-1], max(int(t[-1]), 8), endpoint=False)
    return cs(u)


def _resample_closed(curve: np.ndarray) -> np.ndarray:
    """Resample a closed polyline at <= 1 px spacing and smooth lightly."""
    closed = np.vstack([curve, curve[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    t = np.concatenate([[0.0], np.cumsum(seg)])
    total = t[-1]
    if total == 0:
        return curve
    u = np.linspace(0.0, total, max(int(math.ceil(total)), 8), endpoint=False)
    out = np.empty((len(u), 2))
    for d in range(2):
        out[:, d] = np.interp(u, t, closed[:, d])
    win = min(9, max(len(out) // 8, 1))
    if win >= 3:
        from scipy.ndimage import uniform_filter1d

        out = uniform_filter1d(out, win, axis=0, mode="wrap")
    return out
