"""Interface transformations: wall clusters, the pillar isolation map and its witness,
pillar swapping, pillar deletion and column insertion.

All maps acting inside a region S work on the restricted interface, whose
ceiling over S sits at height 0, and lift the result back with the exterior
walls.  Distances between planar or spatial elements are Euclidean distances
between midpoints, in lattice units.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import GuaranteeViolation, PreconditionError
from .interface import Interface, cells_to_minus, cells_to_plus, extract, spins_of
from .lattice import Box, Region, cylinder, star_closure_2d
from .pillars import (
    TRIVIAL_INCREMENT,
    Increment,
    Pillar,
    bottom_face,
    bounding_faces,
    hgt,
    increments,
    pillar,
    spine_from_increments,
    spine_of_cells,
    split,
    top_face,
)
from .walls import (
    Ceiling,
    Decomposition,
    StandardWallCollection,
    Wall,
    ceiling_of_collection,
    edge_faces_2d,
    face_edges_2d,
    in_collection_event,
    reconstruct,
    wall_column,
    wall_excess,
)


# ---------------------------------------------------------------- geometry


def _points(elements, dim: int) -> np.ndarray:
    arr = np.asarray([tuple(u)[:dim] for u in elements], dtype=np.float64).reshape(-1, dim)
    return arr / 2.0


def _min_distance(A, B, dim: int) -> float:
    """Minimal distance between two element sets; inf when either is empty."""
    A = list(A)
    B = list(B)
    if not A or not B:
        return math.inf
    tree = cKDTree(_points(B, dim))
    d, _ = tree.query(_points(A, dim), k=1)
    return float(np.min(d))


def _face_distance(y, x) -> float:
    return math.hypot(y[0] - x[0], y[1] - x[1]) / 2.0


def _inside_region(elements, faces: frozenset) -> bool:
    """Whether every planar element lies in the closed region covered by the faces.

    Faces must belong to the region; edges must have both neighbouring faces in it.
    """
    for u in elements:
        if u[0] % 2 and u[1] % 2:
            if u not in faces:
                return False
        elif (u[0] + u[1]) % 2:
            if not all(f in faces for f in edge_faces_2d(u)):
                return False
        else:
            return False
    return True


def _edge_boundary_2d(faces) -> frozenset:
    return frozenset((e[0], e[1]) for e in Region(frozenset(faces)).edge_boundary())


def _in_base(box: Box, u) -> bool:
    return abs(u[0]) < 2 * box.n and abs(u[1]) < 2 * box.m


# ---------------------------------------------------------------- clusters


def ceiling_hull(C: Ceiling, box: Box) -> frozenset:
    """Projection of the hull of a ceiling; the whole base for the outer ceiling."""
    if C.outer:
        return frozenset((f[0], f[1]) for f in box.base_faces)
    return C.hull_projection


def closely_nested(W: Wall, C: Ceiling, box: Box) -> bool:
    """W lies over the hull of C and within m(W) of its edge boundary."""
    hull_faces = ceiling_hull(C, box)
    if not _inside_region(W.projection, hull_faces):
        return False
    boundary = _edge_boundary_2d(hull_faces)
    return _min_distance(boundary, W.projection, 2) <= wall_excess(W)


@dataclass(frozen=True)
class WallCluster:
    """Seed walls, and the walls added at each closure generation."""

    seeds: frozenset
    generations: tuple = ()

    @cached_property
    def walls(self) -> frozenset:
        out = set(self.seeds)
        for g in self.generations:
            out |= g
        return frozenset(out)

    def __len__(self) -> int:
        return len(self.walls)

    def __iter__(self):
        return iter(sorted(self.walls, key=lambda w: w.min_face))

    @property
    def excess(self) -> int:
        return sum(wall_excess(W) for W in self.walls)

    def standardized(self, decomp: Decomposition) -> list:
        return sorted((decomp.standard_of(W) for W in self.walls), key=lambda w: w.min_face)

    def projection(self) -> frozenset:
        out = set()
        for W in self.walls:
            out |= W.projection
        return frozenset(out)


def _nested_walls(C: Ceiling, decomp: Decomposition) -> list:
    hull_faces = ceiling_hull(C, decomp.box)
    return [W for W in decomp.walls if _inside_region(W.projection, hull_faces)]


def ceiling_cluster(C: Ceiling, decomp: Decomposition) -> WallCluster:
    """Walls closely nested in C, closed under close nesting in members' interior ceilings."""
    box = decomp.box
    first = frozenset(W for W in _nested_walls(C, decomp) if closely_nested(W, C, box))
    return _close(frozenset(), first, decomp)


def _close(seeds: frozenset, first: frozenset, decomp: Decomposition) -> WallCluster:
    box = decomp.box
    seen = set(seeds) | set(first)
    gens = [first] if first else []
    frontier = first
    while frontier:
        new = set()
        for Wp in frontier:
            for C in decomp.interior_ceilings(Wp):
                for W in _nested_walls(C, decomp):
                    if W not in seen and closely_nested(W, C, box):
                        new.add(W)
        seen |= new
        frontier = frozenset(new)
        if frontier:
            gens.append(frontier)
    return WallCluster(seeds, tuple(gens))


def wall_cluster(V, I_or_decomp) -> WallCluster:
    """V together with the ceiling clusters of all interior ceilings of V."""
    decomp = I_or_decomp if isinstance(I_or_decomp, Decomposition) else Decomposition(I_or_decomp)
    V = frozenset(V)
    missing = [W for W in V if W not in set(decomp.walls)]
    if missing:
        raise PreconditionError("seed walls must be walls of the interface")
    box = decomp.box
    first = set()
    for Wp in V:
        for C in decomp.interior_ceilings(Wp):
            for W in _nested_walls(C, decomp):
                if W not in V and closely_nested(W, C, box):
                    first.add(W)
    return _close(V, frozenset(first), decomp)


def hull_projection_of_walls(V, decomp: Decomposition) -> frozenset:
    out = set()
    for W in V:
        out |= W.shape.nested_faces
        out |= W.projection
    return frozenset(out)


def phi_delete(V, I: Interface, W: StandardWallCollection | None = None, decomp: Decomposition | None = None) -> Interface:
    """Remove the standardized cluster of V from the standard wall representation of I."""
    d = decomp or Decomposition(I)
    V = frozenset(V)
    if W is not None:
        hull_faces = hull_projection_of_walls(V, d)
        for Wx in W.walls:
            if Wx.projection & hull_faces:
                raise PreconditionError("an exterior wall projects into the hull of V")
            if any(d.standard_of(Wv) == Wx for Wv in V if Wv in set(d.walls)):
                raise PreconditionError("V contains an exterior wall")
    cluster = wall_cluster(V, d)
    remove = set(cluster.standardized(d))
    kept = tuple(w for w in d.standard if w not in remove)
    return reconstruct(StandardWallCollection(I.box, kept))


# ---------------------------------------------------------------- isolation


@dataclass(frozen=True)
class IsoParams:
    L: int = 3
    h: int = 1

    def __post_init__(self):
        if int(self.L) < 1:
            raise PreconditionError("L must be a positive integer")
        if int(self.h) < 1:
            raise PreconditionError("h must be a positive integer")

    @property
    def L3(self) -> int:
        return self.L**3

    def wall_bound(self, dist: float) -> float | None:
        """Largest allowed excess of a wall indexed at distance dist; None when unconstrained."""
        if dist <= self.L:
            return 0.0
        if dist < self.L3 * self.h:
            return math.log(dist)
        return None

    def increment_bound(self, t: int) -> int:
        return 0 if t <= self.L3 else t


@dataclass(frozen=True)
class ConeSets:
    """The five face sets around an isolated pillar, as membership predicates."""

    x: tuple
    ceiling_height: int
    L: int
    h: int

    def _rho_dist(self, f) -> float:
        return _face_distance(f, self.x)

    def _z(self, f) -> float:
        return f[2] / 2.0 - self.ceiling_height

    def in_cone(self, f) -> bool:
        z = self._z(f)
        if not (self.L**3 < z < 10 * self.h):
            return False
        return self._rho_dist(f) <= min(z * z, 10 * self.h)

    def in_column(self, f) -> bool:
        """Bounding faces of the L^3 cells above x, except the bottom face."""
        z = self._z(f)
        if not 0 < z <= self.L**3:
            return False
        dx, dy = abs(f[0] - self.x[0]), abs(f[1] - self.x[1])
        if f[2] % 2:
            return (dx, dy) in ((1, 0), (0, 1))
        return dx == 0 and dy == 0

    def in_flat(self, f) -> bool:
        return f[2] % 2 == 0 and self._z(f) == 0 and self._rho_dist(f) <= self.L

    def in_low_cone(self, f) -> bool:
        d = self._rho_dist(f)
        if d < self.L:
            return False
        return self._z(f) <= math.log(d) ** 2

    def in_exterior(self, f) -> bool:
        return self._rho_dist(f) > self.L**3 * self.h

    def pillar_side(self, f) -> bool:
        return self.in_cone(f) or self.in_column(f)

    def environment_side(self, f) -> bool:
        return self.in_flat(f) or self.in_low_cone(f) or self.in_exterior(f)

    def overlap(self, box: Box) -> list:
        """Faces of the box lying in both the pillar side and the environment side."""
        out = []
        for f in _box_faces(box):
            g = (f[0], f[1], f[2] + 2 * self.ceiling_height)
            if self.pillar_side(g) and self.environment_side(g):
                out.append(g)
        return out

    def containment(self, pillar_faces, other_faces) -> dict:
        bad_p = sorted(f for f in pillar_faces if not self.pillar_side(f))
        bad_o = sorted(f for f in other_faces if not self.environment_side(f))
        return {"pillar_outside": bad_p, "environment_outside": bad_o}


def _box_faces(box: Box):
    n, m, H = box.n, box.m, box.H
    for x in range(-2 * n, 2 * n + 1):
        for y in range(-2 * m, 2 * m + 1):
            for z in range(-2 * H, 2 * H + 1):
                if (x % 2) + (y % 2) + (z % 2) == 2:
                    yield (x, y, z)


def cone_sets(x, ceiling_height: int, p: IsoParams) -> ConeSets:
    return ConeSets((int(x[0]), int(x[1])), int(ceiling_height), p.L, p.h)


@dataclass(frozen=True)
class IsolationReport:
    empty_base: bool
    increment_violations: tuple
    spine_faces: int
    spine_bound: int
    wall_violations: tuple

    @property
    def isolated(self) -> bool:
        return (
            self.empty_base
            and not self.increment_violations
            and self.spine_faces <= self.spine_bound
            and not self.wall_violations
        )

    def to_json(self) -> dict:
        return {
            "isolated": self.isolated,
            "empty_base": self.empty_base,
            "increment_violations": [list(v) for v in self.increment_violations],
            "spine_faces": self.spine_faces,
            "spine_bound": self.spine_bound,
            "wall_violations": [[list(y), d, m] for y, d, m in self.wall_violations],
        }


def isolation_report_restricted(R: Interface, x, p: IsoParams, P: Pillar | None = None) -> IsolationReport:
    """Isolation check for an interface whose ceiling over x is at height 0."""
    x = (int(x[0]), int(x[1]))
    P = P if P is not None else pillar(R, x)
    if P.empty:
        empty_base, inc_viol, spine_n = True, (), 0
    else:
        sp = split(P)
        empty_base = bool(sp.cut_points) and not sp.base_cells and sp.cut_points[0] == (x[0], x[1], 1)
        seq = increments(sp)
        inc_viol = tuple(
            (t, m) for t, m in enumerate(seq.excesses(), start=1) if m > p.increment_bound(t)
        )
        spine_n = len(sp.spine_faces)
    T = R if P.empty else cells_to_minus(R, P.cells)
    d = Decomposition(T)
    wall_viol = []
    for y, k in sorted(d.index.items()):
        dist = _face_distance(y, x)
        bound = p.wall_bound(dist)
        if bound is None:
            continue
        m = wall_excess(d.walls[k])
        if m > bound:
            wall_viol.append((y, dist, m))
    return IsolationReport(empty_base, inc_viol, spine_n, 10 * p.h, tuple(wall_viol))


def _restricted(I: Interface, S: Region | None, W: StandardWallCollection | None, decomp=None) -> tuple:
    """(R, S, W, ceiling height) with input checks shared by the maps."""
    box = I.box
    S = S or Region.full(box)
    d = decomp or Decomposition(I)
    if W is None:
        W = StandardWallCollection(box, tuple(d.standard_of(w) for w in d.exterior_walls(S)))
    elif not in_collection_event(I, W, S, d):
        raise PreconditionError("interface does not have the given exterior walls")
    if W.walls:
        _, _, hc = ceiling_of_collection(W, S)
    else:
        hc = 0
    inner = [d.standard_of(w) for w in d.interior_walls(S)]
    R = reconstruct(StandardWallCollection(box, tuple(inner)))
    return R, S, W, hc


def isolation_report(I: Interface, x, S: Region | None = None, W=None, p: IsoParams = IsoParams()) -> IsolationReport:
    if S is not None and (int(x[0]), int(x[1])) not in S.faces:
        raise PreconditionError("x must lie in S")
    R, S, W, _ = _restricted(I, S, W)
    return isolation_report_restricted(R, x, p)


def is_isolated(I: Interface, x, S: Region | None = None, W=None, p: IsoParams = IsoParams()) -> bool:
    return isolation_report(I, x, S, W, p).isolated


def cone_containment(I: Interface, x, S: Region | None = None, W=None, p: IsoParams = IsoParams()) -> dict:
    """Faces of the restricted pillar and of the rest falling outside their cone sets."""
    R, S, W, _ = _restricted(I, S, W)
    P = pillar(R, x)
    cs = cone_sets(x, 0, p)
    rest = R.face_set - P.faces
    return cs.containment(P.faces, rest)


# ---------------------------------------------------------------- the isolation map


@dataclass
class PhiIsoTrace:
    x: tuple
    L: int
    h: int
    T: int = 0
    spine_empty: bool = False
    marked: list = field(default_factory=list)  # (y, reason)
    deleted: list = field(default_factory=list)  # standard walls removed
    deleted_index: list = field(default_factory=list)  # one base face per deleted wall
    deleted_excess: int = 0
    h_dagger: int | None = None
    y_dagger: tuple | None = None
    a1_steps: list = field(default_factory=list)
    a2_steps: list = field(default_factory=list)  # (j, y)
    y_star: tuple | None = None
    j_star: int = 0
    a3: bool = False
    a3_spine: bool = False
    a3_tall_base: bool = False
    column_height: int = 0  # the column height read from v1
    column_height_out: int = 0  # the column actually inserted
    increment_excesses: list = field(default_factory=list)
    spine_faces: int = 0
    pillar_height: int = 0
    attach: int = 0
    excess: int = 0
    context: dict = field(default_factory=dict, repr=False)

    @property
    def column_faces(self) -> int:
        return 4 * self.column_height_out

    def balance(self) -> int:
        """m(I;J) predicted from the trace."""
        base = self.deleted_excess - 4 * self.column_height + self.attach
        if self.spine_empty:
            return self.deleted_excess - 4 * self.column_height_out
        if self.a3:
            return base + sum(self.increment_excesses) + 4 * (self.pillar_height - 1 - self.h)
        return base + sum(self.increment_excesses[: self.j_star])

    def bounds(self) -> dict:
        m = self.excess
        out = {
            "column": self.column_faces <= 2 * m,
            "deleted": self.deleted_excess <= 3 * m,
        }
        if self.a3:
            out["a3_height"] = self.h - self.column_height_out <= m
        else:
            out["j_star"] = self.j_star - 1 <= max(2, self.L**3) * m
        return out

    def to_json(self) -> dict:
        return {
            "x": list(self.x),
            "L": self.L,
            "h": self.h,
            "T": self.T,
            "spine_empty": self.spine_empty,
            "marked": [[list(y), r] for y, r in self.marked],
            "deleted_index": [list(y) for y in self.deleted_index],
            "deleted_excess": self.deleted_excess,
            "h_dagger": self.h_dagger,
            "y_dagger": list(self.y_dagger) if self.y_dagger else None,
            "a1_steps": self.a1_steps,
            "a2_steps": [[j, list(y)] for j, y in self.a2_steps],
            "y_star": list(self.y_star) if self.y_star else None,
            "j_star": self.j_star,
            "a3": self.a3,
            "a3_spine": self.a3_spine,
            "a3_tall_base": self.a3_tall_base,
            "column_height": self.column_height,
            "column_height_out": self.column_height_out,
            "increment_excesses": self.increment_excesses,
            "spine_faces": self.spine_faces,
            "pillar_height": self.pillar_height,
            "attach": self.attach,
            "excess": self.excess,
            "balance": self.balance(),
            "bounds": self.bounds(),
        }


def _increment_faces(cells, remainder: bool) -> frozenset:
    """Faces of an increment in place."""
    cells = frozenset(cells)
    zb = min(c[2] for c in cells)
    zt = max(c[2] for c in cells)
    bottom = next(c for c in cells if c[2] == zb)
    top = min(c for c in cells if c[2] == zt)
    out = bounding_faces(cells)
    out.discard(bottom_face(bottom))
    out.discard(top_face(top))
    return frozenset(out)


def _index_of(W: Wall) -> tuple:
    return min(W.shape.index_faces) if W.shape.index_faces else W.min_face[:2]


def _phi_iso_restricted(R: Interface, x, p: IsoParams) -> tuple:
    box = R.box
    x = (int(x[0]), int(x[1]))
    h = p.h
    trace = PhiIsoTrace(x, p.L, h)
    P = pillar(R, x)
    sp = split(P)
    trace.pillar_height = hgt(P)
    spine_empty = not sp.cut_points
    trace.spine_empty = spine_empty
    if spine_empty:
        seq = None
        Rt = R
        v1 = None
        rho_v1 = x
        trace.column_height = min(hgt(P), h)
    else:
        seq = increments(sp)
        trace.T = seq.T
        trace.increment_excesses = seq.excesses()
        trace.spine_faces = len(sp.spine_faces)
        Rt = cells_to_minus(R, sp.spine_cells)
        # 0 unless the cell below v1 is minus, so that removing the spine also removes its bottom face
        trace.attach = len(R) - len(Rt) - trace.spine_faces + 1
        v1 = sp.cut_points[0]
        rho_v1 = (v1[0], v1[1])
        trace.column_height = (v1[2] - 1) // 2
    dt = Decomposition(Rt)
    index = dt.index
    marked = {}

    def mark(y, reason):
        y = (int(y[0]), int(y[1]))
        if _in_base(box, y) and y not in marked:
            marked[y] = reason

    # base modification
    for f in star_closure_2d(x):
        mark(f, "xbar")
    mark(rho_v1, "v1")
    nested_v1 = dt.nesting_walls(rho_v1)
    if nested_v1:
        Rv = reconstruct(StandardWallCollection(box, tuple(dt.standard_of(W) for W in nested_v1)))
        Pv = pillar(Rv, rho_v1)
        cuts = Pv.cut_points
        if cuts:
            hd = max(c[2] for c in cuts)
            trace.h_dagger = (hd - 1) // 2
            v1_faces = set()
            for W in nested_v1:
                v1_faces |= W.faces
            owner = {}
            for k, W in enumerate(dt.walls):
                for f in W.faces:
                    owner[f] = k
            cands = set()
            for f in P.faces:
                if f[2] == hd and f not in v1_faces and f in owner:
                    cands.add(owner[f])
            if cands:
                trace.y_dagger = min(_index_of(dt.walls[k]) for k in cands)
                mark(trace.y_dagger, "cut-height")
    # spine modification
    if not spine_empty:
        placed = seq.placed
        ceilings = []
        for k, W in enumerate(dt.walls):
            faces = set()
            for C in dt.interior_ceilings(W):
                faces |= C.faces
            if faces:
                ceilings.append((k, cKDTree(_points(faces, 3))))
        s = 0
        for j in range(1, seq.T + 2):
            Xj = placed[j - 1]
            mj = trace.increment_excesses[j - 1]
            if mj >= (0 if j <= p.L3 else j - 1):
                s = j
                trace.a1_steps.append(j)
            pts = _points(_increment_faces(Xj, j == seq.T + 1), 3)
            hits = []
            for k, tree in ceilings:
                dmin = float(np.min(tree.query(pts, k=1)[0]))
                if dmin <= (j - 1) / 2:
                    hits.append(k)
            if hits:
                s = j
                ys = min(_index_of(dt.walls[k]) for k in hits)
                trace.y_star = ys
                trace.a2_steps.append((j, ys))
        trace.j_star = s
        if trace.y_star is not None:
            mark(trace.y_star, "A2")
        trace.a3_spine = trace.spine_faces > 5 * h
        trace.a3_tall_base = trace.column_height > h
        if trace.a3_spine or trace.a3_tall_base:
            trace.a3 = True
            trace.j_star = seq.T + 1
    # environment modification
    for y in cylinder(x, p.L3 * h, box):
        y = (y[0], y[1])
        k = index.get(y)
        if k is None:
            continue
        dist = _face_distance(y, x)
        if dist >= p.L3 * h:
            continue
        bound = 0 if dist <= p.L else math.log(dist)
        if wall_excess(dt.walls[k]) >= bound:
            mark(y, "environment")
    trace.marked = sorted(marked.items())
    # deletion
    clusters = {}
    removed = set()
    for y in sorted(marked):
        V = dt.nesting_walls(y)
        cl = wall_cluster(V, dt)
        clusters[y] = (V, cl)
        removed |= set(cl.walls)
    removed_list = sorted(removed, key=lambda w: w.min_face)
    trace.deleted = [dt.standard_of(W) for W in removed_list]
    trace.deleted_index = [_index_of(W) for W in removed_list]
    trace.deleted_excess = sum(wall_excess(W) for W in removed_list)
    kept = [dt.standard_of(W) for W in dt.walls if W not in removed]
    # column and new spine
    if spine_empty:
        hJ = trace.column_height
        new_seq, new_rem = None, None
    elif trace.a3:
        hJ = min(trace.column_height, h)
        new_seq, new_rem = [TRIVIAL_INCREMENT] * (h - hJ), None
    else:
        hJ = trace.column_height
        js = trace.j_star
        if js <= seq.T:
            z_next = seq.cut_points[js][2]
            rest, new_rem = list(seq.increments[js:]), seq.remainder
        else:
            z_next = 2 * trace.pillar_height - 1
            rest, new_rem = [], None
        new_seq = [TRIVIAL_INCREMENT] * ((z_next - v1[2]) // 2) + rest
    trace.column_height_out = hJ
    col = [wall_column(x, hJ)] if hJ > 0 else []
    K = reconstruct(StandardWallCollection(box, tuple(kept + col)))
    if new_seq is None:
        J = K
        new_spine = None
    else:
        new_spine = spine_from_increments((x[0], x[1], 2 * hJ + 1), new_seq, new_rem)
        J = cells_to_plus(K, new_spine.cells)
        if len(J) != len(K) - 1 + len(new_spine.faces):
            raise GuaranteeViolation("appended spine touches the rest of the interface")
    trace.excess = len(R) - len(J)
    trace.context = {
        "R": R,
        "Rt": Rt,
        "decomp_t": dt,
        "seq": seq,
        "clusters": clusters,
        "pillar": P,
        "new_spine": new_spine,
    }
    return J, trace


def phi_iso(I: Interface, x, S: Region | None = None, W=None, p: IsoParams = IsoParams(), check: bool = True) -> tuple:
    """The isolation map; returns (J, trace)."""
    x = (int(x[0]), int(x[1]))
    if S is not None and x not in S.faces:
        raise PreconditionError("x must lie in S")
    d = Decomposition(I)
    R, S, W, hc = _restricted(I, S, W, d)
    JR, trace = _phi_iso_restricted(R, x, p)
    JR_walls = Decomposition(JR).standard
    J = reconstruct(W.with_walls(JR_walls))
    trace.excess = len(I) - len(J)
    trace.context.update({"S": S, "W": W, "ceiling_height": hc, "JR": JR})
    if check:
        _check_phi_iso(I, J, JR, x, S, W, p, trace)
    return J, trace


def _check_phi_iso(I, J, JR, x, S, W, p, trace) -> None:
    J.validate()
    if not in_collection_event(J, W, S):
        raise GuaranteeViolation("output lost the exterior walls")
    rep = isolation_report_restricted(JR, x, p)
    if not rep.isolated:
        raise GuaranteeViolation(f"output pillar is not isolated: {rep.to_json()}")
    h_in = trace.pillar_height
    h_out = hgt(pillar(JR, x))
    if h_out < min(h_in, p.h):
        raise GuaranteeViolation(f"pillar height dropped from {h_in} to {h_out}")
    if trace.balance() != trace.excess:
        raise GuaranteeViolation(f"excess {trace.excess} differs from the balance {trace.balance()}")


# ---------------------------------------------------------------- witness


@dataclass(frozen=True)
class Witness:
    """Coloured faces in the coordinates of the restricted interface."""

    green: frozenset
    components: tuple  # (y, blue faces, red faces)

    @cached_property
    def blue(self) -> frozenset:
        out = set()
        for _, b, _ in self.components:
            out |= b
        return frozenset(out)

    @cached_property
    def red(self) -> frozenset:
        out = set()
        for _, _, r in self.components:
            out |= r
        return frozenset(out)

    @property
    def size(self) -> int:
        return len(self.green) + len(self.blue) + len(self.red)

    def to_json(self) -> dict:
        return {
            "green": [list(f) for f in sorted(self.green)],
            "components": [
                {"y": list(y), "blue": [list(f) for f in sorted(b)], "red": [list(f) for f in sorted(r)]}
                for y, b, r in self.components
            ],
        }

    def digest(self) -> str:
        doc = {
            "green": sorted(self.green),
            "blue": sorted(self.blue),
            "red": sorted(self.red),
        }
        return hashlib.sha256(json.dumps(doc, separators=(",", ":")).encode()).hexdigest()


def _touching_faces(W: Wall, box: Box) -> set:
    """Base faces in the projection of W or bounded by one of its edges."""
    out = set()
    for u in W.projection:
        if u[0] % 2 and u[1] % 2:
            out.add(u)
        elif (u[0] + u[1]) % 2:
            out.update(edge_faces_2d(u))
    return {f for f in out if _in_base(box, f)}


def connector_path(A: set, B: set, box: Box) -> list:
    """Lexicographically smallest shortest path of base faces from A to B; empty when they meet."""
    if A & B:
        return []
    dist = {f: 0 for f in B}
    queue = deque(sorted(B))
    while queue:
        u = queue.popleft()
        for v in sorted((u[0] + dx, u[1] + dy) for dx, dy in ((2, 0), (-2, 0), (0, 2), (0, -2))):
            if _in_base(box, v) and v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    starts = [f for f in A if f in dist]
    if not starts:
        raise GuaranteeViolation("connector endpoints are not connected in the base")
    best = min(dist[f] for f in starts)
    u = min(f for f in starts if dist[f] == best)
    path = [u]
    while dist[u] > 0:
        nxt = [
            (u[0] + dx, u[1] + dy)
            for dx, dy in ((2, 0), (-2, 0), (0, 2), (0, -2))
            if dist.get((u[0] + dx, u[1] + dy)) == dist[u] - 1
        ]
        u = min(nxt)
        path.append(u)
    return path


def witness(I: Interface, J: Interface, x, trace: PhiIsoTrace) -> Witness:
    """Green increments trivialized by the map, and per marked face its deleted walls and connectors."""
    ctx = trace.context
    if not ctx:
        raise PreconditionError("the witness needs the trace of the map application")
    box = I.box
    green = set()
    seq = ctx["seq"]
    if seq is not None:
        for j in range(1, trace.j_star + 1):
            green |= _increment_faces(seq.placed[j - 1], j == seq.T + 1)
    dt = ctx["decomp_t"]
    emitted = set()
    comps = []
    for y, _ in trace.marked:
        V, cl = ctx["clusters"][y]
        gamma = [W for W in cl if W not in emitted]
        if not gamma:
            continue
        emitted |= set(gamma)
        blue = set()
        for W in gamma:
            blue |= dt.standard_of(W).faces
        red = set()
        seq_set = set(V)
        for W in gamma:
            if W in seq_set:
                outer = [Wo for Wo in V if Wo is not W and Wo.shape.nests(_representative(W))]
            else:
                outer = [Wo for Wo in V if Wo.shape.nests(_representative(W))]
            if not outer:
                continue
            inner = min(outer, key=lambda Wo: len(Wo.shape.nested_faces))
            for f in connector_path(_touching_faces(W, box), _touching_faces(inner, box), box):
                red.add((f[0], f[1], 0))
        comps.append((y, frozenset(blue), frozenset(red)))
    return Witness(frozenset(green), tuple(comps))


def _representative(W: Wall) -> tuple:
    if W.shape.faces:
        return min(W.shape.faces)
    return min(W.shape.nested_faces) if W.shape.nested_faces else edge_faces_2d(min(W.shape.edges))[0]


def _cells_from_green(green) -> frozenset:
    """Cells enclosed by the green faces: column parity between the lowest and highest green levels."""
    vert = [f for f in green if f[2] % 2]
    if not vert:
        return frozenset()
    zb = min(f[2] for f in vert)
    zt = max(f[2] for f in vert)
    low = [f for f in vert if f[2] == zb]
    cx = round(sum(f[0] for f in low) / len(low))
    cy = round(sum(f[1] for f in low) / len(low))
    cols = {(f[0], f[1]) for f in green if f[2] % 2 == 0}
    for f in vert:
        if f[0] % 2 == 0:
            cols.update({(f[0] - 1, f[1]), (f[0] + 1, f[1])})
        else:
            cols.update({(f[0], f[1] - 1), (f[0], f[1] + 1)})
    cells = set()
    for a, b in cols:
        inside = (a, b) == (cx, cy)
        for z in range(zb, zt + 1, 2):
            if z > zb and (a, b, z - 1) in green:
                inside = not inside
            if inside:
                cells.add((a, b, z))
    return frozenset(cells)


def witness_reconstruct(J: Interface, w: Witness, x, S: Region | None = None, W=None, p: IsoParams = IsoParams()) -> Interface:
    """Recover the pre-image of J from its witness."""
    x = (int(x[0]), int(x[1]))
    box = J.box
    RJ, S, W, _ = _restricted(J, S, W)
    PJ = pillar(RJ, x)
    cells_A = _cells_from_green(w.green)
    if cells_A:
        v1 = min(cells_A, key=lambda c: c[2])
        zt = max(c[2] for c in cells_A)
        top_cells = [c for c in cells_A if c[2] == zt]
        col = (v1[2] - 1) // 2
        a3 = len(top_cells) > 1 or len(spine_of_cells(cells_A).faces) > 5 * p.h or col > p.h
        if a3:
            spine = cells_A
        else:
            above = [c for c in PJ.cells if c[2] >= zt]
            bottom = [c for c in above if c[2] == zt]
            if len(bottom) != 1:
                raise GuaranteeViolation("witness does not match the pillar of J")
            dx, dy = top_cells[0][0] - bottom[0][0], top_cells[0][1] - bottom[0][1]
            spine = cells_A | {(c[0] + dx, c[1] + dy, c[2]) for c in above}
    else:
        spine = frozenset()
    trunc = cells_to_minus(RJ, PJ.cells) if PJ.cells else RJ
    walls = list(Decomposition(trunc).standard)
    if w.blue:
        from .lattice import components

        for comp in components(sorted(w.blue), mode="star"):
            walls.append(Wall(frozenset(tuple(f) for f in comp)))
    Rt = reconstruct(StandardWallCollection(box, tuple(walls)))
    IR = cells_to_plus(Rt, spine) if spine else Rt
    return reconstruct(W.with_walls(Decomposition(IR).standard))


# ---------------------------------------------------------------- swap, delete, insert


def _absolute_pillar(I: Interface, x, S, W, p: IsoParams | None) -> tuple:
    R, S, W, hc = _restricted(I, S, W)
    P = pillar(R, x)
    if p is not None:
        rep = isolation_report_restricted(R, x, p, P)
        if not rep.isolated:
            return None, R, S, W, hc
    cells = frozenset((c[0], c[1], c[2] + 2 * hc) for c in P.cells)
    return cells, R, S, W, hc


def phi_swap(I: Interface, I2: Interface, x, x2, S: Region | None = None, W=None, p: IsoParams = IsoParams()) -> tuple:
    """Exchange the isolated pillar of I at x (inside S) with that of I2 at x2 (in its whole box)."""
    x = (int(x[0]), int(x[1]))
    x2 = (int(x2[0]), int(x2[1]))
    cells1, _, S, W, hc = _absolute_pillar(I, x, S, W, p)
    if cells1 is None:
        raise PreconditionError("the first interface does not have an isolated pillar at x")
    cells2, _, _, _, _ = _absolute_pillar(I2, x2, None, None, p)
    if cells2 is None:
        raise PreconditionError("the second interface does not have an isolated pillar at x'")
    dx, dy = x[0] - x2[0], x[1] - x2[1]
    into1 = {(c[0] + dx, c[1] + dy, c[2] + 2 * hc) for c in cells2}
    into2 = {(c[0] - dx, c[1] - dy, c[2] - 2 * hc) for c in cells1}
    J = _replace_cells(I, cells1, into1)
    J2 = _replace_cells(I2, cells2, into2)
    if len(I) + len(I2) != len(J) + len(J2):
        raise GuaranteeViolation("swap changed the total face count")
    if not in_collection_event(J, W, S):
        raise GuaranteeViolation("swap changed the exterior walls")
    return J, J2


def _replace_cells(I: Interface, remove, add) -> Interface:
    cfg = spins_of(I)
    box = I.box
    for c in remove:
        cfg.spins[box.cell_index(c)] = -1
    for c in add:
        if not box.contains_cell(c):
            raise PreconditionError(f"swapped pillar leaves the box at {c}")
        cfg.spins[box.cell_index(c)] = 1
    return extract(cfg)


def psi_delete(I: Interface, y, S: Region | None = None, W=None) -> Interface:
    """Remove the restricted pillar at y, which must have an empty base and positive height."""
    y = (int(y[0]), int(y[1]))
    cells, R, S, W, hc = _absolute_pillar(I, y, S, W, None)
    P = pillar(R, y)
    sp = split(P)
    if P.empty or not sp.cut_points or sp.base_cells or sp.cut_points[0] != (y[0], y[1], 1):
        raise PreconditionError("the pillar at y must have an empty base and positive height")
    J = cells_to_minus(I, cells)
    m = len(I) - len(J)
    sym = len(I.face_set ^ J.face_set)
    if not (m >= len(P.faces) - 1 >= sym - 2):
        raise GuaranteeViolation("pillar deletion excess bound failed")
    return J


def insert_column(I: Interface, x, h: int, S: Region | None = None, W=None) -> Interface:
    """Add the standard column wall of height h over x; no wall may nest a face of the star closure of x."""
    x = (int(x[0]), int(x[1]))
    if h < 1:
        raise PreconditionError("column height must be positive")
    box = I.box
    d = Decomposition(I)
    R, S, W, _ = _restricted(I, S, W, d)
    dr = Decomposition(R)
    for f in star_closure_2d(x):
        if _in_base(box, f) and dr.nesting_walls(f):
            raise PreconditionError("a wall nests a face next to x")
    J = reconstruct(d.collection.with_walls([wall_column(x, h)]))
    if len(J) - len(I) != 4 * h or len(I.face_set ^ J.face_set) != 4 * h + 2:
        raise GuaranteeViolation("column insertion changed the wrong number of faces")
    return J


__all__ = [
    "ConeSets",
    "IsoParams",
    "IsolationReport",
    "PhiIsoTrace",
    "Witness",
    "WallCluster",
    "ceiling_cluster",
    "closely_nested",
    "cone_containment",
    "cone_sets",
    "connector_path",
    "insert_column",
    "is_isolated",
    "isolation_report",
    "phi_delete",
    "phi_iso",
    "phi_swap",
    "psi_delete",
    "wall_cluster",
    "witness",
    "witness_reconstruct",
]
