"""Walls and ceilings of an interface, standard wall representation and reconstruction.

A horizontal face of an interface is a ceiling face when it is the only
horizontal face of the interface in its column; every other face is a wall
face.  Walls and ceilings are the star-connected classes of these faces.

Planar sets (projections of walls) are stored as sets of (x, y) doubled pairs
mixing faces (both odd) and edges (one odd).
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels as K
from .errors import AdmissibilityError, GuaranteeViolation, InvalidInterfaceError, PreconditionError
from .interface import (
    NO_HEIGHT,
    Interface,
    grid_offset,
    grid_shape,
    sort_faces,
)
from .lattice import Box, Region, face_neighbor_counts, face_neighbor_offsets, fill_holes

_STAR_OFFS = face_neighbor_offsets(star=True)
_STAR_COUNTS = face_neighbor_counts(star=True)
_SIDES = ((2, 0), (-2, 0), (0, 2), (0, -2))


def face_edges_2d(f) -> tuple:
    x, y = f[0], f[1]
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def edge_faces_2d(e) -> tuple:
    x, y = e[0], e[1]
    if x % 2 == 0:
        return ((x - 1, y), (x + 1, y))
    return ((x, y - 1), (x, y + 1))


def vertices_2d(u) -> tuple:
    x, y = u[0], u[1]
    xs = (x - 1, x + 1) if x % 2 else (x,)
    ys = (y - 1, y + 1) if y % 2 else (y,)
    return tuple((a, b) for a in xs for b in ys)


class PlanarShape:
    """Projection of a wall and the components of its complement.

    The complement is analysed on a local grid around the projection whose
    border stands in for the unbounded component.
    """

    def __init__(self, elements):
        self.elements = frozenset((int(u[0]), int(u[1])) for u in elements)
        if not self.elements:
            raise ValueError("empty projection")
        xs = [u[0] for u in self.elements]
        ys = [u[1] for u in self.elements]
        x0 = min(xs) - 4
        y0 = min(ys) - 4
        x0 -= x0 % 2
        y0 -= y0 % 2
        self.origin = (x0, y0)
        gx = max(xs) + 5 - x0
        gy = max(ys) + 5 - y0
        blocked = np.zeros((gy, gx), dtype=np.uint8)
        for x, y in self.elements:
            blocked[y - y0, x - x0] = 1
        self.labels = K.label_plane_complement(blocked)

    @cached_property
    def faces(self) -> frozenset:
        return frozenset(u for u in self.elements if u[0] % 2 and u[1] % 2)

    @cached_property
    def edges(self) -> frozenset:
        return frozenset(u for u in self.elements if (u[0] + u[1]) % 2)

    @cached_property
    def closure_edges(self) -> frozenset:
        out = set(self.edges)
        for f in self.faces:
            out.update(face_edges_2d(f))
        return frozenset(out)

    @cached_property
    def vertices(self) -> frozenset:
        out = set()
        for u in self.elements:
            out.update(vertices_2d(u))
        return frozenset(out)

    def label_of(self, u) -> int:
        """Component label of a planar element: 0 inside the projection, 1 unbounded."""
        X = u[0] - self.origin[0]
        Y = u[1] - self.origin[1]
        if X < 0 or Y < 0 or Y >= self.labels.shape[0] or X >= self.labels.shape[1]:
            return 1
        return int(self.labels[Y, X])

    @cached_property
    def finite_components(self) -> dict:
        """label -> frozenset of faces in that bounded component."""
        out = defaultdict(set)
        ys, xs = np.nonzero(self.labels >= 2)
        for Y, X in zip(ys.tolist(), xs.tolist()):
            x = X + self.origin[0]
            y = Y + self.origin[1]
            if x % 2 and y % 2:
                out[int(self.labels[Y, X])].add((x, y))
        return {k: frozenset(v) for k, v in sorted(out.items())}

    @cached_property
    def nested_faces(self) -> frozenset:
        """Faces not in the unbounded component of the complement (projection faces included)."""
        out = set(self.faces)
        for comp in self.finite_components.values():
            out |= comp
        return frozenset(out)

    def nests(self, u) -> bool:
        return self.label_of(u) != 1

    @cached_property
    def index_faces(self) -> frozenset:
        """Nested faces having a bounding edge in the closure of the projection."""
        ce = self.closure_edges
        return frozenset(f for f in self.nested_faces if any(e in ce for e in face_edges_2d(f)))

    @cached_property
    def hull_faces(self) -> frozenset:
        return self.nested_faces

    @cached_property
    def boundary_sides(self) -> list:
        """(edge, face) pairs: closure edges and their neighbouring faces outside the projection."""
        out = []
        for e in sorted(self.closure_edges):
            for f in edge_faces_2d(e):
                if f not in self.faces:
                    out.append((e, f))
        return out


def _wall_tables(faces) -> tuple:
    vertical = defaultdict(list)
    horizontal = defaultdict(list)
    for x, y, z in faces:
        if z % 2 == 0:
            horizontal[(x, y)].append(z)
        else:
            vertical[(x, y)].append(z)
    return vertical, horizontal


def relative_ceiling_heights(faces, shape: PlanarShape, floor: int = 0) -> dict:
    """Heights of the ceilings around a wall, relative to its floor, by component label.

    Every edge of an interface is bounded by an even number of its faces.  Along
    the vertical line over a boundary edge e of the projection, the heights at
    which the wall alone has odd degree are therefore the heights of the
    ceilings meeting e from the sides outside the projection.
    """
    vertical, horizontal = _wall_tables(faces)
    fixed = {}
    links = defaultdict(list)
    for e in sorted(shape.closure_edges):
        f1, f2 = edge_faces_2d(e)
        cands = set()
        for z in vertical.get(e, ()):
            cands.add(z - 1)
            cands.add(z + 1)
        cands.update(horizontal.get(f1, ()))
        cands.update(horizontal.get(f2, ()))
        odd = []
        for z in sorted(cands):
            deg = vertical.get(e, []).count(z - 1) + vertical.get(e, []).count(z + 1)
            deg += horizontal.get(f1, []).count(z) + horizontal.get(f2, []).count(z)
            if deg % 2:
                odd.append(z // 2)
        in1 = f1 in shape.faces
        in2 = f2 in shape.faces
        if in1 and in2:
            if odd:
                raise InvalidInterfaceError(f"wall has an open edge over {e}")
            continue
        if in1 or in2:
            free = f2 if in1 else f1
            if len(odd) != 1:
                raise InvalidInterfaceError(f"wall does not close up over edge {e}")
            lab = shape.label_of(free)
            if lab in fixed and fixed[lab] != odd[0]:
                raise InvalidInterfaceError(f"inconsistent ceiling heights next to edge {e}")
            fixed[lab] = odd[0]
            continue
        l1 = shape.label_of(f1)
        l2 = shape.label_of(f2)
        if len(odd) == 0:
            links[l1].append((l2, None))
            links[l2].append((l1, None))
        elif len(odd) == 2:
            links[l1].append((l2, tuple(odd)))
            links[l2].append((l1, tuple(odd)))
        else:
            raise InvalidInterfaceError(f"wall does not close up over edge {e}")
    # a wall made of thin pieces only is both a step up and a step down: the
    # absolute floor height removes the ambiguity
    heights = {1: floor}
    for lab, h in fixed.items():
        if lab in heights and heights[lab] != h:
            raise InvalidInterfaceError("inconsistent ceiling heights")
        heights[lab] = h
    queue = deque(heights)
    while queue:
        lab = queue.popleft()
        for other, pair in links.get(lab, ()):
            if pair is None:
                val = heights[lab]
            else:
                if heights[lab] not in pair:
                    raise InvalidInterfaceError("inconsistent ceiling heights across a thin wall")
                val = pair[1] if pair[0] == heights[lab] else pair[0]
            if other in heights:
                if heights[other] != val:
                    raise InvalidInterfaceError("inconsistent ceiling heights across a thin wall")
                continue
            heights[other] = val
            queue.append(other)
    return {lab: h - floor for lab, h in heights.items()}


@dataclass(frozen=True, eq=False)
class Wall:
    faces: frozenset

    def __eq__(self, other):
        return isinstance(other, Wall) and self.faces == other.faces

    def __hash__(self):
        return hash(self.faces)

    def __len__(self):
        return len(self.faces)

    @cached_property
    def shape(self) -> PlanarShape:
        return PlanarShape((f[0], f[1]) for f in self.faces)

    @cached_property
    def projection(self) -> frozenset:
        return self.shape.elements

    @cached_property
    def relative_heights(self) -> dict:
        """Component label -> ceiling height relative to the floor, for a standard wall."""
        return relative_ceiling_heights(self.faces, self.shape, 0)

    def heights_with_floor(self, floor: int) -> dict:
        return relative_ceiling_heights(self.faces, self.shape, floor)

    @cached_property
    def min_face(self) -> tuple:
        return min(self.faces)

    def translated(self, dz: int) -> "Wall":
        return Wall(frozenset((x, y, z + 2 * dz) for x, y, z in self.faces))

    def excess(self) -> int:
        return wall_excess(self)

    def sorted_faces(self) -> list:
        return sorted(self.faces)


@dataclass(frozen=True)
class Ceiling:
    faces: frozenset
    height: int
    outer: bool = False  # the ceiling reaching the boundary of the box

    @cached_property
    def projection(self) -> frozenset:
        return frozenset((f[0], f[1]) for f in self.faces)

    @cached_property
    def hull_projection(self) -> frozenset:
        if self.outer:
            return None
        return fill_holes(self.projection)


def wall_excess(W: Wall) -> int:
    """m(W) = |W| - |F(rho(W))|."""
    return len(W.faces) - len(W.shape.faces)


def collection_excess(walls) -> int:
    return sum(wall_excess(W) for W in walls)


def excess_area(I: Interface, J: Interface) -> int:
    if I.box != J.box:
        raise PreconditionError("interfaces live in different boxes")
    return len(I) - len(J)


def standardize(W: Wall, I: Interface | None = None, floor: int | None = None) -> Wall:
    """Translate a wall of I vertically so that its floor sits at height 0."""
    if floor is None:
        if I is None:
            raise PreconditionError("the floor of a wall is read from its interface")
        floor = floor_height(W, I)
    return W.translated(-floor)


def floor_height(W: Wall, I: Interface) -> int:
    """Height of the ceiling of I meeting W from its unbounded side."""
    b = I.box
    heights = I.column_heights
    for e, f in W.shape.boundary_sides:
        if W.shape.label_of(f) != 1:
            continue
        x, y = f
        if abs(x) > 2 * b.n or abs(y) > 2 * b.m:
            continue
        if abs(x) == 2 * b.n + 1 or abs(y) == 2 * b.m + 1:
            return 0
        j, i = b.column_index(f)
        h = heights[j, i]
        if h == NO_HEIGHT:
            raise InvalidInterfaceError(f"column {f} next to a wall has no unique height")
        return int(h)
    raise InvalidInterfaceError("wall has no unbounded side inside the box")


@dataclass(frozen=True, eq=False)
class StandardWallCollection:
    """A set of standard walls (floors at height 0) on a box."""

    box: Box
    walls: tuple = ()

    def __post_init__(self):
        ws = tuple(sorted({w if isinstance(w, Wall) else Wall(frozenset(map(tuple, w))) for w in self.walls}, key=lambda w: w.min_face))
        object.__setattr__(self, "walls", ws)

    def __eq__(self, other):
        return isinstance(other, StandardWallCollection) and self.box == other.box and set(self.walls) == set(other.walls)

    def __hash__(self):
        return hash((self.box, frozenset(self.walls)))

    def __len__(self):
        return len(self.walls)

    @cached_property
    def index(self) -> dict:
        """Base face (x, y) -> wall assigned to it."""
        out = {}
        for W in self.walls:
            for f in W.shape.index_faces:
                if f in out and out[f] is not W:
                    raise GuaranteeViolation(f"face {f} is assigned two walls")
                out[f] = W
        return out

    def wall_at(self, x):
        return self.index.get((int(x[0]), int(x[1])))

    def excess(self) -> int:
        return collection_excess(self.walls)

    def face_count(self) -> int:
        return sum(len(W) for W in self.walls)

    def without(self, walls) -> "StandardWallCollection":
        drop = set(walls)
        return StandardWallCollection(self.box, tuple(w for w in self.walls if w not in drop))

    def with_walls(self, walls) -> "StandardWallCollection":
        return StandardWallCollection(self.box, tuple(self.walls) + tuple(walls))

    def check_admissible(self) -> None:
        owner = {}
        for k, W in enumerate(self.walls):
            if not W.faces:
                raise AdmissibilityError("empty wall")
            for v in W.shape.vertices:
                if v in owner and owner[v] != k:
                    raise AdmissibilityError(f"projections of two walls meet at vertex {v}")
                owner[v] = k

    def to_json(self, region: Region | None = None) -> dict:
        out = {"box": self.box.to_json(), "walls": [[list(f) for f in W.sorted_faces()] for W in self.walls]}
        if region is not None:
            out["region"] = region.to_json()
        return out

    @staticmethod
    def from_json(doc: dict) -> tuple:
        box = Box(**doc["box"])
        walls = tuple(Wall(frozenset(tuple(int(v) for v in f) for f in w)) for w in doc["walls"])
        region = Region.of((x, y) for x, y in doc["region"]) if "region" in doc else None
        return StandardWallCollection(box, walls), region


def write_collection(path, swc: StandardWallCollection, region: Region | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(swc.to_json(region), fh)


def read_collection(path) -> tuple:
    with open(path) as fh:
        return StandardWallCollection.from_json(json.load(fh))


class Decomposition:
    """Walls, ceilings, floors and the wall index map of an interface."""

    def __init__(self, I: Interface):
        self.interface = I
        box = I.box
        self.box = box
        faces = I.faces
        counts = I.column_counts
        hor = faces[:, 2] % 2 == 0
        j = (faces[:, 1] + 2 * box.m - 1) // 2
        i = (faces[:, 0] + 2 * box.n - 1) // 2
        is_ceiling = np.zeros(len(faces), dtype=bool)
        is_ceiling[hor] = counts[j[hor], i[hor]] == 1
        self.ceiling_faces = faces[is_ceiling]
        self.wall_faces = faces[~is_ceiling]
        off = grid_offset(box)
        shape = grid_shape(box)
        # walls
        mask = np.zeros(shape, dtype=np.uint8)
        idx = self.wall_faces + off
        mask[idx[:, 2], idx[:, 1], idx[:, 0]] = 1
        labels = K.label_face_components(mask, _STAR_OFFS, _STAR_COUNTS)
        groups = defaultdict(list)
        for f, lab in zip(self.wall_faces.tolist(), labels[idx[:, 2], idx[:, 1], idx[:, 0]].tolist()):
            groups[lab].append(tuple(f))
        walls = [Wall(frozenset(g)) for g in groups.values()]
        walls.sort(key=lambda w: w.min_face)
        self.walls = walls
        # ceilings, with the plane outside the box as a virtual ceiling face ring
        cmask = np.zeros(shape, dtype=np.uint8)
        cidx = self.ceiling_faces + off
        cmask[cidx[:, 2], cidx[:, 1], cidx[:, 0]] = 1
        Z0 = 2 * box.H + 2
        GZ, GY, GX = shape
        cmask[Z0, 1, 1::2] = 1
        cmask[Z0, GY - 2, 1::2] = 1
        cmask[Z0, 1::2, 1] = 1
        cmask[Z0, 1::2, GX - 2] = 1
        clabels = K.label_face_components(cmask, _STAR_OFFS, _STAR_COUNTS)
        outer_label = int(clabels[Z0, 1, 1])
        cgroups = defaultdict(list)
        for f, lab in zip(self.ceiling_faces.tolist(), clabels[cidx[:, 2], cidx[:, 1], cidx[:, 0]].tolist()):
            cgroups[lab].append(tuple(f))
        ceilings = []
        self._ceiling_label = {}
        for lab, g in cgroups.items():
            heights = {f[2] // 2 for f in g}
            if len(heights) != 1:
                raise InvalidInterfaceError("ceiling faces at different heights are star-connected")
            c = Ceiling(frozenset(g), heights.pop(), outer=(lab == outer_label))
            ceilings.append(c)
        if not any(c.outer for c in ceilings):
            ceilings.append(Ceiling(frozenset(), 0, outer=True))
        ceilings.sort(key=lambda c: (not c.outer, min(c.faces) if c.faces else ()))
        self.ceilings = ceilings
        self.ceiling_of_face = {f: c for c in ceilings for f in c.faces}
        self.floors = [floor_height(W, I) for W in walls]
        self.standard = [W.translated(-fl) for W, fl in zip(walls, self.floors)]
        self._check_heights()

    def _check_heights(self) -> None:
        """Ceiling heights predicted by each wall agree with the interface."""
        b = self.box
        heights = self.interface.column_heights
        for W, fl in zip(self.standard, self.floors):
            rel = W.relative_heights
            for e, f in W.shape.boundary_sides:
                if abs(f[0]) > 2 * b.n or abs(f[1]) > 2 * b.m:
                    continue
                lab = W.shape.label_of(f)
                if abs(f[0]) == 2 * b.n + 1 or abs(f[1]) == 2 * b.m + 1:
                    actual = 0
                else:
                    actual = heights[b.column_index(f)]
                if lab not in rel or actual != fl + rel[lab]:
                    raise InvalidInterfaceError(f"ceiling next to wall at {W.min_face} disagrees with its faces")

    @cached_property
    def collection(self) -> StandardWallCollection:
        return StandardWallCollection(self.box, tuple(self.standard))

    @cached_property
    def index(self) -> dict:
        """Base face (x, y) -> position of the wall assigned to it in self.walls."""
        out = {}
        for k, W in enumerate(self.walls):
            for f in W.shape.index_faces:
                if f in out:
                    raise GuaranteeViolation(f"face {f} is assigned two walls")
                out[f] = k
        return out

    def wall_index_faces(self, k: int) -> frozenset:
        return self.walls[k].shape.index_faces

    def standard_of(self, W: Wall) -> Wall:
        return self.standard[self.walls.index(W)]

    def floor_of(self, W: Wall) -> int:
        return self.floors[self.walls.index(W)]

    def interior_ceilings(self, W: Wall) -> list:
        """Ceilings of the interface meeting W from a bounded component of its complement."""
        k = self.walls.index(W)
        fl = self.floors[k]
        rel = self.standard[k].relative_heights
        out = []
        seen = set()
        for lab, comp in W.shape.finite_components.items():
            if lab not in rel:
                continue
            z = 2 * (fl + rel[lab])
            for e, f in W.shape.boundary_sides:
                if W.shape.label_of(f) != lab:
                    continue
                c = self.ceiling_of_face.get((f[0], f[1], z))
                if c is not None and id(c) not in seen:
                    seen.add(id(c))
                    out.append(c)
                break
        return out

    def hull_of_ceiling(self, C: Ceiling) -> frozenset:
        if C.outer:
            raise PreconditionError("the outer ceiling has no bounded hull")
        z = 2 * C.height
        return frozenset((x, y, z) for x, y in C.hull_projection)

    def hull_of_wall(self, W: Wall) -> frozenset:
        out = set(W.faces)
        for C in self.interior_ceilings(W):
            out |= self.hull_of_ceiling(C)
        return frozenset(out)

    def nesting_walls(self, u) -> list:
        """Walls nesting a planar element, innermost first."""
        u = (int(u[0]), int(u[1]))
        seq = [W for W in self.walls if W.shape.nests(u)]
        seq.sort(key=lambda W: len(W.shape.nested_faces))
        return seq

    def exterior_walls(self, S: Region) -> list:
        """Walls assigned to at least one base face outside S."""
        out = []
        for k, W in enumerate(self.walls):
            if any(f not in S.faces for f in W.shape.index_faces):
                out.append(W)
        return out

    def interior_walls(self, S: Region) -> list:
        ext = set(self.exterior_walls(S))
        return [W for W in self.walls if W not in ext]


def decompose(I: Interface) -> tuple:
    """(walls, ceilings) of an interface."""
    d = Decomposition(I)
    return d.walls, d.ceilings


def represent(I: Interface) -> StandardWallCollection:
    """Standard wall representation of an interface."""
    return Decomposition(I).collection


def nests(u, W: Wall) -> bool:
    return W.shape.nests(u)


def hull(obj, I: Interface) -> frozenset:
    d = Decomposition(I)
    if isinstance(obj, Ceiling):
        return d.hull_of_ceiling(obj)
    return d.hull_of_wall(obj)


def reconstruct(swc: StandardWallCollection, box: Box | None = None, validate: bool = False) -> Interface:
    """The unique interface whose standard wall representation is swc.

    Each standard wall is lifted by the sum, over the walls nesting it, of the
    relative height of the nesting wall's ceiling on its side; every free
    column receives the same sum evaluated at that column.
    """
    box = box or swc.box
    swc.check_admissible()
    ny, nx = 2 * box.m, 2 * box.n
    field_ = np.zeros((ny, nx), dtype=np.int64)
    occupied = np.zeros((ny, nx), dtype=bool)
    contrib = []
    for W in swc.walls:
        rel = W.relative_heights
        add = {}
        for lab, comp in W.shape.finite_components.items():
            h = rel.get(lab)
            if h is None:
                # an enclosed component not adjacent to any face of W cannot occur
                raise InvalidInterfaceError("wall encloses a region with no ceiling")
            if h == 0:
                continue
            for f in comp:
                add[f] = h
        contrib.append(add)
        for f, h in add.items():
            if abs(f[0]) < 2 * box.n and abs(f[1]) < 2 * box.m:
                field_[box.column_index(f)] += h
        for f in W.shape.faces:
            if abs(f[0]) >= 2 * box.n or abs(f[1]) >= 2 * box.m:
                raise PreconditionError(f"wall projects outside the box at {f}")
            occupied[box.column_index(f)] = True
    faces = []
    for W, add in zip(swc.walls, contrib):
        rep = _representative_face(W)
        if abs(rep[0]) < 2 * box.n and abs(rep[1]) < 2 * box.m:
            total = int(field_[box.column_index(rep)])
        else:
            total = 0
        shift = total - add.get(rep, 0)
        faces.extend((x, y, z + 2 * shift) for x, y, z in W.faces)
    jj, ii = np.nonzero(~occupied)
    xs = 2 * ii - 2 * box.n + 1
    ys = 2 * jj - 2 * box.m + 1
    zs = 2 * field_[jj, ii]
    arr = np.concatenate([np.array(faces, dtype=np.int64).reshape(-1, 3), np.stack([xs, ys, zs], axis=1)])
    out = Interface(box, sort_faces(arr))
    if validate:
        out.validate()
    return out


def _representative_face(W: Wall) -> tuple:
    """A base face whose position relative to every other wall matches that of W."""
    if W.shape.faces:
        return min(W.shape.faces)
    e = min(W.shape.edges)
    return edge_faces_2d(e)[0]


def nested_sequence(x, I: Interface, decomp: Decomposition | None = None) -> list:
    """Walls of I nesting the base face x, innermost first."""
    d = decomp or Decomposition(I)
    return d.nesting_walls(x)


def restricted_sequence(x, I: Interface, S: Region, decomp: Decomposition | None = None) -> list:
    """Nested sequence of x with the walls assigned outside S removed."""
    d = decomp or Decomposition(I)
    ext = set(d.exterior_walls(S))
    return [W for W in d.nesting_walls(x) if W not in ext]


def height_at(I: Interface, x):
    """Height of the unique horizontal face over x, or None."""
    j, i = I.box.column_index(x)
    h = I.column_heights[j, i]
    return None if h == NO_HEIGHT else int(h)


def level_lines(I: Interface, h: int) -> list:
    """External boundaries of the star-connected components of {x : height_at(x) = h}.

    Each line is a list of edges (x, y, 0), counterclockwise, starting from its
    lexicographically smallest edge.
    """
    b = I.box
    heights = I.column_heights
    jj, ii = np.nonzero(heights == h)
    pts = [(2 * i - 2 * b.n + 1, 2 * j - 2 * b.m + 1) for j, i in zip(jj.tolist(), ii.tolist())]
    from .lattice import components

    comps = components([(x, y, 0) for x, y in pts], mode="star")
    lines = []
    for comp in comps:
        filled = fill_holes(comp)
        lines.append(_ccw_boundary(filled))
    lines.sort(key=lambda line: line[0])
    return lines


def _ccw_boundary(region: frozenset) -> list:
    """Boundary edges of a hole-free face set, traversed with the region on the left."""
    # directed edge (from vertex, to vertex) for each exposed side
    out_edges = defaultdict(list)
    for x, y in region:
        sides = (
            ((x + 1, y - 1), (x + 1, y + 1), (x + 2, y)),  # east side going north
            ((x + 1, y + 1), (x - 1, y + 1), (x, y + 2)),  # north side going west
            ((x - 1, y + 1), (x - 1, y - 1), (x - 2, y)),  # west side going south
            ((x - 1, y - 1), (x + 1, y - 1), (x, y - 2)),  # south side going east
        )
        for a, c, nb in sides:
            if nb not in region:
                out_edges[a].append(c)
    if not out_edges:
        return []
    all_edges = [(a, c) for a, cs in out_edges.items() for c in cs]
    start = min(all_edges, key=lambda ac: ((ac[0][0] + ac[1][0]) // 2, (ac[0][1] + ac[1][1]) // 2))
    path = []
    used = set()
    cur = start
    while cur not in used:
        used.add(cur)
        a, c = cur
        path.append(((a[0] + c[0]) // 2, (a[1] + c[1]) // 2, 0))
        d = (c[0] - a[0], c[1] - a[1])
        choices = out_edges[c]
        # prefer a left turn, then straight, then right: keeps star-touching pieces together
        def turn_rank(nxt, d=d, c=c):
            e = (nxt[0] - c[0], nxt[1] - c[1])
            cross = d[0] * e[1] - d[1] * e[0]
            if cross > 0:
                return 0
            if cross == 0:
                return 1
            return 2
        nxt = min(choices, key=turn_rank)
        cur = (c, nxt)
    if len(used) != len(all_edges):
        raise GuaranteeViolation("boundary of a filled region is not a single closed curve")
    return path


def ceiling_of_collection(W: StandardWallCollection, S: Region) -> tuple:
    """(I_W, C_W, hgt(C_W)) for an exterior collection W and a region S."""
    I_W = reconstruct(W)
    for Wall_ in W.walls:
        if Wall_.shape.faces & S.faces or Wall_.shape.edges & _interior_edges(S):
            raise PreconditionError("walls of the collection project into S")
    d = Decomposition(I_W)
    b = W.box
    for C in d.ceilings:
        proj = C.projection
        if C.outer:
            proj = frozenset(proj) | frozenset(
                (f[0], f[1]) for f in b.base_faces if height_at(I_W, f) == 0 and (f[0], f[1], 0) in C.faces
            )
        if S.faces <= proj:
            return I_W, C, C.height
    raise PreconditionError("no single ceiling of the collection covers S")


def _interior_edges(S: Region) -> frozenset:
    out = set()
    for x, y in S.faces:
        for e in face_edges_2d((x, y)):
            if all(f in S.faces for f in edge_faces_2d(e)):
                out.add(e)
    return frozenset(out)


def in_collection_event(I: Interface, W: StandardWallCollection, S: Region, decomp: Decomposition | None = None) -> bool:
    """Whether the walls of I assigned outside S are exactly W."""
    d = decomp or Decomposition(I)
    ext = [d.standard_of(w) for w in d.exterior_walls(S)]
    return set(ext) == set(W.walls)


def restrict(I: Interface, S: Region, decomp: Decomposition | None = None) -> Interface:
    """The interface whose standard walls are those of I assigned inside S."""
    d = decomp or Decomposition(I)
    inner = [d.standard_of(w) for w in d.interior_walls(S)]
    return reconstruct(StandardWallCollection(I.box, tuple(inner)))


def wall_column(x, h: int) -> Wall:
    """Standard wall of a straight column of h cells above the base face x."""
    fx, fy = int(x[0]), int(x[1])
    faces = set()
    for k in range(h):
        z = 2 * k + 1
        faces.update({(fx + 1, fy, z), (fx - 1, fy, z), (fx, fy + 1, z), (fx, fy - 1, z)})
    return Wall(frozenset(faces))


__all__ = [
    "Ceiling",
    "Decomposition",
    "PlanarShape",
    "StandardWallCollection",
    "Wall",
    "ceiling_of_collection",
    "collection_excess",
    "decompose",
    "excess_area",
    "floor_height",
    "height_at",
    "hull",
    "in_collection_event",
    "level_lines",
    "nested_sequence",
    "nests",
    "read_collection",
    "reconstruct",
    "represent",
    "restrict",
    "restricted_sequence",
    "standardize",
    "wall_column",
    "wall_excess",
    "write_collection",
]
