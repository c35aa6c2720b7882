"""Discrete geometry of Z^3 in doubled integer coordinates.

Every cell, face, edge and vertex of the cubic lattice is identified with its
midpoint.  Doubling all coordinates makes midpoints integral: a coordinate is
odd exactly when the element extends across that axis.  Axes are numbered
0, 1, 2 with axis 2 vertical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple

import numpy as np

CELL, FACE, EDGE, VERTEX = "cell", "face", "edge", "vertex"


class Kind(NamedTuple):
    kind: str
    # face: (normal axis,); edge: (direction axis,); cell/vertex: ()
    axes: tuple


def classify(c) -> Kind:
    """Element kind from coordinate parity."""
    odd = tuple(int(v) & 1 for v in c)
    n_even = 3 - sum(odd)
    if n_even == 0:
        return Kind(CELL, ())
    if n_even == 1:
        return Kind(FACE, (odd.index(0),))
    if n_even == 2:
        return Kind(EDGE, (odd.index(1),))
    return Kind(VERTEX, ())


def is_face(c) -> bool:
    return sum(int(v) & 1 for v in c) == 2


def is_cell(c) -> bool:
    return all(int(v) & 1 for v in c)


def is_horizontal_face(c) -> bool:
    return is_face(c) and int(c[2]) % 2 == 0


def face_normal(c) -> int:
    for a in range(3):
        if int(c[a]) % 2 == 0:
            return a
    raise ValueError(f"{tuple(c)} is not a face")


def project(c) -> tuple:
    """Vertical projection onto the plane z = 0.

    Horizontal faces go to height-0 faces, vertical faces to height-0 edges.
    """
    return (int(c[0]), int(c[1]), 0)


def vertices_of(c) -> frozenset:
    """Vertices in the closure of an element."""
    choices = [(v - 1, v + 1) if int(v) & 1 else (v,) for v in map(int, c)]
    return frozenset((a, b, z) for a in choices[0] for b in choices[1] for z in choices[2])


def edges_of_face(f) -> tuple:
    """The four bounding edges of a face."""
    a = face_normal(f)
    out = []
    for b in range(3):
        if b == a:
            continue
        for s in (-1, 1):
            e = list(map(int, f))
            e[b] += s
            out.append(tuple(e))
    return tuple(out)


def faces_of_cell(c) -> tuple:
    out = []
    for a in range(3):
        for s in (-1, 1):
            f = list(map(int, c))
            f[a] += s
            out.append(tuple(f))
    return tuple(out)


def cells_of_face(f) -> tuple:
    a = face_normal(f)
    lo = list(map(int, f))
    hi = list(map(int, f))
    lo[a] -= 1
    hi[a] += 1
    return tuple(lo), tuple(hi)


def adjacent(a, b) -> bool:
    """Faces share an edge, cells share a face, edges share a vertex."""
    a = tuple(map(int, a))
    b = tuple(map(int, b))
    if a == b:
        return False
    ka = classify(a).kind
    if ka != classify(b).kind:
        raise ValueError("adjacency is defined between elements of the same kind")
    if ka == CELL:
        d = sorted(abs(x - y) for x, y in zip(a, b))
        return d == [0, 0, 2]
    if ka == FACE:
        return bool(set(edges_of_face(a)) & set(edges_of_face(b)))
    if ka == EDGE:
        return bool(vertices_of(a) & vertices_of(b))
    return sorted(abs(x - y) for x, y in zip(a, b)) == [0, 0, 2]


def star_adjacent(a, b) -> bool:
    """Elements share a bounding vertex."""
    a = tuple(map(int, a))
    b = tuple(map(int, b))
    if a == b:
        return False
    if classify(a).kind != classify(b).kind:
        raise ValueError("adjacency is defined between elements of the same kind")
    if classify(a).kind == CELL:
        return max(abs(x - y) for x, y in zip(a, b)) == 2
    return bool(vertices_of(a) & vertices_of(b))


@lru_cache(maxsize=None)
def _face_offsets(star: bool) -> tuple:
    """Per normal axis, the doubled offsets to faces sharing a vertex (or an edge)."""
    table = []
    for a in range(3):
        f = [1, 1, 1]
        f[a] = 0
        f = tuple(f)
        offs = []
        rng = range(-2, 3)
        for dx in rng:
            for dy in rng:
                for dz in rng:
                    g = (f[0] + dx, f[1] + dy, f[2] + dz)
                    if g == f or not is_face(g):
                        continue
                    ok = star_adjacent(f, g) if star else adjacent(f, g)
                    if ok:
                        offs.append((dx, dy, dz))
        table.append(tuple(sorted(offs)))
    return tuple(table)


def face_neighbor_offsets(star: bool = True) -> np.ndarray:
    """Array of shape (3, K, 3): offsets per normal axis, padded with zeros.

    Returned together with counts via :func:`face_neighbor_counts`.
    """
    table = _face_offsets(star)
    k = max(len(t) for t in table)
    out = np.zeros((3, k, 3), dtype=np.int64)
    for a, t in enumerate(table):
        out[a, : len(t)] = np.array(t, dtype=np.int64)
    return out


def face_neighbor_counts(star: bool = True) -> np.ndarray:
    return np.array([len(t) for t in _face_offsets(star)], dtype=np.int64)


def neighbors(c, star: bool = False) -> list:
    """Same-kind neighbours of a cell or face."""
    c = tuple(map(int, c))
    k = classify(c)
    if k.kind == CELL:
        if star:
            return [
                (c[0] + dx, c[1] + dy, c[2] + dz)
                for dx in (-2, 0, 2)
                for dy in (-2, 0, 2)
                for dz in (-2, 0, 2)
                if (dx, dy, dz) != (0, 0, 0)
            ]
        return [tuple(v) for v in (np.array(c) + np.vstack([np.eye(3, dtype=int) * 2, -np.eye(3, dtype=int) * 2]))]
    if k.kind == FACE:
        offs = _face_offsets(star)[k.axes[0]]
        return [(c[0] + d[0], c[1] + d[1], c[2] + d[2]) for d in offs]
    raise ValueError("neighbors() supports cells and faces")


def components(elems: Iterable, mode: str = "edge") -> list:
    """Connected components under edge adjacency ("edge") or vertex sharing ("star").

    Components are returned as sorted lists, ordered by their minimal element.
    """
    if mode not in ("edge", "star"):
        raise ValueError("mode must be 'edge' or 'star'")
    pool = {tuple(map(int, e)) for e in elems}
    star = mode == "star"
    seen = set()
    parts = []
    for start in sorted(pool):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in neighbors(u, star=star):
                if v in pool and v not in seen:
                    seen.add(v)
                    comp.append(v)
                    queue.append(v)
        parts.append(sorted(comp))
    parts.sort(key=lambda p: p[0])
    return parts


def sq_distance_doubled(a, b) -> int:
    """Squared Euclidean distance in doubled units (4x the true squared distance)."""
    return sum((int(x) - int(y)) ** 2 for x, y in zip(a, b))


def min_sq_distance_doubled(A, B) -> int:
    """Minimal doubled squared distance between two non-empty point sets."""
    A = np.asarray(list(A) if not isinstance(A, np.ndarray) else A, dtype=np.int64).reshape(-1, 3)
    B = np.asarray(list(B) if not isinstance(B, np.ndarray) else B, dtype=np.int64).reshape(-1, 3)
    if len(A) == 0 or len(B) == 0:
        raise ValueError("distance to an empty set")
    best = None
    for start in range(0, len(A), 512):
        block = A[start : start + 512]
        d = ((block[:, None, :] - B[None, :, :]) ** 2).sum(axis=2).min()
        best = d if best is None else min(best, d)
    return int(best)


def distance_at_most(A, B, r: float) -> bool:
    """d(A, B) <= r with exact integer arithmetic when r is an integer."""
    d2 = min_sq_distance_doubled(A, B)
    if float(r).is_integer():
        return d2 <= 4 * int(r) ** 2
    return d2 <= 4.0 * r * r


def distance(a, b) -> float:
    return float(np.sqrt(sq_distance_doubled(a, b))) / 2.0


@dataclass(frozen=True)
class Box:
    """The box of cells [-n, n] x [-m, m] x [-H, H]."""

    n: int
    m: int | None = None
    H: int | None = None

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", self.n)
        if self.H is None:
            object.__setattr__(self, "H", self.n)
        if min(self.n, self.m, self.H) < 1:
            raise ValueError("box dimensions must be positive")

    @property
    def shape(self) -> tuple:
        """Shape of the spin array, indexed [z, y, x]."""
        return (2 * self.H, 2 * self.m, 2 * self.n)

    @property
    def n_cells(self) -> int:
        return 8 * self.n * self.m * self.H

    @property
    def n_base_faces(self) -> int:
        return 4 * self.n * self.m

    def contains_cell(self, c) -> bool:
        x, y, z = map(int, c)
        return abs(x) < 2 * self.n and abs(y) < 2 * self.m and abs(z) < 2 * self.H and is_cell(c)

    def contains_face(self, f) -> bool:
        """Membership in F(box): at least one bounding cell lies in the box."""
        if not is_face(f):
            return False
        return any(self.contains_cell(c) for c in cells_of_face(f))

    def in_base(self, f) -> bool:
        """Height-0 face of the base L_{0,n}."""
        x, y, z = map(int, f)
        return z == 0 and x % 2 == 1 and y % 2 == 1 and abs(x) < 2 * self.n and abs(y) < 2 * self.m

    @cached_property
    def base_faces(self) -> tuple:
        xs = range(-2 * self.n + 1, 2 * self.n, 2)
        ys = range(-2 * self.m + 1, 2 * self.m, 2)
        return tuple((x, y, 0) for x in xs for y in ys)

    def cell_index(self, c) -> tuple:
        """Index [k, j, i] of a cell in the spin array."""
        x, y, z = map(int, c)
        return ((z + 2 * self.H - 1) // 2, (y + 2 * self.m - 1) // 2, (x + 2 * self.n - 1) // 2)

    def cell_coord(self, k: int, j: int, i: int) -> tuple:
        return (2 * i - 2 * self.n + 1, 2 * j - 2 * self.m + 1, 2 * k - 2 * self.H + 1)

    def column_index(self, f) -> tuple:
        """Index (j, i) of a base face in the 2D column grid."""
        x, y = int(f[0]), int(f[1])
        return ((y + 2 * self.m - 1) // 2, (x + 2 * self.n - 1) // 2)

    def column_coord(self, j: int, i: int) -> tuple:
        return (2 * i - 2 * self.n + 1, 2 * j - 2 * self.m + 1, 0)

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "H": self.H}


@dataclass(frozen=True)
class Region:
    """A set of height-0 faces, stored as sorted (x, y) doubled pairs."""

    faces: frozenset

    @staticmethod
    def of(faces: Iterable) -> "Region":
        return Region(frozenset((int(f[0]), int(f[1])) for f in faces))

    @staticmethod
    def square(half_side: int, center=(0, 0)) -> "Region":
        """Faces with centers within half_side lattice units of center (in both axes)."""
        cx, cy = center
        xs = range(2 * (cx - half_side) + 1, 2 * (cx + half_side), 2)
        ys = range(2 * (cy - half_side) + 1, 2 * (cy + half_side), 2)
        return Region(frozenset((x, y) for x in xs for y in ys))

    @staticmethod
    def full(box: Box) -> "Region":
        return Region.of(box.base_faces)

    def __contains__(self, f) -> bool:
        return (int(f[0]), int(f[1])) in self.faces

    def __len__(self) -> int:
        return len(self.faces)

    def sorted_faces(self) -> list:
        return [(x, y, 0) for x, y in sorted(self.faces)]

    def edge_boundary(self) -> frozenset:
        """Height-0 edges between a member face and a non-member face."""
        out = set()
        for x, y in self.faces:
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                if (x + 2 * dx, y + 2 * dy) not in self.faces:
                    out.add((x + dx, y + dy, 0))
        return frozenset(out)

    def is_simply_connected(self) -> bool:
        return _is_simply_connected(self.faces)

    def to_json(self) -> list:
        return [[x, y] for x, y in sorted(self.faces)]


def _is_simply_connected(faces: frozenset) -> bool:
    if not faces:
        return True
    comps = components([(x, y, 0) for x, y in faces], mode="edge")
    if len(comps) != 1:
        return False
    return not fill_holes(faces) - faces


def fill_holes(faces) -> frozenset:
    """Union of a set of height-0 faces with the finite components of its complement."""
    faces = frozenset((int(f[0]), int(f[1])) for f in faces)
    if not faces:
        return faces
    xs = [f[0] for f in faces]
    ys = [f[1] for f in faces]
    x0, x1 = min(xs) - 2, max(xs) + 2
    y0, y1 = min(ys) - 2, max(ys) + 2
    outside = set()
    queue = deque()
    for x in range(x0, x1 + 1, 2):
        for y in (y0, y1):
            queue.append((x, y))
    for y in range(y0, y1 + 1, 2):
        for x in (x0, x1):
            queue.append((x, y))
    while queue:
        u = queue.popleft()
        if u in outside or u in faces:
            continue
        if not (x0 <= u[0] <= x1 and y0 <= u[1] <= y1):
            continue
        outside.add(u)
        for dx, dy in ((2, 0), (-2, 0), (0, 2), (0, -2)):
            queue.append((u[0] + dx, u[1] + dy))
    filled = set(faces)
    for x in range(x0, x1 + 1, 2):
        for y in range(y0, y1 + 1, 2):
            if (x, y) not in outside:
                filled.add((x, y))
    return frozenset(filled)


def cylinder(x, radius: float, box: Box) -> list:
    """Base faces y with d(y, x) <= radius."""
    r2 = 4.0 * radius * radius
    out = []
    for f in box.base_faces:
        if (f[0] - x[0]) ** 2 + (f[1] - x[1]) ** 2 <= r2:
            out.append(f)
    return out


def star_closure_2d(x) -> list:
    """A base face together with its eight star-neighbours."""
    return [(int(x[0]) + dx, int(x[1]) + dy, 0) for dx in (-2, 0, 2) for dy in (-2, 0, 2)]
