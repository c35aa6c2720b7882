"""Pillars, their cut-points, base/spine split and increment sequences.

Cells and faces use doubled coordinates.  A cell at doubled height z has
height z / 2; a cell "level" below is the integer (z - 1) // 2, so the cell
centred at height k + 1/2 sits at level k.
"""

from __future__ import annotations

import json
import struct
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import PreconditionError
from .interface import Interface, spins_of
from .lattice import Region

_STAR3 = np.ones((3, 3, 3), dtype=bool)
_DIRS = ((2, 0, 0), (-2, 0, 0), (0, 2, 0), (0, -2, 0), (0, 0, 2), (0, 0, -2))
ORIGIN_CELL = (1, 1, 1)


def level(c) -> int:
    return (int(c[2]) - 1) // 2


def bounding_faces(cells) -> set:
    """Faces between a cell of the set and a cell outside it."""
    cells = set(cells)
    out = set()
    for x, y, z in cells:
        for dx, dy, dz in _DIRS:
            if (x + dx, y + dy, z + dz) not in cells:
                out.add((x + dx // 2, y + dy // 2, z + dz // 2))
    return out


def face_top(f) -> int:
    """Largest doubled height reached by a face."""
    return int(f[2]) if int(f[2]) % 2 == 0 else int(f[2]) + 1


def top_height(faces) -> float:
    return max(face_top(f) for f in faces) / 2 if faces else 0.0


def bottom_face(c) -> tuple:
    return (c[0], c[1], c[2] - 1)


def top_face(c) -> tuple:
    return (c[0], c[1], c[2] + 1)


def _star_connected_cells(cells) -> bool:
    cells = set(cells)
    if not cells:
        return True
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        x, y, z = stack.pop()
        for dx in (-2, 0, 2):
            for dy in (-2, 0, 2):
                for dz in (-2, 0, 2):
                    v = (x + dx, y + dy, z + dz)
                    if v in cells and v not in seen:
                        seen.add(v)
                        stack.append(v)
    return len(seen) == len(cells)


@dataclass(frozen=True)
class Pillar:
    """Star-connected plus component above a reference height, rooted at a base face.

    root: (x, y) of the base face; cells and faces in doubled coordinates.
    """

    root: tuple
    cells: frozenset
    faces: frozenset
    reference_height: int = 0

    @staticmethod
    def from_cells(root, cells, reference_height: int = 0) -> "Pillar":
        cells = frozenset(tuple(map(int, c)) for c in cells)
        floor2 = 2 * reference_height
        faces = frozenset(f for f in bounding_faces(cells) if not (f[2] % 2 == 0 and f[2] <= floor2))
        return Pillar((int(root[0]), int(root[1])), cells, faces, reference_height)

    @property
    def empty(self) -> bool:
        return not self.cells

    def height(self) -> int:
        return hgt(self)

    def shifted(self, dz: int) -> "Pillar":
        return Pillar(
            self.root,
            frozenset((x, y, z + 2 * dz) for x, y, z in self.cells),
            frozenset((x, y, z + 2 * dz) for x, y, z in self.faces),
            self.reference_height + dz,
        )

    def translated(self, dx: int, dy: int, dz: int = 0) -> "Pillar":
        """Translate by a lattice vector given in undoubled units."""
        return Pillar(
            (self.root[0] + 2 * dx, self.root[1] + 2 * dy),
            frozenset((x + 2 * dx, y + 2 * dy, z + 2 * dz) for x, y, z in self.cells),
            frozenset((x + 2 * dx, y + 2 * dy, z + 2 * dz) for x, y, z in self.faces),
            self.reference_height + dz,
        )

    @cached_property
    def cut_points(self) -> list:
        by_level = defaultdict(list)
        for c in self.cells:
            by_level[level(c)].append(c)
        return [cs[0] for lv, cs in sorted(by_level.items()) if len(cs) == 1]

    def to_json(self) -> dict:
        return {
            "root": list(self.root),
            "reference_height": self.reference_height,
            "height": hgt(self),
            "cells": [list(c) for c in sorted(self.cells)],
            "faces": [list(f) for f in sorted(self.faces)],
        }


def hgt(P: Pillar) -> int:
    """Top of the pillar above its reference height; 0 when empty."""
    if P.empty:
        return 0
    return int(top_height(P.faces)) - P.reference_height


class PillarFinder:
    """Plus components of the canonical spins above a reference height, labelled once."""

    def __init__(self, I: Interface, reference_height: int = 0):
        self.interface = I
        self.box = b = I.box
        self.reference_height = h0 = int(reference_height)
        if not -b.H <= h0 < b.H:
            raise PreconditionError(f"reference height {h0} outside the box")
        spins = spins_of(I).spins
        self.k0 = b.H + h0
        plus = spins[self.k0 :] > 0
        self.labels, self.count = ndimage.label(plus, structure=_STAR3)

    def root_label(self, x) -> int:
        j, i = self.box.column_index(x)
        return int(self.labels[0, j, i])

    def cells_of_label(self, lab: int) -> frozenset:
        if lab == 0:
            return frozenset()
        b = self.box
        ks, js, is_ = np.nonzero(self.labels == lab)
        return frozenset(b.cell_coord(k + self.k0, j, i) for k, j, i in zip(ks.tolist(), js.tolist(), is_.tolist()))

    def pillar(self, x) -> Pillar:
        return Pillar.from_cells((x[0], x[1]), self.cells_of_label(self.root_label(x)), self.reference_height)

    def column_heights(self) -> np.ndarray:
        """hgt of the pillar at every base face, indexed [j, i]."""
        lab = self.labels
        out = np.zeros(lab.shape[1:], dtype=np.int64)
        if self.count == 0:
            return out
        levels = np.broadcast_to(np.arange(lab.shape[0])[:, None, None], lab.shape)
        tops = ndimage.maximum(levels, labels=lab, index=np.arange(1, self.count + 1))
        tops = np.concatenate([[-1], np.asarray(tops, dtype=np.int64)])
        root = lab[0]
        out[root > 0] = tops[root[root > 0]] + 1
        return out


def pillar_at(I: Interface, x, reference_height: int = 0) -> Pillar:
    return PillarFinder(I, reference_height).pillar(x)


def pillar(I: Interface, x) -> Pillar:
    """Unrestricted pillar of I at the base face x."""
    if not I.box.in_base((x[0], x[1], 0)):
        raise PreconditionError(f"{tuple(x)} is not a base face of the box")
    return pillar_at(I, x, 0)


def pillar_heights(I: Interface, reference_height: int = 0) -> np.ndarray:
    return PillarFinder(I, reference_height).column_heights()


def restricted_pillar(I: Interface, x, S: Region, W=None, decomp=None) -> Pillar:
    """Pillar of the interface restricted to S, lifted by the height of the ceiling over S."""
    from .walls import Decomposition, ceiling_of_collection, in_collection_event, restrict

    if (x[0], x[1]) not in S.faces:
        raise PreconditionError("x must lie in S")
    d = decomp or Decomposition(I)
    if W is None:
        from .walls import StandardWallCollection

        W = StandardWallCollection(I.box, tuple(d.standard_of(w) for w in d.exterior_walls(S)))
    elif not in_collection_event(I, W, S, d):
        raise PreconditionError("interface does not have the given exterior walls")
    _, _, h_c = ceiling_of_collection(W, S)
    inner = restrict(I, S, d)
    return pillar(inner, x).shifted(h_c)


@dataclass(frozen=True)
class Split:
    base_cells: frozenset
    base_faces: frozenset
    spine_cells: frozenset
    spine_faces: frozenset
    cut_points: tuple


def split(P: Pillar) -> Split:
    """Base, spine and cut-points of a pillar."""
    cuts = tuple(P.cut_points)
    if not cuts:
        return Split(P.cells, P.faces, frozenset(), frozenset(), ())
    z1 = cuts[0][2]
    spine_cells = frozenset(c for c in P.cells if c[2] >= z1)
    spine_faces = frozenset(f for f in P.faces if face_top(f) > z1 - 1)
    return Split(P.cells - spine_cells, P.faces - spine_faces, spine_cells, spine_faces, cuts)


@dataclass(frozen=True)
class Increment:
    """Increment or remainder rooted so that its bottom cut-point is the origin cell."""

    cells: frozenset
    remainder: bool = False

    @staticmethod
    def rooted(cells, remainder: bool = False) -> "Increment":
        cells = [tuple(map(int, c)) for c in cells]
        zb = min(c[2] for c in cells)
        bottom = [c for c in cells if c[2] == zb]
        if len(bottom) != 1:
            raise PreconditionError("an increment has a single bottom cell")
        bx, by, bz = bottom[0]
        ox, oy, oz = ORIGIN_CELL
        return Increment(frozenset((x - bx + ox, y - by + oy, z - bz + oz) for x, y, z in cells), remainder)

    @cached_property
    def bottom(self) -> tuple:
        return min(self.cells, key=lambda c: c[2])

    @cached_property
    def top_level_cells(self) -> list:
        zt = max(c[2] for c in self.cells)
        return sorted(c for c in self.cells if c[2] == zt)

    @property
    def top(self) -> tuple:
        """Top cut-point; for a remainder the lexicographically smallest top cell."""
        return self.top_level_cells[0]

    @property
    def span(self) -> int:
        """Height difference between the top and bottom levels."""
        return (self.top_level_cells[0][2] - self.bottom[2]) // 2

    @cached_property
    def faces(self) -> frozenset:
        """Bounding faces without the bottom-most face and one top-most horizontal face."""
        out = bounding_faces(self.cells)
        out.discard(bottom_face(self.bottom))
        out.discard(top_face(self.top))
        return frozenset(out)

    @property
    def excess(self) -> int:
        return len(self.faces) - 4 * (self.span + 1)

    @property
    def trivial(self) -> bool:
        return not self.remainder and self == TRIVIAL_INCREMENT

    def placed(self, v) -> frozenset:
        """Cells of the increment with its bottom cut-point moved to the cell v."""
        dx, dy, dz = v[0] - self.bottom[0], v[1] - self.bottom[1], v[2] - self.bottom[2]
        return frozenset((x + dx, y + dy, z + dz) for x, y, z in self.cells)

    def is_valid(self) -> bool:
        if not self.cells or not _star_connected_cells(self.cells):
            return False
        by_level = defaultdict(int)
        for c in self.cells:
            by_level[c[2]] += 1
        levels = sorted(by_level)
        if levels != list(range(levels[0], levels[-1] + 1, 2)):
            return False
        if by_level[levels[0]] != 1:
            return False
        if self.remainder:
            return all(by_level[z] >= 2 for z in levels[1:])
        if len(levels) < 2 or by_level[levels[-1]] != 1:
            return False
        return all(by_level[z] >= 2 for z in levels[1:-1])

    def canonical_faces(self) -> list:
        return sorted(self.faces)

    def to_json(self) -> dict:
        return {"remainder": self.remainder, "cells": [list(c) for c in sorted(self.cells)], "excess": self.excess}


TRIVIAL_INCREMENT = Increment(frozenset({ORIGIN_CELL, (1, 1, 3)}))
SINGLE_REMAINDER = Increment(frozenset({ORIGIN_CELL}), remainder=True)


@dataclass(frozen=True)
class IncrementSequence:
    first_cut: tuple | None
    increments: tuple
    remainder: Increment | None
    # increments in place (cells in the pillar's coordinates)
    placed: tuple = field(default=(), compare=False)
    cut_points: tuple = field(default=(), compare=False)

    @property
    def T(self) -> int:
        return len(self.increments)

    def excesses(self) -> list:
        out = [X.excess for X in self.increments]
        if self.remainder is not None:
            out.append(self.remainder.excess)
        return out


def increments(P_or_split) -> IncrementSequence:
    """Increments X_1..X_T between consecutive cut-points, and the remainder above the last."""
    sp = split(P_or_split) if isinstance(P_or_split, Pillar) else P_or_split
    cuts = sp.cut_points
    if not cuts:
        return IncrementSequence(None, (), None)
    cells = sp.spine_cells
    incs = []
    placed = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        piece = frozenset(c for c in cells if a[2] <= c[2] <= b[2])
        incs.append(Increment.rooted(piece))
        placed.append(piece)
    last = cuts[-1]
    rem = frozenset(c for c in cells if c[2] >= last[2])
    remainder = Increment.rooted(rem, remainder=True)
    placed.append(rem)
    return IncrementSequence(cuts[0], tuple(incs), remainder, tuple(placed), cuts)


@dataclass(frozen=True)
class Spine:
    cells: frozenset
    faces: frozenset
    cut_points: tuple


def spine_of_cells(cells) -> Spine:
    """Spine face set: bounding faces of the cells without the bottom face of the lowest cell."""
    cells = frozenset(cells)
    if not cells:
        return Spine(frozenset(), frozenset(), ())
    v1 = min(cells, key=lambda c: c[2])
    faces = bounding_faces(cells)
    faces.discard(bottom_face(v1))
    P = Pillar((v1[0], v1[1]), cells, frozenset(faces))
    return Spine(cells, frozenset(faces), tuple(P.cut_points))


def spine_from_increments(v1, seq, remainder: Increment | None = None) -> Spine:
    """Stack increments bottom to top starting at the cell v1, then the remainder."""
    v = tuple(map(int, v1))
    cells = {v}
    for X in seq:
        if X.remainder:
            raise PreconditionError("only the last piece may be a remainder")
        placed = X.placed(v)
        cells |= placed
        top = max(placed, key=lambda c: c[2])
        v = top
    if remainder is not None:
        cells |= remainder.placed(v)
    return spine_of_cells(cells)


def spine_of(P: Pillar) -> Spine:
    sp = split(P)
    return Spine(sp.spine_cells, sp.spine_faces, sp.cut_points)


def enumerate_polycubes(max_cells: int) -> list:
    """All star-connected cell sets with at most max_cells cells, up to translation."""
    from itertools import product

    steps = [d for d in product((-2, 0, 2), repeat=3) if d != (0, 0, 0)]

    def normal(cells):
        mx = min(c[0] for c in cells)
        my = min(c[1] for c in cells)
        mz = min(c[2] for c in cells)
        return frozenset((x - mx + 1, y - my + 1, z - mz + 1) for x, y, z in cells)

    layer = {frozenset({ORIGIN_CELL})}
    out = list(layer)
    for _ in range(max_cells - 1):
        nxt = set()
        for s in layer:
            for x, y, z in s:
                for dx, dy, dz in steps:
                    c = (x + dx, y + dy, z + dz)
                    if c not in s:
                        nxt.add(normal(s | {c}))
        layer = nxt
        out.extend(sorted(layer, key=sorted))
    return out


def enumerate_increments(max_cells: int = 4) -> tuple:
    """(increments, remainders) with at most max_cells cells, rooted at the origin cell."""
    incs, rems = set(), set()
    for s in enumerate_polycubes(max_cells):
        zb = min(c[2] for c in s)
        if sum(1 for c in s if c[2] == zb) != 1:
            continue
        X = Increment.rooted(s)
        if len(s) >= 2 and X.is_valid():
            incs.add(X)
        R = Increment.rooted(s, remainder=True)
        if R.is_valid():
            rems.add(R)
    key = lambda X: sorted(X.cells)
    return sorted(incs, key=key), sorted(rems, key=key)


_PILLAR_HEADER = struct.Struct("<4sIIIIiiiQ")
PILLAR_MAGIC = b"ISP3"


def pillar_bytes(P: Pillar, box) -> bytes:
    head = _PILLAR_HEADER.pack(PILLAR_MAGIC, 1, box.n, box.m, box.H, P.root[0], P.root[1], P.reference_height, len(P.cells))
    arr = np.array(sorted(P.cells), dtype="<i4").reshape(-1, 3)
    return head + arr.tobytes()


def pillar_from_bytes(data: bytes) -> tuple:
    magic, version, n, m, H, rx, ry, h0, count = _PILLAR_HEADER.unpack_from(data)
    if magic != PILLAR_MAGIC or version != 1:
        raise PreconditionError("not a pillar file")
    arr = np.frombuffer(data, dtype="<i4", offset=_PILLAR_HEADER.size).reshape(-1, 3)
    if len(arr) != count:
        raise PreconditionError("pillar payload length does not match its count")
    from .lattice import Box

    return Pillar.from_cells((rx, ry), map(tuple, arr.tolist()), h0), Box(n, m, H)


def pillar_json(P: Pillar) -> str:
    return json.dumps(P.to_json())
