"""Interfaces: extraction from spins, canonical spins, truncation and serialization."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels as K
from .errors import InvalidInterfaceError, PreconditionError, TruncationError
from .lattice import Box, face_neighbor_counts, face_neighbor_offsets
from .spins import SpinConfig, padded_spins

_STAR_OFFS = face_neighbor_offsets(star=True)
_STAR_COUNTS = face_neighbor_counts(star=True)


def grid_offset(box: Box) -> np.ndarray:
    """Add to doubled (x, y, z) coordinates to get dense face-grid indices (X, Y, Z)."""
    return np.array([2 * box.n + 2, 2 * box.m + 2, 2 * box.H + 2], dtype=np.int64)


def grid_shape(box: Box) -> tuple:
    """Dense face-grid shape, indexed [Z, Y, X]."""
    return (4 * box.H + 5, 4 * box.m + 5, 4 * box.n + 5)


def sort_faces(faces: np.ndarray) -> np.ndarray:
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if len(faces) == 0:
        return faces
    order = np.lexsort((faces[:, 2], faces[:, 1], faces[:, 0]))
    return faces[order]


@dataclass(frozen=True, eq=False)
class Interface:
    """A validated interface: sorted (N, 3) array of doubled face coordinates."""

    box: Box
    faces: np.ndarray = field(repr=False)

    @staticmethod
    def from_faces(box: Box, faces, validate: bool = True) -> "Interface":
        arr = sort_faces(np.array(sorted(set(map(lambda f: tuple(map(int, f)), faces))), dtype=np.int64))
        out = Interface(box, arr)
        if validate:
            out.validate()
        return out

    def __len__(self) -> int:
        return len(self.faces)

    def __eq__(self, other) -> bool:
        return isinstance(other, Interface) and self.box == other.box and np.array_equal(self.faces, other.faces)

    def __hash__(self) -> int:
        return hash((self.box, self.faces.tobytes()))

    @cached_property
    def face_set(self) -> frozenset:
        return frozenset(map(tuple, self.faces.tolist()))

    def __contains__(self, f) -> bool:
        return tuple(map(int, f)) in self.face_set

    @cached_property
    def grid(self) -> np.ndarray:
        """Dense uint8 membership grid indexed [Z, Y, X]."""
        return face_grid(self.box, self.faces)

    @cached_property
    def horizontal(self) -> np.ndarray:
        return self.faces[self.faces[:, 2] % 2 == 0]

    @cached_property
    def column_counts(self) -> np.ndarray:
        """Number of horizontal faces over each base column, indexed [j, i]."""
        b = self.box
        h = self.horizontal
        counts = np.zeros((2 * b.m, 2 * b.n), dtype=np.int64)
        inside = (np.abs(h[:, 0]) < 2 * b.n) & (np.abs(h[:, 1]) < 2 * b.m)
        h = h[inside]
        np.add.at(counts, ((h[:, 1] + 2 * b.m - 1) // 2, (h[:, 0] + 2 * b.n - 1) // 2), 1)
        return counts

    @cached_property
    def column_heights(self) -> np.ndarray:
        """Height of the unique horizontal face over each column; a large sentinel where not unique."""
        b = self.box
        out = np.full((2 * b.m, 2 * b.n), NO_HEIGHT, dtype=np.int64)
        h = self.horizontal
        cnt = self.column_counts
        j = (h[:, 1] + 2 * b.m - 1) // 2
        i = (h[:, 0] + 2 * b.n - 1) // 2
        ok = cnt[j, i] == 1
        out[j[ok], i[ok]] = h[ok, 2] // 2
        return out

    def max_height(self) -> float:
        """Largest height reached by any face (the top of vertical faces included)."""
        z = self.faces[:, 2]
        top = np.where(z % 2 == 0, z, z + 1) // 2
        return int(top.max()) if len(top) else 0

    def validate(self) -> None:
        """Raise InvalidInterfaceError unless extract(spins_of(I)) reproduces I."""
        cfg = spins_of(self)
        again = extract(cfg)
        if not np.array_equal(again.faces, self.faces):
            raise InvalidInterfaceError("face set is not the interface of its canonical spins")

    def to_bytes(self) -> bytes:
        return interface_bytes(self)


NO_HEIGHT = np.iinfo(np.int64).min // 4


def face_grid(box: Box, faces: np.ndarray) -> np.ndarray:
    g = np.zeros(grid_shape(box), dtype=np.uint8)
    if len(faces):
        idx = np.asarray(faces, dtype=np.int64) + grid_offset(box)
        g[idx[:, 2], idx[:, 1], idx[:, 0]] = 1
    return g


def extract_padded(box: Box, pad: np.ndarray) -> Interface:
    raw, touched = K.extract_faces(pad, _STAR_OFFS, _STAR_COUNTS)
    if touched:
        raise TruncationError(f"interface reaches height +-{box.H}; increase H")
    faces = sort_faces(raw - grid_offset(box))
    return Interface(box, faces)


def extract(cfg: SpinConfig) -> Interface:
    """Interface of a configuration: the faces star-connected to the plane outside the box.

    Faces between disagreeing spins are collected (the exterior follows the
    Dobrushin rule), the star-connected component containing the height-0 faces
    just outside the box is selected, and it is restricted to faces that bound
    at least one cell of the box.
    """
    return extract_padded(cfg.box, padded_spins(cfg.box, cfg.spins))


def spins_of(I: Interface) -> SpinConfig:
    """Canonical configuration of an interface (no finite bubbles).

    Each column is filled upwards from the plus phase below the box, switching
    sign at every horizontal face of I; every vertical nearest-neighbour pair is
    then checked for consistency with the faces of I.
    """
    box = I.box
    if len(I.faces) and not np.all(np.sum(I.faces % 2, axis=1) == 2):
        raise InvalidInterfaceError("non-face coordinate in interface")
    g = I.grid
    off = grid_offset(box)
    # horizontal faces strictly inside the vertical range, one per (layer boundary, column)
    Zs = np.arange(2, 4 * box.H + 3, 2)  # z2 = -2H .. 2H
    Ys = np.arange(1, 4 * box.m + 4, 2)  # padded columns
    Xs = np.arange(1, 4 * box.n + 4, 2)
    hor = g[np.ix_(Zs, Ys, Xs)].astype(np.int8)  # (2H+1, 2m+2, 2n+2)
    # exterior columns switch sign at height 0
    ring = np.ones(hor.shape[1:], dtype=bool)
    ring[1:-1, 1:-1] = False
    hor[box.H][ring] = 1
    # spins of padded cells: layer r lies above horizontal-face layer r-1
    pad = np.empty((2 * box.H + 2, 2 * box.m + 2, 2 * box.n + 2), dtype=np.int8)
    flips = np.cumsum(hor, axis=0)
    pad[0] = 1
    pad[1:] = np.where(flips % 2 == 0, 1, -1)
    expected = padded_spins(box, pad[1:-1, 1:-1, 1:-1])
    if not np.array_equal(pad, expected):
        raise InvalidInterfaceError("faces inconsistent with the boundary condition")
    mask = K.face_mask_from_spins(pad)
    # restrict F(sigma) to F(box) for comparison
    inbox = _box_face_mask(box)
    got = mask & inbox
    if not np.array_equal(got, g & inbox) or np.any(g & ~inbox):
        bad = np.argwhere(got != (g & inbox))
        where = tuple(int(v) for v in (bad[0][::-1] - off)) if len(bad) else None
        raise InvalidInterfaceError(f"faces inconsistent with any spin assignment near {where}")
    return SpinConfig(box, pad[1:-1, 1:-1, 1:-1].copy())


_BOX_MASKS: dict = {}


def _box_face_mask(box: Box) -> np.ndarray:
    """Dense mask of F(box): faces bounding at least one cell of the box."""
    m = _BOX_MASKS.get(box)
    if m is None:
        m = K.box_face_mask(np.zeros((2 * box.H + 2, 2 * box.m + 2, 2 * box.n + 2), dtype=np.int8))
        _BOX_MASKS[box] = m
    return m


def flat_interface(box: Box) -> Interface:
    return Interface(box, sort_faces(np.array(box.base_faces, dtype=np.int64)))


def cells_to_minus(I: Interface, cells) -> Interface:
    """Interface obtained by flipping the given cells of sigma(I) to minus."""
    cfg = spins_of(I)
    for c in cells:
        cfg.spins[I.box.cell_index(c)] = -1
    return extract(cfg)


def cells_to_plus(I: Interface, cells) -> Interface:
    cfg = spins_of(I)
    for c in cells:
        if not I.box.contains_cell(c):
            raise TruncationError(f"cell {tuple(c)} lies outside the box")
        cfg.spins[I.box.cell_index(c)] = 1
    return extract(cfg)


def truncate(I: Interface, pillar) -> Interface:
    """The interface after flipping every cell of the pillar to minus."""
    if not pillar.cells:
        return I
    cfg = spins_of(I)
    for c in pillar.cells:
        if not I.box.contains_cell(c) or cfg.spins[I.box.cell_index(c)] != 1:
            raise PreconditionError("pillar cell is not a plus cell of the interface")
    from .pillars import pillar_at

    again = pillar_at(I, pillar.root, pillar.reference_height)
    if again.cells != pillar.cells:
        raise PreconditionError("not a pillar of this interface")
    return cells_to_minus(I, pillar.cells)


_IFACE_HEADER = struct.Struct("<4sIIIIQ")
IFACE_MAGIC = b"ISF3"


def interface_bytes(I: Interface) -> bytes:
    """Binary form: header (magic, version, n, m, H, count) then 3 x int32 per face."""
    b = I.box
    head = _IFACE_HEADER.pack(IFACE_MAGIC, 1, b.n, b.m, b.H, len(I.faces))
    return head + I.faces.astype("<i4").tobytes()


def interface_from_bytes(data: bytes, validate: bool = True) -> Interface:
    if len(data) < _IFACE_HEADER.size:
        raise PreconditionError("interface file too short")
    magic, version, n, m, H, count = _IFACE_HEADER.unpack_from(data)
    if magic != IFACE_MAGIC or version != 1:
        raise PreconditionError("not an interface file")
    arr = np.frombuffer(data, dtype="<i4", offset=_IFACE_HEADER.size)
    if arr.size != 3 * count:
        raise PreconditionError("interface payload length does not match its count")
    faces = sort_faces(arr.reshape(-1, 3).astype(np.int64))
    out = Interface(Box(n, m, H), faces)
    if validate:
        out.validate()
    return out


def write_interface(path, I: Interface) -> None:
    with open(path, "wb") as fh:
        fh.write(interface_bytes(I))


def read_interface(path, validate: bool = True) -> Interface:
    with open(path, "rb") as fh:
        return interface_from_bytes(fh.read(), validate=validate)
