"""Spin configurations with Dobrushin boundary conditions.

Cells outside the box carry the spin -sign(z): plus below the plane z = 0 and
minus above it.  Spins inside the box are stored as an int8 array indexed
[z, y, x], so x varies fastest in memory.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .lattice import Box

SNAPSHOT_MAGIC = b"ISI3"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIIIIdQ")
MAX_EXACT_CELLS = 24
_CHUNK = 1 << 16


def boundary_spin(z2: int) -> int:
    """Spin of an exterior cell at doubled height z2."""
    return 1 if z2 < 0 else -1


@dataclass
class SpinConfig:
    box: Box
    spins: np.ndarray

    def __post_init__(self):
        self.spins = np.ascontiguousarray(self.spins, dtype=np.int8)
        if self.spins.shape != self.box.shape:
            raise PreconditionError(f"spin array shape {self.spins.shape} does not match box {self.box.shape}")
        if not np.all(np.abs(self.spins) == 1):
            raise PreconditionError("spins must be +1 or -1")

    @staticmethod
    def ground(box: Box) -> "SpinConfig":
        """Plus below height 0, minus above."""
        s = np.empty(box.shape, dtype=np.int8)
        s[: box.H] = 1
        s[box.H :] = -1
        return SpinConfig(box, s)

    @staticmethod
    def constant(box: Box, value: int) -> "SpinConfig":
        return SpinConfig(box, np.full(box.shape, value, dtype=np.int8))

    def copy(self) -> "SpinConfig":
        return SpinConfig(self.box, self.spins.copy())

    def __eq__(self, other) -> bool:
        return isinstance(other, SpinConfig) and self.box == other.box and np.array_equal(self.spins, other.spins)

    def spin(self, c) -> int:
        """Spin of any cell, inside or outside the box."""
        if self.box.contains_cell(c):
            return int(self.spins[self.box.cell_index(c)])
        return boundary_spin(int(c[2]))

    def flipped(self, c) -> "SpinConfig":
        if not self.box.contains_cell(c):
            raise PreconditionError(f"cell {tuple(c)} is outside the box")
        out = self.copy()
        out.spins[self.box.cell_index(c)] *= -1
        return out

    def padded(self) -> np.ndarray:
        """Spin array with one layer of exterior cells on every side."""
        return padded_spins(self.box, self.spins)


def padded_spins(box: Box, spins: np.ndarray) -> np.ndarray:
    out = np.empty((2 * box.H + 2, 2 * box.m + 2, 2 * box.n + 2), dtype=np.int8)
    out[: box.H + 1] = 1
    out[box.H + 1 :] = -1
    out[1:-1, 1:-1, 1:-1] = spins
    return out


def energy(cfg: SpinConfig) -> int:
    """Number of disagreeing nearest-neighbour pairs touching the box."""
    p = cfg.padded()
    total = 0
    for axis in range(3):
        a = np.moveaxis(p, axis, 0)
        diff = a[1:] != a[:-1]
        # keep only pairs with at least one cell inside the box
        inner = [slice(1, -1)] * 3
        inner[0] = slice(None)
        total += int(diff[tuple(inner)].sum())
    return total


def local_field(cfg: SpinConfig, c) -> int:
    """Sum of the six neighbouring spins."""
    from .lattice import neighbors

    return sum(cfg.spin(v) for v in neighbors(c))


def delta_energy(cfg: SpinConfig, c) -> int:
    """energy(flip(cfg, c)) - energy(cfg), from the six neighbours."""
    if not cfg.box.contains_cell(c):
        raise PreconditionError(f"cell {tuple(c)} is outside the box")
    return int(cfg.spin(c)) * local_field(cfg, c)


@dataclass
class ExactMeasure:
    box: Box
    beta: float
    configs: np.ndarray  # (2^N, N) int8, column order = flattened spin array
    energies: np.ndarray
    probs: np.ndarray

    def prob_of(self, cfg: SpinConfig) -> float:
        return float(self.probs[config_code(cfg.spins)])


def config_code(spins: np.ndarray) -> int:
    """Integer code of a configuration: bit k set when flattened cell k is plus."""
    flat = np.asarray(spins).ravel()
    return int(((flat > 0).astype(np.int64) << np.arange(flat.size, dtype=np.int64)).sum())


def enumerate_exact(box: Box, beta: float) -> ExactMeasure:
    """Exact Boltzmann distribution on a box with at most 24 cells."""
    if box.n_cells > MAX_EXACT_CELLS:
        raise PreconditionError(f"exact enumeration is limited to {MAX_EXACT_CELLS} cells, got {box.n_cells}")
    if beta < 0:
        raise PreconditionError("beta must be non-negative")
    ncell = box.n_cells
    codes = np.arange(2**ncell, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(ncell, dtype=np.int64)[None, :]) & 1).astype(np.int8)
    configs = (2 * bits - 1).astype(np.int8)
    energies = np.concatenate([_batch_energy(box, configs[k : k + _CHUNK]) for k in range(0, len(configs), _CHUNK)])
    logw = -beta * energies.astype(np.float64)
    logw -= logw.max()
    w = np.exp(logw)
    probs = w / w.sum()
    return ExactMeasure(box, beta, configs, energies, probs)


def _batch_energy(box: Box, configs: np.ndarray) -> np.ndarray:
    batch = configs.reshape((-1,) + box.shape)
    pad = np.empty((batch.shape[0], 2 * box.H + 2, 2 * box.m + 2, 2 * box.n + 2), dtype=np.int8)
    pad[:, : box.H + 1] = 1
    pad[:, box.H + 1 :] = -1
    pad[:, 1:-1, 1:-1, 1:-1] = batch
    total = np.zeros(batch.shape[0], dtype=np.int64)
    for axis in range(1, 4):
        a = np.moveaxis(pad, axis, 1)
        diff = a[:, 1:] != a[:, :-1]
        total += diff[:, :, 1:-1, 1:-1].reshape(batch.shape[0], -1).sum(axis=1)
    return total


def write_snapshot(path, cfg: SpinConfig, beta: float, seed: int) -> None:
    """Binary snapshot: header, then packed bits (1 = plus), x fastest, then y, then z."""
    with open(path, "wb") as fh:
        fh.write(snapshot_bytes(cfg, beta, seed))


def snapshot_bytes(cfg: SpinConfig, beta: float, seed: int) -> bytes:
    b = cfg.box
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, b.n, b.m, b.H, float(beta), int(seed))
    bits = np.packbits((cfg.spins.ravel() > 0).astype(np.uint8), bitorder="little")
    return header + bits.tobytes()


def read_snapshot(path) -> tuple:
    """Returns (SpinConfig, beta, seed)."""
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_snapshot(data)


def parse_snapshot(data: bytes) -> tuple:
    if len(data) < _HEADER.size:
        raise PreconditionError("snapshot too short")
    magic, version, n, m, H, beta, seed = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise PreconditionError("not a spin snapshot (bad magic)")
    if version != SNAPSHOT_VERSION:
        raise PreconditionError(f"unsupported snapshot version {version}")
    box = Box(n, m, H)
    payload = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
    bits = np.unpackbits(payload, bitorder="little")[: box.n_cells]
    if bits.size != box.n_cells:
        raise PreconditionError("snapshot payload truncated")
    spins = (2 * bits.astype(np.int8) - 1).reshape(box.shape)
    return SpinConfig(box, spins), beta, seed
