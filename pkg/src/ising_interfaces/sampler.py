"""Single-site heat-bath dynamics, unconditional and conditioned on exterior walls.

Random numbers come from numpy's PCG64 seeded with SeedSequence(seed,
spawn_key=(stream,)), so a chain is reproducible from (seed, stream).  Site
choices and uniforms are drawn in fixed-size blocks and consumed one update at
a time, which keeps a trajectory independent of how the updates are batched.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels as K
from .errors import PreconditionError, TruncationError
from .interface import Interface, extract_padded, face_grid, grid_shape, spins_of
from .lattice import Box, Region, face_neighbor_counts, face_neighbor_offsets
from .spins import SpinConfig, enumerate_exact, padded_spins

log = logging.getLogger(__name__)

_STAR_OFFS = face_neighbor_offsets(star=True)
_STAR_COUNTS = face_neighbor_counts(star=True)
BLOCK = 1 << 16
DEFAULT_BURN_IN = 200
DEFAULT_SWEEPS_BETWEEN = 10


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(stream),))))


def heat_bath_table(beta: float) -> np.ndarray:
    """p(+) indexed by (field + 6) // 2, field = sum of the six neighbouring spins."""
    fields = np.arange(-6, 7, 2, dtype=np.float64)
    return 1.0 / (1.0 + np.exp(-beta * fields))


class _Draws:
    """Buffered site indices and uniforms."""

    def __init__(self, rng: np.random.Generator, n_sites: int):
        self.rng = rng
        self.n_sites = n_sites
        self.sites = np.empty(0, dtype=np.int64)
        self.unif = np.empty(0)
        self.pos = 0

    def take(self, count: int) -> tuple:
        out_s, out_u = [], []
        while count > 0:
            if self.pos == len(self.sites):
                self.sites = self.rng.integers(0, self.n_sites, size=BLOCK, dtype=np.int64)
                self.unif = self.rng.random(BLOCK)
                self.pos = 0
            k = min(count, len(self.sites) - self.pos)
            out_s.append(self.sites[self.pos : self.pos + k])
            out_u.append(self.unif[self.pos : self.pos + k])
            self.pos += k
            count -= k
        if len(out_s) == 1:
            return out_s[0], out_u[0]
        return np.concatenate(out_s), np.concatenate(out_u)


@dataclass
class ChainState:
    """A heat-bath chain: padded spins, generator state and tallies."""

    box: Box
    beta: float
    pad: np.ndarray
    seed: int
    stream: int = 0
    updates: int = 0
    changes: int = 0
    allowed: np.ndarray | None = None

    def __post_init__(self):
        self.p_plus = heat_bath_table(self.beta)
        if self.allowed is None:
            self.allowed = np.arange(self.box.n_cells, dtype=np.int64)
        self._draws = _Draws(make_rng(self.seed, self.stream), len(self.allowed))

    @staticmethod
    def new(cfg: SpinConfig, beta: float, seed: int, stream: int = 0, allowed=None) -> "ChainState":
        if beta < 0:
            raise PreconditionError("beta must be non-negative")
        pad = padded_spins(cfg.box, cfg.spins)
        return ChainState(cfg.box, float(beta), pad, int(seed), int(stream), allowed=allowed)

    @property
    def sweeps(self) -> float:
        return self.updates / len(self.allowed)

    @property
    def cfg(self) -> SpinConfig:
        return SpinConfig(self.box, self.pad[1:-1, 1:-1, 1:-1].copy())

    def interface(self) -> Interface:
        return extract_padded(self.box, self.pad)

    def run(self, n_updates: int) -> None:
        sites, unif = self._draws.take(int(n_updates))
        self.changes += K.heat_bath_updates(self.pad, self.p_plus, sites, unif, self.allowed)
        self.updates += int(n_updates)

    def sweep(self, n: int = 1) -> None:
        self.run(int(n) * len(self.allowed))


def heat_bath_step(state: ChainState) -> ChainState:
    """One update at a uniformly chosen cell; the state is modified in place and returned."""
    state.run(1)
    return state


class SampleStream:
    """Iterator of sampled interfaces; counts samples dropped for touching the box top or bottom."""

    def __init__(self, state, n_samples: int, sweeps_between: int, burn_in: int, max_flagged: float = 0.01, check=None):
        if n_samples < 0 or sweeps_between < 1 or burn_in < 0:
            raise PreconditionError("n_samples, burn_in must be >= 0 and sweeps_between >= 1")
        self.state = state
        self.n_samples = int(n_samples)
        self.sweeps_between = int(sweeps_between)
        self.burn_in = int(burn_in)
        self.max_flagged = max_flagged
        self.flagged = 0
        self.produced = 0
        self.check = check

    def __iter__(self):
        if self.n_samples == 0:
            return
        self.state.sweep(self.burn_in)
        while self.produced < self.n_samples:
            self.state.sweep(self.sweeps_between)
            try:
                I = self.state.interface()
            except TruncationError:
                self.flagged += 1
                if self.flagged > self.max_flagged * self.n_samples:
                    raise TruncationError(
                        f"{self.flagged} samples reached the top or bottom of the box; increase H"
                    ) from None
                continue
            if self.check is not None:
                self.check(I)
            self.produced += 1
            yield I


def sample_interfaces(
    box: Box,
    beta: float,
    n_samples: int,
    sweeps_between: int = DEFAULT_SWEEPS_BETWEEN,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    stream: int = 0,
    init: SpinConfig | None = None,
) -> SampleStream:
    """Interfaces sampled from the heat-bath chain started at init (default: ground state)."""
    cfg = init if init is not None else SpinConfig.ground(box)
    state = ChainState.new(cfg, beta, seed, stream)
    return SampleStream(state, n_samples, sweeps_between, burn_in)


@dataclass(frozen=True, eq=False)
class Constraint:
    """Condition that the walls assigned outside S are exactly the standard collection W."""

    region: Region
    walls: object  # StandardWallCollection

    def __post_init__(self):
        from .walls import _interior_edges  # noqa: F401

        box = self.walls.box
        closure = set()
        for x, y in self.region.faces:
            if not box.in_base((x, y, 0)):
                raise PreconditionError(f"region face {(x, y)} lies outside the box")
            closure.update((x + dx, y + dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1))
        for W in self.walls.walls:
            if W.shape.vertices & closure:
                raise PreconditionError("walls of the constraint must stay away from the closure of S")

    @property
    def box(self) -> Box:
        return self.walls.box

    @cached_property
    def target_interface(self) -> Interface:
        from .walls import reconstruct

        return reconstruct(self.walls)

    @cached_property
    def region_mask(self) -> np.ndarray:
        """[Y, X] mask of planar elements of the face grid lying in the exterior of S.

        Faces outside S and edges with both neighbouring faces outside S.
        """
        b = self.box
        _, GY, GX = grid_shape(b)
        mask = np.zeros((GY, GX), dtype=np.uint8)
        inS = np.zeros((GY, GX), dtype=bool)
        for x, y in self.region.faces:
            inS[y + 2 * b.m + 2, x + 2 * b.n + 2] = True
        Y, X = np.mgrid[0:GY, 0:GX]
        face = (X % 2 == 1) & (Y % 2 == 1)
        mask[face & ~inS] = 1
        ex = (X % 2 == 0) & (Y % 2 == 1) & (X >= 1) & (X <= GX - 2)
        ok = np.zeros_like(ex)
        ok[:, 1:-1] = ~inS[:, :-2] & ~inS[:, 2:]
        mask[ex & ok] = 1
        ey = (X % 2 == 1) & (Y % 2 == 0) & (Y >= 1) & (Y <= GY - 2)
        ok = np.zeros_like(ey)
        ok[1:-1, :] = ~inS[:-2, :] & ~inS[2:, :]
        mask[ey & ok] = 1
        return mask

    @cached_property
    def target_grid(self) -> np.ndarray:
        I = self.target_interface
        g = face_grid(self.box, I.faces)
        g &= self.region_mask[None, :, :]
        return g

    @cached_property
    def n_target(self) -> int:
        return int(self.target_grid.sum())

    @cached_property
    def sensitive_columns(self) -> np.ndarray:
        """[j, i] columns whose closed square lies within distance 1 of a face outside S."""
        b = self.box
        out = np.zeros((2 * b.m, 2 * b.n), dtype=bool)
        comp = np.ones((2 * b.m + 6, 2 * b.n + 6), dtype=bool)  # margin of 3 columns outside the box
        for x, y in self.region.faces:
            j, i = b.column_index((x, y))
            comp[j + 3, i + 3] = False
        offsets = [(dj, di) for dj in range(-2, 3) for di in range(-2, 3)
                   if max(0, abs(dj) - 1) ** 2 + max(0, abs(di) - 1) ** 2 <= 1]
        for dj, di in offsets:
            out |= comp[3 + dj : 3 + dj + 2 * b.m, 3 + di : 3 + di + 2 * b.n]
        return out

    def allowed_cells(self) -> np.ndarray:
        """Flat indices of cells in columns over S."""
        b = self.box
        cols = np.zeros((2 * b.m, 2 * b.n), dtype=bool)
        for x, y in self.region.faces:
            cols[b.column_index((x, y))] = True
        full = np.broadcast_to(cols[None], b.shape)
        return np.flatnonzero(full.ravel()).astype(np.int64)

    def holds(self, I: Interface) -> bool:
        """Exact check: faces of I over the exterior of S agree with those of I_W."""
        g = face_grid(self.box, I.faces) & self.region_mask[None, :, :]
        return bool(np.array_equal(g, self.target_grid))

    def holds_by_walls(self, I: Interface) -> bool:
        """Check through the wall decomposition: the walls assigned outside S are W."""
        from .walls import Decomposition, in_collection_event

        return in_collection_event(I, self.walls, self.region, Decomposition(I))


class ConditionalChainState(ChainState):
    """Heat-bath chain that rejects any flip changing the interface over the exterior of S."""

    def __init__(self, constraint: Constraint, beta: float, seed: int, stream: int = 0, cfg: SpinConfig | None = None):
        box = constraint.box
        cfg = cfg if cfg is not None else spins_of(constraint.target_interface)
        pad = padded_spins(box, cfg.spins)
        super().__init__(box, float(beta), pad, int(seed), int(stream))
        self.constraint = constraint
        self.visited = np.zeros(grid_shape(box), dtype=np.int32)
        self.stack = np.empty((self.visited.size // 2 + 16, 3), dtype=np.int64)
        self.state = np.zeros(1, dtype=np.int64)
        self.tally = np.zeros(4, dtype=np.int64)
        self.region = constraint.region_mask
        self.target = constraint.target_grid
        self.sensitive = constraint.sensitive_columns
        if not constraint.holds(self.interface()):
            raise PreconditionError("initial configuration violates the constraint")

    def run(self, n_updates: int) -> None:
        sites, unif = self._draws.take(int(n_updates))
        before = int(self.tally[0])
        if self.state[0] > 2**31 - 2 - n_updates:
            self.visited[:] = 0
            self.state[0] = 0
        K.conditional_updates(
            self.pad, self.p_plus, sites, unif, self.allowed, _STAR_OFFS, _STAR_COUNTS,
            self.visited, self.state, self.stack, self.region, self.target, self.n_target, self.sensitive, self.tally,
        )
        self.changes += int(self.tally[0]) - before
        self.updates += int(n_updates)

    @property
    def n_target(self) -> int:
        return self.constraint.n_target

    @property
    def checks(self) -> int:
        return int(self.tally[1])

    @property
    def rejections(self) -> int:
        return int(self.tally[2])

    @property
    def unchecked_changes(self) -> int:
        """Changes at non-sensitive columns, accepted without a constraint check."""
        return int(self.tally[3])


def sample_conditional(
    box: Box,
    beta: float,
    constraint: Constraint,
    n_samples: int,
    sweeps_between: int = DEFAULT_SWEEPS_BETWEEN,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    stream: int = 0,
    frozen_exterior: bool = False,
    verify: bool = False,
    init: SpinConfig | None = None,
) -> SampleStream:
    """Interfaces sampled from the Ising measure conditioned on the exterior walls being W.

    With frozen_exterior, only spins in columns over S are updated (a stricter
    conditioning kept for comparison).
    """
    if constraint.box != box:
        raise PreconditionError("constraint and box differ")
    if frozen_exterior:
        cfg = init if init is not None else spins_of(constraint.target_interface)
        state = ChainState.new(cfg, beta, seed, stream, allowed=constraint.allowed_cells())
        if not constraint.holds(state.interface()):
            raise PreconditionError("initial configuration violates the constraint")
    else:
        state = ConditionalChainState(constraint, beta, seed, stream, cfg=init)
    check = None
    if verify:
        def check(I):
            if not constraint.holds_by_walls(I):
                raise AssertionError("sampled interface left the conditioning event")
    return SampleStream(state, n_samples, sweeps_between, burn_in, check=check)


def empirical_distribution(box: Box, beta: float, n_updates: int, seed: int, thin: int = 1, stream: int = 0) -> np.ndarray:
    """Visit frequencies of every configuration over a heat-bath run from the ground state."""
    if box.n_cells > 24:
        raise PreconditionError("configuration histograms are limited to 24 cells")
    from .spins import config_code

    cfg = SpinConfig.ground(box)
    pad = padded_spins(box, cfg.spins)
    hist = np.zeros(2**box.n_cells, dtype=np.int64)
    code = np.int64(config_code(cfg.spins))
    draws = _Draws(make_rng(seed, stream), box.n_cells)
    p_plus = heat_bath_table(beta)
    left = int(n_updates)
    while left > 0:
        k = min(left, BLOCK * thin)
        k -= k % thin
        if k == 0:
            break
        sites, unif = draws.take(k)
        code = K.heat_bath_histogram(pad, p_plus, sites, unif, thin, hist, code)
        left -= k
    return hist / max(hist.sum(), 1)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def exact_tv(box: Box, beta: float, n_updates: int, seed: int) -> float:
    """TV distance between the chain's empirical distribution and the exact measure."""
    exact = enumerate_exact(box, beta)
    return total_variation(empirical_distribution(box, beta, n_updates, seed), exact.probs)


def detailed_balance_error(box: Box, beta: float) -> float:
    """max |pi(a) k(a->b) - pi(b) k(b->a)| over configuration pairs differing at one cell."""
    exact = enumerate_exact(box, beta)
    N = box.n_cells
    p_plus = heat_bath_table(beta)
    configs = exact.configs.reshape((-1,) + box.shape)
    pads = np.empty((configs.shape[0], 2 * box.H + 2, 2 * box.m + 2, 2 * box.n + 2), dtype=np.int8)
    pads[:, : box.H + 1] = 1
    pads[:, box.H + 1 :] = -1
    pads[:, 1:-1, 1:-1, 1:-1] = configs
    fields = (
        pads[:, :-2, 1:-1, 1:-1] + pads[:, 2:, 1:-1, 1:-1]
        + pads[:, 1:-1, :-2, 1:-1] + pads[:, 1:-1, 2:, 1:-1]
        + pads[:, 1:-1, 1:-1, :-2] + pads[:, 1:-1, 1:-1, 2:]
    ).reshape(configs.shape[0], N)
    pp = p_plus[(fields.astype(np.int64) + 6) // 2]
    codes = np.arange(configs.shape[0], dtype=np.int64)
    worst = 0.0
    for c in range(N):
        bit = np.int64(1) << c
        plus_now = (codes & bit) != 0
        other = codes ^ bit
        # rate to the configuration with cell c flipped
        k_ab = np.where(plus_now, 1.0 - pp[:, c], pp[:, c]) / N
        k_ba = np.where(plus_now, pp[other, c], 1.0 - pp[other, c]) / N
        diff = np.abs(exact.probs * k_ab - exact.probs[other] * k_ba)
        worst = max(worst, float(diff.max()))
    return worst
