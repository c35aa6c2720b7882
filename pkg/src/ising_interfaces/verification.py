"""Property suites and desk-scale corridors behind `verify` and the acceptance tests.

Each criterion returns a CriterionResult with the measured values; nothing is
asserted here, so callers decide how to report failures.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import walls as walls_mod
from .errors import GuaranteeViolation, IsingInterfaceError, PreconditionError
from .interface import Interface, cells_to_minus, cells_to_plus, extract, flat_interface
from .lattice import Box, Region, distance
from .maps import IsoParams, is_isolated, phi_iso, phi_swap, psi_delete, insert_column, witness, witness_reconstruct
from .pillars import (
    PillarFinder, SINGLE_REMAINDER, TRIVIAL_INCREMENT, Increment, IncrementSequence, Pillar, enumerate_increments,
    increments, spine_from_increments,
)
from .sampler import (
    Constraint, detailed_balance_error, empirical_distribution, make_rng, sample_conditional, sample_interfaces,
    total_variation,
)
from .spins import SpinConfig, enumerate_exact
from .stats import (
    AlphaTable, RestrictedView, alpha_estimate, batch_means_ci, gamma, gamma_in_corridor, m_star, max_height_samples, pillar_tail,
)
from .walls import Decomposition, StandardWallCollection

LEVELS = ("quick", "full")
QUICK = (2, 3, 4, 5, 6, 7, 8, 12)

# sample counts per level; full sizes are the acceptance sizes
SIZES = {
    "quick": {"c2_faces": 6, "c3_spines": 200, "c4_samples": 40, "c5_apps": 60, "c6_pairs": 20, "c7_pairs": 40,
              "c8_samples": 20, "c1_updates": 10**6, "c9_samples": 300, "c10_samples": 100, "c11_samples": 50,
              "c11_sizes": (16, 32), "alpha_samples": 200},
    "full": {"c2_faces": 10, "c3_spines": 1000, "c4_samples": 1000, "c5_apps": 1000, "c6_pairs": 300,
             "c7_pairs": 1000, "c8_samples": 200, "c1_updates": 10**7, "c9_samples": 10**4, "c10_samples": 2000,
             "c11_samples": 1000, "c11_sizes": (16, 32, 64), "alpha_samples": 2000},
}

BETA = 1.0


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.number:2d} {self.title} [{self.seconds:.1f}s] {vals}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "measured": {k: _jsonable(v) for k, v in self.measured.items()}, "seconds": self.seconds}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(a) for a in v) + "]"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(a) for a in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(a) for k, a in v.items()}
    return v


# ---------------------------------------------------------------- 1 sampler exactness

def criterion_1(level: str, seed: int) -> CriterionResult:
    box = Box(1, 1, 1)
    beta = 0.5
    n = SIZES[level]["c1_updates"]
    emp = empirical_distribution(box, beta, n, seed, thin=10)
    tv = total_variation(emp, enumerate_exact(box, beta).probs)
    db = detailed_balance_error(box, beta)
    return CriterionResult(1, "sampler exactness", tv < 0.01 and db < 1e-10,
                           {"updates": n, "tv": tv, "detailed_balance": db})


# ---------------------------------------------------------------- 2 reconstruction bijection

def sos_height_functions(side: int, max_faces: int):
    """Height functions on a side x side base, zero outside, with at most max_faces vertical faces."""
    hmax = max_faces // 4
    heights = np.zeros((side, side), dtype=np.int64)

    def rec(k: int, cost: int):
        if k == side * side:
            yield heights.copy()
            return
        j, i = divmod(k, side)
        left = heights[j, i - 1] if i > 0 else 0
        up = heights[j - 1, i] if j > 0 else 0
        for h in range(-hmax, hmax + 1):
            c = cost + abs(h - left) + abs(h - up)
            if i == side - 1:
                c += abs(h)
            if j == side - 1:
                c += abs(h)
            if c <= max_faces:
                heights[j, i] = h
                yield from rec(k + 1, c)
        heights[j, i] = 0

    yield from rec(0, 0)


def interface_of_heights(box: Box, heights: np.ndarray) -> Interface:
    """Interface of the configuration that is plus exactly below the given column heights."""
    levels = np.arange(-box.H, box.H)[:, None, None]
    spins = np.where(levels < heights[None, :, :], 1, -1).astype(np.int8)
    return extract(SpinConfig(box, spins))


def criterion_2(level: str, seed: int) -> CriterionResult:
    max_faces = SIZES[level]["c2_faces"]
    box = Box(3, 3, max_faces // 4 + 1)
    total = bad_a = bad_b = over = 0
    for heights in sos_height_functions(6, max_faces):
        I = interface_of_heights(box, heights)
        C = walls_mod.represent(I)
        if C.face_count() > max_faces:
            over += 1
        total += 1
        if walls_mod.reconstruct(C) != I:
            bad_a += 1
        if walls_mod.represent(walls_mod.reconstruct(C)) != C:
            bad_b += 1
    ok = total > 0 and bad_a == 0 and bad_b == 0 and over == 0
    return CriterionResult(2, "reconstruction bijection", ok,
                           {"max_faces": max_faces, "collections": total, "reconstruct_represent_fail": bad_a,
                            "represent_reconstruct_fail": bad_b, "face_count_mismatch": over})


# ---------------------------------------------------------------- 3 spine bijection

def _decompose_spine(v1, cells) -> IncrementSequence:
    from .pillars import spine_of_cells

    sp = spine_of_cells(cells)
    P = Pillar((v1[0], v1[1]), sp.cells, sp.faces)
    return increments(P)


def criterion_3(level: str, seed: int) -> CriterionResult:
    incs, rems = enumerate_increments(4)
    v1 = (1, 1, 1)
    bad_exh = 0
    for X in incs:
        seq = _decompose_spine(v1, spine_from_increments(v1, [X]).cells)
        if seq.increments != (X,) or seq.remainder != SINGLE_REMAINDER or Increment.rooted(X.placed(v1)) != X:
            bad_exh += 1
    for R in rems:
        seq = _decompose_spine(v1, spine_from_increments(v1, [], R).cells)
        if seq.increments != () or seq.remainder != R:
            bad_exh += 1
    rng = make_rng(seed, 3)
    n = SIZES[level]["c3_spines"]
    bad_rand = 0
    for _ in range(n):
        T = int(rng.integers(0, 8))
        seq_in = tuple(incs[int(rng.integers(len(incs)))] for _ in range(T))
        rem = rems[int(rng.integers(len(rems)))]
        start = (int(rng.integers(-3, 4)) * 2 + 1, int(rng.integers(-3, 4)) * 2 + 1, 2 * int(rng.integers(0, 3)) + 1)
        out = _decompose_spine(start, spine_from_increments(start, seq_in, rem).cells)
        if out.increments != seq_in or out.remainder != rem or out.first_cut != start:
            bad_rand += 1
    return CriterionResult(3, "spine bijection", bad_exh == 0 and bad_rand == 0,
                           {"increments": len(incs), "remainders": len(rems), "exhaustive_fail": bad_exh,
                            "sampled": n, "sampled_fail": bad_rand})


# ---------------------------------------------------------------- 4 excess-area identities

@lru_cache(maxsize=4)
def _samples(n: int, H: int, count: int, seed: int, stream: int) -> tuple:
    return tuple(sample_interfaces(Box(n, n, H), BETA, count, seed=seed, stream=stream))


def criterion_4(level: str, seed: int) -> CriterionResult:
    count = SIZES[level]["c4_samples"]
    samples = _samples(12, 6, count, seed, 4)
    n_walls = fails = add_fail = 0
    for I in samples:
        d = Decomposition(I)
        total = 0
        for W in d.walls:
            n_walls += 1
            m = W.excess()
            proj_faces = {(f[0], f[1]) for f in W.faces if f[2] % 2 == 0}
            ok = (m == len(W.faces) - len(proj_faces) and 2 * m >= len(W.faces) and m >= len(W.projection))
            fails += not ok
            total += m
        add_fail += total != len(I) - I.box.n_base_faces
    return CriterionResult(4, "excess-area identities", fails == 0 and add_fail == 0,
                           {"samples": count, "walls": n_walls, "wall_fail": fails, "additivity_fail": add_fail})


# ---------------------------------------------------------------- 5 and 6 isolation map and witness

@dataclass
class IsoApplication:
    I: Interface
    x: tuple
    p: IsoParams
    J: Interface | None = None
    error: str = ""
    bounds_ok: bool = False
    isolated: bool = False
    excess: int = 0
    reconstructed: bool = False
    digest: str = ""


def _tallest_column(I: Interface) -> tuple:
    hts = PillarFinder(I).column_heights()
    j, i = np.unravel_index(int(np.argmax(hts)), hts.shape)
    return I.box.column_coord(int(j), int(i))


def apply_iso(I: Interface, x, p: IsoParams, S=None, W=None) -> IsoApplication:
    app = IsoApplication(I, x, p)
    try:
        app.isolated = is_isolated(I, x, S, W, p)
        J, trace = phi_iso(I, x, S, W, p, check=True)
        app.J = J
        app.excess = trace.excess
        app.bounds_ok = all(trace.bounds().values())
        w = witness(I, J, x, trace)
        app.digest = w.digest()
        app.reconstructed = witness_reconstruct(J, w, x, S, W, p) == I
    except (IsingInterfaceError, AssertionError) as exc:
        app.error = f"{type(exc).__name__}: {exc}"
    return app


@lru_cache(maxsize=2)
def _iso_applications(count: int, seed: int) -> tuple:
    box = Box(12, 12, 6)
    rng = make_rng(seed, 5)
    out = []
    for k, I in enumerate(sample_interfaces(box, BETA, count, seed=seed, stream=5)):
        if k % 2 == 0:
            x = _tallest_column(I)
        else:
            faces = box.base_faces
            f = faces[int(rng.integers(len(faces)))]
            x = (f[0], f[1])
        p = IsoParams(3, 1 + k % 3)
        out.append(apply_iso(I, x, p))
    return tuple(out)


def criterion_5(level: str, seed: int) -> CriterionResult:
    apps = _iso_applications(SIZES[level]["c5_apps"], seed)
    errors = [a.error for a in apps if a.error]
    bounds_fail = sum(1 for a in apps if not a.error and not a.bounds_ok)
    positive_fail = sum(1 for a in apps if not a.error and not a.isolated and a.excess < 1)
    fixed_fail = sum(1 for a in apps if not a.error and a.isolated and a.J != a.I)
    ok = not errors and bounds_fail == 0 and positive_fail == 0 and fixed_fail == 0
    return CriterionResult(5, "isolation map guarantees", ok,
                           {"applications": len(apps), "not_isolated": sum(not a.isolated for a in apps),
                            "guarantee_fail": len(errors), "bounds_fail": bounds_fail,
                            "excess_below_1": positive_fail, "fixed_point_fail": fixed_fail,
                            "first_error": errors[0] if errors else ""})


def collision_family(pairs: int, seed: int) -> list:
    """Pre-images sharing few images: a column at (1,1) with other columns, spines and bumps around it."""
    box = Box(4, 4, 6)
    flat = flat_interface(box)
    x = (1, 1)
    bases = []
    for k in (1, 2, 3):
        bases.append(frozenset((1, 1, 2 * l + 1) for l in range(k)))
    incs, _ = enumerate_increments(3)
    for X in incs:
        if not X.trivial:
            bases.append(spine_from_increments((1, 1, 1), [X]).cells)
    spots = [f for f in box.base_faces if (f[0], f[1]) != x]
    decorations = [()]
    decorations += [((f, s),) for f in spots for s in (1, -1)]
    rng = make_rng(seed, 6)
    for _ in range(pairs):
        a, b = rng.choice(len(spots), 2, replace=False)
        decorations.append(((spots[int(a)], int(rng.choice([1, -1]))), (spots[int(b)], int(rng.choice([1, -1])))))
    out = []
    seen = set()
    for cells in bases:
        J0 = cells_to_plus(flat, cells)
        for dec in decorations:
            plus = [(f[0], f[1], 1) for f, s in dec if s > 0]
            minus = [(f[0], f[1], -1) for f, s in dec if s < 0]
            I = cells_to_minus(cells_to_plus(J0, plus), minus) if minus else cells_to_plus(J0, plus)
            if I not in seen:
                seen.add(I)
                out.append(I)
    return out


def criterion_6(level: str, seed: int) -> CriterionResult:
    apps = _iso_applications(SIZES[level]["c5_apps"], seed)
    recon_fail = sum(1 for a in apps if not a.error and not a.reconstructed)
    family = collision_family(SIZES[level]["c6_pairs"], seed)
    p = IsoParams(3, 2)
    groups: dict = {}
    fam_errors = 0
    fam_recon_fail = 0
    for I in family:
        a = apply_iso(I, (1, 1), p)
        if a.error:
            fam_errors += 1
            continue
        fam_recon_fail += not a.reconstructed
        groups.setdefault(a.J, []).append(a.digest)
    collisions = sum(len(d) - len(set(d)) for d in groups.values())
    ok = recon_fail == 0 and not any(a.error for a in apps) and collisions == 0 and fam_errors == 0 \
        and fam_recon_fail == 0
    return CriterionResult(6, "witness injectivity", ok,
                           {"applications": len(apps), "reconstruct_fail": recon_fail, "family": len(family),
                            "images": len(groups), "largest_fibre": max((len(d) for d in groups.values()), default=0),
                            "collisions": collisions, "family_errors": fam_errors,
                            "family_reconstruct_fail": fam_recon_fail})


# ---------------------------------------------------------------- 7 swap

def ring_environment(box: Box, half_side: int) -> tuple:
    """(I_ring, S, W): a plateau of height 1 over square(half_side) and S one unit inside it."""
    cells = [(f[0], f[1], 1) for f in sorted(Region.square(half_side).faces)]
    I = cells_to_plus(flat_interface(box), cells)
    W = walls_mod.represent(I)
    return I, Region.square(half_side - 1), W


def _random_isolated(I0: Interface, S, W, p: IsoParams, hc: int, xs: list, spots: list, rng, incs, rems) -> tuple:
    """An isolated pillar on I0 plus a few far bumps; returns (I, x, attempts)."""
    attempts = 0
    while True:
        attempts += 1
        x = xs[int(rng.integers(len(xs)))]
        seq = [TRIVIAL_INCREMENT]
        for t in range(2, 2 + int(rng.integers(0, 3))):
            cand = [X for X in incs if X.excess <= t]
            seq.append(cand[int(rng.integers(len(cand)))])
        rem = rems[int(rng.integers(len(rems)))] if rng.random() < 0.5 else None
        cells = spine_from_increments((x[0], x[1], 2 * hc + 1), seq, rem).cells
        try:
            I = cells_to_plus(I0, cells)
            far = [f for f in spots if distance((f[0], f[1], 0), (x[0], x[1], 0)) >= p.L3 * p.h + 0.5]
            for _ in range(int(rng.integers(0, 4))):
                f = far[int(rng.integers(len(far)))]
                if rng.random() < 0.5:
                    I = cells_to_plus(I, [(f[0], f[1], 2 * hc + 1)])
                else:
                    I = cells_to_minus(I, [(f[0], f[1], 2 * hc - 1)])
        except IsingInterfaceError:
            continue
        try:
            if is_isolated(I, x, S, W, p):
                return I, x, attempts
        except PreconditionError:
            # left the conditioning event; draw again
            continue


def criterion_7(level: str, seed: int) -> CriterionResult:
    box = Box(6, 6, 8)
    p = IsoParams(1, 3)
    rng = make_rng(seed, 7)
    incs, rems = enumerate_increments(4)
    rems = [R for R in rems if len(R.cells) <= 3]
    ring_I, ring_S, ring_W = ring_environment(box, 5)
    flat = flat_interface(box)
    xs = [(x, y) for x in (-3, -1, 1, 3) for y in (-3, -1, 1, 3)]
    flat_spots = [f for f in box.base_faces if max(abs(f[0]), abs(f[1])) <= 9]
    ring_spots = sorted(ring_S.faces)
    n = SIZES[level]["c7_pairs"]
    conserve_fail = invol_fail = errors = attempts = 0
    first_error = ""
    for k in range(n):
        ring = k % 2 == 1
        env = (ring_I, ring_S, ring_W, 1, ring_spots) if ring else (flat, None, None, 0, flat_spots)
        I, x, a1 = _random_isolated(env[0], env[1], env[2], p, env[3], xs, env[4], rng, incs, rems)
        I2, x2, a2 = _random_isolated(flat, None, None, p, 0, xs, flat_spots, rng, incs, rems)
        attempts += a1 + a2
        try:
            J, J2 = phi_swap(I, I2, x, x2, env[1], env[2], p)
            conserve_fail += len(J) + len(J2) != len(I) + len(I2)
            K, K2 = phi_swap(J, J2, x, x2, env[1], env[2], p)
            invol_fail += (K != I) or (K2 != I2)
        except (IsingInterfaceError, AssertionError) as exc:
            errors += 1
            first_error = first_error or f"{type(exc).__name__}: {exc}"
    ok = conserve_fail == 0 and invol_fail == 0 and errors == 0
    return CriterionResult(7, "swap involution and conservation", ok,
                           {"pairs": n, "generation_attempts": attempts, "conservation_fail": conserve_fail,
                            "involution_fail": invol_fail, "errors": errors, "first_error": first_error})


# ---------------------------------------------------------------- 8 pillar deletion and column insertion

def criterion_8(level: str, seed: int) -> CriterionResult:
    samples = _samples(12, 6, SIZES[level]["c8_samples"], seed, 8)
    rng = make_rng(seed, 8)
    applied = bound_fail = inserted = insert_fail = errors = 0
    for I in samples:
        hts = PillarFinder(I).column_heights()
        js, is_ = np.nonzero(hts > 0)
        order = rng.permutation(len(js))[:5]
        for t in order:
            y = I.box.column_coord(int(js[t]), int(is_[t]))
            h = int(hts[js[t], is_[t]])
            try:
                J = psi_delete(I, y)
            except PreconditionError:
                continue
            except GuaranteeViolation:
                errors += 1
                continue
            applied += 1
            bound_fail += len(I) - len(J) < 4 * h - 1
        faces = I.box.base_faces
        for _ in range(3):
            f = faces[int(rng.integers(len(faces)))]
            h = int(rng.integers(1, 4))
            try:
                J = insert_column(I, (f[0], f[1]), h)
            except PreconditionError:
                continue
            except GuaranteeViolation:
                errors += 1
                continue
            inserted += 1
            insert_fail += (len(J) - len(I) != 4 * h) or (len(I.face_set ^ J.face_set) != 4 * h + 2)
    ok = applied > 0 and inserted > 0 and bound_fail == 0 and insert_fail == 0 and errors == 0
    return CriterionResult(8, "pillar deletion bound and column insertion", ok,
                           {"deletions": applied, "deletion_bound_fail": bound_fail, "insertions": inserted,
                            "insertion_fail": insert_fail, "errors": errors})


# ---------------------------------------------------------------- 9 rigidity tail corridor

def criterion_9(level: str, seed: int) -> CriterionResult:
    N = SIZES[level]["c9_samples"]
    box = Box(12, 12, 6)
    tail, reach = pillar_tail(sample_interfaces(box, BETA, N, seed=seed, stream=9), None, 4)
    rates = [tail.rate(h) for h in (1, 2)]
    lo, hi = 0.75 * 4 * BETA, 1.25 * 4 * BETA
    ok = all(lo <= r[0] <= hi for r in rates)
    return CriterionResult(9, "rigidity tail corridor", ok,
                           {"samples": N, "observations": tail.total,
                            "p_hat": [tail.p_hat(h) for h in (1, 2, 3)], "counts": [tail.count(h) for h in (1, 2, 3)],
                            "rate_1": rates[0][0], "rate_1_ci": list(rates[0][1:]),
                            "rate_2": rates[1][0], "rate_2_ci": list(rates[1][1:]), "corridor": [lo, hi]})


# ---------------------------------------------------------------- 10 conditional versus unconditional

def deep_faces(S: Region, depth: float) -> list:
    """Faces of S whose center lies at distance >= depth from the edge boundary of S."""
    bnd = [(e[0], e[1]) for e in S.edge_boundary()]
    out = []
    for f in sorted(S.faces):
        d2 = min((f[0] - e[0]) ** 2 + (f[1] - e[1]) ** 2 for e in bnd)
        if d2 >= 4 * depth * depth:
            out.append(f)
    return out


def criterion_10(level: str, seed: int) -> CriterionResult:
    N = SIZES[level]["c10_samples"]
    box = Box(16, 16, 6)
    ring_I, S, W = ring_environment(box, 15)
    xs = deep_faces(S, 8)
    cons = Constraint(S, W)
    violations = []

    def per_sample(stream, S=None, W=None):
        """Tail table over all samples plus per-sample counts of hgt >= 1 and >= 2."""
        total, rows = None, []
        for I in stream:
            if S is not None and not cons.holds(I):
                violations.append(I)
            t, _ = pillar_tail([I], xs, 3, S, W)
            rows.append((t.count(1), t.count(2)))
            total = t if total is None else total.merge(t)
        return total, np.array(rows)

    cond, cond_rows = per_sample(sample_conditional(box, BETA, cons, N, seed=seed, stream=10), S, W)
    unc, unc_rows = per_sample(sample_interfaces(box, BETA, N, seed=seed, stream=11))
    measured = {"samples": N, "columns": len(xs), "constraint_violations": len(violations)}
    ok = not violations
    trials = np.full(N, len(xs))
    batches = min(50, N // 2)
    for h in (1, 2):
        pc, pu = cond.p_hat(h), unc.p_hat(h)
        ratio = pc / pu if pu > 0 else float("inf")
        _, cl, ch = batch_means_ci(cond_rows[:, h - 1], trials, batches)
        _, ul, uh = batch_means_ci(unc_rows[:, h - 1], trials, batches)
        overlap = cl <= uh and ul <= ch
        wl, wh = cond.ci(h)
        vl, vh = unc.ci(h)
        ok &= 0.5 <= ratio <= 2.0 and overlap
        measured[f"p_cond_{h}"] = pc
        measured[f"p_uncond_{h}"] = pu
        measured[f"ratio_{h}"] = ratio
        measured[f"ci_overlap_{h}"] = overlap
        measured[f"wilson_overlap_{h}"] = wl <= vh and vl <= wh
    return CriterionResult(10, "conditional versus unconditional corridor", ok, measured)


# ---------------------------------------------------------------- 11 and 12 maxima and formulas

@lru_cache(maxsize=2)
def simulated_alpha(N: int, seed: int) -> AlphaTable:
    return alpha_estimate(Box(12, 12, 6), BETA, range(1, 5), N, seed, stream=12)


def criterion_11(level: str, seed: int) -> CriterionResult:
    sizes = SIZES[level]["c11_sizes"]
    N = SIZES[level]["c11_samples"]
    table = simulated_alpha(SIZES[level]["alpha_samples"], seed)
    alpha_hat = table.slope()[0]
    target = 2 / alpha_hat
    ratios, devs = [], []
    for k, n in enumerate(sizes):
        H = 6 if n <= 32 else 8
        M = max_height_samples(Box(n, n, H), BETA, N, seed, stream=110 + k)
        r = float(M.mean()) / math.log(n)
        ratios.append(r)
        devs.append(abs(r - target) / target)
    monotone = all(b <= a for a, b in zip(devs, devs[1:]))
    ok = all(d <= 0.35 for d in devs) and monotone
    return CriterionResult(11, "maximum height corridor", ok,
                           {"n": list(sizes), "samples": N, "alpha_hat": alpha_hat, "target": target,
                            "mean_M_over_log_n": ratios, "relative_deviation": devs, "monotone": monotone})


def criterion_12(level: str, seed: int) -> CriterionResult:
    synth = {h: 4.0 * h for h in range(1, 6)}
    s = math.exp(10)
    ms = m_star(s, synth, 1.0)
    g = gamma(s, synth, 1.0)
    exact_ok = ms == 3 and math.isclose(g, math.exp(-2), rel_tol=1e-12)
    table = simulated_alpha(SIZES[level]["alpha_samples"], seed)
    sim = {}
    corridor_ok = True
    for n in (12, 16, 32, 64):
        s_n = (2 * n) ** 2
        try:
            g_n = gamma(s_n, table, BETA)
            inside = gamma_in_corridor(g_n, BETA, 1.0)
            sim[n] = (m_star(s_n, table, BETA), g_n)
        except PreconditionError as exc:
            inside = False
            sim[n] = str(exc)
        corridor_ok &= inside
    return CriterionResult(12, "m* and gamma evaluations", exact_ok and corridor_ok,
                           {"m_star_synthetic": ms, "gamma_synthetic": g, "simulated": sim})


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 13)}


def run(level: str = "quick", seed: int = 1, only=None, report=None) -> list:
    """Run the suites of a level; report(result) is called after each criterion."""
    if level not in LEVELS:
        raise PreconditionError(f"level must be one of {LEVELS}")
    numbers = list(only) if only else (list(QUICK) if level == "quick" else list(range(1, 13)))
    results = []
    for k in numbers:
        t = time.perf_counter()
        res = CRITERIA[k](level, seed)
        res.seconds = time.perf_counter() - t
        results.append(res)
        if report is not None:
            report(res)
    return results
