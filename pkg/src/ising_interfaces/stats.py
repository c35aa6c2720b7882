"""Estimators for pillar tails, connection exponents, maxima and nested excess.

Every tally is a histogram of integer observations, so partial results from
independent chains merge by addition in any order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, stats as sps

from .errors import GuaranteeViolation, PreconditionError
from .interface import Interface
from .lattice import Box, Region
from .pillars import PillarFinder
from .sampler import sample_interfaces
from .spins import enumerate_exact
from .walls import Decomposition, StandardWallCollection, ceiling_of_collection, in_collection_event, reconstruct

_STAR3 = np.ones((3, 3, 3), dtype=bool)


def _z(level: float) -> float:
    return float(sps.norm.ppf(0.5 + level / 2))


def wilson(count: int, total: int, level: float = 0.95) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        return (0.0, 1.0)
    if count <= 0:
        z = _z(level)
        return (0.0, z * z / (total + z * z))
    z = _z(level)
    p = count / total
    den = 1 + z * z / total
    mid = (p + z * z / (2 * total)) / den
    half = z * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / den
    return (max(0.0, mid - half), min(1.0, mid + half))


def batch_means_ci(successes, trials, n_batches: int = 50, level: float = 0.95) -> tuple:
    """(p, lo, hi) for a proportion observed along a correlated sample stream.

    Consecutive samples are grouped into n_batches batches; the interval is normal
    with the standard error of the batch proportions, so correlation within and
    between samples widens it.
    """
    s = np.asarray(successes, dtype=float)
    t = np.asarray(trials, dtype=float)
    if s.shape != t.shape or s.ndim != 1:
        raise PreconditionError("successes and trials must be matching 1-d arrays")
    if n_batches < 2 or len(s) < n_batches or t.sum() <= 0:
        raise PreconditionError("batch_means_ci needs at least n_batches >= 2 samples")
    p = s.sum() / t.sum()
    parts = np.array_split(np.arange(len(s)), n_batches)
    ps = np.array([s[b].sum() / t[b].sum() for b in parts])
    half = _z(level) * ps.std(ddof=1) / math.sqrt(n_batches)
    return (p, max(0.0, p - half), min(1.0, p + half))


def _fit_line(xs, ys, weights=None) -> tuple:
    """(slope, intercept, r^2) of a weighted least-squares line."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2:
        return (float("nan"), float("nan"), float("nan"))
    w = np.ones_like(xs) if weights is None else np.asarray(weights, dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1, w=np.sqrt(w))
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum(w * (ys - np.average(ys, weights=w)) ** 2))
    r2 = 1.0 - float(np.sum(w * resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return (float(slope), float(intercept), r2)


@dataclass
class TailTable:
    """Empirical P(value >= h) from a histogram of non-negative integer observations.

    Observations above h_max are clipped to h_max, which leaves every tail
    probability up to h_max exact.
    """

    hist: np.ndarray
    level: float = 0.95
    variable: str = "h"
    provenance: dict = field(default_factory=dict)

    @staticmethod
    def empty(h_max: int, level: float = 0.95, variable: str = "h") -> "TailTable":
        return TailTable(np.zeros(int(h_max) + 1, dtype=np.int64), level, variable)

    @staticmethod
    def from_values(values, h_max: int, level: float = 0.95, variable: str = "h") -> "TailTable":
        t = TailTable.empty(h_max, level, variable)
        t.add(values)
        return t

    def add(self, values) -> None:
        v = np.asarray(values, dtype=np.int64).ravel()
        if v.size and v.min() < 0:
            raise PreconditionError("tail observations must be non-negative")
        np.add.at(self.hist, np.minimum(v, self.h_max), 1)

    def merge(self, other: "TailTable") -> "TailTable":
        if other.h_max != self.h_max or other.variable != self.variable:
            raise PreconditionError("cannot merge tables with different ranges")
        return TailTable(self.hist + other.hist, self.level, self.variable, dict(self.provenance))

    @property
    def h_max(self) -> int:
        return len(self.hist) - 1

    @property
    def total(self) -> int:
        return int(self.hist.sum())

    @property
    def counts(self) -> np.ndarray:
        """counts[h] = number of observations >= h."""
        return np.cumsum(self.hist[::-1])[::-1]

    def count(self, h: int) -> int:
        return int(self.counts[h])

    def p_hat(self, h: int) -> float:
        self._require()
        return self.count(h) / self.total

    def ci(self, h: int) -> tuple:
        return wilson(self.count(h), self.total, self.level)

    def log_p(self, h: int) -> float:
        """log of the tail probability with a +1/2 continuity correction."""
        self._require()
        return math.log((self.count(h) + 0.5) / (self.total + 1.0))

    def rate(self, h: int) -> tuple:
        """-log p(h+1)/p(h) with a Wilson interval on the conditional ratio."""
        c0, c1 = self.count(h), self.count(h + 1)
        if c0 == 0:
            return (float("nan"), float("nan"), float("nan"))
        ratio = (c1 + 0.5) / (c0 + 1.0) if c1 == 0 else c1 / c0
        lo, hi = wilson(c1, c0, self.level)
        return (-math.log(ratio), -math.log(hi), -math.log(lo) if lo > 0 else float("inf"))

    def fit_slope(self, lo: int = 1, hi: int | None = None) -> tuple:
        """(slope, intercept, r^2) of the corrected log tail against h over [lo, hi]."""
        hi = self.h_max if hi is None else hi
        hs = [h for h in range(lo, hi + 1) if self.count(h) > 0]
        return _fit_line(hs, [self.log_p(h) for h in hs], [self.count(h) for h in hs])

    def _require(self) -> None:
        if self.total == 0:
            raise PreconditionError("tail table has no observations")

    def rows(self) -> list:
        out = []
        for h in range(self.h_max + 1):
            lo, hi = self.ci(h)
            out.append({self.variable: h, "count": self.count(h), "total": self.total,
                        "p_hat": self.count(h) / self.total if self.total else float("nan"),
                        "ci_low": lo, "ci_high": hi})
        return out

    def to_json(self) -> dict:
        return {"kind": "tail", "variable": self.variable, "level": self.level, "rows": self.rows(),
                "provenance": self.provenance}

    def to_csv(self) -> str:
        return _csv(self.rows())


def _csv(rows: list) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def _column_index(box: Box, x) -> tuple:
    return box.column_index((int(x[0]), int(x[1])))


def _columns(box: Box, x, S: Region | None) -> list:
    """Base faces to observe: a single face, a list of faces, or every face of S when x is None."""
    if x is None:
        return sorted(S.faces) if S is not None else sorted(Region.full(box).faces)
    if len(x) == 2 and not hasattr(x[0], "__len__"):
        return [(int(x[0]), int(x[1]))]
    return [(int(f[0]), int(f[1])) for f in x]


class RestrictedView:
    """An interface seen from inside S: the restricted interface and the ceiling height over S."""

    def __init__(self, I: Interface, S: Region | None = None, W: StandardWallCollection | None = None,
                 decomp: Decomposition | None = None):
        box = I.box
        self.interface = I
        self.region = S or Region.full(box)
        full = S is None or len(self.region.faces) == box.n_base_faces
        if full and (W is None or not W.walls):
            # nothing lies outside S, so restriction leaves the interface unchanged
            self.restricted = I
            self.ceiling_height = 0
            self._decomp = decomp
            return
        d = decomp or Decomposition(I)
        self._decomp = d
        if W is None:
            W = StandardWallCollection(box, tuple(d.standard_of(w) for w in d.exterior_walls(self.region)))
        elif not in_collection_event(I, W, self.region, d):
            raise PreconditionError("interface does not have the given exterior walls")
        self.ceiling_height = ceiling_of_collection(W, self.region)[2] if W.walls else 0
        inner = [d.standard_of(w) for w in d.interior_walls(self.region)]
        self.restricted = reconstruct(StandardWallCollection(box, tuple(inner)))

    @property
    def decomposition(self) -> Decomposition:
        if self._decomp is None:
            self._decomp = Decomposition(self.interface)
        return self._decomp

    def pillar_heights(self) -> np.ndarray:
        """hgt of the restricted pillar at every base face, indexed [j, i]."""
        return PillarFinder(self.restricted).column_heights()

    def max_height(self) -> int:
        """Largest horizontal face height of I over S."""
        b = self.interface.box
        hor = self.interface.horizontal
        mask = np.zeros((2 * b.m, 2 * b.n), dtype=bool)
        for f in self.region.faces:
            mask[_column_index(b, f)] = True
        j = (hor[:, 1] + 2 * b.m - 1) // 2
        i = (hor[:, 0] + 2 * b.n - 1) // 2
        inside = (j >= 0) & (j < 2 * b.m) & (i >= 0) & (i < 2 * b.n)
        hor, j, i = hor[inside], j[inside], i[inside]
        z = hor[mask[j, i], 2] // 2
        return int(z.max())

    def nested_excess(self) -> np.ndarray:
        """Total excess of the walls interior to S nesting each base face, indexed [j, i]."""
        b = self.interface.box
        out = np.zeros((2 * b.m, 2 * b.n), dtype=np.int64)
        d = self.decomposition
        for W in d.interior_walls(self.region):
            m = W.excess()
            for f in W.shape.nested_faces:
                if b.in_base((f[0], f[1], 0)):
                    out[_column_index(b, f)] += m
        return out


def pillar_tail(samples, x=None, h_max: int = 4, S: Region | None = None, W=None,
                level: float = 0.95) -> tuple:
    """(tail of hgt(P_{x,S}), tail of the height reached by I above x).

    Every listed base face of every sample is one observation; x=None observes
    all faces of S.
    """
    tail = TailTable.empty(h_max, level, "h")
    reach = TailTable.empty(h_max, level, "h")
    cols = None
    for I in samples:
        view = RestrictedView(I, S, W)
        if cols is None:
            cols = tuple(np.array([_column_index(I.box, f) for f in _columns(I.box, x, S)]).T)
        tail.add(view.pillar_heights()[cols])
        reach.add(np.maximum(_column_reach(view.restricted)[cols], 0))
    if tail.total == 0:
        raise PreconditionError("pillar_tail needs at least one sample")
    return tail, reach


def _column_reach(I: Interface) -> np.ndarray:
    """Top height of any horizontal face over each column, indexed [j, i]."""
    b = I.box
    hor = I.horizontal
    out = np.full((2 * b.m, 2 * b.n), -b.H, dtype=np.int64)
    j = (hor[:, 1] + 2 * b.m - 1) // 2
    i = (hor[:, 0] + 2 * b.n - 1) // 2
    ok = (j >= 0) & (j < 2 * b.m) & (i >= 0) & (i < 2 * b.n)
    np.maximum.at(out, (j[ok], i[ok]), hor[ok, 2] // 2)
    return out


def nested_excess_tail(samples, x=None, S: Region | None = None, W=None, r_max: int = 40,
                       level: float = 0.95) -> TailTable:
    """Tail of the total excess of the restricted nested sequence of x."""
    tail = TailTable.empty(r_max, level, "r")
    cols = None
    for I in samples:
        view = RestrictedView(I, S, W)
        if cols is None:
            cols = tuple(np.array([_column_index(I.box, f) for f in _columns(I.box, x, S)]).T)
        tail.add(view.nested_excess()[cols])
    return tail


# connection exponents

def connection_tops(spins: np.ndarray, H: int) -> np.ndarray:
    """For each column, the highest level reached by the plus cluster of its cell at height 1/2.

    Clusters are 26-connected plus cells within the upper half of the box; -1
    marks a minus cell at height 1/2.  A leading batch axis is allowed and
    never connects configurations.
    """
    spins = np.asarray(spins)
    batched = spins.ndim == 4
    upper = (spins[:, H:] if batched else spins[H:]) > 0
    structure = np.zeros((3, 3, 3, 3), dtype=bool) if batched else _STAR3
    if batched:
        structure[1] = True
    lab, count = ndimage.label(upper, structure=structure)
    k_axis = 1 if batched else 0
    out = np.full(np.take(lab, 0, axis=k_axis).shape, -1, dtype=np.int64)
    if count == 0:
        return out
    shape = [1] * lab.ndim
    shape[k_axis] = lab.shape[k_axis]
    levels = np.broadcast_to(np.arange(lab.shape[k_axis]).reshape(shape), lab.shape)
    tops = np.asarray(ndimage.maximum(levels, labels=lab, index=np.arange(1, count + 1)), dtype=np.int64)
    root = np.take(lab, 0, axis=k_axis)
    out[root > 0] = tops[root[root > 0] - 1]
    return out


@dataclass
class AlphaTable:
    """Connection counts: successes[h] columns connected to height h-1/2, out of trials."""

    beta: float
    successes: dict
    trials: int
    level: float = 0.95
    provenance: dict = field(default_factory=dict)
    exact: dict | None = None

    def merge(self, other: "AlphaTable") -> "AlphaTable":
        if other.beta != self.beta or set(other.successes) != set(self.successes):
            raise PreconditionError("cannot merge alpha tables with different beta or heights")
        return AlphaTable(self.beta, {h: self.successes[h] + other.successes[h] for h in self.successes},
                          self.trials + other.trials, self.level, dict(self.provenance))

    @property
    def heights(self) -> list:
        return sorted(self.successes)

    def censored(self, h: int) -> bool:
        return self.exact is None and self.successes[h] == 0

    def alpha(self, h: int) -> float:
        """-log p̂_h; for a censored h, the one-sided lower bound from the Wilson upper limit."""
        if self.exact is not None:
            return self.exact[h]
        c = self.successes[h]
        if c == 0:
            return -math.log(wilson(0, self.trials, self.level)[1])
        return -math.log(c / self.trials)

    def ci(self, h: int) -> tuple:
        """Delta-method interval; (bound, inf) when censored."""
        a = self.alpha(h)
        if self.exact is not None:
            return (a, a)
        c = self.successes[h]
        if c == 0:
            return (a, float("inf"))
        p = c / self.trials
        half = _z(self.level) * math.sqrt((1 - p) / c)
        return (a - half, a + half)

    def half_width(self, h: int) -> float:
        lo, hi = self.ci(h)
        return (hi - lo) / 2

    def __getitem__(self, h: int) -> float:
        return self.alpha(h)

    def __contains__(self, h: int) -> bool:
        return h in self.successes

    def slope(self) -> tuple:
        """(alpha slope, intercept, r^2) over uncensored heights, weighted by inverse variance."""
        hs = [h for h in self.heights if not self.censored(h)]
        if self.exact is not None:
            return _fit_line(hs, [self.alpha(h) for h in hs])
        w = [1.0 / max(self.half_width(h), 1e-12) ** 2 for h in hs]
        return _fit_line(hs, [self.alpha(h) for h in hs], w)

    @property
    def alpha_bar(self) -> float:
        return 4 * self.beta + math.exp(-4 * self.beta)

    def superadditivity_violations(self, eps: float = 0.0) -> list:
        """(h1, h2) with alpha_{h1} + alpha_{h2} - slack > alpha_{h1+h2}, slack = eps plus CI half-widths."""
        out = []
        hs = [h for h in self.heights if not self.censored(h)]
        for a in hs:
            for b in hs:
                if b < a or a + b not in hs:
                    continue
                slack = eps + self.half_width(a) + self.half_width(b) + self.half_width(a + b)
                if self.alpha(a) + self.alpha(b) - slack > self.alpha(a + b):
                    out.append((a, b))
        return out

    def monotone(self) -> bool:
        hs = self.heights
        return all(self.successes[a] >= self.successes[b] for a, b in zip(hs, hs[1:])) if self.exact is None \
            else all(self.exact[a] <= self.exact[b] + 1e-12 for a, b in zip(hs, hs[1:]))

    def rows(self) -> list:
        out = []
        for h in self.heights:
            lo, hi = self.ci(h)
            out.append({"h": h, "successes": self.successes[h], "trials": self.trials, "alpha": self.alpha(h),
                        "ci_low": lo, "ci_high": hi, "censored": self.censored(h), "alpha_over_h": self.alpha(h) / h})
        return out

    def to_json(self, eps: float = 0.0) -> dict:
        slope, intercept, r2 = self.slope()
        return {"kind": "alpha", "beta": self.beta, "level": self.level, "rows": self.rows(),
                "alpha_slope": slope, "intercept": intercept, "r2": r2, "alpha_bar": self.alpha_bar,
                "superadditivity_eps": eps, "superadditivity_violations": self.superadditivity_violations(eps),
                "provenance": self.provenance}

    def to_csv(self) -> str:
        return _csv(self.rows())

    @staticmethod
    def from_csv(text: str, beta: float) -> "AlphaTable":
        """Table of exact alpha values read from a CSV with columns h and alpha."""
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise PreconditionError("alpha table file is empty")
        exact = {}
        for r in sorted(rows, key=lambda r: int(r["h"])):
            if str(r.get("censored", "False")).lower() == "true":
                # a censored row only bounds alpha from below; the table stops there
                break
            exact[int(r["h"])] = float(r["alpha"])
        if not exact:
            raise PreconditionError("alpha table has no uncensored rows")
        return AlphaTable.from_values(exact, beta)

    @staticmethod
    def from_values(values: dict, beta: float) -> "AlphaTable":
        """A table of given alpha values, treated as exact."""
        vals = {int(h): float(a) for h, a in values.items()}
        return AlphaTable(float(beta), {h: 0 for h in vals}, 0, exact=vals)


def alpha_estimate(box: Box, beta: float, h_range, N: int, seed: int, sweeps_between: int = 10,
                   burn_in: int = 200, origins=None, level: float = 0.95, stream: int = 0) -> AlphaTable:
    """Connection probabilities from N samples of the Dobrushin measure.

    Each listed origin column (default: every column) gives one trial per sample.
    """
    from .sampler import ChainState
    from .spins import SpinConfig

    hs = sorted(int(h) for h in h_range)
    if not hs or hs[0] < 1 or hs[-1] > box.H:
        raise PreconditionError(f"heights must lie in 1..{box.H}")
    if N < 1:
        raise PreconditionError("N must be positive")
    cols = None
    if origins is not None:
        cols = tuple(np.array([_column_index(box, f) for f in origins]).T)
    state = ChainState.new(SpinConfig.ground(box), beta, seed, stream)
    state.sweep(burn_in)
    succ = {h: 0 for h in hs}
    trials = 0
    for _ in range(N):
        state.sweep(sweeps_between)
        tops = connection_tops(state.cfg.spins, box.H)
        if cols is not None:
            tops = tops[cols]
        trials += tops.size
        for h in hs:
            succ[h] += int(np.count_nonzero(tops >= h - 1))
    prov = {"box": box.to_json(), "beta": beta, "N": N, "seed": seed, "stream": stream,
            "sweeps_between": sweeps_between, "burn_in": burn_in}
    return AlphaTable(float(beta), succ, trials, level, prov)


def alpha_exact(box: Box, beta: float, h_range, origin=(1, 1)) -> AlphaTable:
    """Exact connection exponents on a tiny box by enumeration."""
    hs = sorted(int(h) for h in h_range)
    if not hs or hs[0] < 1 or hs[-1] > box.H:
        raise PreconditionError(f"heights must lie in 1..{box.H}")
    meas = enumerate_exact(box, beta)
    j, i = _column_index(box, origin)
    prob = {h: 0.0 for h in hs}
    chunk = 1 << 14
    for k in range(0, len(meas.probs), chunk):
        tops = connection_tops(meas.configs[k : k + chunk].reshape((-1,) + box.shape), box.H)[:, j, i]
        p = meas.probs[k : k + chunk]
        for h in hs:
            prob[h] += float(p[tops >= h - 1].sum())
    vals = {h: (-math.log(prob[h]) if prob[h] > 0 else float("inf")) for h in hs}
    return AlphaTable.from_values(vals, beta)


# m* and gamma

def _alpha_value(alpha, h: int) -> float:
    return alpha.alpha(h) if isinstance(alpha, AlphaTable) else float(alpha[h])


def _alpha_heights(alpha) -> list:
    return alpha.heights if isinstance(alpha, AlphaTable) else sorted(int(h) for h in alpha)


def m_star(s, alpha, beta: float) -> int:
    """Smallest h >= 1 with alpha_h > log s - 2 beta."""
    if s <= 0:
        raise PreconditionError("s must be positive")
    threshold = math.log(s) - 2 * beta
    hs = _alpha_heights(alpha)
    for h in range(1, (hs[-1] if hs else 0) + 1):
        if h not in hs:
            raise PreconditionError(f"alpha table has no entry for h = {h}")
        if _alpha_value(alpha, h) > threshold:
            return h
    raise PreconditionError(f"alpha table too short: needs h = {(hs[-1] if hs else 0) + 1}")


def gamma(s, alpha, beta: float) -> float:
    """s exp(-alpha_{m*})."""
    return math.exp(math.log(s) - _alpha_value(alpha, m_star(s, alpha, beta)))


def gamma_in_corridor(g: float, beta: float, eps: float = 1.0) -> bool:
    return math.exp(-2 * beta - eps) < g < math.exp(2 * beta)


# maxima

@dataclass
class MaxStats:
    M: np.ndarray
    Mbar: np.ndarray
    ceiling_height: int
    nested_max: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.Mbar)

    def cdf(self) -> dict:
        """h -> P(Mbar < h) for h from 0 to max+1."""
        top = int(self.Mbar.max()) if self.n else 0
        return {h: float(np.mean(self.Mbar < h)) for h in range(0, top + 2)}

    def mean_M(self) -> float:
        return float(np.mean(self.M))

    def gumbel_fit(self) -> tuple:
        """(slope, intercept, r^2) of log(-log P(Mbar < h)) against h where 0 < P < 1."""
        pts = [(h, math.log(-math.log(p))) for h, p in self.cdf().items() if 0 < p < 1]
        if len(pts) < 2:
            return (float("nan"), float("nan"), float("nan"))
        return _fit_line([a for a, _ in pts], [b for _, b in pts])

    def corridor(self, s, alpha, beta: float) -> list:
        """Rows comparing -log P(Mbar < m* - k) with gamma exp(alpha_k)."""
        ms = m_star(s, alpha, beta)
        g = gamma(s, alpha, beta)
        out = []
        for k in range(0, ms):
            p = float(np.mean(self.Mbar < ms - k))
            ak = 0.0 if k == 0 else _alpha_value(alpha, k)
            predicted = g * math.exp(ak)
            measured = -math.log(p) if p > 0 else float("inf")
            out.append({"k": k, "m_star": ms, "p_below": p, "minus_log_p": measured, "gamma_exp_alpha_k": predicted,
                        "ratio": measured / predicted if predicted > 0 else float("nan")})
        return out

    def good_event_frequency(self, r: int) -> float:
        """Fraction of samples whose restricted nested sequences all have excess below r."""
        return float(np.mean(self.nested_max < r))

    def rows(self) -> list:
        return [{"sample": k, "M": int(a), "Mbar": int(b), "nested_max": int(c)}
                for k, (a, b, c) in enumerate(zip(self.M, self.Mbar, self.nested_max))]

    def to_json(self) -> dict:
        slope, intercept, r2 = self.gumbel_fit()
        return {"kind": "maxstats", "n": self.n, "ceiling_height": self.ceiling_height,
                "mean_M": self.mean_M() if self.n else float("nan"),
                "mean_Mbar": float(np.mean(self.Mbar)) if self.n else float("nan"),
                "cdf": {str(k): v for k, v in self.cdf().items()},
                "gumbel_slope": slope, "gumbel_intercept": intercept, "gumbel_r2": r2,
                "provenance": self.provenance}

    def to_csv(self) -> str:
        return _csv(self.rows())


def max_stats(samples, S: Region | None = None, W=None, nested: bool = True) -> MaxStats:
    """Per-sample maxima over S, audited against the restricted pillar heights."""
    M, Mbar, G = [], [], []
    hc = 0
    for I in samples:
        view = RestrictedView(I, S, W)
        hc = view.ceiling_height
        top = view.max_height()
        mbar = top - hc
        cols = tuple(np.array([_column_index(I.box, f) for f in view.region.faces]).T)
        best = int(view.pillar_heights()[cols].max())
        if best != mbar:
            raise GuaranteeViolation(f"max height above the ceiling {mbar} differs from the tallest pillar {best}")
        M.append(top)
        Mbar.append(mbar)
        G.append(int(view.nested_excess()[cols].max()) if nested else -1)
    return MaxStats(np.array(M, dtype=np.int64), np.array(Mbar, dtype=np.int64), hc, np.array(G, dtype=np.int64))


def max_height_samples(box: Box, beta: float, N: int, seed: int, sweeps_between: int = 10,
                       burn_in: int = 200, stream: int = 0) -> np.ndarray:
    """Maximum face height of N unconditional samples, without decomposition."""
    out = [I.max_height() for I in sample_interfaces(box, beta, N, sweeps_between, burn_in, seed, stream)]
    return np.array(out, dtype=np.int64)


# isoperimetry

def isodim_check(S: Region, d: float) -> bool:
    """|boundary of S| <= |S|^((d-1)/d), compared on a log scale with a 1e-12 guard."""
    if d <= 0:
        raise PreconditionError("d must be positive")
    area = len(S.faces)
    perim = len(S.edge_boundary())
    if area == 0:
        return perim == 0
    return math.log(perim) <= (d - 1) / d * math.log(area) + 1e-12


def write_jsonl(path, record: dict) -> None:
    with open(path, "a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


__all__ = [
    "AlphaTable", "MaxStats", "RestrictedView", "TailTable", "alpha_estimate", "alpha_exact", "connection_tops",
    "gamma", "gamma_in_corridor", "isodim_check", "m_star", "max_height_samples", "max_stats",
    "nested_excess_tail", "pillar_tail", "wilson", "write_jsonl",
]
