"""Staged block subshifts with prescribed free-coordinate density.

A stage is a block length q, a centering length L, a window radius r, a
stretch parameter a with q = 2L(a+1), and a block pattern: q cells, each
free or fixed to an alphabet symbol. Stage 0 is the single free cell. Each
later stage repeats the previous pattern q_next/q times and fixes the last
2L cells to the central window of a catalogue word that realizes every
admissible window of the previous stage, which is what the recurrence/
density probes rely on.

Alphabet symbols are indices 0..m-1, standing for the rationals i/(m-1) in
[0, 1] (0 alone when m = 1). Free cells model full unit intervals, so the
free-cell count is the exact dimension ledger of a block: the ratio of free
cells per block equals the running product of a_i/(a_i+1), and the same
product is the density of the free-index congruence set.

Configurations are evaluated lazily; patterns and catalogue words are never
materialized beyond the cells actually read, so stage parameters stay exact
even when q runs into the billions.

Conventions fixed here (the construction needs explicit choices):
- metric on configurations: d(x, y) = sum over i of 2^-|i| |x_i - y_i|,
  certified upper bounds add the full tail mass of the unseen coordinates;
- window radius r at stage n+1 is n+2, so exact agreement on [-r, r] forces
  d <= 2^-(n+1);
- the catalogue word enumerates, for every alignment o mod q and every fill
  of the window's free cells, one realization padded to whole blocks; L is
  the least multiple of q covering the catalogue plus one window.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Sequence

from .errors import BudgetError, InputError, PreconditionError
from .rational import fmt, frac

DEFAULT_SENTINEL_A = 10**6
DEFAULT_ENUM_BUDGET = 300_000


def alphabet_values(m: int) -> list[Fraction]:
    if m < 1:
        raise InputError("alphabet resolution must be at least 1")
    if m == 1:
        return [Fraction(0)]
    return [Fraction(i, m - 1) for i in range(m)]


class BlockPattern:
    """Cells of one block: None marks a free cell, ints are fixed symbols.

    Later stages reference the previous pattern plus a fixed tail, so cell
    lookup is a short recursion and nothing of size q is stored.
    """

    def __init__(self, q: int, prev: "BlockPattern | None", tail: "_Catalogue | None",
                 tail_len: int, free_cells: int, m: int):
        self.q = q
        self.prev = prev
        self.tail = tail
        self.tail_len = tail_len
        self.free_cells = free_cells
        self.m = m

    @staticmethod
    def stage_zero(m: int) -> "BlockPattern":
        return BlockPattern(1, None, None, 0, 1, m)

    def cell(self, j: int) -> int | None:
        if not 0 <= j < self.q:
            raise InputError(f"cell index {j} outside block of length {self.q}")
        if self.tail is not None and j >= self.q - self.tail_len:
            return self.tail.window_cell(j - (self.q - self.tail_len))
        if self.prev is None:
            return None
        return self.prev.cell(j % self.prev.q)

    def cells(self) -> list[int | None]:
        """Explicit cell vector; only sensible for small blocks."""
        return [self.cell(j) for j in range(self.q)]


class _Catalogue:
    """Catalogue word of one stage plus its central-window addressing.

    The word lists one realization per (alignment o, free-cell fill) pair:
    the base pattern repeated to cover the window starting at offset o, with
    the window's free cells spelled by the fill digits and every other free
    cell set to 0. The central window of length 2L is the word placed at
    positions [0, E) inside [-L, L), padded by default blocks.
    """

    def __init__(self, pattern: BlockPattern, window: int, m: int, budget: int):
        self.pattern = pattern
        self.window = window
        self.m = m
        q = pattern.q
        self.free_pos: list[list[int]] = []   # per alignment, window's free offsets
        self.real_len: list[int] = []         # per alignment, realization length
        self.count: list[int] = []            # per alignment, number of fills
        base: list[int] = []                  # per alignment, catalogue offset
        total = 0
        realizations = 0
        for o in range(q):
            free = [i for i in range(window) if pattern.cell((o + i) % q) is None]
            fills = m ** len(free)
            length = -(-(o + window) // q) * q
            realizations += fills
            if realizations > budget:
                raise BudgetError(
                    f"catalogue needs more than {budget} realizations; "
                    "raise the budget or lower the alphabet resolution"
                )
            self.free_pos.append(free)
            self.real_len.append(length)
            self.count.append(fills)
            base.append(total)
            total += fills * length
        self.base = base
        self.length = total  # E, a multiple of q
        self.L = 0           # set by the owning stage

    def start_of(self, o: int, digits: Sequence[int]) -> int:
        """Catalogue position of the window for alignment o and fill digits."""
        f = 0
        for d in digits:
            f = f * self.m + d
        return self.base[o] + f * self.real_len[o] + o

    def _locate(self, g: int) -> tuple[int, int, int]:
        o = bisect_right(self.base, g) - 1
        rel = g - self.base[o]
        f, h = divmod(rel, self.real_len[o])
        return o, f, h

    def word_cell(self, g: int) -> int:
        """Symbol of the catalogue word at position g in [0, E)."""
        if not 0 <= g < self.length:
            raise InputError("catalogue position out of range")
        o, f, h = self._locate(g)
        if o <= h < o + self.window:
            free = self.free_pos[o]
            i = h - o
            if i in free:
                digits = self._digits(f, len(free))
                return digits[free.index(i)]
        pat = self.pattern.cell(h % self.pattern.q)
        return 0 if pat is None else pat

    def _digits(self, f: int, width: int) -> list[int]:
        out = [0] * width
        for i in range(width - 1, -1, -1):
            f, out[i] = divmod(f, self.m)
        return out

    def window_cell(self, s: int) -> int:
        """Symbol at position s of the central window [0, 2L), i.e. catalogue
        position s - L, with default-filled padding blocks outside [0, E)."""
        if not 0 <= s < 2 * self.L:
            raise InputError("window position out of range")
        g = s - self.L
        if 0 <= g < self.length:
            return self.word_cell(g)
        pat = self.pattern.cell(g % self.pattern.q)
        return 0 if pat is None else pat


@dataclass
class StageParams:
    n: int
    q: int
    L: int
    r_window: int
    a: int | None
    pattern: BlockPattern
    catalogue: _Catalogue | None = None
    beyond_exact: bool = False

    def y_word(self, limit: int = 4096) -> list[int] | None:
        """Central window symbols, or None when longer than `limit`."""
        if self.catalogue is None or 2 * self.L > limit:
            return None
        return [self.catalogue.window_cell(s) for s in range(2 * self.L)]

    def summary(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "L": self.L,
            "r_window": self.r_window,
            "a": self.a,
            "free_cells": self.pattern.free_cells,
            "catalogue_length": self.catalogue.length if self.catalogue else 0,
            "beyond_exact": self.beyond_exact,
        }


@dataclass
class BlockSystem:
    target_r: Fraction
    m: int
    stages: list[StageParams] = field(default_factory=list)
    a_seq: list[int] = field(default_factory=list)
    sentinel_a: int = DEFAULT_SENTINEL_A
    enum_budget: int = DEFAULT_ENUM_BUDGET

    @staticmethod
    def create(target_r, m: int, sentinel_a: int = DEFAULT_SENTINEL_A,
               enum_budget: int = DEFAULT_ENUM_BUDGET) -> "BlockSystem":
        r = frac(target_r)
        if not (0 < r < 1):
            raise InputError("target density must lie strictly between 0 and 1")
        if m < 1:
            raise InputError("alphabet resolution must be at least 1")
        sys = BlockSystem(target_r=r, m=m, sentinel_a=sentinel_a, enum_budget=enum_budget)
        sys.stages.append(StageParams(0, 1, 0, 0, None, BlockPattern.stage_zero(m)))
        sys.a_seq = choose_a_sequence(r, None)
        return sys

    def stage(self, n: int) -> StageParams:
        if not 0 <= n < len(self.stages):
            raise PreconditionError(f"stage {n} is not built (have {len(self.stages)})")
        return self.stages[n]

    @property
    def built(self) -> int:
        return len(self.stages) - 1

    def expansion_exhausted(self) -> bool:
        return self.built >= len(self.a_seq)


def choose_a_sequence(r, stages: int | None) -> list[int]:
    """Greedy product expansion of 1/r by factors (1 + 1/a_k).

    At each step a_k is the least integer with 1 + 1/a_k below the residual;
    the residual's numerator strictly drops, so the expansion of a rational
    always terminates. With `stages` set, at most that many terms are
    returned.
    """
    r = frac(r)
    if not (0 < r < 1):
        raise InputError("expansion target must lie strictly between 0 and 1")
    rho = 1 / r
    out: list[int] = []
    while rho != 1 and (stages is None or len(out) < stages):
        a = _ceil_frac(1 / (rho - 1))
        out.append(a)
        rho = rho / (1 + Fraction(1, a))
    return out


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def advance_stage(sys: BlockSystem) -> StageParams:
    """Build the next stage from the last one and append it.

    The stretch parameter comes from the greedy expansion while it lasts;
    once the expansion is exact, further stages use the configured sentinel
    value and are flagged, leaving the density product essentially unchanged.
    """
    if not sys.stages:
        raise PreconditionError("stage 0 is not initialized")
    prev = sys.stages[-1]
    n_next = prev.n + 1
    if n_next <= len(sys.a_seq):
        a = sys.a_seq[n_next - 1]
        beyond = False
    else:
        a = sys.sentinel_a
        beyond = True
    r_window = prev.n + 2
    window = 2 * r_window + 1
    catalogue = _Catalogue(prev.pattern, window, sys.m, sys.enum_budget)
    need = max(r_window, catalogue.length + window)
    q_prev = prev.pattern.q
    L = -(-need // q_prev) * q_prev
    catalogue.L = L
    q = 2 * L * (a + 1)
    free = prev.pattern.free_cells * (q - 2 * L) // q_prev
    pattern = BlockPattern(q, prev.pattern, catalogue, 2 * L, free, sys.m)
    stage = StageParams(n_next, q, L, r_window, a, pattern, catalogue, beyond)
    sys.stages.append(stage)
    return stage


def build(target_r, stages: int, m: int, sentinel_a: int = DEFAULT_SENTINEL_A,
          enum_budget: int = DEFAULT_ENUM_BUDGET,
          extend_with_sentinel: bool = False) -> BlockSystem:
    """Build up to `stages` stages; stops early once the greedy expansion is
    exact unless sentinel extension is requested explicitly."""
    sys = BlockSystem.create(target_r, m, sentinel_a, enum_budget)
    while sys.built < stages:
        if sys.expansion_exhausted() and not extend_with_sentinel:
            break
        advance_stage(sys)
    return sys


def free_dim_ratio(sys: BlockSystem, n: int) -> Fraction:
    """Free cells per block length at stage n; equals the product of
    a_i/(a_i+1) over the built stages up to n."""
    st = sys.stage(n)
    return Fraction(st.pattern.free_cells, st.q)


@dataclass(frozen=True)
class CongruenceIndexSet:
    """Intersection of residue constraints: index i is admitted iff for each
    (q, hi) the residue i mod q falls in [0, hi]."""

    constraints: tuple[tuple[int, int], ...]

    @staticmethod
    def of(constraints) -> "CongruenceIndexSet":
        cs = tuple((int(q), int(hi)) for q, hi in constraints)
        last = 0
        for q, hi in cs:
            if q <= last:
                raise InputError("moduli must be strictly increasing")
            if not 0 <= hi < q:
                raise InputError("allowed residue interval must be nonempty inside [0, q)")
            last = q
        return CongruenceIndexSet(cs)

    def admits(self, i: int) -> bool:
        return all(i % q <= hi for q, hi in self.constraints)

    def count_upto(self, n: int, loop_cap: int = 2_000_000) -> int:
        """Exact |I intersect [0, N)|.

        When each modulus divides the next the count telescopes through the
        chain; otherwise it falls back to a direct bounded loop.
        """
        if n <= 0:
            return 0
        cs = sorted(self.constraints)
        chained = all(cs[i + 1][0] % cs[i][0] == 0 for i in range(len(cs) - 1))
        if chained:
            return self._count_chain(n, list(cs))
        if n > loop_cap:
            raise BudgetError("direct residue counting beyond the configured cap")
        return sum(1 for i in range(n) if self.admits(i))

    def _count_chain(self, n: int, cs: list[tuple[int, int]]) -> int:
        if not cs:
            return n
        q, hi = cs[-1]
        rest = cs[:-1]
        full, rem = divmod(n, q)
        inner = min(hi + 1, q)
        return full * self._count_chain(inner, rest) + self._count_chain(min(inner, rem), rest)


def index_set(sys: BlockSystem, n: int) -> CongruenceIndexSet:
    """Free-coordinate congruence set after n stages: residues mod q_k below
    q_k - 2 L_k, for each built stage k <= n."""
    sys.stage(n)
    cons = []
    for st in sys.stages[1 : n + 1]:
        cons.append((st.q, st.q - 2 * st.L - 1))
    return CongruenceIndexSet.of(cons)


def index_density(ix: CongruenceIndexSet, n: int) -> Fraction:
    if n < 1:
        raise InputError("density needs a positive horizon")
    return Fraction(ix.count_upto(n), n)


def lower_bound_mdim(sys: BlockSystem) -> Fraction:
    """Density of the free-index set times the per-cell dimension (1 here):
    the product of a_k/(a_k+1) over the built stages."""
    out = Fraction(1)
    for st in sys.stages[1:]:
        out *= Fraction(st.a, st.a + 1)
    return out


def upper_bound_mdim(sys: BlockSystem, n: int, k: int) -> Fraction:
    """Projection bound 1/k + ((k-1)/k) * free ratio at stage n; decreases to
    the free ratio as k grows."""
    if k < 1:
        raise InputError("k must be at least 1")
    ratio = free_dim_ratio(sys, n)
    return Fraction(1, k) + Fraction(k - 1, k) * ratio


def power_bound_scaling(sys: BlockSystem, m: int) -> tuple[Fraction, Fraction]:
    """Both bound calculators scale linearly under the m-th power map."""
    if m < 1:
        raise InputError("power must be at least 1")
    lower = m * lower_bound_mdim(sys)
    upper_limit = m * free_dim_ratio(sys, sys.built)
    return lower, upper_limit


# -- configurations ----------------------------------------------------------

class AlignedSampler:
    """Lazy aligned configuration of a stage: fixed cells from the pattern,
    free cells drawn once per position from a seeded generator."""

    def __init__(self, sys: BlockSystem, n: int, rng: Random):
        self.pattern = sys.stage(n).pattern
        self.m = sys.m
        self.rng = rng
        self.cache: dict[int, int] = {}

    def cell(self, p: int) -> int:
        pat = self.pattern.cell(p % self.pattern.q)
        if pat is not None:
            return pat
        if p not in self.cache:
            self.cache[p] = self.rng.randrange(self.m)
        return self.cache[p]


def phi_membership(word: Sequence[int], sys: BlockSystem, n: int) -> bool:
    """True iff every aligned q_n-window of the word matches the stage-n
    pattern (free cells unconstrained, fixed cells equal)."""
    st = sys.stage(n)
    q = st.q
    if len(word) % q != 0:
        raise PreconditionError(f"word length {len(word)} is not a multiple of q={q}")
    for sym in word:
        if not 0 <= sym < sys.m:
            raise InputError("symbol outside the alphabet")
    for start in range(0, len(word), q):
        for j in range(q):
            pat = st.pattern.cell(j)
            if pat is not None and word[start + j] != pat:
                return False
    return True


def sample_config(sys: BlockSystem, n: int, window_len: int, seed: int) -> list[int]:
    """Aligned window of the stage with uniformly random free-cell fill."""
    st = sys.stage(n)
    if window_len % st.q != 0 or window_len <= 0:
        raise PreconditionError("window length must be a positive multiple of q")
    sampler = AlignedSampler(sys, n, Random(seed))
    return [sampler.cell(p) for p in range(window_len)]


def metric_distance_bound(xs: dict[int, int], ys: dict[int, int], m: int,
                          radius: int) -> Fraction:
    """Certified upper bound on d(x, y) from symbols on [-radius, radius]:
    the truncated sum plus the full mass of the unseen tail."""
    vals = alphabet_values(m)
    total = Fraction(0)
    for i in range(-radius, radius + 1):
        if i in xs and i in ys:
            diff = abs(vals[xs[i]] - vals[ys[i]])
        else:
            diff = Fraction(1)
        total += Fraction(1, 2 ** abs(i)) * diff
    total += Fraction(2, 2**radius)  # tail beyond the evaluated window
    return total


@dataclass(frozen=True)
class ProbeReport:
    stage: int
    trials: int
    successes: int
    worst_distance: Fraction
    threshold: Fraction
    seed: int

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "trials": self.trials,
            "successes": self.successes,
            "worst_distance": fmt(self.worst_distance),
            "threshold": fmt(self.threshold),
            "seed": self.seed,
        }


def _recurrence_shift(sys: BlockSystem, n: int, xp: AlignedSampler) -> tuple[int, dict[int, int]]:
    """Shift k aligning the catalogue copy inside any stage-(n+1) point with
    the central window of xp, plus the matched window symbols of xp.

    The window xp[-r, r] is admissible for stage n at its alignment, so it
    occurs in the catalogue; if the occurrence starts at catalogue position
    t, the embedded copy at block positions [-2L, 0) matches under the shift
    k = t + r - L, which lands inside [-L + r, -r - 1].
    """
    st = sys.stage(n + 1)
    cat = st.catalogue
    r = st.r_window
    window = 2 * r + 1
    q_prev = sys.stage(n).q
    o = (-r) % q_prev
    digits = []
    wsyms: dict[int, int] = {}
    for i in range(-r, r + 1):
        sym = xp.cell(i)
        wsyms[i] = sym
        if sys.stage(n).pattern.cell(i % q_prev) is None:
            digits.append(sym)
    assert len(digits) == len(cat.free_pos[o])
    t_start = cat.start_of(o, digits)
    k = t_start + r - st.L
    return k, wsyms


def minimality_probe(sys: BlockSystem, n: int, trials: int, seed: int,
                     eval_radius: int | None = None) -> ProbeReport:
    """Sample pairs of stage-(n+1) configurations and certify, for each pair,
    a shift k in [-L+r, L-r] bringing them 2^-n close in the metric.

    The shift aligns the sampled point's central window with the catalogue
    copy embedded in every block of the other point, so agreement on
    [-r, r] is exact and the certified distance bound is at most 2^-(n+1).
    """
    st = sys.stage(n + 1)
    r = st.r_window
    threshold = Fraction(1, 2**n)
    radius = eval_radius if eval_radius is not None else r + 6
    # radius must reach the matched window or the tail mass swamps 2^-n
    if radius < r or Fraction(2, 2**radius) > threshold:
        raise PreconditionError("evaluation window too short for the required precision")
    rng = Random(seed)
    successes = 0
    worst = Fraction(0)
    for t in range(trials):
        xp = AlignedSampler(sys, n + 1, Random(rng.randrange(2**63)))
        x = AlignedSampler(sys, n + 1, Random(rng.randrange(2**63)))
        k, _ = _recurrence_shift(sys, n, xp)
        if not (-st.L + r <= k <= st.L - r):
            continue
        xs = {i: xp.cell(i) for i in range(-radius, radius + 1)}
        ys = {i: x.cell(i + k) for i in range(-radius, radius + 1)}
        d = metric_distance_bound(xs, ys, sys.m, radius)
        if d <= threshold:
            successes += 1
            worst = max(worst, d)
    return ProbeReport(stage=n + 1, trials=trials, successes=successes,
                       worst_distance=worst, threshold=threshold, seed=seed)


def probe_pair(sys: BlockSystem, n: int, xp_word: Sequence[int], x_word: Sequence[int]) -> Fraction:
    """Certified distance bound for one explicit pair of aligned stage-(n+1)
    words covering [-q, q); validates membership first."""
    st = sys.stage(n + 1)
    if not phi_membership(list(xp_word), sys, n + 1) or not phi_membership(list(x_word), sys, n + 1):
        raise PreconditionError(f"word is not in the stage-{n + 1} system")
    q = st.q
    if len(xp_word) != 2 * q or len(x_word) != 2 * q:
        raise InputError("probe words must cover [-q, q), i.e. have length 2q")

    class _Fixed:
        def __init__(self, word):
            self.word = word

        def cell(self, p):
            return self.word[p + q]

    xp = _Fixed(list(xp_word))
    k, _ = _recurrence_shift(sys, n, xp)  # type: ignore[arg-type]
    r = st.r_window
    radius = r + 6
    xs = {i: xp.cell(i) for i in range(-radius, radius + 1)}
    ys = {i: x_word[i + k + q] for i in range(-radius, radius + 1) if 0 <= i + k + q < 2 * q}
    return metric_distance_bound(xs, ys, sys.m, radius)


def system_report(sys: BlockSystem) -> dict:
    """Exact parameter/bounds summary, rationals as strings."""
    n = sys.built
    out = {
        "target_r": fmt(sys.target_r),
        "alphabet": sys.m,
        "a_sequence": list(sys.a_seq),
        "expansion_exact": sys.expansion_exhausted(),
        "stages": [st.summary() for st in sys.stages],
        "free_dim_ratio": fmt(free_dim_ratio(sys, n)),
        "lower_bound_mdim": fmt(lower_bound_mdim(sys)),
        "upper_bound_limit": fmt(free_dim_ratio(sys, n)),
    }
    if n >= 1:
        out["upper_bound_k100"] = fmt(upper_bound_mdim(sys, n, 100))
    return out
