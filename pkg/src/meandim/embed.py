"""Constructive embedding toolkit.

Window maps along orbits and the pair-separation criterion, exact general
position (with incremental perturbation), epsilon-injective partition-of-
unity maps, cyclic block-vector operations, randomized genericity tests for
patterned matrices and span extensions, partition-of-unity map builders with
exact inequality constraints, the congruent-block subspace, the window-index
finder with its brute-force oracle, and the explicit equator-swap sphere
embedding demo.

"Almost every" claims are exercised by seeded sampling with exact rational
arithmetic: an inequality that holds, holds exactly; a violation is an exact
event that gets flagged and resampled, never silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from random import Random
from typing import Callable, Mapping, Sequence

from . import linalg
from .covers import Cover, order as cover_order
from .errors import BudgetError, InputError, PreconditionError
from .rational import fmt, frac, rand_frac, rand_vec

Vec = tuple[Fraction, ...]


# -- point clouds -------------------------------------------------------------

@dataclass(frozen=True)
class PointCloud:
    """Finite set of exact rational points with a declared metric, either
    'sup' (rational distances) or 'euclidean_sq' (rational squared
    distances); all thresholds compare in the declared units."""

    names: tuple[str, ...]
    coords: tuple[Vec, ...]
    metric: str = "sup"

    @staticmethod
    def of(points: Mapping[str, Sequence], metric: str = "sup") -> "PointCloud":
        if metric not in ("sup", "euclidean_sq"):
            raise InputError("metric must be 'sup' or 'euclidean_sq'")
        names = tuple(points.keys())
        coords = tuple(tuple(frac(x) for x in points[n]) for n in names)
        dims = {len(c) for c in coords}
        if len(dims) > 1:
            raise InputError("points have mixed dimensions")
        return PointCloud(names, coords, metric)

    def coord(self, name: str) -> Vec:
        return self.coords[self.names.index(name)]

    def distance(self, a: str, b: str) -> Fraction:
        u, v = self.coord(a), self.coord(b)
        if self.metric == "sup":
            return linalg.sup_norm(linalg.vsub(u, v))
        return linalg.sq_norm(linalg.vsub(u, v))


# -- window maps and the separation criterion ---------------------------------

def window_map(f: Mapping[str, Vec] | Callable[[str], Vec], t_map: Mapping[str, str],
               x: str, lo: int, hi: int) -> list[Vec]:
    """Orbit samples (f(T^i x)) for i in [lo, hi]."""
    if lo > hi:
        raise InputError("empty window")
    getf = f if callable(f) else lambda p: f[p]
    fwd = dict(t_map)
    inv = {v: k for k, v in fwd.items()}
    if len(inv) != len(fwd):
        raise InputError("T must be injective on its table")
    out = []
    for i in range(lo, hi + 1):
        p = x
        steps, table = (i, fwd) if i >= 0 else (-i, inv)
        for _ in range(steps):
            if p not in table:
                raise InputError(f"orbit data exhausted at step {i} from {x!r}")
            p = table[p]
        out.append(tuple(frac(c) for c in getf(p)))
    return out


@dataclass(frozen=True)
class SeparationReport:
    separated: dict[tuple[str, str], int | None]

    @property
    def all_separated(self) -> bool:
        return all(i is not None for i in self.separated.values())

    def to_json(self) -> dict:
        return {
            "pairs": {f"{a}|{b}": i for (a, b), i in sorted(self.separated.items())},
            "all_separated": self.all_separated,
        }


def embedding_criterion(f, t_map, pairs: Sequence[tuple[str, str]], lo: int, hi: int) -> SeparationReport:
    """For each pair, the first index i in [lo, hi] with f(T^i x) != f(T^i y)
    under exact comparison, or None when the whole window agrees."""
    out: dict[tuple[str, str], int | None] = {}
    for x, y in pairs:
        if x == y:
            raise PreconditionError("pairs must be distinct")
        wx = window_map(f, t_map, x, lo, hi)
        wy = window_map(f, t_map, y, lo, hi)
        hit = next((lo + i for i, (a, b) in enumerate(zip(wx, wy)) if a != b), None)
        out[(x, y)] = hit
    return SeparationReport(out)


# -- general position ---------------------------------------------------------

def is_general_position(points: Sequence[Vec]) -> bool:
    pts = [tuple(frac(c) for c in p) for p in points]
    return linalg.general_position(pts)


def perturb_general_position(points: Sequence[Vec], eps, seed: int,
                             budget: int = 500) -> list[Vec]:
    """Move each point by less than eps (sup metric) into general position.

    Incremental: each new point is resampled until it avoids every affine
    hull spanned by at most m of the already-placed points; the hulls form a
    finite union of measure-zero sets, so rejection terminates quickly.
    """
    eps = frac(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    pts = [tuple(frac(c) for c in p) for p in points]
    if not pts:
        return []
    m = len(pts[0])
    rng = Random(seed)
    placed: list[Vec] = []
    for p in pts:
        candidate = p
        ok = False
        for _ in range(budget):
            if _avoids_small_hulls(candidate, placed, m):
                ok = True
                break
            candidate = tuple(x + rand_frac(rng, -eps, eps) * Fraction(1, 2) for x in p)
        if not ok:
            raise BudgetError("perturbation budget exhausted; retry with a new seed")
        placed.append(candidate)
    return placed


def _avoids_small_hulls(q: Vec, placed: Sequence[Vec], m: int) -> bool:
    for size in range(1, min(m, len(placed)) + 1):
        for sub in combinations(placed, size):
            if linalg.in_affine_hull(q, list(sub)):
                return False
    return True


# -- partitions of unity -------------------------------------------------------

@dataclass(frozen=True)
class PartitionOfUnity:
    """Subordinate weights on a cover of a finite cloud: nonnegative, summing
    to one at each point, positive only inside the owning set, and equal to
    one at each designated anchor."""

    cover: Cover
    weights: tuple[tuple[str, tuple[tuple[str, Fraction], ...]], ...]
    anchors: tuple[tuple[str, str], ...]

    @staticmethod
    def subordinate(cover: Cover, anchors: Mapping[str, str] | None = None) -> "PartitionOfUnity":
        """Uniform weights over the containing sets, except at anchors where
        the anchored set takes full weight. Anchors must be distinct points,
        each inside its set."""
        anchor_map = dict(anchors or {})
        anchored_points = list(anchor_map.values())
        if len(set(anchored_points)) != len(anchored_points):
            raise InputError("anchor points must be distinct")
        for name, pt in anchor_map.items():
            if pt not in cover.member(name):
                raise InputError(f"anchor for {name!r} lies outside the set")
        rows = []
        for name, _ in cover.sets:
            row = []
            for p in cover.ground.points:
                row.append((p, PartitionOfUnity._weight(cover, anchor_map, name, p)))
            rows.append((name, tuple(row)))
        pou = PartitionOfUnity(cover, tuple(rows), tuple(sorted(anchor_map.items())))
        pou.validate()
        return pou

    @staticmethod
    def _weight(cover: Cover, anchor_map: Mapping[str, str], name: str, p: str) -> Fraction:
        holders = [n for n, s in cover.sets if p in s]
        if p not in cover.member(name):
            return Fraction(0)
        for aname, apoint in anchor_map.items():
            if apoint == p:
                return Fraction(1) if aname == name else Fraction(0)
        return Fraction(1, len(holders))

    def weight(self, name: str, p: str) -> Fraction:
        for n, row in self.weights:
            if n == name:
                return dict(row)[p]
        raise InputError(f"no weight row for {name!r}")

    def validate(self) -> None:
        for p in self.cover.ground.points:
            total = sum((self.weight(n, p) for n, _ in self.cover.sets), Fraction(0))
            if total != 1:
                raise InputError(f"weights at {p!r} sum to {total}, not 1")
        for name, row in self.weights:
            s = self.cover.member(name)
            for p, w in row:
                if w < 0 or (w > 0 and p not in s):
                    raise InputError("weights must be nonnegative and subordinate")
        for name, pt in self.anchors:
            if self.weight(name, pt) != 1:
                raise InputError(f"anchor weight for {name!r} is not 1")


def eps_injective_map(cloud: PointCloud, alpha: Cover, f: Mapping[str, Vec],
                      eps, delta, m: int, seed: int) -> tuple[dict[str, Vec], dict]:
    """Perturbed partition-of-unity map g with ||f - g||_inf <= delta and
    exact eps-injectivity over the cloud.

    Requires m >= 2 ord(alpha) + 1, cover mesh below eps in the cloud's
    metric units, and f oscillating at most delta/2 inside every cover set.
    Anchored values are perturbed into general position within delta/2, so
    an exact collision g(x) = g(y) forces a shared cover set and therefore
    d(x, y) < eps; the exhaustive pairwise check certifies it.
    """
    eps, delta = frac(eps), frac(delta)
    n_ord = cover_order(alpha)
    if m < 2 * n_ord + 1:
        raise PreconditionError(f"target dimension {m} below 2*order+1 = {2 * n_ord + 1}")
    fmap = {p: tuple(frac(c) for c in f[p]) for p in cloud.names}
    if any(len(v) != m for v in fmap.values()):
        raise PreconditionError("f must take values in dimension m")
    mesh_val = Fraction(0)
    for _, s in alpha.sets:
        for a, b in combinations(sorted(s), 2):
            mesh_val = max(mesh_val, cloud.distance(a, b))
    if mesh_val >= eps:
        raise PreconditionError("cover mesh must be below eps")
    for name, s in alpha.sets:
        for a, b in combinations(sorted(s), 2):
            if linalg.sup_norm(linalg.vsub(fmap[a], fmap[b])) > delta / 2:
                raise PreconditionError(f"f oscillates beyond delta/2 inside {name!r}")

    rng = Random(seed)
    anchors = {name: sorted(s)[len(s) // 2] for name, s in alpha.sets}
    p_vals = [fmap[anchors[name]] for name, _ in alpha.sets]
    q_vals = perturb_general_position(p_vals, delta / 2, rng.randrange(2**32))
    pou = PartitionOfUnity.subordinate(alpha)
    g: dict[str, Vec] = {}
    for p in cloud.names:
        acc = tuple(Fraction(0) for _ in range(m))
        for (name, _), q in zip(alpha.sets, q_vals):
            w = pou.weight(name, p)
            if w:
                acc = linalg.vadd(acc, linalg.vscale(w, q))
        g[p] = acc
    collisions = []
    for a, b in combinations(cloud.names, 2):
        if g[a] == g[b] and cloud.distance(a, b) >= eps:
            collisions.append((a, b))
    max_dev = max(linalg.sup_norm(linalg.vsub(g[p], fmap[p])) for p in cloud.names)
    report = {
        "pairs_checked": len(cloud.names) * (len(cloud.names) - 1) // 2,
        "violations": collisions,
        "max_deviation": fmt(max_dev),
        "deviation_within_delta": max_dev <= delta,
        "eps": fmt(eps),
        "delta": fmt(delta),
        "seed": seed,
    }
    if collisions:
        raise PreconditionError(f"eps-injectivity failed on pairs {collisions[:3]}")
    if max_dev > delta:
        raise PreconditionError("construction drifted beyond delta")
    return g, report


# -- cyclic block vectors ------------------------------------------------------

@dataclass(frozen=True)
class CyclicVector:
    """Length-n vector of equal-size rational blocks, indexed from 0."""

    blocks: tuple[Vec, ...]

    @staticmethod
    def of(blocks) -> "CyclicVector":
        bs = tuple(tuple(frac(c) for c in b) for b in blocks)
        if not bs:
            raise InputError("cyclic vector needs at least one block")
        if len({len(b) for b in bs}) > 1:
            raise InputError("blocks must share one size")
        return CyclicVector(bs)

    def __len__(self) -> int:
        return len(self.blocks)

    def flat(self) -> Vec:
        return tuple(c for b in self.blocks for c in b)


def cyclic_repeat(v: CyclicVector, n1: int) -> CyclicVector:
    """Stretch to length n1 >= len(v) by reading indices mod len(v)."""
    n2 = len(v)
    if n1 < n2:
        raise InputError("target length below source length")
    return CyclicVector(tuple(v.blocks[k % n2] for k in range(n1)))


def cyclic_shift(v: CyclicVector, l: int) -> CyclicVector:
    """out[k] = v[(k + l) mod n]; shifts reduce mod n."""
    n = len(v)
    l %= n
    return CyclicVector(tuple(v.blocks[(k + l) % n] for k in range(n)))


# -- patterned matrices --------------------------------------------------------

@dataclass(frozen=True)
class PatternMatrix:
    rows: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(rows) -> "PatternMatrix":
        rs = tuple(tuple(int(x) for x in row) for row in rows)
        if not rs or len({len(r) for r in rs}) > 1:
            raise InputError("pattern must be rectangular and nonempty")
        if any(x < 1 for row in rs for x in row):
            raise InputError("pattern symbols are positive integers")
        return PatternMatrix(rs)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def symbols(self) -> list[int]:
        return sorted({x for row in self.rows for x in row})

    def check_row_col_distinct(self) -> None:
        for row in self.rows:
            if len(set(row)) != len(row):
                raise PreconditionError("repeated symbol within a row")
        for col in zip(*self.rows):
            if len(set(col)) != len(col):
                raise PreconditionError("repeated symbol within a column")

    def check_at_most_two_global(self) -> None:
        counts: dict[int, int] = {}
        for row in self.rows:
            for x in row:
                counts[x] = counts.get(x, 0) + 1
        if any(c > 2 for c in counts.values()):
            raise PreconditionError("a symbol appears more than twice")

    def instantiate(self, t: Mapping[int, int]) -> list[list[int]]:
        return [[t[x] for x in row] for row in self.rows]


def symbolic_pattern_det(m: PatternMatrix) -> dict[tuple[int, ...], int]:
    """Leibniz expansion of det A(t) as a polynomial in the symbol variables,
    returned as {exponent vector: coefficient}; practical for sizes <= 4."""
    r, c = m.shape
    if r != c:
        raise InputError("symbolic determinant needs a square pattern")
    syms = m.symbols()
    pos = {s: i for i, s in enumerate(syms)}
    poly: dict[tuple[int, ...], int] = {}
    from itertools import permutations

    def sign(perm):
        s = 1
        seen = [False] * len(perm)
        for i in range(len(perm)):
            if seen[i]:
                continue
            j, ln = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                ln += 1
            if ln % 2 == 0:
                s = -s
        return s

    for perm in permutations(range(r)):
        mono = [0] * len(syms)
        for i in range(r):
            mono[pos[m.rows[i][perm[i]]]] += 1
        key = tuple(mono)
        poly[key] = poly.get(key, 0) + sign(perm)
        if poly[key] == 0:
            del poly[key]
    return poly


@dataclass(frozen=True)
class GenericityReport:
    trials: int
    failures: tuple
    seed: int
    note: str = ""

    @property
    def all_passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "failures": [list(map(str, f)) if isinstance(f, tuple) else f for f in self.failures],
            "all_passed": self.all_passed,
            "seed": self.seed,
            "note": self.note,
        }


def pattern_generic_invertibility(m: PatternMatrix, trials: int, seed: int,
                                  t_sampler=None) -> GenericityReport:
    """Sample integer symbol values, instantiate, and take exact determinants;
    with no repeats in rows or columns a zero is a null-set hit, so any zero
    is flagged (integer arithmetic already makes it exact)."""
    r, c = m.shape
    if r != c:
        raise InputError("invertibility needs a square pattern")
    m.check_row_col_distinct()
    rng = Random(seed)
    syms = m.symbols()
    failures = []
    for trial in range(trials):
        if t_sampler is not None:
            t = t_sampler(rng, syms)
        else:
            t = {s: rng.randrange(1, 10**6 + 1) for s in syms}
        a = m.instantiate(t)
        if linalg.int_det(a) == 0:
            failures.append(("zero_det", trial, tuple(sorted(t.items()))))
    return GenericityReport(trials, tuple(failures), seed)


def pattern_generic_affine(m: PatternMatrix, trials: int, seed: int,
                           t_sampler=None) -> GenericityReport:
    """Affine variant on (2k-1) x 2k patterns with each symbol used at most
    twice: per trial the 2k instantiated columns must be affinely independent
    (exact rank of the column differences equals 2k-1)."""
    r, c = m.shape
    if c != r + 1 or c % 2 != 0:
        raise InputError("affine variant needs shape (2k-1) x 2k")
    m.check_row_col_distinct()
    m.check_at_most_two_global()
    rng = Random(seed)
    syms = m.symbols()
    failures = []
    for trial in range(trials):
        if t_sampler is not None:
            t = t_sampler(rng, syms)
        else:
            t = {s: rng.randrange(1, 10**6 + 1) for s in syms}
        a = m.instantiate(t)
        cols = [tuple(Fraction(a[i][j]) for i in range(r)) for j in range(c)]
        if not linalg.is_affinely_independent(cols):
            failures.append(("affine_dependence", trial, tuple(sorted(t.items()))))
    return GenericityReport(trials, tuple(failures), seed)


def generic_span_extension(base: Sequence[Vec], s: int, mode: str, trials: int,
                           seed: int, ambient_dim: int | None = None) -> GenericityReport:
    """Extend a family by s sampled vectors and check full (affine) rank.

    Linear mode needs r+s <= m and checks dim span = r+s; affine mode needs
    r+s <= m+1 and checks affine dimension r+s-1. With an empty base the
    ambient dimension must be passed explicitly.
    """
    vs = [tuple(frac(c) for c in v) for v in base]
    r = len(vs)
    if r == 0 and s == 0:
        raise InputError("nothing to check")
    m = len(vs[0]) if vs else ambient_dim
    if m is None:
        raise InputError("empty base needs an explicit ambient dimension")
    if mode not in ("linear", "affine"):
        raise InputError("mode must be 'linear' or 'affine'")
    rng = Random(seed)
    failures = []
    eff_trials = trials if s > 0 else 1
    for trial in range(eff_trials):
        sampled = [rand_vec(rng, m) for _ in range(s)]
        fam = vs + sampled
        dim = len(fam[0])
        if mode == "linear":
            if r + s > dim:
                raise PreconditionError("linear mode needs r+s <= ambient dimension")
            ok = linalg.rank(fam) == r + s
        else:
            if r + s > dim + 1:
                raise PreconditionError("affine mode needs r+s <= ambient dimension + 1")
            ok = linalg.affine_rank(fam) == r + s - 1
        if not ok:
            failures.append(("rank_deficit", trial))
    return GenericityReport(eff_trials, tuple(failures), seed)


# -- congruent-block subspace ---------------------------------------------------

def v_subspace_membership(z: Sequence[Vec], n: int) -> tuple[bool, Fraction]:
    """Membership of a block vector in the subspace where congruent indices
    (mod n) carry equal blocks, plus the sup-norm deviation of each block
    from its congruence-class mean."""
    blocks = [tuple(frac(c) for c in b) for b in z]
    nn = len(blocks)
    if n < 1 or nn < n:
        raise PreconditionError("need at least n blocks and n >= 1")
    member = True
    worst = Fraction(0)
    for res in range(n):
        cls = [blocks[i] for i in range(nn) if i % n == res]
        if len(cls) <= 1:
            continue
        k = Fraction(1, len(cls))
        mean = tuple(sum(col, Fraction(0)) * k for col in zip(*cls))
        for b in cls:
            dev = linalg.sup_norm(linalg.vsub(b, mean))
            worst = max(worst, dev)
            if b != cls[0]:
                member = False
    return member, worst


# -- partition-of-unity map builders ---------------------------------------------

@dataclass(frozen=True)
class BuilderReport:
    lemma: str
    resamples: int
    pairs_checked: int
    anchor_deviation: Fraction
    eps: Fraction
    seed: int
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "resamples": self.resamples,
            "pairs_checked": self.pairs_checked,
            "anchor_deviation": fmt(self.anchor_deviation),
            "eps": fmt(self.eps),
            "seed": self.seed,
            "notes": list(self.notes),
        }


def _sample_block_targets(rng: Random, targets: Mapping[str, CyclicVector], eps: Fraction) -> dict[str, CyclicVector]:
    out = {}
    for name, v in targets.items():
        blocks = []
        for b in v.blocks:
            blocks.append(tuple(
                min(Fraction(1), max(Fraction(0), c + rand_frac(rng, -eps, eps) * Fraction(1, 2)))
                for c in b
            ))
        out[name] = CyclicVector.of(blocks)
    return out


def _pou_eval(pou: PartitionOfUnity, w: Mapping[str, CyclicVector], p: str) -> CyclicVector:
    acc = None
    for name, _ in pou.cover.sets:
        weight = pou.weight(name, p)
        if weight == 0:
            continue
        contrib = tuple(linalg.vscale(weight, b) for b in w[name].blocks)
        acc = contrib if acc is None else tuple(linalg.vadd(a, c) for a, c in zip(acc, contrib))
    assert acc is not None
    return CyclicVector(acc)


def _check_order(alpha: Cover, bound: Fraction, label: str) -> None:
    if not Fraction(cover_order(alpha)) < bound:
        raise PreconditionError(f"cover order violates the {label} bound {bound}")


def pou_map_builder(pous: Mapping[str, PartitionOfUnity], targets, constraint: dict,
                    eps, seed: int, verification_pairs=None,
                    budget: int = 200) -> tuple[dict, BuilderReport]:
    """Build F(x) = sum rho_U(x) w_U with sampled block targets w_U until the
    requested inequality holds exactly on the verification set.

    `constraint` carries 'lemma' in {approx1, approx2, approx3, approx4} with
    its parameters. Anchors keep F(q_U) = w_U within eps of the declared
    targets by sampling inside that box; convex-hull containment holds by
    construction of the weights.
    """
    lemma = constraint.get("lemma")
    eps = frac(eps)
    rng = Random(seed)
    if lemma == "approx2":
        return _build_approx2(pous, targets, constraint, eps, rng, seed, verification_pairs, budget)
    if lemma == "approx3":
        return _build_approx3(pous, targets, constraint, eps, rng, seed, verification_pairs, budget)
    if lemma == "approx4":
        return _build_approx4(pous, targets, constraint, eps, rng, seed, budget)
    if lemma == "approx1":
        return _build_approx1(pous, targets, constraint, eps, rng, seed, verification_pairs, budget)
    raise InputError(f"unknown builder constraint {lemma!r}")


def _anchor_dev(pou: PartitionOfUnity, w, targets) -> Fraction:
    worst = Fraction(0)
    for name, pt in pou.anchors:
        got = _pou_eval(pou, w, pt)
        want = targets[name]
        dev = max(linalg.sup_norm(linalg.vsub(a, b)) for a, b in zip(got.blocks, want.blocks))
        worst = max(worst, dev)
    return worst


def _build_approx2(pous, targets, constraint, eps, rng, seed, pairs, budget):
    n1, n2, d = constraint["n1"], constraint["n2"], constraint["d"]
    if n1 < n2:
        raise PreconditionError("needs n1 >= n2")
    p1, p2 = pous["side1"], pous["side2"]
    _check_order(p1.cover, Fraction(d * n1, 2), "d*n1/2")
    _check_order(p2.cover, Fraction(d * n2, 2), "d*n2/2")
    t1, t2 = targets["side1"], targets["side2"]
    if pairs is None:
        pairs = [(a, b) for a in p1.cover.ground.points for b in p2.cover.ground.points]
    violating = None
    for attempt in range(budget):
        w1 = _sample_block_targets(rng, t1, eps)
        w2 = _sample_block_targets(rng, t2, eps)
        ok = True
        for x1, x2 in pairs:
            f1 = _pou_eval(p1, w1, x1)
            f2 = cyclic_repeat(_pou_eval(p2, w2, x2), n1)
            if f1.blocks == f2.blocks:
                ok = False
                violating = (x1, x2)
                break
        if ok:
            dev = max(_anchor_dev(p1, w1, t1), _anchor_dev(p2, w2, t2))
            rep = BuilderReport("approx2", attempt, len(pairs), dev, eps, seed)
            fmap = {
                "side1": {p: _pou_eval(p1, w1, p) for p in p1.cover.ground.points},
                "side2": {p: _pou_eval(p2, w2, p) for p in p2.cover.ground.points},
            }
            return fmap, rep
    raise BudgetError(f"approx2 resampling budget exhausted on pair {violating}")


def _build_approx3(pous, targets, constraint, eps, rng, seed, pairs, budget):
    n, l, d = constraint["n"], constraint["l"], constraint["d"]
    pou = pous["main"]
    _check_order(pou.cover, Fraction(d * n, 2), "d*n/2")
    notes = ()
    if l == 0:
        notes = ("shift l=0 accepted as an extension: diagonal pairs are skipped",)
    pts = list(pou.cover.ground.points)
    if pairs is None:
        pairs = [(a, b) for a in pts for b in pts]
    if l == 0:
        pairs = [(a, b) for a, b in pairs if a != b]
    tgt = targets["main"]
    for attempt in range(budget):
        w = _sample_block_targets(rng, tgt, eps)
        ok = True
        for x, y in pairs:
            fx = _pou_eval(pou, w, x)
            fy = cyclic_shift(_pou_eval(pou, w, y), l)
            if fx.blocks == fy.blocks:
                ok = False
                break
        if ok:
            rep = BuilderReport("approx3", attempt, len(pairs), _anchor_dev(pou, w, tgt),
                                eps, seed, notes)
            return {p: _pou_eval(pou, w, p) for p in pts}, rep
    raise BudgetError("approx3 resampling budget exhausted")


def _build_approx4(pous, targets, constraint, eps, rng, seed, budget):
    big_n, n, d = constraint["N"], constraint["n"], constraint["d"]
    pou = pous["main"]
    if not cover_order(pou.cover) + 1 <= Fraction((big_n - 1 - n) * d, 2):
        raise PreconditionError("cover order violates the (N-1-n)d/2 bound")
    pts = list(pou.cover.ground.points)
    tgt = targets["main"]
    for attempt in range(budget):
        w = _sample_block_targets(rng, tgt, eps)
        ok = True
        worst = None
        for x in pts:
            fx = _pou_eval(pou, w, x)
            member, dist = v_subspace_membership(fx.blocks[: big_n - 1], n)
            if member:
                ok = False
                break
            worst = dist if worst is None else min(worst, dist)
        if ok:
            rep = BuilderReport("approx4", attempt, len(pts), _anchor_dev(pou, w, tgt),
                                eps, seed, (f"min_subspace_distance={fmt(worst)}",))
            return {p: _pou_eval(pou, w, p) for p in pts}, rep
    raise BudgetError("approx4 resampling budget exhausted")


def _build_approx1(pous, targets, constraint, eps, rng, seed, pairs, budget):
    big_n, s_param, d = constraint["N"], constraint["S"], constraint["d"]
    lam_grid = constraint.get("lambda_grid") or [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
    lam_grid = [frac(x) for x in lam_grid]
    pou = pous["main"]
    _check_order(pou.cover, Fraction(s_param * d), "S*d")
    if big_n < 4 * s_param:
        raise PreconditionError("needs N >= 4S")
    pts = list(pou.cover.ground.points)
    if pairs is None:
        pts_v = pts
    else:
        pts_v = sorted({p for pair in pairs for p in pair})
    sets = dict(pou.cover.sets)

    def share_set(a, b):
        return any(a in s and b in s for s in sets.values())

    tgt = targets["main"]
    quads = [
        (x, y, xp, yp)
        for x in pts_v for y in pts_v for xp in pts_v for yp in pts_v
        if not share_set(x, xp)
    ]
    for attempt in range(budget):
        w = _sample_block_targets(rng, tgt, eps)
        fvals = {p: _pou_eval(pou, w, p) for p in pts}
        ok = True
        for x, y, xp, yp in quads:
            for l in range(0, big_n - 4 * s_param):
                a1 = fvals[x].blocks[l : l + 4 * s_param]
                b1 = fvals[y].blocks[l + 1 : l + 4 * s_param + 1]
                a2 = fvals[xp].blocks[l : l + 4 * s_param]
                b2 = fvals[yp].blocks[l + 1 : l + 4 * s_param + 1]
                for lam in lam_grid:
                    lhs = tuple(
                        linalg.vadd(linalg.vscale(lam, u), linalg.vscale(1 - lam, v))
                        for u, v in zip(a1, b1)
                    )
                    rhs = tuple(
                        linalg.vadd(linalg.vscale(lam, u), linalg.vscale(1 - lam, v))
                        for u, v in zip(a2, b2)
                    )
                    if lhs == rhs:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            rep = BuilderReport(
                "approx1", attempt, len(quads), _anchor_dev(pou, w, tgt), eps, seed,
                (f"lambda_grid={[fmt(x) for x in lam_grid]}",
                 "finite lambda grid and finite pair set only"),
            )
            return fvals, rep
    raise BudgetError("approx1 resampling budget exhausted")


# -- window-index finder ---------------------------------------------------------

def _floor_frac(x) -> int:
    x = frac(x)
    return x.numerator // x.denominator


def _ceil_frac(x) -> int:
    x = frac(x)
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class WindowSequence:
    """Values on the index range [-3M/2, M/2 - 1]; rationals allowed, with
    floor and ceiling taken per index."""

    m_even: int
    values: tuple[Fraction, ...]

    @staticmethod
    def of(m_even: int, values) -> "WindowSequence":
        if m_even < 2 or m_even % 2 != 0:
            raise InputError("M must be a positive even integer")
        vals = tuple(frac(v) for v in values)
        if len(vals) != 2 * m_even:
            raise InputError(f"need exactly 2M = {2 * m_even} values")
        return WindowSequence(m_even, vals)

    @property
    def start(self) -> int:
        return -3 * self.m_even // 2

    def value(self, i: int) -> Fraction:
        return self.values[i - self.start]

    def breaks(self) -> list[int]:
        out = []
        for j in range(self.start, self.m_even // 2 - 1):
            if self.value(j + 1) != self.value(j) + 1:
                out.append(j)
        return out


def window_index_conditions(seq: WindowSequence, r: int) -> tuple[bool, bool, bool]:
    """The anchor bound and the two half-window progressions at r."""
    m = seq.m_even
    if not (-3 * m // 2 <= r <= 0):
        return False, False, False
    anchor_f = _floor_frac(seq.value(r)) % m
    c1 = anchor_f <= m // 2
    c2 = all(
        _floor_frac(seq.value(s)) % m == anchor_f + (s - r)
        for s in range(r, r + m // 2)
    )
    anchor_c = _ceil_frac(seq.value(r)) % m
    c3 = all(
        _ceil_frac(seq.value(s)) % m == anchor_c + (s - r)
        for s in range(r, r + m // 2)
    )
    return c1, c2, c3


def find_window_index(seq: WindowSequence) -> int:
    """Anchor index r in [-3M/2, 0] passing the three window conditions.

    Follows the constructive argument: split the range at the single allowed
    break, take the side of length at least M, find the index whose floor is
    0 mod M, and either anchor there or half a window earlier. The returned
    r is re-verified by direct evaluation.
    """
    m = seq.m_even
    brs = seq.breaks()
    if len(brs) > 1:
        raise PreconditionError(f"more than one break in the window: {brs}")
    lo, hi = seq.start, m // 2 - 1  # indices carrying values
    if brs:
        j = brs[0]
        left = (lo, j)
        right = (j + 1, hi)
        seg = left if (left[1] - left[0]) >= (right[1] - right[0]) else right
    else:
        seg = (lo, hi)
    a, b = seg
    if b - a < m - 1:
        raise PreconditionError("no break-free run of length M in the window")
    k = next(kk for kk in range(a, a + m) if _floor_frac(seq.value(kk)) % m == 0)
    if b - k + 1 >= m // 2 and k <= 0:
        r = k
    else:
        r = k - m // 2 - 1
    conds = window_index_conditions(seq, r)
    if not all(conds):
        raise PreconditionError(f"constructed index {r} fails conditions {conds}")
    return r


def window_index_oracle(seq: WindowSequence) -> list[int]:
    """Exhaustive scan of every admissible r, the independent feasibility
    oracle for the constructive finder."""
    m = seq.m_even
    return [r for r in range(-3 * m // 2, 1) if all(window_index_conditions(seq, r))]


# -- sphere demo -----------------------------------------------------------------

def sphere_point(u, v) -> Vec:
    """Inverse stereographic image of a rational plane point: exact rational
    coordinates on the unit sphere."""
    u, v = frac(u), frac(v)
    den = 1 + u * u + v * v
    return (2 * u / den, 2 * v / den, (u * u + v * v - 1) / den)


def equator_reflection(p: Vec) -> Vec:
    return (p[0], p[1], -p[2])


def sphere_sequence(p: Vec, k: int) -> tuple[Fraction, Fraction]:
    """k-th pair of the alternating embedding, rescaled from [-2, 2] into
    [0, 1] by v -> (v + 2) / 4."""
    sign = 1 if k % 2 == 0 else -1
    first = p[0] + sign * p[2]
    return ((first + 2) / 4, (p[1] + 2) / 4)


@dataclass(frozen=True)
class SphereReport:
    samples: int
    pairs_checked: int
    equivariance_failures: int
    injectivity_failures: int
    window: int
    seed: int

    @property
    def passed(self) -> bool:
        return self.equivariance_failures == 0 and self.injectivity_failures == 0

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "pairs_checked": self.pairs_checked,
            "equivariance_failures": self.equivariance_failures,
            "injectivity_failures": self.injectivity_failures,
            "window": self.window,
            "seed": self.seed,
            "passed": self.passed,
        }


def sphere_demo(samples: int, seed: int, window: int = 4,
                max_pairs: int = 10_000) -> SphereReport:
    """Sample rational sphere points, check exact shift equivariance of the
    alternating sequence under the equator reflection, and exact injectivity
    of the first two sequence entries over sampled pairs."""
    if samples < 2:
        raise PreconditionError("need at least two samples")
    rng = Random(seed)
    pts: list[Vec] = []
    seen = set()
    while len(pts) < samples:
        u = rand_frac(rng, Fraction(-2), Fraction(2), denom=2**10)
        v = rand_frac(rng, Fraction(-2), Fraction(2), denom=2**10)
        if (u, v) in seen:
            continue
        seen.add((u, v))
        pts.append(sphere_point(u, v))
    equi_fail = 0
    for p in pts:
        sp = equator_reflection(p)
        for k in range(-window, window + 1):
            if sphere_sequence(sp, k) != sphere_sequence(p, k + 1):
                equi_fail += 1
                break
    inj_fail = 0
    pairs = 0
    for a, b in combinations(pts, 2):
        if pairs >= max_pairs:
            break
        pairs += 1
        if (sphere_sequence(a, 0), sphere_sequence(a, 1)) == (sphere_sequence(b, 0), sphere_sequence(b, 1)):
            inj_fail += 1
    return SphereReport(samples, pairs, equi_fail, inj_fail, window, seed)
