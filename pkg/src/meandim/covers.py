"""Finite combinatorial model of open covers.

A ground set is a finite list of named points, optionally carrying an exact
symmetric rational distance table. A cover is a named family of nonempty
subsets whose union is the whole ground set. Order, refinement, join, mesh,
pullback, refinement merging, and enumerated upper bounds on the minimal
refinement order are all computed exactly.

All values are immutable after construction and every operation is a pure
function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from .errors import InputError, PreconditionError
from .rational import fmt, frac


@dataclass(frozen=True)
class GroundSet:
    """Finite point set, optionally metrized by an exact distance table."""

    points: tuple[str, ...]
    metric: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise InputError("ground set points must be distinct")
        if self.metric is not None:
            n = len(self.points)
            if len(self.metric) != n or any(len(row) != n for row in self.metric):
                raise InputError("metric table shape must match the point count")
            for i in range(n):
                if self.metric[i][i] != 0:
                    raise InputError("metric must vanish on the diagonal")
                for j in range(n):
                    if self.metric[i][j] < 0:
                        raise InputError("metric entries must be nonnegative")
                    if self.metric[i][j] != self.metric[j][i]:
                        raise InputError("metric must be symmetric")

    def index(self, p: str) -> int:
        try:
            return self.points.index(p)
        except ValueError:
            raise InputError(f"unknown point {p!r}") from None

    def distance(self, p: str, q: str) -> Fraction:
        if self.metric is None:
            raise PreconditionError("ground set carries no metric")
        return self.metric[self.index(p)][self.index(q)]


@dataclass(frozen=True)
class Cover:
    """Named family of nonempty subsets of a ground set, union = ground.

    Duplicate member sets (same content under different names) are dropped at
    construction, keeping the first name in input order; multiplicity counts
    distinct members only.
    """

    ground: GroundSet
    sets: tuple[tuple[str, frozenset[str]], ...]

    @staticmethod
    def of(ground: GroundSet, named_sets: Mapping[str, Iterable[str]]) -> "Cover":
        pointset = set(ground.points)
        seen: dict[frozenset[str], str] = {}
        members: list[tuple[str, frozenset[str]]] = []
        for name, elems in named_sets.items():
            s = frozenset(elems)
            if not s:
                raise InputError(f"cover member {name!r} is empty")
            if not s <= pointset:
                raise InputError(f"cover member {name!r} contains unknown points")
            if s in seen:
                continue
            seen[s] = name
            members.append((name, s))
        covered = frozenset().union(*(s for _, s in members)) if members else frozenset()
        if covered != pointset:
            missing = sorted(pointset - covered)
            raise InputError(f"sets do not cover the ground: missing {missing}")
        return Cover(ground, tuple(members))

    def names(self) -> list[str]:
        return [name for name, _ in self.sets]

    def member(self, name: str) -> frozenset[str]:
        for n, s in self.sets:
            if n == name:
                return s
        raise InputError(f"no cover member named {name!r}")

    def family(self) -> frozenset[frozenset[str]]:
        return frozenset(s for _, s in self.sets)

    def to_json(self) -> dict:
        out: dict = {
            "ground": list(self.ground.points),
            "sets": {name: sorted(s) for name, s in self.sets},
        }
        if self.ground.metric is not None:
            out["metric"] = [[fmt(d) for d in row] for row in self.ground.metric]
        return out

    @staticmethod
    def from_json(obj: dict) -> "Cover":
        if not isinstance(obj, dict) or "ground" not in obj or "sets" not in obj:
            raise InputError("cover JSON needs 'ground' and 'sets'")
        metric = None
        if obj.get("metric") is not None:
            metric = tuple(tuple(frac(v) for v in row) for row in obj["metric"])
        ground = GroundSet(tuple(obj["ground"]), metric)
        return Cover.of(ground, obj["sets"])


def order_at(cover: Cover, p: str) -> int:
    """Number of cover members containing p, minus one."""
    cover.ground.index(p)
    return sum(1 for _, s in cover.sets if p in s) - 1


def order(cover: Cover) -> int:
    counts: dict[str, int] = {}
    for _, s in cover.sets:
        for p in s:
            counts[p] = counts.get(p, 0) + 1
    return max(counts.values()) - 1


def _same_ground(a: Cover, b: Cover) -> None:
    if a.ground.points != b.ground.points:
        raise InputError("covers live on different ground sets")


def refines(beta: Cover, alpha: Cover) -> bool:
    """True iff every member of beta is contained in some member of alpha."""
    _same_ground(beta, alpha)
    alpha_sets = [s for _, s in alpha.sets]
    return all(any(b <= a for a in alpha_sets) for _, b in beta.sets)


def join(alpha: Cover, beta: Cover) -> Cover:
    """Common refinement by pairwise intersections; empties dropped."""
    _same_ground(alpha, beta)
    named: dict[str, frozenset[str]] = {}
    seen: set[frozenset[str]] = set()
    for na, a in alpha.sets:
        for nb, b in beta.sets:
            inter = a & b
            if inter and inter not in seen:
                seen.add(inter)
                named[f"{na}&{nb}"] = inter
    return Cover.of(alpha.ground, named)


def mesh(cover: Cover) -> Fraction:
    """Largest member diameter under the ground metric; singletons weigh 0."""
    if cover.ground.metric is None:
        raise PreconditionError("mesh needs a metric on the ground set")
    worst = Fraction(0)
    for _, s in cover.sets:
        pts = sorted(s)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = cover.ground.distance(pts[i], pts[j])
                if d > worst:
                    worst = d
    return worst


def pullback(cover: Cover, f: Mapping[str, str], domain: GroundSet) -> Cover:
    """Cover of `domain` by preimages of the input's members; empties dropped.

    Pointwise the multiplicity of x never exceeds the multiplicity of f(x):
    preimages of distinct members may coincide and are then counted once.
    """
    for p in domain.points:
        if p not in f:
            raise InputError(f"map is not total: no image for {p!r}")
        cover.ground.index(f[p])
    named: dict[str, frozenset[str]] = {}
    seen: set[frozenset[str]] = set()
    for name, s in cover.sets:
        pre = frozenset(p for p in domain.points if f[p] in s)
        if pre and pre not in seen:
            seen.add(pre)
            named[name] = pre
    return Cover.of(domain, named)


def merge_refinement(alpha: Cover, gamma: Cover, phi: Mapping[str, str]) -> Cover:
    """Merge gamma's members along a containment assignment phi into alpha's index set.

    phi maps each member name of gamma to the name of an alpha member
    containing it; the output member for alpha's index i is the union of
    phi-fibre over i. Point multiplicities never exceed gamma's.
    """
    _same_ground(alpha, gamma)
    if not refines(gamma, alpha):
        raise PreconditionError("gamma does not refine alpha")
    unions: dict[str, set[str]] = {}
    for gname, gset in gamma.sets:
        if gname not in phi:
            raise InputError(f"assignment misses gamma member {gname!r}")
        target = phi[gname]
        if not gset <= alpha.member(target):
            raise PreconditionError(f"{gname!r} is not contained in {target!r}")
        unions.setdefault(target, set()).update(gset)
    named = {name: frozenset(s) for name, s in unions.items() if s}
    return Cover.of(alpha.ground, named)


def singletons(ground: GroundSet) -> Cover:
    """The partition of the ground set into single points (order 0)."""
    return Cover.of(ground, {f"pt_{p}": [p] for p in ground.points})


def d_upper(alpha: Cover, generator: Iterable[Cover] | Callable[[], Iterator[Cover]],
            budget: int) -> int:
    """Certified upper bound on the minimal order over refinements of alpha.

    Takes the minimum order among alpha itself and at most `budget` covers
    drawn from the generator; each generated cover must refine alpha on the
    same ground. The result can only improve (never worsen) as the budget
    grows, because the generated prefix only extends.
    """
    if budget < 0:
        raise InputError("budget must be nonnegative")
    best = order(alpha)
    it = iter(generator() if callable(generator) else generator)
    for _ in range(budget):
        try:
            beta = next(it)
        except StopIteration:
            break
        if not refines(beta, alpha):
            raise PreconditionError("generator produced a cover that does not refine alpha")
        best = min(best, order(beta))
    return best
