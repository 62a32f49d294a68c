"""Finite dynamical models: permutation systems, markers, the stopped
backward walk behind the Rokhlin property, periodic-dimension calculators,
and the distinct-index selection for orbit pairs.

A finite permutation system is a point set with a bijection, cycle
decomposed. Marker sets, expected stopping times, and defect sets are all
exact-rational computations done per cycle.

Orientation note: the stopped walk moves along T^-1 and halts at a point y
with probability rho(y). Solving f(x) = 1 + (1 - rho(x)) f(T^-1 x) per cycle
gives the expected stopping times; the defect set {x : f(Tx) != f(x) + 1} is
then exactly the T-preimage of rho's support, hence contained in T^-1(U)
whenever rho is supported in U. The containment direction is forced by the
walk; it transfers the n-separation of U to the defect set all the same.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Mapping, Sequence

from .errors import InputError, PreconditionError
from .rational import fmt, frac


@dataclass(frozen=True)
class FinitePermSystem:
    points: tuple[str, ...]
    t_map: tuple[tuple[str, str], ...]

    @staticmethod
    def of(points, t_map: Mapping[str, str]) -> "FinitePermSystem":
        pts = tuple(str(p) for p in points)
        if len(set(pts)) != len(pts):
            raise InputError("points must be distinct")
        tm = {str(k): str(v) for k, v in t_map.items()}
        if set(tm.keys()) != set(pts) or set(tm.values()) != set(pts):
            raise InputError("T must be a bijection of the point set")
        return FinitePermSystem(pts, tuple(sorted(tm.items())))

    @staticmethod
    def from_cycles(cycles: Sequence[Sequence[str]]) -> "FinitePermSystem":
        t = {}
        points = []
        for cyc in cycles:
            for i, p in enumerate(cyc):
                points.append(str(p))
                t[str(p)] = str(cyc[(i + 1) % len(cyc)])
        return FinitePermSystem.of(points, t)

    def t(self, p: str) -> str:
        return dict(self.t_map)[p]

    def t_inv(self, p: str) -> str:
        return {v: k for k, v in self.t_map}[p]

    def iterate(self, p: str, k: int) -> str:
        fwd = dict(self.t_map)
        if k < 0:
            fwd = {v: kk for kk, v in self.t_map}
            k = -k
        for _ in range(k):
            p = fwd[p]
        return p

    def cycles(self) -> list[list[str]]:
        fwd = dict(self.t_map)
        seen: set[str] = set()
        out = []
        for p in self.points:
            if p in seen:
                continue
            cyc = [p]
            seen.add(p)
            q = fwd[p]
            while q != p:
                cyc.append(q)
                seen.add(q)
                q = fwd[q]
            out.append(cyc)
        return out

    def image(self, s: set[str] | frozenset[str]) -> frozenset[str]:
        fwd = dict(self.t_map)
        return frozenset(fwd[p] for p in s)

    def preimage(self, s: set[str] | frozenset[str]) -> frozenset[str]:
        inv = {v: k for k, v in self.t_map}
        return frozenset(inv[p] for p in s)

    def to_json(self) -> dict:
        return {"points": list(self.points), "T": dict(self.t_map)}

    @staticmethod
    def from_json(obj: dict) -> "FinitePermSystem":
        if "points" not in obj or "T" not in obj:
            raise InputError("system JSON needs 'points' and 'T'")
        return FinitePermSystem.of(obj["points"], obj["T"])


def is_marker(sys: FinitePermSystem, f_set, n: int) -> bool:
    """n-separation of F under forward images plus covering: some union of
    至 most |points| forward images is everything (for permutations this
    means F meets every cycle)."""
    f = frozenset(str(p) for p in f_set)
    if not f <= set(sys.points):
        raise InputError("marker candidate contains unknown points")
    if not f:
        return False
    img = f
    for _ in range(1, n):
        img = sys.image(img)
        if f & img:
            return False
    covered: set[str] = set()
    img = f
    for _ in range(len(sys.points)):
        img = sys.image(img)
        covered |= img
        if covered == set(sys.points):
            return True
    return False


def find_marker(sys: FinitePermSystem, n: int) -> frozenset[str] | None:
    """One marker point every n steps along each cycle, with the wrap gap
    landing in [n, 2n-1]; returns None when a cycle is shorter than n."""
    if n < 1:
        raise InputError("n must be at least 1")
    marks: list[str] = []
    for cyc in sys.cycles():
        if len(cyc) < n:
            return None
        count = len(cyc) // n
        marks.extend(cyc[i * n] for i in range(count))
    f = frozenset(marks)
    assert is_marker(sys, f, n)
    return f


def rokhlin_expected_steps(sys: FinitePermSystem, rho: Mapping[str, Fraction]) -> dict[str, Fraction]:
    """Expected steps of the backward walk stopped with probability rho.

    Per cycle the recursion f(x) = 1 + (1 - rho(x)) f(T^-1 x) closes into a
    single linear equation with contraction factor prod(1 - rho) < 1; a
    cycle where rho vanishes identically has no bounded solution.
    """
    rates = {str(k): frac(v) for k, v in rho.items()}
    for p in sys.points:
        if p not in rates:
            rates[p] = Fraction(0)
        if not 0 <= rates[p] <= 1:
            raise InputError("stopping rates must lie in [0, 1]")
    f: dict[str, Fraction] = {}
    for cyc in sys.cycles():
        if all(rates[p] == 0 for p in cyc):
            raise PreconditionError(
                f"walk never stops on cycle through {cyc[0]!r}: expected time diverges"
            )
        k = len(cyc)
        # substitute f_j = 1 + c_j f_{j-1} around the cycle starting at f_0,
        # yielding f_0 = a + b f_0 with b = prod c_j < 1
        a, b = Fraction(0), Fraction(1)
        for j in [0] + list(range(k - 1, 0, -1)):
            a = a + b
            b = b * (1 - rates[cyc[j]])
        f[cyc[0]] = a / (1 - b)
        for j in range(1, k):
            f[cyc[j]] = 1 + (1 - rates[cyc[j]]) * f[cyc[j - 1]]
    return f


def rokhlin_defect(sys: FinitePermSystem, f: Mapping[str, Fraction]) -> frozenset[str]:
    """Defect set {x : f(Tx) != f(x) + 1}, compared exactly."""
    vals = {str(k): frac(v) for k, v in f.items()}
    for p in sys.points:
        if p not in vals:
            raise InputError(f"f is not defined at {p!r}")
    return frozenset(p for p in sys.points if vals[sys.t(p)] != vals[p] + 1)


@dataclass(frozen=True)
class RokhlinReport:
    n: int
    f: dict[str, Fraction]
    defect: frozenset[str]
    defect_in_shifted_support: bool
    defect_n_separated: bool

    @property
    def passed(self) -> bool:
        return self.defect_in_shifted_support and self.defect_n_separated

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "f": {k: fmt(v) for k, v in sorted(self.f.items())},
            "defect": sorted(self.defect),
            "defect_in_shifted_support": self.defect_in_shifted_support,
            "defect_n_separated": self.defect_n_separated,
            "passed": self.passed,
        }


def rokhlin_property_check(sys: FinitePermSystem, n: int, f_set, u_set,
                           ramp: Fraction | None = None) -> RokhlinReport:
    """Build the stopping rates (1 on F, a positive ramp on U minus F), solve
    the walk, and check that the defect set sits inside the T-shifted copy
    of U and is n-separated.

    Preconditions, reported individually: F inside U, U n-separated under T,
    F an n-marker.
    """
    f = frozenset(str(p) for p in f_set)
    u = frozenset(str(p) for p in u_set)
    if not f <= u:
        raise PreconditionError("marker set must be contained in its neighborhood U")
    img = u
    for _ in range(1, n):
        img = sys.image(img)
        if u & img:
            raise PreconditionError("U is not n-separated: U meets a forward image")
    if not is_marker(sys, f, n):
        raise PreconditionError("F is not an n-marker")
    rho: dict[str, Fraction] = {p: Fraction(0) for p in sys.points}
    for p in u - f:
        rho[p] = frac(ramp) if ramp is not None else Fraction(1, 2)
    for p in f:
        rho[p] = Fraction(1)
    fvals = rokhlin_expected_steps(sys, rho)
    defect = rokhlin_defect(sys, fvals)
    inside = defect <= sys.preimage(u)
    separated = True
    img = defect
    for _ in range(1, n):
        img = sys.image(img)
        if defect & img:
            separated = False
            break
    return RokhlinReport(n=n, f=dict(fvals), defect=defect,
                         defect_in_shifted_support=inside,
                         defect_n_separated=separated)


# -- periodic dimension -------------------------------------------------------

@dataclass(frozen=True)
class SymbolicSystemDescriptor:
    """Declared dimensions of the exact-period-k loci, either tabulated or by
    the linear rule dim H_k = k*d, plus the period transfer flag used by the
    power-bound calculator."""

    dims_h: tuple[tuple[int, int], ...]
    linear_d: int | None = None
    power_rule: str | None = "divides"

    @staticmethod
    def of(dims_h: Mapping[int, int] | None = None, linear_d: int | None = None,
           power_rule: str | None = "divides") -> "SymbolicSystemDescriptor":
        table = tuple(sorted((int(k), int(v)) for k, v in (dims_h or {}).items()))
        for k, v in table:
            if k < 1 or v < 0:
                raise InputError("period table needs periods >= 1 and dims >= 0")
        if linear_d is not None and linear_d < 0:
            raise InputError("linear rule needs a nonnegative d")
        return SymbolicSystemDescriptor(table, linear_d, power_rule)

    def dim_h(self, k: int) -> int | None:
        """Dimension of the exact-period-k locus; None when empty/undeclared."""
        if self.linear_d is not None:
            return k * self.linear_d
        return dict(self.dims_h).get(k)

    def to_json(self) -> dict:
        out: dict = {"dims_H": {str(k): v for k, v in self.dims_h}}
        if self.linear_d is not None:
            out["rule"] = f"linear:d={self.linear_d}"
        if self.power_rule:
            out["power_rule"] = self.power_rule
        return out

    @staticmethod
    def from_json(obj: dict) -> "SymbolicSystemDescriptor":
        linear_d = None
        rule = obj.get("rule")
        if rule:
            if not rule.startswith("linear:d="):
                raise InputError(f"unknown descriptor rule {rule!r}")
            linear_d = int(rule.split("=", 1)[1])
        return SymbolicSystemDescriptor.of(obj.get("dims_H") or {}, linear_d,
                                           obj.get("power_rule", "divides"))


def perdim(descr: SymbolicSystemDescriptor, k_max: int) -> Fraction:
    """sup over k <= k_max of dim(P_k)/k with dim(P_k) = max over i <= k of
    dim(H_i); horizons with no periodic points contribute nothing and a
    fully aperiodic descriptor scores 0."""
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    best = Fraction(0)
    running: int | None = None
    found = False
    for k in range(1, k_max + 1):
        d = descr.dim_h(k)
        if d is not None:
            running = d if running is None else max(running, d)
            found = True
        if running is not None:
            best = max(best, Fraction(running, k))
    return best if found else Fraction(0)


def perdim_argmax(descr: SymbolicSystemDescriptor, k_max: int) -> int | None:
    """Horizon achieving the truncated sup, None for aperiodic descriptors."""
    best, arg = None, None
    running: int | None = None
    for k in range(1, k_max + 1):
        d = descr.dim_h(k)
        if d is not None:
            running = d if running is None else max(running, d)
        if running is not None:
            val = Fraction(running, k)
            if best is None or val > best:
                best, arg = val, k
    return arg


def perdim_power_bound(descr: SymbolicSystemDescriptor, m: int, k_max: int) -> tuple[Fraction, Fraction]:
    """(perdim of the descriptor reindexed under the m-th power map,
    m * perdim of the original); the first never exceeds the second.

    A point of period k keeps period at most k under the power map, so the
    same dimension table is a valid reindexed descriptor.
    """
    if m < 1:
        raise InputError("power must be at least 1")
    if descr.power_rule is None:
        raise PreconditionError("descriptor does not declare a period reindexing rule")
    reindexed = perdim(descr, k_max)
    bound = m * perdim(descr, k_max)
    assert reindexed <= bound
    return reindexed, bound


def perdim_subsystem_le(sub: SymbolicSystemDescriptor, ambient: SymbolicSystemDescriptor,
                        k_max: int) -> bool:
    """Monotonicity check: pointwise-dominated tables give smaller perdim."""
    return perdim(sub, k_max) <= perdim(ambient, k_max)


# -- distinct indices ---------------------------------------------------------

def distinct_indices(period: int | None, offset: int | None, n: int) -> list[int]:
    """2n+1 exponents separating the orbit points of a pair x, y = T^offset x.

    Distinct orbits: 0..2n. Same orbit, aperiodic: multiples of |offset|+1.
    Same orbit, period p > 6n: greedy choice avoiding the three translated
    copies of the chosen set mod p.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    if period is None and offset is None:
        return list(range(2 * n + 1))
    if period is None:
        if offset is None or offset == 0:
            raise PreconditionError("same-orbit case needs a nonzero offset")
        step = abs(offset) + 1
        return [k * step for k in range(2 * n + 1)]
    p = period
    if offset is None:
        raise PreconditionError("periodic same-orbit case needs the offset")
    if p <= 6 * n:
        raise PreconditionError(f"hypothesis violated: period {p} is not above 6n = {6 * n}")
    l = offset % p
    if l == 0:
        raise PreconditionError("offset is a multiple of the period: the points coincide")
    chosen: list[int] = [0]
    while len(chosen) < 2 * n + 1:
        forb = set()
        for i in chosen:
            forb.add(i % p)
            forb.add((i + l) % p)
            forb.add((i - l) % p)
        cand = next(c for c in range(p) if c % p not in forb)
        chosen.append(cand)
    verify_distinct_on_cycle(chosen, p, l)
    return chosen


def verify_distinct_on_cycle(indices: Sequence[int], p: int, l: int) -> None:
    """Replay on the explicit p-cycle with y = T^l x and insist on
    2 * len(indices) pairwise distinct points."""
    pts = {i % p for i in indices} | {(i + l) % p for i in indices}
    if len(pts) != 2 * len(indices):
        raise PreconditionError("index family fails the distinctness replay")


def random_system(rng: Random, cycle_lengths: Sequence[int]) -> FinitePermSystem:
    """Permutation system with the given cycle lengths and shuffled labels."""
    total = sum(cycle_lengths)
    labels = [f"p{i}" for i in range(total)]
    rng.shuffle(labels)
    cycles = []
    pos = 0
    for ln in cycle_lengths:
        cycles.append(labels[pos : pos + ln])
        pos += ln
    return FinitePermSystem.from_cycles(cycles)
