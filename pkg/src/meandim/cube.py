"""Exact analysis of axis-aligned box covers of the unit cube.

Boxes are closed with rational corners. Orders are computed exactly on the
coordinate arrangement (grid points and open cells between them), coverage is
certified cell by cell, and the staggered brick family witnesses order n at
any mesh. The fixed-point-freeness witness runs the vertex-assignment /
partition-of-unity / radial-projection construction numerically on a lattice,
with the hull-avoiding center certified in exact arithmetic.

A BoxCover may declare a sub-box `region`; coverage and order are then
evaluated over that region. Face conditions always refer to the faces of the
full unit cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from random import Random

from . import linalg
from .errors import BudgetError, InputError, PreconditionError
from .rational import fmt, frac, rand_frac

#: affine-hull avoidance tolerance for the numeric witness center
HULL_DISTANCE_TOL = Fraction(1, 10**9)


@dataclass(frozen=True)
class Box:
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    @staticmethod
    def of(lo, hi) -> "Box":
        lo = tuple(frac(x) for x in lo)
        hi = tuple(frac(x) for x in hi)
        if len(lo) != len(hi):
            raise InputError("box corners have mixed dimensions")
        for a, b in zip(lo, hi):
            if not (0 <= a <= b <= 1):
                raise InputError("box must satisfy 0 <= lo <= hi <= 1 componentwise")
        return Box(lo, hi)

    @property
    def n(self) -> int:
        return len(self.lo)

    def width(self) -> Fraction:
        """Sup-metric diameter: the largest side length."""
        return max((b - a for a, b in zip(self.lo, self.hi)), default=Fraction(0))

    def contains_interval(self, k: int, a: Fraction, b: Fraction) -> bool:
        """Closed k-th side contains [a, b] (a = b for a grid point)."""
        return self.lo[k] <= a and b <= self.hi[k]


def _pieces(values: list[Fraction]) -> list[tuple[Fraction, Fraction]]:
    """Arrangement pieces of a sorted coordinate grid: points and open gaps.

    A piece is (a, a) for the grid point a, or (a, b) for the open interval
    between consecutive grid values; closed-box membership is constant on
    each piece.
    """
    vals = sorted(set(values))
    pieces = []
    for i, v in enumerate(vals):
        pieces.append((v, v))
        if i + 1 < len(vals):
            pieces.append((v, vals[i + 1]))
    return pieces


@dataclass(frozen=True)
class BoxCover:
    """Named closed boxes covering `region` (default: the whole unit cube)."""

    n: int
    boxes: tuple[tuple[str, Box], ...]
    region: Box

    @staticmethod
    def of(n: int, named_boxes, region: Box | None = None) -> "BoxCover":
        if n < 1:
            raise InputError("dimension must be at least 1")
        items = []
        for name, b in dict(named_boxes).items():
            if not isinstance(b, Box):
                b = Box.of(b["lo"], b["hi"])
            if b.n != n:
                raise InputError(f"box {name!r} has dimension {b.n}, expected {n}")
            items.append((name, b))
        if not items:
            raise InputError("a cover needs at least one box")
        if region is None:
            region = Box.of([0] * n, [1] * n)
        if region.n != n:
            raise InputError("region dimension mismatch")
        cover = BoxCover(n, tuple(items), region)
        gap = cover._uncovered_piece()
        if gap is not None:
            raise InputError(f"not a cover: arrangement cell at {tuple(map(fmt, gap))} is uncovered")
        return cover

    def _grids(self) -> list[list[Fraction]]:
        grids = []
        for k in range(self.n):
            vals = {self.region.lo[k], self.region.hi[k]}
            for _, b in self.boxes:
                for v in (b.lo[k], b.hi[k]):
                    if self.region.lo[k] <= v <= self.region.hi[k]:
                        vals.add(v)
            grids.append(sorted(vals))
        return grids

    def _piece_masks(self) -> tuple[list[list[tuple[Fraction, Fraction]]], list[list[int]]]:
        """Per dimension: arrangement pieces and the box bitmask of each piece."""
        grids = self._grids()
        all_pieces, all_masks = [], []
        for k in range(self.n):
            pieces = _pieces(grids[k])
            masks = []
            for a, b in pieces:
                m = 0
                for i, (_, box) in enumerate(self.boxes):
                    if box.contains_interval(k, a, b):
                        m |= 1 << i
                masks.append(m)
            all_pieces.append(pieces)
            all_masks.append(masks)
        return all_pieces, all_masks

    def _uncovered_piece(self):
        pieces, masks = self._piece_masks()
        for combo in product(*(range(len(p)) for p in pieces)):
            m = masks[0][combo[0]]
            for k in range(1, len(combo)):
                m &= masks[k][combo[k]]
            if m == 0:
                return tuple(
                    (pieces[k][i][0] + pieces[k][i][1]) / 2 for k, i in enumerate(combo)
                )
        return None

    def mesh(self) -> Fraction:
        """Sup-metric mesh: the largest box side length."""
        return max(b.width() for _, b in self.boxes)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "boxes": {
                name: {"lo": [fmt(x) for x in b.lo], "hi": [fmt(x) for x in b.hi]}
                for name, b in self.boxes
            },
        }
        unit = Box.of([0] * self.n, [1] * self.n)
        if self.region != unit:
            out["region"] = {
                "lo": [fmt(x) for x in self.region.lo],
                "hi": [fmt(x) for x in self.region.hi],
            }
        return out

    @staticmethod
    def from_json(obj: dict) -> "BoxCover":
        if "n" not in obj or "boxes" not in obj:
            raise InputError("box cover JSON needs 'n' and 'boxes'")
        region = None
        if obj.get("region"):
            region = Box.of(obj["region"]["lo"], obj["region"]["hi"])
        return BoxCover.of(int(obj["n"]), obj["boxes"], region)


def face_condition(c: BoxCover) -> bool:
    """No box touches two opposite faces of the unit cube: never lo_k = 0
    together with hi_k = 1."""
    for _, b in c.boxes:
        for k in range(c.n):
            if b.lo[k] == 0 and b.hi[k] == 1:
                return False
    return True


def exact_order(c: BoxCover) -> int:
    """Exact order of the closed-box cover over its region.

    Multiplicity is constant on every arrangement piece (grid points and the
    open cells between them), so the maximum over all piece products is the
    exact maximum over the region.
    """
    pieces, masks = c._piece_masks()
    best = 0
    for combo in product(*(range(len(p)) for p in pieces)):
        m = masks[0][combo[0]]
        for k in range(1, len(combo)):
            m &= masks[k][combo[k]]
        count = m.bit_count()
        if count > best:
            best = count
    return best - 1


def brick_cover(n: int, eps) -> BoxCover:
    """Staggered bricks of side eps covering the unit cube with order
    exactly n.

    The cut grid of coordinate k is offset by s/2 per step of the next
    index, s/4 per step of the one after, and so on dyadically; grids of
    bricks from different layers then never align, so at most one boundary
    crossing accumulates per dimension and the multiplicity caps at n+1.
    """
    eps = frac(eps)
    if n < 1:
        raise InputError("dimension must be at least 1")
    if not (0 < eps < 1):
        raise InputError("eps must lie strictly between 0 and 1")
    s = eps
    named = {}

    def offset(k: int, partial: dict[int, int]) -> Fraction:
        return s * sum(
            (Fraction(partial[t], 2 ** (t - k)) for t in range(k + 1, n)), Fraction(0)
        )

    # enumerate from the last coordinate inward so offsets are known
    def walk(k: int, partial: dict[int, int]):
        if k < 0:
            idx = tuple(partial[i] for i in range(n))
            lo, hi = [], []
            for kk in range(n):
                a = idx[kk] * s + offset(kk, partial)
                b = a + s
                lo.append(max(Fraction(0), a))
                hi.append(min(Fraction(1), b))
            if all(x < y for x, y in zip(lo, hi)):
                named["B" + "_".join(map(str, idx))] = Box.of(lo, hi)
            return
        off = offset(k, partial)
        i = math.floor(Fraction(0 - off) / s)
        while i * s + off < 1:
            if i * s + off + s > 0:
                walk(k - 1, {**partial, k: i})
            i += 1

    walk(n - 1, {})
    return BoxCover.of(n, named)


def exhaustive_min_order(n: int, grid: int, max_sets: int,
                         ceiling: int = 5_000_000) -> int:
    """Brute-force minimum order over covers by unions of grid cells whose
    members each avoid touching two opposite faces. Oracle-scale only.

    Raises BudgetError when the enumeration would exceed `ceiling` candidate
    families, and PreconditionError when no admissible cover exists.
    """
    if n not in (1, 2):
        raise InputError("exhaustive oracle supports n in {1, 2}")
    if grid < 1 or max_sets < 1:
        raise InputError("grid and max_sets must be positive")
    cells = list(product(range(grid), repeat=n))
    ncells = len(cells)

    def touches(cell, k, side) -> bool:
        return (cell[k] == 0) if side == 0 else (cell[k] == grid - 1)

    admissible = []
    for bits in range(1, 1 << ncells):
        chosen = [cells[i] for i in range(ncells) if bits >> i & 1]
        ok = True
        for k in range(n):
            if any(touches(c, k, 0) for c in chosen) and any(touches(c, k, 1) for c in chosen):
                ok = False
                break
        if ok:
            admissible.append(bits)
    total = sum(math.comb(len(admissible), size) for size in range(1, max_sets + 1))
    if total > ceiling:
        raise BudgetError(f"enumeration of {total} families exceeds the ceiling {ceiling}")

    # arrangement pieces of the uniform grid, per dimension
    gridvals = [Fraction(i, grid) for i in range(grid + 1)]
    pieces = _pieces(gridvals)
    cell_piece = []  # per piece index (1d), bitmask of cells' 1d intervals containing it
    for a, b in pieces:
        m = 0
        for i in range(grid):
            if Fraction(i, grid) <= a and b <= Fraction(i + 1, grid):
                m |= 1 << i
        cell_piece.append(m)

    def member_contains(bits, piece_combo) -> bool:
        # a union of closed cells contains a piece iff one of its cells does
        for i in range(ncells):
            if bits >> i & 1:
                cell = cells[i]
                if all(cell_piece[piece_combo[k]] >> cell[k] & 1 for k in range(n)):
                    return True
        return False

    full = (1 << ncells) - 1
    best = None
    piece_range = range(len(pieces))
    from itertools import combinations as icomb

    for size in range(1, max_sets + 1):
        for family in icomb(admissible, size):
            u = 0
            for bits in family:
                u |= bits
            if u != full:
                continue
            worst = 0
            for combo in product(piece_range, repeat=n):
                mult = sum(1 for bits in family if member_contains(bits, combo))
                if mult > worst:
                    worst = mult
            ord_f = worst - 1
            if best is None or ord_f < best:
                best = ord_f
    if best is None:
        raise PreconditionError("no admissible cover with the face condition exists")
    return best


@dataclass(frozen=True)
class ContradictionReport:
    """Outcome of the numeric fixed-point-freeness witness."""

    n: int
    grid: int
    seed: int
    vertex_assignment: dict
    omega: tuple[Fraction, ...]
    min_hull_distance_sq: Fraction
    lattice_points_evaluated: int
    min_displacement: float
    float_tolerance: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "grid": self.grid,
            "seed": self.seed,
            "vertex_assignment": {k: list(v) for k, v in self.vertex_assignment.items()},
            "omega": [fmt(x) for x in self.omega],
            "min_hull_distance_sq": fmt(self.min_hull_distance_sq),
            "lattice_points_evaluated": self.lattice_points_evaluated,
            "min_displacement": self.min_displacement,
            "float_tolerance": self.float_tolerance,
        }


def _inflate(c: BoxCover) -> tuple[list[tuple[str, Box]], Fraction]:
    """Inflate every box by a quarter of the smallest positive grid gap.

    With that margin the inflated multiplicity at any point never exceeds the
    closed-cover multiplicity at a nearby snapped point, and boxes that
    avoided a cube face still avoid it.
    """
    gaps = []
    for k in range(c.n):
        vals = {Fraction(0), Fraction(1), c.region.lo[k], c.region.hi[k]}
        for _, b in c.boxes:
            vals.add(b.lo[k])
            vals.add(b.hi[k])
        svals = sorted(vals)
        gaps.extend(svals[i + 1] - svals[i] for i in range(len(svals) - 1))
    gap = min(g for g in gaps if g > 0)
    delta = gap / 4
    inflated = []
    for name, b in c.boxes:
        lo = tuple(max(Fraction(0), x - delta) for x in b.lo)
        hi = tuple(min(Fraction(1), x + delta) for x in b.hi)
        inflated.append((name, Box(lo, hi)))
    return inflated, delta


def _dist_to_complement(b: Box, x: tuple[Fraction, ...]) -> Fraction:
    """Sup-metric distance from x to the complement of the open box; zero
    outside."""
    best = None
    for k in range(len(x)):
        d = min(x[k] - b.lo[k], b.hi[k] - x[k])
        if d <= 0:
            return Fraction(0)
        best = d if best is None else min(best, d)
    return best


def lebesgue_witness(c: BoxCover, grid: int, seed: int,
                     omega_budget: int = 200) -> ContradictionReport:
    """Run the vertex-assignment construction on a face-condition cover of
    order < n and report the minimal lattice displacement of the induced
    boundary self-map, a numeric exhibit of fixed-point-freeness.

    Steps: assign to each box the cube vertex opposite to the faces it
    touches; build tent-weight unity weights on slightly inflated boxes; the
    weighted vertex average maps the region into a union of affine hulls of
    at most n vertices, so a generic rational center misses the image
    (certified by exact squared distances to every realizable hull); the
    radial projection from that center then displaces every lattice point by
    a strictly positive amount.
    """
    n = c.n
    if not face_condition(c):
        raise PreconditionError("hypothesis not refutable: face condition fails")
    if exact_order(c) >= n:
        raise PreconditionError("hypothesis not refutable: cover order is not below n")
    if grid < 2:
        raise InputError("grid must be at least 2")

    svec = {}
    for name, b in c.boxes:
        svec[name] = tuple(Fraction(1 if b.lo[k] == 0 else 0) for k in range(n))

    inflated, _ = _inflate(c)

    # supports realizable by the inflated weights: sets of boxes with a
    # common point in the open inflated intersection
    names = [name for name, _ in inflated]
    boxes = dict(inflated)
    supports = []
    for r in range(1, n + 1):
        for group in combinations(names, r):
            lo = [max(boxes[g].lo[k] for g in group) for k in range(n)]
            hi = [min(boxes[g].hi[k] for g in group) for k in range(n)]
            if all(a < b for a, b in zip(lo, hi)):
                supports.append(group)

    rng = Random(seed)
    omega = None
    min_dist = None
    for _ in range(omega_budget):
        cand = tuple(rand_frac(rng) for _ in range(n))
        dists = [
            linalg.affine_hull_distance_sq(cand, [svec[g] for g in group])
            for group in supports
        ]
        worst = min(dists) if dists else Fraction(1)
        if worst > HULL_DISTANCE_TOL * HULL_DISTANCE_TOL:
            omega = cand
            min_dist = worst
            break
    if omega is None:
        raise BudgetError(
            f"no hull-avoiding center found in {omega_budget} samples over "
            f"{len(supports)} affine hulls"
        )

    # lattice sweep in floats; the construction itself stays rational up to phi
    omega_f = tuple(float(x) for x in omega)
    min_disp = None
    evaluated = 0
    axes = [[Fraction(i, grid) for i in range(grid + 1)] for _ in range(n)]
    for pt in product(*axes):
        if any(not (c.region.lo[k] <= pt[k] <= c.region.hi[k]) for k in range(n)):
            continue
        weights = {name: _dist_to_complement(b, pt) for name, b in inflated}
        total = sum(weights.values(), Fraction(0))
        if total == 0:
            continue
        phi = [Fraction(0)] * n
        for name, w in weights.items():
            if w:
                for k in range(n):
                    phi[k] += w * svec[name][k] / total
        evaluated += 1
        x_f = tuple(float(v) for v in pt)
        phi_f = tuple(float(v) for v in phi)
        d = tuple(p - o for p, o in zip(phi_f, omega_f))
        tstar = math.inf
        for k in range(n):
            if d[k] > 0:
                tstar = min(tstar, (1.0 - omega_f[k]) / d[k])
            elif d[k] < 0:
                tstar = min(tstar, (0.0 - omega_f[k]) / d[k])
        if not math.isfinite(tstar):
            # phi(x) = omega is excluded by the certification; guard anyway
            raise BudgetError("degenerate ray: phi(x) coincides with the center")
        psi = tuple(o + tstar * dk for o, dk in zip(omega_f, d))
        disp = max(abs(a - b) for a, b in zip(psi, x_f))
        if min_disp is None or disp < min_disp:
            min_disp = disp
    if evaluated == 0:
        raise PreconditionError("no lattice point carries positive weight")
    return ContradictionReport(
        n=n,
        grid=grid,
        seed=seed,
        vertex_assignment={k: tuple(int(x) for x in v) for k, v in svec.items()},
        omega=omega,
        min_hull_distance_sq=min_dist,
        lattice_points_evaluated=evaluated,
        min_displacement=min_disp,
        float_tolerance=1e-12,
    )
