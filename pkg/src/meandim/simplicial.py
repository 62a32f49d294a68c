"""Abstract and geometric simplicial complexes.

Complexes are stored by their facets (maximal simplexes) with the full
simplex set derived by downward closure. The geometric side keeps exact
rational vertex coordinates; all mesh quantities are exact SQUARED
distances, so comparisons against a rational epsilon never leave Q.

Provided here: combinatorial dimension, the nerve of a cover, geometric
realization on the standard basis, open-star covers evaluated on barycenter
ground sets, barycentric subdivision with its m/(m+1) mesh contraction, and
the subdivide-until-fine star-cover bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from . import linalg
from .covers import Cover, GroundSet
from .errors import InputError, PreconditionError
from .rational import fmt, frac


@dataclass(frozen=True)
class AbstractComplex:
    """Vertex set plus facets in canonical form (no facet inside another)."""

    vertices: tuple[str, ...]
    facets: tuple[frozenset[str], ...]

    @staticmethod
    def of(vertices, facets) -> "AbstractComplex":
        verts = tuple(str(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise InputError("duplicate vertices")
        vset = set(verts)
        fs = {frozenset(str(v) for v in f) for f in facets}
        fs.discard(frozenset())
        for f in fs:
            if not f <= vset:
                raise InputError(f"facet {sorted(f)} uses unknown vertices")
        # canonical form: drop facets contained in other facets, add lone vertices
        maximal = {f for f in fs if not any(f < g for g in fs if g is not f)}
        covered = set().union(*maximal) if maximal else set()
        for v in vset - covered:
            maximal.add(frozenset([v]))
        ordered = tuple(sorted(maximal, key=lambda f: (len(f), sorted(f))))
        return AbstractComplex(verts, ordered)

    def simplexes(self) -> set[frozenset[str]]:
        """All nonempty simplexes (downward closure of the facets)."""
        out: set[frozenset[str]] = set()
        for f in self.facets:
            elems = sorted(f)
            for k in range(1, len(elems) + 1):
                for sub in combinations(elems, k):
                    out.add(frozenset(sub))
        return out

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "facets": [sorted(f) for f in self.facets],
        }

    @staticmethod
    def from_json(obj: dict) -> "AbstractComplex":
        if "vertices" not in obj or "facets" not in obj:
            raise InputError("complex JSON needs 'vertices' and 'facets'")
        return AbstractComplex.of(obj["vertices"], obj["facets"])


@dataclass(frozen=True)
class GeometricComplex:
    """Abstract complex realized with exact rational coordinates.

    Every simplex's vertex set must be affinely independent (checked at
    construction by exact rank). With `strict=True` the pairwise intersection
    condition (two simplexes meet in a common face) is also certified via
    exact LP feasibility on each facet pair.
    """

    abstract: AbstractComplex
    coords: tuple[tuple[str, tuple[Fraction, ...]], ...]

    @staticmethod
    def of(abstract: AbstractComplex, coords, strict: bool = False) -> "GeometricComplex":
        table = {str(v): tuple(Fraction(c) for c in pts) for v, pts in dict(coords).items()}
        missing = [v for v in abstract.vertices if v not in table]
        if missing:
            raise InputError(f"coordinates missing for vertices {missing}")
        dims = {len(c) for c in table.values()}
        if len(dims) > 1:
            raise InputError("coordinate vectors have mixed lengths")
        for f in abstract.facets:
            if not linalg.is_affinely_independent([table[v] for v in sorted(f)]):
                raise InputError(f"facet {sorted(f)} is affinely degenerate")
        g = GeometricComplex(abstract, tuple((v, table[v]) for v in abstract.vertices))
        if strict:
            bad = g._intersection_violations()
            if bad:
                raise InputError(f"simplex pairs violate the intersection condition: {bad[:3]}")
        return g

    def coord(self, v: str) -> tuple[Fraction, ...]:
        for name, c in self.coords:
            if name == v:
                return c
        raise InputError(f"unknown vertex {v!r}")

    def _intersection_violations(self) -> list[tuple]:
        """Facet pairs whose convex hulls meet outside their common face.

        A point of conv(S) cap conv(S') decomposes uniquely in each simplex's
        barycentric coordinates; the pair intersects properly iff no vertex
        outside the shared set can carry positive weight in the intersection.
        Each check is one exact LP maximizing that weight.
        """
        bad = []
        facets = list(self.abstract.facets)
        for a, b in combinations(facets, 2):
            sa, sb = sorted(a), sorted(b)
            shared = a & b
            dim = len(self.coords[0][1])
            nvars = len(sa) + len(sb)
            a_eq, b_eq = [], []
            for k in range(dim):
                row = [self.coord(v)[k] for v in sa] + [-self.coord(v)[k] for v in sb]
                a_eq.append(row)
                b_eq.append(Fraction(0))
            a_eq.append([Fraction(1)] * len(sa) + [Fraction(0)] * len(sb))
            b_eq.append(Fraction(1))
            a_eq.append([Fraction(0)] * len(sa) + [Fraction(1)] * len(sb))
            b_eq.append(Fraction(1))
            for idx, v in enumerate(sa + sb):
                side_shared = v in shared
                if side_shared:
                    continue
                objective = [Fraction(0)] * nvars
                objective[idx] = Fraction(1)
                status, value, _ = linalg.lp_max(objective, a_eq, b_eq)
                if status == "optimal" and value > 0:
                    bad.append((sa, sb, v))
                    break
                if status == "infeasible":
                    break  # hulls disjoint: fine when no shared face either
            if not shared:
                # hulls must not meet at all
                objective = [Fraction(0)] * nvars
                status, _, _ = linalg.lp_max(objective, a_eq, b_eq)
                if status == "optimal":
                    bad.append((sa, sb, None))
        return bad


def combinatorial_dimension(c: AbstractComplex) -> int:
    """Largest simplex cardinality minus one."""
    if not c.facets:
        raise PreconditionError("empty complex has no dimension")
    return max(len(f) for f in c.facets) - 1


def nerve(family: Cover) -> AbstractComplex:
    """Complex on the member names; a set of names spans a simplex iff the
    members have a common point. Its combinatorial dimension equals the
    cover's order."""
    names = family.names()
    if not names:
        raise PreconditionError("empty family has no nerve")
    sets = dict(family.sets)
    facets = []
    for p in family.ground.points:
        holder = frozenset(n for n in names if p in sets[n])
        facets.append(holder)
    return AbstractComplex.of(names, facets)


def realize(c: AbstractComplex) -> GeometricComplex:
    """Geometric realization on the standard basis of R^n, n = vertex count."""
    n = len(c.vertices)
    coords = {}
    for i, v in enumerate(c.vertices):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        coords[v] = tuple(e)
    return GeometricComplex.of(c, coords)


def barycenter_id(simplex: frozenset[str]) -> str:
    return "b(" + ",".join(sorted(simplex)) + ")"


def star_cover(c: AbstractComplex, metric_coords=None, metric_limit: int = 400) -> Cover:
    """Open-star cover evaluated on one barycenter point per simplex.

    The barycenter of a simplex lies exactly in the stars of that simplex's
    vertices, so the maximal multiplicity is attained at a top facet's
    barycenter and the cover order equals the combinatorial dimension.
    When `metric_coords` (vertex -> rational vector) is given and the ground
    stays within `metric_limit` points, the ground carries the table of
    exact squared Euclidean distances between barycenters (a quadratic-size
    object, hence the cap).
    """
    if not c.facets:
        raise PreconditionError("empty complex has no star cover")
    simplexes = sorted(c.simplexes(), key=lambda s: (len(s), sorted(s)))
    ids = [barycenter_id(s) for s in simplexes]
    metric = None
    if metric_coords is not None and len(simplexes) <= metric_limit:
        table = {str(v): tuple(Fraction(x) for x in pt) for v, pt in dict(metric_coords).items()}
        centers = []
        for s in simplexes:
            pts = [table[v] for v in sorted(s)]
            k = Fraction(1, len(pts))
            centers.append(tuple(sum(col, Fraction(0)) * k for col in zip(*pts)))
        metric = tuple(
            tuple(linalg.sq_norm(linalg.vsub(a, b)) for b in centers) for a in centers
        )
    ground = GroundSet(tuple(ids), metric)
    named = {
        f"star_{v}": [barycenter_id(s) for s in simplexes if v in s]
        for v in c.vertices
        if any(v in s for s in simplexes)
    }
    return Cover.of(ground, named)


def _chain_facets(c: AbstractComplex) -> set[frozenset[frozenset[str]]]:
    """Facets of the barycentric subdivision: maximal chains of faces,
    each chain given as a set of input simplexes."""
    out: set[frozenset[frozenset[str]]] = set()
    for f in c.facets:
        elems = sorted(f)
        for perm in permutations(elems):
            out.add(frozenset(frozenset(perm[: k + 1]) for k in range(len(perm))))
    return out


def barycentric_subdivide(g: GeometricComplex, relabel: bool = True) -> GeometricComplex:
    """One barycentric subdivision: same support, same combinatorial
    dimension, one vertex per simplex of the input, and squared mesh
    contracting by at least (m/(m+1))^2.

    With `relabel` (the default) the barycenter vertices get short sequential
    names, which keeps iterated subdivision from growing identifier strings
    exponentially; coordinates are the exact barycenters either way.
    """
    simplexes = sorted(g.abstract.simplexes(), key=lambda s: (len(s), sorted(s)))
    names = {
        s: (f"s{i}" if relabel else barycenter_id(s)) for i, s in enumerate(simplexes)
    }
    coords = {}
    for s in simplexes:
        pts = [g.coord(v) for v in sorted(s)]
        k = Fraction(1, len(pts))
        coords[names[s]] = tuple(sum(col, Fraction(0)) * k for col in zip(*pts))
    facets = {frozenset(names[s] for s in chain) for chain in _chain_facets(g.abstract)}
    abstract = AbstractComplex.of(list(coords.keys()), facets)
    return GeometricComplex.of(abstract, coords)


def mesh_sq(g: GeometricComplex) -> Fraction:
    """Exact squared mesh: max over facets of max pairwise squared vertex
    distance (vertex pairs realize the diameter of a convex simplex)."""
    worst = Fraction(0)
    for f in g.abstract.facets:
        pts = [g.coord(v) for v in sorted(f)]
        for a, b in combinations(pts, 2):
            d = linalg.sq_norm(linalg.vsub(a, b))
            if d > worst:
                worst = d
    return worst


def mesh_geometric(g: GeometricComplex) -> float:
    """Float mesh (square root of the exact squared mesh)."""
    return float(mesh_sq(g)) ** 0.5


def dim_upper_via_stars(g: GeometricComplex, eps: Fraction) -> tuple[int, Cover]:
    """Subdivide until twice the mesh is at most eps, then return the star
    cover together with its order (= combinatorial dimension).

    The returned cover's ground metric holds squared distances, so its mesh
    value compares against eps*eps. Termination is guaranteed by the
    m/(m+1) contraction of barycentric subdivision.
    """
    eps = frac(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    current = g
    # squared comparison: (2 mesh)^2 <= eps^2
    while 4 * mesh_sq(current) > eps * eps:
        current = barycentric_subdivide(current)
    cover = star_cover(current.abstract, dict(current.coords))
    return combinatorial_dimension(current.abstract), cover


def geometric_to_json(g: GeometricComplex) -> dict:
    out = g.abstract.to_json()
    out["coords"] = {v: [fmt(x) for x in c] for v, c in g.coords}
    return out


def geometric_from_json(obj: dict, strict: bool = False) -> GeometricComplex:
    abstract = AbstractComplex.from_json(obj)
    if "coords" not in obj or obj["coords"] is None:
        raise InputError("geometric complex JSON needs 'coords'")
    coords = {v: tuple(frac(x) for x in vec) for v, vec in obj["coords"].items()}
    return GeometricComplex.of(abstract, coords, strict=strict)
