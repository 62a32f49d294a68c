"""The acceptance suite: one callable per criterion, each returning a record
with its pass/fail verdict, details, and elapsed time against the stated
budget. `run_all` drives them in order; the CLI and the test suite both call
into this module so there is a single source of truth for the checks.
"""

from __future__ import annotations

import time
from fractions import Fraction
from random import Random

from . import blocks, cube, dynsys, embed
from .covers import Cover, GroundSet, order
from .rational import fmt

MENGER_EPS = Fraction(1, 10)
MENGER_DELTA = Fraction(1, 20)


def _random_cover(rng: Random, max_points: int = 10) -> Cover:
    npts = rng.randint(2, max_points)
    pts = tuple(f"p{i}" for i in range(npts))
    ground = GroundSet(pts)
    nsets = rng.randint(1, 6)
    named = {}
    for k in range(nsets):
        size = rng.randint(1, npts)
        named[f"U{k}"] = rng.sample(list(pts), size)
    covered = set().union(*map(set, named.values()))
    missing = [p for p in pts if p not in covered]
    if missing:
        named["U_rest"] = missing
    try:
        return Cover.of(ground, named)
    except Exception:
        named["U_all"] = list(pts)
        return Cover.of(ground, named)


def _random_complex(rng: Random, max_vertices: int = 8):
    from .simplicial import AbstractComplex

    nv = rng.randint(1, max_vertices)
    verts = [f"v{i}" for i in range(nv)]
    nfac = rng.randint(1, 6)
    facets = []
    for _ in range(nfac):
        size = rng.randint(1, min(nv, 4))
        facets.append(rng.sample(verts, size))
    return AbstractComplex.of(verts, facets)


def criterion_1(seed: int = 101) -> dict:
    """Nerve dimension equals cover order on random covers."""
    from .simplicial import combinatorial_dimension, nerve

    rng = Random(seed)
    failures = []
    for i in range(50):
        cov = _random_cover(rng)
        if combinatorial_dimension(nerve(cov)) != order(cov):
            failures.append(i)
    return {"passed": not failures, "details": {"covers": 50, "failures": failures}}


def criterion_2(seed: int = 202) -> dict:
    """Star cover order equals combinatorial dimension on random complexes."""
    from .simplicial import combinatorial_dimension, star_cover

    rng = Random(seed)
    failures = []
    for i in range(20):
        cx = _random_complex(rng)
        if order(star_cover(cx)) != combinatorial_dimension(cx):
            failures.append(i)
    return {"passed": not failures, "details": {"complexes": 20, "failures": failures}}


def criterion_3() -> dict:
    """Brick covers witness order n; exhaustive oracles stay at or above n."""
    details = {}
    ok = True
    for n in (1, 2, 3):
        bc = cube.brick_cover(n, Fraction(1, 4))
        o = cube.exact_order(bc)
        f = cube.face_condition(bc)
        m = bc.mesh()
        details[f"brick_n{n}"] = {"order": o, "face": f, "mesh": fmt(m)}
        ok = ok and o == n and f and m <= Fraction(1, 4)
    e1 = cube.exhaustive_min_order(1, 4, 3)
    e2 = cube.exhaustive_min_order(2, 2, 4)
    details["exhaustive_1_grid4"] = e1
    details["exhaustive_2_grid2"] = e2
    ok = ok and e1 == 1 and e2 >= 2
    return {"passed": ok, "details": details}


def witness_fixture() -> cube.BoxCover:
    """Face-condition cover of the bottom slab of the square with order 1:
    the sub-region model on which the fixed-point-freeness construction runs."""
    region = cube.Box.of(["0", "0"], ["1", "1/4"])
    return cube.BoxCover.of(
        2,
        {
            "U1": {"lo": ["0", "0"], "hi": ["2/3", "1/4"]},
            "U2": {"lo": ["1/3", "0"], "hi": ["1", "1/4"]},
        },
        region=region,
    )


def criterion_4(seed: int = 404) -> dict:
    """Witness displacement strictly above 1e-6 on the 64-per-side lattice."""
    fixture = witness_fixture()
    rep = cube.lebesgue_witness(fixture, grid=64, seed=seed)
    ok = rep.min_displacement > 1e-6
    return {
        "passed": ok,
        "details": {
            "min_displacement": rep.min_displacement,
            "lattice_points": rep.lattice_points_evaluated,
        },
    }


def criterion_5() -> dict:
    """Exact stage identities across the four target densities."""
    ok = True
    details = {}
    for r_str in ("1/2", "1/3", "2/3", "7/10"):
        sys = blocks.build(r_str, 5, 2)
        r = Fraction(r_str)
        per = {"stages": sys.built, "a": list(sys.a_seq)}
        prod = Fraction(1)
        for n in range(1, sys.built + 1):
            st = sys.stage(n)
            prod *= Fraction(st.a, st.a + 1)
            ratio = blocks.free_dim_ratio(sys, n)
            ok = ok and ratio == prod
            dens = blocks.index_density(blocks.index_set(sys, n), st.q)
            ok = ok and dens == prod
            prev = sys.stage(n - 1)
            ok = ok and st.pattern.free_cells == prev.pattern.free_cells * (st.q - 2 * st.L) // prev.q
            for k in (1, 7, 100):
                diff = blocks.upper_bound_mdim(sys, n, k) - ratio
                ok = ok and diff == (1 - ratio) / Fraction(k)
        lower = blocks.lower_bound_mdim(sys)
        per["lower"] = fmt(lower)
        per["exact"] = sys.expansion_exhausted()
        ok = ok and sys.expansion_exhausted() and lower == r
        details[r_str] = per
    return {"passed": ok, "details": details}


def criterion_6(seed: int = 606) -> dict:
    """Full probe success at stage 1 of the half-density system."""
    sys = blocks.build("1/2", 1, 2)
    rep = blocks.minimality_probe(sys, 0, trials=100, seed=seed)
    ok = rep.successes == rep.trials == 100 and rep.worst_distance <= rep.threshold
    return {
        "passed": ok,
        "details": {
            "successes": rep.successes,
            "worst_distance": fmt(rep.worst_distance),
            "threshold": fmt(rep.threshold),
        },
    }


def criterion_7(seed: int = 707) -> dict:
    """Markers and the walk's defect separation on random permutation systems."""
    rng = Random(seed)
    failures = 0
    for i in range(100):
        n = rng.choice([2, 3, 5])
        ncyc = rng.randint(1, 4)
        lengths = [rng.randint(n, 5 * n) for _ in range(ncyc)]
        sys = dynsys.random_system(rng, lengths)
        marker = dynsys.find_marker(sys, n)
        if marker is None:
            failures += 1
            continue
        rep = dynsys.rokhlin_property_check(sys, n, marker, marker)
        if not rep.passed:
            failures += 1
    return {"passed": failures == 0, "details": {"systems": 100, "failures": failures}}


def criterion_8(seed: int = 808) -> dict:
    """Distinct-index selections replayed on explicit cycles."""
    rng = Random(seed)
    failures = 0
    for _ in range(200):
        n = rng.randint(1, 4)
        p = rng.randint(6 * n + 1, 6 * n + 40)
        l = rng.randint(1, p - 1)
        idx = dynsys.distinct_indices(p, l, n)
        pts = {i % p for i in idx} | {(i + l) % p for i in idx}
        if len(idx) != 2 * n + 1 or len(pts) != 2 * len(idx):
            failures += 1
    return {"passed": failures == 0, "details": {"trials": 200, "failures": failures}}


def _random_square_pattern(rng: Random, size: int) -> embed.PatternMatrix:
    base = rng.sample(range(1, 40), size)
    rows = [[base[(i + j) % size] for j in range(size)] for i in range(size)]
    return embed.PatternMatrix.of(rows)


def _random_affine_pattern(rng: Random, k: int) -> embed.PatternMatrix:
    rows, cols = 2 * k - 1, 2 * k
    symbols = list(range(1, rows * cols + 1))
    rng.shuffle(symbols)
    grid = [[symbols[i * cols + j] for j in range(cols)] for i in range(rows)]
    # merge a few symbol pairs without sharing a row or column
    for _ in range(rng.randint(0, k)):
        i1, j1 = rng.randrange(rows), rng.randrange(cols)
        i2, j2 = rng.randrange(rows), rng.randrange(cols)
        if i1 != i2 and j1 != j2 and grid[i1][j1] != grid[i2][j2]:
            a, b = grid[i1][j1], grid[i2][j2]
            counts = sum(row.count(a) + row.count(b) for row in grid)
            if counts == 2:
                grid[i2][j2] = a
    return embed.PatternMatrix.of(grid)


def criterion_9(seed: int = 909) -> dict:
    """Zero exact singulars across sampled pattern instantiations, plus the
    symbolic determinant check at small sizes."""
    rng = Random(seed)
    fail_inv = fail_aff = fail_sym = 0
    for i in range(100):
        size = rng.randint(1, 6)
        pat = _random_square_pattern(rng, size)
        rep = embed.pattern_generic_invertibility(pat, 100, seed=rng.randrange(2**32))
        if not rep.all_passed:
            fail_inv += 1
        if size <= 3:
            poly = embed.symbolic_pattern_det(pat)
            if not poly:
                fail_sym += 1
    for i in range(100):
        k = rng.randint(1, 3)
        pat = _random_affine_pattern(rng, k)
        rep = embed.pattern_generic_affine(pat, 100, seed=rng.randrange(2**32))
        if not rep.all_passed:
            fail_aff += 1
    ok = fail_inv == 0 and fail_aff == 0 and fail_sym == 0
    return {
        "passed": ok,
        "details": {
            "invertibility_failures": fail_inv,
            "affine_failures": fail_aff,
            "symbolic_zero_polynomials": fail_sym,
        },
    }


def menger_fixture() -> tuple[embed.PointCloud, Cover, dict]:
    """200 rational points on a segment, an order-1 cover of mesh 2/25, and a
    slowly varying target map into three coordinates."""
    n_pts = 200
    pts = {f"x{i}": [Fraction(i, n_pts - 1)] for i in range(n_pts)}
    cloud = embed.PointCloud.of(pts, metric="sup")
    w = Fraction(2, 25)
    step = w / 2
    named = {}
    k = 0
    lo = Fraction(0)
    while lo < 1:
        members = [f"x{i}" for i in range(n_pts) if lo <= Fraction(i, n_pts - 1) <= lo + w]
        if members:
            named[f"U{k}"] = members
        lo += step
        k += 1
    alpha = Cover.of(GroundSet(tuple(pts.keys())), named)
    f = {name: (coord[0] / 4, Fraction(0), Fraction(0))
         for name, coord in zip(cloud.names, cloud.coords)}
    return cloud, alpha, f


def criterion_10(seed: int = 1010) -> dict:
    """Exact eps-injectivity and delta-closeness of the perturbed map."""
    cloud, alpha, f = menger_fixture()
    g, rep = embed.eps_injective_map(cloud, alpha, f, MENGER_EPS, MENGER_DELTA, m=3, seed=seed)
    ok = rep["deviation_within_delta"] and not rep["violations"] and order(alpha) == 1
    return {"passed": ok, "details": {k: rep[k] for k in ("pairs_checked", "max_deviation")}}


def criterion_11(seed: int = 1111) -> dict:
    """Exact equivariance and injectivity of the alternating sphere map."""
    rep = embed.sphere_demo(142, seed=seed)
    ok = rep.passed and rep.pairs_checked >= 10_000
    return {"passed": ok, "details": rep.to_json()}


def _random_window_sequence(rng: Random, m: int) -> embed.WindowSequence:
    start = rng.randint(-60, 60)
    vals = []
    cur = start
    break_at = rng.choice([None, rng.randint(-3 * m // 2, m // 2 - 2)])
    for i in range(-3 * m // 2, m // 2):
        vals.append(cur)
        cur += 1
        if break_at is not None and i == break_at:
            cur += rng.choice([j for j in range(-2 * m, 2 * m + 1) if j != 0])
    return embed.WindowSequence.of(m, vals)


def criterion_12(seed: int = 1212) -> dict:
    """Window-index finder against the exhaustive oracle."""
    rng = Random(seed)
    failures = 0
    for _ in range(1000):
        m = rng.choice([4, 8, 16])
        seq = _random_window_sequence(rng, m)
        oracle = embed.window_index_oracle(seq)
        try:
            r = embed.find_window_index(seq)
            found = True
        except Exception:
            found = False
        if not found or r not in oracle or not all(embed.window_index_conditions(seq, r)):
            failures += 1
    return {"passed": failures == 0, "details": {"trials": 1000, "failures": failures}}


def criterion_13(seed: int = 1313) -> dict:
    """Periodic-dimension calculators: full-shift values, subsystem
    monotonicity, and the power bound."""
    ok = True
    for d in (1, 2, 3):
        descr = dynsys.SymbolicSystemDescriptor.of(linear_d=d)
        ok = ok and dynsys.perdim(descr, 12) == d
    rng = Random(seed)
    for _ in range(50):
        kmax = rng.randint(1, 10)
        dims = {k: rng.randint(0, 8) for k in rng.sample(range(1, 11), rng.randint(1, 6))}
        ambient = dynsys.SymbolicSystemDescriptor.of(dims)
        sub_dims = {k: rng.randint(0, v) for k, v in dims.items() if rng.random() < 0.8}
        sub = dynsys.SymbolicSystemDescriptor.of(sub_dims)
        if not dynsys.perdim_subsystem_le(sub, ambient, kmax):
            ok = False
        m = rng.randint(1, 4)
        re_val, bound = dynsys.perdim_power_bound(ambient, m, kmax)
        if re_val > bound:
            ok = False
    return {"passed": ok, "details": {"descriptors": 50}}


CRITERIA = [
    ("1", "nerve/order duality", criterion_1, 1.0),
    ("2", "star cover order", criterion_2, 1.0),
    ("3", "cube dimension witnesses", criterion_3, 60.0),
    ("4", "fixed-point-freeness witness", criterion_4, 10.0),
    ("5", "block system exact identities", criterion_5, 30.0),
    ("6", "minimality probe", criterion_6, 30.0),
    ("7", "marker/walk suite", criterion_7, 5.0),
    ("8", "distinct-index selections", criterion_8, 1.0),
    ("9", "generic matrix suite", criterion_9, 30.0),
    ("10", "eps-injective map", criterion_10, 10.0),
    ("11", "sphere demo", criterion_11, 5.0),
    ("12", "window-index finder", criterion_12, 5.0),
    ("13", "perdim calculators", criterion_13, 1.0),
]


def run_one(cid: str) -> dict:
    for c, title, fn, budget in CRITERIA:
        if c == cid:
            t0 = time.perf_counter()
            out = fn()
            elapsed = time.perf_counter() - t0
            return {
                "id": c,
                "title": title,
                "passed": out["passed"],
                "details": out["details"],
                "elapsed_s": round(elapsed, 3),
                "budget_s": budget,
                "within_budget": elapsed < budget,
            }
    raise KeyError(f"no criterion {cid!r}")


def run_all(echo=None) -> list[dict]:
    out = []
    for cid, title, _, _ in CRITERIA:
        rec = run_one(cid)
        out.append(rec)
        if echo is not None:
            status = "PASS" if rec["passed"] else "FAIL"
            echo(f"[{status}] criterion {cid}: {title} ({rec['elapsed_s']}s / {rec['budget_s']}s)")
    return out
