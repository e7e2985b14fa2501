"""Independent numerical oracles shared across the test suite.

Everything in here is deliberately implemented without the package's
autodiff machinery so it can act as a second, independent route.
"""

import numpy as np


def finite_diff_grad(f, x, h=1e-6):
    """Central finite differences of a scalar function of a flat array."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(x)
        flat[i] = orig - h
        fm = f(x)
        flat[i] = orig
        gf[i] = (fp - fm) / (2.0 * h)
    return g


def rel_err(a, b, floor=1e-8):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return np.max(np.abs(a - b) / scale)


def cofactor_det(a):
    """Determinant by cofactor expansion (exponential; small matrices only)."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += ((-1.0) ** j) * a[0, j] * cofactor_det(minor)
    return total


def de_casteljau(points, t):
    """Evaluate a Bezier curve or tensor-product point by repeated lerp."""
    pts = [np.asarray(p, dtype=np.float64) for p in points]
    while len(pts) > 1:
        pts = [(1.0 - t) * pts[i] + t * pts[i + 1] for i in range(len(pts) - 1)]
    return pts[0]


def de_casteljau_surface(grid, u, v):
    """Bicubic patch point via nested de Casteljau (grid: 4x4xD)."""
    grid = np.asarray(grid, dtype=np.float64)
    rows = [de_casteljau(grid[i], v) for i in range(grid.shape[0])]
    return de_casteljau(rows, u)


def monotone_chain_hull(points):
    """Andrew's monotone chain; returns hull vertices counter-clockwise."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=np.float64))))
    if len(pts) <= 2:
        return np.asarray(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1])


def polygon_area(vertices):
    """Shoelace area of a simple polygon."""
    v = np.asarray(vertices, dtype=np.float64)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def point_in_polygon(point, vertices):
    """Even-odd crossing test for a point against a closed polygon."""
    x, y = point
    v = np.asarray(vertices, dtype=np.float64)
    inside = False
    n = len(v)
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


def box_overlap_monte_carlo(c1, d1, c2, d2, n=1_000_000, seed=0):
    """Monte-Carlo estimate of the intersection volume of two boxes."""
    c1, d1 = np.asarray(c1, float), np.asarray(d1, float)
    c2, d2 = np.asarray(c2, float), np.asarray(d2, float)
    lo = np.minimum(c1 - d1 / 2, c2 - d2 / 2)
    hi = np.maximum(c1 + d1 / 2, c2 + d2 / 2)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(n, 3))
    in1 = np.all(np.abs(pts - c1) <= d1 / 2, axis=1)
    in2 = np.all(np.abs(pts - c2) <= d2 / 2, axis=1)
    frac = np.mean(in1 & in2)
    return frac * np.prod(hi - lo)
