"""Independent reference computations used to check the production code paths.

Nothing here calls into the code under test except where noted
(the lattice oracle reuses the difference-matrix, PCA and contribution
primitives, which have their own oracles, and re-implements the walk).
"""

import math
import sys
from functools import lru_cache
from itertools import combinations

sys.setrecursionlimit(10000)


# -- DTW ---------------------------------------------------------------------

def dtw_recursive(x, y, window=None):
    """Textbook recursive DTW with squared cost; cells outside ``|i-j| <= window`` are unreachable."""
    x = tuple(float(v) for v in x)
    y = tuple(float(v) for v in y)

    @lru_cache(maxsize=None)
    def acc(i, j):
        if window is not None and abs(i - j) > window:
            return math.inf
        cost = (x[i] - y[j]) ** 2
        if i == 0 and j == 0:
            return cost
        best = math.inf
        if i > 0:
            best = min(best, acc(i - 1, j))
        if j > 0:
            best = min(best, acc(i, j - 1))
        if i > 0 and j > 0:
            best = min(best, acc(i - 1, j - 1))
        return cost + best

    return acc(len(x) - 1, len(y) - 1)


# -- PCA ---------------------------------------------------------------------

def covariance(rows):
    """Feature covariance (features = rows, samples = columns) with the 1/(T-1) estimator."""
    m = len(rows)
    T = len(rows[0])
    means = [sum(r) / T for r in rows]
    cov = [[0.0] * m for _ in range(m)]
    for a in range(m):
        for b in range(a, m):
            s = sum((rows[a][t] - means[a]) * (rows[b][t] - means[b]) for t in range(T))
            cov[a][b] = cov[b][a] = s / (T - 1)
    return cov, means


def jacobi_eigen(matrix, sweeps=100, tol=1e-15):
    """Cyclic Jacobi rotations for a symmetric matrix. Returns (eigenvalues, eigenvectors as columns)."""
    n = len(matrix)
    a = [row[:] for row in matrix]
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for _ in range(sweeps):
        off = sum(a[i][j] ** 2 for i in range(n) for j in range(n) if i != j)
        if off < tol * tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p][q] == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2 * a[p][q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
    return [a[i][i] for i in range(n)], v


def pca_projection(rows):
    """Projection of the T samples onto the leading covariance eigenvector, plus explained variance ratio."""
    rows = [[float(x) for x in r] for r in rows]
    cov, means = covariance(rows)
    vals, vecs = jacobi_eigen(cov)
    lead = max(range(len(vals)), key=lambda i: vals[i])
    axis = [vecs[k][lead] for k in range(len(rows))]
    T = len(rows[0])
    proj = [sum(axis[k] * (rows[k][t] - means[k]) for k in range(len(rows))) for t in range(T)]
    total = sum(max(v, 0.0) for v in vals)
    ratio = 0.0 if total <= 0 else max(vals[lead], 0.0) / total
    return proj, ratio


# -- lattice -----------------------------------------------------------------

def explicit_lattice_walk(window, measure, tie_tol=1e-12):
    """Materialise every subset as a lattice node, weight each superset->subset edge
    by the removed metric's contribution within the superset, then follow the
    heaviest edge (ties to the smallest metric id) from the full set to the empty set."""
    from resprof.degradation import build_difference_matrix, pca_first_component
    from resprof.measures import contribution

    universe = sorted(window.catalog.names)
    nodes = [frozenset(c) for k in range(len(universe) + 1) for c in combinations(universe, k)]
    edges = {}
    for node in nodes:
        if not node:
            continue
        members = sorted(node)
        matrix = build_difference_matrix(window, members)
        pc1 = pca_first_component(matrix)
        edges[node] = {m: contribution(pc1.values, matrix.rows[i], measure) for i, m in enumerate(members)}

    path = []
    node = frozenset(universe)
    while node:
        weights = edges[node]
        top = max(weights.values())
        chosen = sorted(m for m, w in weights.items() if w >= top - tie_tol)[0]
        path.append((chosen, weights[chosen]))
        node = node - {chosen}
    return path
