"""Independent oracles shared by the test modules."""
import numpy as np


def central_difference(f, x, coords=None, h=1e-6):
    """Central finite differences of scalar ``f`` at ``x``.

    ``coords`` is an iterable of index tuples; all coordinates by default.
    Returns an array aligned with ``coords``.
    """
    x = np.array(x, dtype=np.float64)
    coords = list(np.ndindex(x.shape)) if coords is None else list(coords)
    out = np.empty(len(coords))
    for k, idx in enumerate(coords):
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h
        xm[idx] -= h
        out[k] = (f(xp) - f(xm)) / (2 * h)
    return out


def random_coords(shape, count, rng):
    total = int(np.prod(shape))
    picks = rng.choice(total, size=min(count, total), replace=False)
    return [np.unravel_index(p, shape) for p in picks]


def rel_error(a, b):
    a = np.ravel(a)
    b = np.ravel(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b) / scale)


def selection_gap(points, largest=True):
    """Smallest gap, over rows, between the best and second-best pairwise
    cosine (brute force). Small gaps mean a min/max selection is near a tie."""
    p = np.asarray(points, dtype=np.float64)
    u = p / np.linalg.norm(p, axis=1, keepdims=True)
    n = len(u)
    gaps = []
    for i in range(n):
        cos = sorted((float(u[i] @ u[j]) for j in range(n) if j != i), reverse=largest)
        if len(cos) > 1:
            gaps.append(abs(cos[0] - cos[1]))
    return min(gaps) if gaps else np.inf


def regular_polygon(n):
    t = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(t), np.sin(t)])
