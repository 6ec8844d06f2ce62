"""Small dense linear algebra: eigenvalues, linear solves, Lyapunov equations.

The routines target matrices of a few dozen rows. Eigenvalues come from
balancing, Hessenberg reduction by stabilized elementary similarity
transforms, and the Francis double-shift QR iteration, all run on plain
Python floats (faster than numpy dispatch at this size).
"""

import math

import numpy as np

from .errors import ConvergenceError, DimensionError, InstabilityError, SingularMatrixError

_EPS = np.finfo(float).eps
_MAX_ITS = 30  # QR sweeps allowed per eigenvalue


def _as_square(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError(f"{name} has non-finite entries")
    return m


def _balance(a, n):
    # Parlett-Reinsch scaling by powers of two; a similarity transform, so exact.
    radix = 2.0
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            r = c = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j][i])
                    r += abs(a[i][j])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                g = 1.0 / f
                row = a[i]
                for j in range(n):
                    row[j] *= g
                for j in range(n):
                    a[j][i] *= f


def _hessenberg(a, n):
    # Gaussian elimination with pivoting, applied as a similarity transform.
    for m in range(1, n - 1):
        x = 0.0
        i = m
        for j in range(m, n):
            if abs(a[j][m - 1]) > abs(x):
                x = a[j][m - 1]
                i = j
        if i != m:
            a[i], a[m] = a[m], a[i]
            for row in a:
                row[i], row[m] = row[m], row[i]
        if x != 0.0:
            am = a[m]
            for i in range(m + 1, n):
                y = a[i][m - 1]
                if y != 0.0:
                    y /= x
                    ai = a[i]
                    ai[m - 1] = 0.0
                    for j in range(m, n):
                        ai[j] -= y * am[j]
                    for row in a:
                        row[m] += y * row[i]
    for i in range(2, n):
        for j in range(i - 1):
            a[i][j] = 0.0


def _hqr(a, n):
    """Eigenvalues of an upper Hessenberg matrix (destroyed on return)."""
    wr = [0.0] * n
    wi = [0.0] * n
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i][j])
    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1][l - 1]) + abs(a[l][l])
                if s == 0.0:
                    s = anorm
                if abs(a[l][l - 1]) <= _EPS * s:
                    a[l][l - 1] = 0.0
                    break
                l -= 1
            x = a[nn][nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1][nn - 1]
            w = a[nn][nn - 1] * a[nn - 1][nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if its == _MAX_ITS:
                raise ConvergenceError(
                    f"QR iteration did not converge after {_MAX_ITS} sweeps"
                )
            if its == 10 or its == 20:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i][i] -= x
                s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m][m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1]
                q = a[m + 1][m + 1] - z - r - s
                r = a[m + 2][m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m][m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]))
                if u <= _EPS * v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i][i - 2] = 0.0
                if i != m + 2:
                    a[i][i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k][k - 1]
                    q = a[k + 1][k - 1]
                    r = a[k + 2][k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k][k - 1] = -a[k][k - 1]
                else:
                    a[k][k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                ak, ak1 = a[k], a[k + 1]
                last = k == nn - 1
                ak2 = None if last else a[k + 2]
                for j in range(k, nn + 1):
                    p = ak[j] + q * ak1[j]
                    if not last:
                        p += r * ak2[j]
                        ak2[j] -= p * z
                    ak1[j] -= p * y
                    ak[j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    ai = a[i]
                    p = x * ai[k] + y * ai[k + 1]
                    if not last:
                        p += z * ai[k + 2]
                        ai[k + 2] -= p * r
                    ai[k + 1] -= p * q
                    ai[k] -= p
    return [complex(re, im) for re, im in zip(wr, wi)]


def eigenvalues_general(m):
    """All eigenvalues of a real square matrix, with multiplicity.

    Parameters
    ----------
    m : array_like, shape (n, n)

    Returns
    -------
    list of complex
        Unordered eigenvalues. Complex ones come in exact conjugate pairs.

    Raises
    ------
    DimensionError
        For non-square or non-finite input.
    ConvergenceError
        If the QR iteration stalls.
    """
    m = _as_square(m)
    n = m.shape[0]
    if n == 0:
        return []
    a = m.tolist()
    _balance(a, n)
    _hessenberg(a, n)
    return _hqr(a, n)


def solve_linear(m, rhs):
    """Solve ``m @ x = rhs`` by LU decomposition with partial pivoting."""
    a = _as_square(m).copy()
    b = np.array(rhs, dtype=float)
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionError(f"rhs has length {b.shape[0]}, matrix is {n}x{n}")
    scale = np.abs(a).max() if n else 0.0
    tiny = n * _EPS * scale
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        pivot = a[piv, k]
        if abs(pivot) <= tiny:
            raise SingularMatrixError(
                f"matrix is singular to working precision (pivot {abs(pivot):.3e} at column {k})",
                pivot=abs(pivot),
            )
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        f = a[k + 1:, k] / pivot
        a[k + 1:, k + 1:] -= np.outer(f, a[k, k + 1:])
        b[k + 1:] -= f * b[k]
    x = np.empty_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def lyapunov_solve(a, d):
    """Solve ``a @ V + V @ a.T + d = 0`` for symmetric ``V``.

    The equation is vectorized column-major as
    ``(I kron a + a kron I) vec(V) = -vec(d)`` and solved directly, so the cost
    grows as ``n**6``; fine for the 6x6 systems used here.

    Raises
    ------
    InstabilityError
        When the vectorized operator is singular, which happens when two
        eigenvalues of ``a`` sum to zero (in particular for marginally stable
        or unstable ``a``).
    """
    a = _as_square(a, "a")
    d = _as_square(d, "d")
    n = a.shape[0]
    if d.shape[0] != n:
        raise DimensionError(f"a is {n}x{n} but d is {d.shape[0]}x{d.shape[0]}")
    eye = np.eye(n)
    op = np.kron(eye, a) + np.kron(a, eye)
    try:
        x = solve_linear(op, -d.reshape(-1, order="F"))
    except SingularMatrixError as exc:
        raise InstabilityError(f"Lyapunov operator is singular: {exc}") from exc
    v = x.reshape((n, n), order="F")
    return 0.5 * (v + v.T)


def lyapunov_residual(a, v, d):
    """Relative Frobenius residual of the Lyapunov equation."""
    r = a @ v + v @ a.T + d
    scale = np.linalg.norm(a) * np.linalg.norm(v) + np.linalg.norm(d)
    return float(np.linalg.norm(r) / scale) if scale > 0 else float(np.linalg.norm(r))
