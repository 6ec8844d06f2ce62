"""Entanglement of Gaussian states from their covariance matrices.

Conventions: quadratures are ordered (X1, Y1, X2, Y2, ...), with
X = (a + a^dag)/sqrt(2), so the vacuum covariance matrix is I/2 and a
physical state has every symplectic eigenvalue >= 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DomainError, NumericalDegeneracyError, PhysicalityError
from .linalg import eigenvalues_general

SYMMETRY_TOL = 1e-10
PHYSICALITY_TOL = 1e-8
PAIRING_TOL = 1e-8
MONOGAMY_FLOOR = 1e-9
TRIPARTITE_THRESHOLD = 1e-6


def symplectic_form(n_modes):
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric ``2n x 2n`` covariance matrix with one label per mode."""

    matrix: np.ndarray
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise DomainError(f"covariance matrix must be 2n x 2n, got {m.shape}")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > SYMMETRY_TOL * scale:
            raise DomainError("covariance matrix is not symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        labels = tuple(self.labels) or tuple(str(i) for i in range(m.shape[0] // 2))
        if len(labels) != m.shape[0] // 2:
            raise DomainError(f"{len(labels)} labels for {m.shape[0] // 2} modes")
        object.__setattr__(self, "labels", labels)

    @property
    def n_modes(self):
        return self.matrix.shape[0] // 2

    def index(self, label):
        return self.labels.index(label)

    def uncertainty_min_eigenvalue(self):
        """Smallest eigenvalue of ``V + (i/2) Omega``; negative means unphysical."""
        herm = self.matrix + 0.5j * symplectic_form(self.n_modes)
        return float(np.linalg.eigvalsh(herm)[0])

    def is_physical(self, tol=PHYSICALITY_TOL):
        # squeezed states may have sub-vacuum variances, so only this test applies
        return self.uncertainty_min_eigenvalue() >= -tol


@dataclass(frozen=True)
class ModePartition:
    """Bipartition ``side_one | side_two`` with a single mode on side one."""

    side_one: int
    side_two: Tuple[int, ...]

    def __post_init__(self):
        two = (self.side_two,) if isinstance(self.side_two, int) else tuple(self.side_two)
        object.__setattr__(self, "side_two", two)
        if not 1 <= len(two) <= 2:
            raise DomainError("side_two must hold one or two modes")
        if len(set(two) | {self.side_one}) != len(two) + 1:
            raise DomainError("partition modes must be distinct")

    @property
    def modes(self):
        return tuple(sorted((self.side_one,) + self.side_two))


def _check_modes(v: CovarianceMatrix, modes):
    for k in modes:
        if not 0 <= k < v.n_modes:
            raise DomainError(f"mode index {k} out of range for {v.n_modes} modes")


def reduce_modes(v: CovarianceMatrix, keep: Sequence[int]) -> CovarianceMatrix:
    """Covariance matrix of the kept modes, in the order given."""
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep):
        raise DomainError("keep must be a nonempty set of distinct modes")
    _check_modes(v, keep)
    idx = [q for k in keep for q in (2 * k, 2 * k + 1)]
    return CovarianceMatrix(v.matrix[np.ix_(idx, idx)], tuple(v.labels[k] for k in keep))


def partial_transpose(v: CovarianceMatrix, transposed_mode: int) -> CovarianceMatrix:
    """Flip the sign of the Y quadrature of one mode (``P V P``)."""
    _check_modes(v, [transposed_mode])
    signs = np.ones(2 * v.n_modes)
    signs[2 * transposed_mode + 1] = -1.0
    return CovarianceMatrix(v.matrix * np.outer(signs, signs), v.labels)


def symplectic_eigenvalues(v: CovarianceMatrix):
    """Symplectic spectrum, ascending, one value per mode.

    The eigenvalues of ``Omega V`` are ``+-i nu_j``; each conjugate pair is
    collapsed to a single ``nu_j``.
    """
    m = v.matrix
    omega_v = np.empty_like(m)
    # Omega V without a matmul: swap rows of each mode block and negate the second
    omega_v[0::2] = m[1::2]
    omega_v[1::2] = -m[0::2]
    nus = sorted(abs(e.imag) for e in eigenvalues_general(omega_v))
    out = []
    for lo, hi in zip(nus[0::2], nus[1::2]):
        if hi - lo > PAIRING_TOL * max(1.0, hi):
            raise NumericalDegeneracyError(
                f"symplectic eigenvalues do not pair up: {lo!r} vs {hi!r}"
            )
        out.append(0.5 * (lo + hi))
    return out


def _bipartite_cm(v: CovarianceMatrix, part: ModePartition):
    _check_modes(v, part.modes)
    if v.n_modes != len(part.modes):
        v = reduce_modes(v, part.modes)
        focus = part.modes.index(part.side_one)
    else:
        focus = part.side_one
    return v, focus


def log_negativity(v: CovarianceMatrix, part: ModePartition, check=True) -> float:
    """Logarithmic negativity ``max(0, -ln(2 nu_min))`` across ``part``.

    ``v`` may hold more modes than the partition; the extra ones are traced out.
    """
    v, focus = _bipartite_cm(v, part)
    if check and not v.is_physical():
        raise PhysicalityError("covariance matrix violates the uncertainty principle")
    nu_min = symplectic_eigenvalues(partial_transpose(v, focus))[0]
    if nu_min <= 0:
        raise PhysicalityError("partially transposed state has a zero symplectic eigenvalue")
    return max(0.0, -math.log(2.0 * nu_min))


def contangle(v: CovarianceMatrix, part: ModePartition, check=True) -> float:
    """Squared logarithmic negativity."""
    return log_negativity(v, part, check) ** 2


def residual_contangle(v: CovarianceMatrix, focus: int, check=True) -> float:
    """``C_{i|jk} - C_{i|j} - C_{i|k}`` for a three-mode state with focus mode ``i``."""
    if v.n_modes != 3:
        raise DomainError("residual contangle needs exactly three modes")
    _check_modes(v, [focus])
    if check and not v.is_physical():
        raise PhysicalityError("covariance matrix violates the uncertainty principle")
    j, k = (x for x in range(3) if x != focus)
    whole = contangle(v, ModePartition(focus, (j, k)), check=False)
    return (
        whole
        - contangle(v, ModePartition(focus, (j,)), check=False)
        - contangle(v, ModePartition(focus, (k,)), check=False)
    )


def residual_contangles(v: CovarianceMatrix, check=True):
    """Raw residual contangles for the three focus choices, in mode order."""
    if v.n_modes != 3:
        raise DomainError("residual contangle needs exactly three modes")
    if check and not v.is_physical():
        raise PhysicalityError("covariance matrix violates the uncertainty principle")
    pair = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        pair[i, j] = pair[j, i] = contangle(v, ModePartition(i, (j,)), check=False)
    out = []
    for i in range(3):
        j, k = (x for x in range(3) if x != i)
        out.append(contangle(v, ModePartition(i, (j, k)), check=False) - pair[i, j] - pair[i, k])
    return out


def clamp_residual(r_min, floor=MONOGAMY_FLOOR):
    """Zero out round-off negatives; larger negatives are returned untouched."""
    return 0.0 if -floor <= r_min < 0 else r_min


def min_residual_contangle(v: CovarianceMatrix, check=True) -> float:
    """Minimum residual contangle over the three focus modes.

    Values within ``MONOGAMY_FLOOR`` below zero are reported as 0. Larger
    negatives are returned unclamped: squared log-negativity of a mixed state
    is not guaranteed to be monogamous, and some steady states do violate it.
    """
    return clamp_residual(min(residual_contangles(v, check)))


def is_genuinely_tripartite(r_min, threshold=TRIPARTITE_THRESHOLD):
    return r_min > threshold
