"""Dense non-Hermitian eigensolver used as ground truth for the variational runs.

The pipeline is the textbook one: diagonal balancing, Householder reduction to
upper Hessenberg form, Wilkinson-shifted QR sweeps with deflation for the
eigenvalues, and shifted inverse iteration for the right eigenvectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .liouvillian import LindbladModel, VectorizedLiouvillian, vectorize
from .pauli import CapacityError

ED_DIM_LIMIT = 256
DEGENERACY_TOL = 1e-8
CLUSTER_TOL = 1e-6
MERGE_TOL = 1e-4
_EPS = np.finfo(float).eps


class NumericalError(ArithmeticError):
    pass


class DegenerateSpectrumError(ValueError):
    pass


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray         # descending real part
    right_eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]
    zero_count: int
    gap: float
    tol: float = DEGENERACY_TOL
    n_defective: int = 0            # eigenvalues without an independent eigenvector

    def first_excited(self) -> int:
        nz = np.flatnonzero(np.abs(self.eigenvalues) > self.tol)
        if nz.size == 0:
            raise DegenerateSpectrumError("every eigenvalue is numerically zero")
        return int(nz[0])

    def first_excited_cluster(self, cluster_tol: float = CLUSTER_TOL) -> np.ndarray:
        """Indices of nonzero eigenvalues sharing the real part of the first one."""
        k = self.first_excited()
        re = self.eigenvalues.real
        target = re[k]
        tol = cluster_tol * max(1.0, abs(target))
        mask = (np.abs(re - target) <= tol) & (np.abs(self.eigenvalues) > self.tol)
        return np.flatnonzero(mask)


def balance(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Parlett-Reinsch scaling; returns ``(D^-1 A D, diag(D))``."""
    b = np.array(a, dtype=complex)
    n = b.shape[0]
    d = np.ones(n)
    radix = 2.0
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(b[:, i]).sum() - abs(b[i, i])
            r = np.abs(b[i, :]).sum() - abs(b[i, i])
            if c == 0 or r == 0:
                continue
            s = c + r
            f = 1.0
            g = r / radix
            while c < g:
                f *= radix
                c *= radix ** 2
            g = r * radix
            while c > g:
                f /= radix
                c /= radix ** 2
            if (c + r) / f < 0.95 * s:
                done = False
                d[i] *= f
                b[i, :] /= f
                b[:, i] *= f
    return b, d


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Unitary similarity to upper Hessenberg form via Householder reflectors."""
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0
    return h


def _wilkinson_shift(a, b, c, d):
    tr = a + d
    disc = np.sqrt((a - d) ** 2 / 4 + b * c)
    mu1, mu2 = tr / 2 + disc, tr / 2 - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def hessenberg_qr_eigenvalues(h: np.ndarray, max_sweeps_per_eig: int = 100) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation."""
    h = np.array(h, dtype=complex)
    n = h.shape[0]
    eig = np.empty(n, dtype=complex)
    norm_h = max(np.abs(h).max(), np.finfo(float).tiny)
    hi = n - 1
    sweeps = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub <= _EPS * (abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])) or sub <= _EPS * norm_h:
                h[lo, lo - 1] = 0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            sweeps = 0
            continue
        sweeps += 1
        if sweeps > max_sweeps_per_eig:
            raise NumericalError(f"QR iteration did not converge for eigenvalue {hi}")
        if sweeps % 11 == 10:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        w = h[lo:hi + 1, lo:hi + 1]
        m = w.shape[0]
        w[np.diag_indices(m)] -= mu
        rots = []
        for k in range(m - 1):
            a, b = w[k, k], w[k + 1, k]
            r = np.hypot(abs(a), abs(b))
            if r == 0:
                g = np.eye(2, dtype=complex)
            else:
                g = np.array([[np.conj(a), np.conj(b)], [-b, a]]) / r
            w[k:k + 2, k:] = g @ w[k:k + 2, k:]
            rots.append(g)
        for k, g in enumerate(rots):
            w[:k + 2, k:k + 2] = w[:k + 2, k:k + 2] @ g.conj().T
        w[np.diag_indices(m)] += mu
    return eig


def _inverse_iteration(a, lam, found, rng, n_iter=4):
    n = a.shape[0]
    scale = max(np.abs(a).max(), 1.0)
    shifted = a - (lam + 1e3 * _EPS * scale) * np.eye(n)
    lu = sla.lu_factor(shifted, check_finite=False)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    for _ in range(n_iter):
        for v in found:
            x -= np.vdot(v, x) * v
        x /= np.linalg.norm(x)
        x = sla.lu_solve(lu, x, check_finite=False)
    for v in found:
        x -= np.vdot(v, x) * v
    return x / np.linalg.norm(x)


def _normalize_phase(v):
    v = v / np.linalg.norm(v)
    k = np.argmax(np.abs(v))
    return v * (abs(v[k]) / v[k])


def _clusters(vals, tol):
    """Single-linkage groups of eigenvalues closer than ``tol``."""
    groups: list[list[int]] = []
    for k, lam in enumerate(vals):
        hits = [g for g in groups if np.abs(vals[g] - lam).min() <= tol]
        merged = [k]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(sorted(merged))
    return groups


def eig_dense(a: np.ndarray, residual_tol: float = 1e-8, merge_tol: float = MERGE_TOL):
    """Eigenvalues (descending real part) and unit right eigenvectors of ``a``.

    Eigenvalues closer than ``merge_tol * max(1, |lambda|_max)`` are treated as
    one cluster and share an eigenspace; inverse iteration is orthogonalized
    against the vectors already found for the cluster.  When the eigenspace is
    exhausted before the cluster is (a defective eigenvalue), the cluster's
    eigenvalues are replaced by their mean and its eigenvectors are reused.
    Returns ``(values, vectors, n_defective)``.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    b, d = balance(a)
    vals = hessenberg_qr_eigenvalues(hessenberg(b))
    scale = max(1.0, np.abs(vals).max())
    rng = np.random.default_rng(12345)
    vecs = np.empty((n, n), dtype=complex)
    n_defective = 0
    for members in _clusters(vals, merge_tol * scale):
        center = vals[members].mean() if len(members) > 1 else vals[members[0]]
        basis, eigvecs = [], []
        for _ in members:
            w = _inverse_iteration(b, center, basis, rng)
            v = _normalize_phase(d * w)
            if np.linalg.norm(a @ v - center * v) > residual_tol:
                break
            basis.append(w)
            eigvecs.append(v)
        if not eigvecs:
            raise NumericalError(f"inverse iteration failed for lambda={center:.6g}")
        if len(eigvecs) < len(members):
            n_defective += len(members) - len(eigvecs)
            vals[members] = center
        for j, k in enumerate(members):
            vecs[:, k] = eigvecs[j % len(eigvecs)]
    for k, lam in enumerate(vals):
        res = np.linalg.norm(a @ vecs[:, k] - lam * vecs[:, k])
        if res > residual_tol:
            raise NumericalError(f"eigenpair {k} (lambda={lam:.6g}) has residual {res:.3g}")
    order = np.lexsort((-vals.imag, -np.round(vals.real, 10)))
    return vals[order], vecs[:, order], n_defective


def dense_spectrum(liouv: VectorizedLiouvillian, degeneracy_tol: float = DEGENERACY_TOL,
                   dim_limit: int = ED_DIM_LIMIT) -> SpectralResult:
    dim = 1 << liouv.n_qubits
    if dim > dim_limit:
        raise CapacityError(f"dense dimension {dim} exceeds the ED limit {dim_limit}")
    cached = liouv.__dict__.get("_spectrum")
    if cached is not None and cached.tol == degeneracy_tol:
        return cached
    vals, vecs, n_defective = eig_dense(liouv.to_dense())
    zero = np.abs(vals) <= degeneracy_tol
    nz = np.flatnonzero(~zero)
    gap = float(abs(vals[nz[0]].real)) if nz.size else float("nan")
    result = SpectralResult(vals, vecs, int(zero.sum()), gap, degeneracy_tol, n_defective)
    object.__setattr__(liouv, "_spectrum", result)
    return result


def _as_liouvillian(model) -> VectorizedLiouvillian:
    if isinstance(model, VectorizedLiouvillian):
        return model
    if isinstance(model, LindbladModel):
        return vectorize(model)
    raise TypeError(f"expected a LindbladModel or VectorizedLiouvillian, got {type(model)}")


def exact_gap(model, degeneracy_tol: float = DEGENERACY_TOL) -> tuple[float, int]:
    spec = dense_spectrum(_as_liouvillian(model), degeneracy_tol)
    if spec.zero_count == len(spec.eigenvalues):
        raise DegenerateSpectrumError("every eigenvalue is numerically zero")
    return spec.gap, spec.zero_count


def excited_basis(model, cluster_tol: float = CLUSTER_TOL) -> np.ndarray:
    """Orthonormal basis of the span of the first-excited cluster's eigenvectors."""
    spec = dense_spectrum(_as_liouvillian(model))
    vecs = spec.right_eigenvectors[:, spec.first_excited_cluster(cluster_tol)]
    u, s, _ = np.linalg.svd(vecs, full_matrices=False)
    return u[:, s > 1e-10 * s[0]]


def fidelity_to_excited(psi, model, cluster_tol: float = CLUSTER_TOL) -> float:
    """Squared norm of the projection of ``psi`` onto the first-excited span."""
    psi = np.asarray(psi, dtype=complex)
    q = excited_basis(model, cluster_tol)
    if psi.shape != (q.shape[0],):
        raise ValueError("state does not match the Liouvillian register")
    proj = q.conj().T @ psi
    return float(np.vdot(proj, proj).real / np.vdot(psi, psi).real)
