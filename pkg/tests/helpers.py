"""Dense reference constructions shared by the tests."""
import csv
import io
from pathlib import Path

import numpy as np


def dense_superoperator(h, jumps):
    """Reference Liouvillian built from dense Kronecker products (column-major vec)."""
    d = h.shape[0]
    eye = np.eye(d)
    sup = -1j * np.kron(eye, h) + 1j * np.kron(h.T, eye)
    for g, lj in jumps:
        ldl = lj.conj().T @ lj
        sup += g * (np.kron(lj.conj(), lj) - 0.5 * np.kron(eye, ldl) - 0.5 * np.kron(ldl.T, eye))
    return sup


X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])
I2 = np.eye(2, dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|


def site_op(op, site, n):
    """``op`` on ``site`` of an ``n``-qubit register, qubit 0 least significant."""
    out = np.eye(1, dtype=complex)
    for q in range(n - 1, -1, -1):
        out = np.kron(out, op if q == site else I2)
    return out


def dense_xxz(n, jz, gamma, jump="lowering"):
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for j in range(n - 1):
        for p, c in ((X, 1.0), (Y, 1.0), (Z, jz)):
            h += c * site_op(p, j, n) @ site_op(p, j + 1, n)
    l = SIGMA_MINUS if jump == "lowering" else Z
    return h, [(gamma, site_op(l, j, n)) for j in range(n)]


def read_csv(path):
    """``(comment lines, header line, rows)`` of a CLI output file."""
    lines = Path(path).read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    header = next(l for l in lines if not l.startswith("#"))
    return meta, header, rows
