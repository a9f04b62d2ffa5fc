"""Complex-weighted sums of multi-qubit Pauli strings.

A string is stored as two integer bitmasks ``x`` and ``z`` (bit ``k`` belongs to
qubit ``k``).  The string with masks ``(x, z)`` denotes the operator

    i^{|x & z|} X^x Z^z

so that a qubit with both bits set carries ``Y = iXZ``.  Labels are written with
qubit 0 first, e.g. ``"XIZ"`` is X on qubit 0 and Z on qubit 2.  Dense matrices
use qubit 0 as the least significant bit of the basis index.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

DROP_TOL = 1e-12
DENSE_LIMIT = 12

_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LABEL = {v: k for k, v in _LABEL_BITS.items()}
_PHASES = (1, 1j, -1, -1j)


class DimensionError(ValueError):
    """Operands live on different numbers of qubits."""


class CapacityError(MemoryError):
    """A dense representation would exceed the configured size limit."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=False)
class PauliString:
    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("bitmask wider than n_qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for k, ch in enumerate(label.upper()):
            try:
                bx, bz = _LABEL_BITS[ch]
            except KeyError:
                raise ValueError(f"unknown Pauli label {ch!r} in {label!r}") from None
            x |= bx << k
            z |= bz << k
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, label: str) -> "PauliString":
        bx, bz = _LABEL_BITS[label.upper()]
        return cls(n_qubits, bx << qubit, bz << qubit)

    @property
    def label(self) -> str:
        return "".join(
            _BITS_LABEL[((self.x >> k) & 1, (self.z >> k) & 1)]
            for k in range(self.n_qubits)
        )

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    def __str__(self):
        return self.label

    def __repr__(self):
        return f"PauliString({self.label!r})"

    def sort_key(self):
        return self.label

    def tensor(self, other: "PauliString") -> "PauliString":
        """``self`` on the low qubits, ``other`` on the qubits above them."""
        n = self.n_qubits
        return PauliString(n + other.n_qubits, self.x | (other.x << n), self.z | (other.z << n))

    def action(self):
        """Return ``(src, phase)`` with ``(P psi)[c] = phase[c] * psi[src[c]]``."""
        idx = np.arange(1 << self.n_qubits)
        src = idx ^ self.x
        parity = _parity(src & self.z)
        phase = _PHASES[self.y_count % 4] * (1 - 2 * parity)
        return src, phase.astype(complex)


def _parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    p = np.zeros_like(v)
    while np.any(v):
        p ^= v & 1
        v >>= 1
    return p


def multiply(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """Product of two strings as ``(phase, R)`` with ``P Q = phase * R``."""
    if p.n_qubits != q.n_qubits:
        raise DimensionError(f"{p.n_qubits} vs {q.n_qubits} qubits")
    # (X^a Z^b)(X^c Z^d) = (-1)^{|b & c|} X^{a^c} Z^{b^d}
    x, z = p.x ^ q.x, p.z ^ q.z
    k = p.y_count + q.y_count + 2 * _popcount(p.z & q.x) - _popcount(x & z)
    return _PHASES[k % 4], PauliString(p.n_qubits, x, z)


class PauliSum:
    """Immutable sum of ``coefficient * PauliString`` terms on a fixed qubit count."""

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: Iterable[tuple[complex, PauliString]] = ()):
        terms = tuple((complex(c), s) for c, s in terms)
        for _, s in terms:
            if s.n_qubits != n_qubits:
                raise DimensionError(f"term {s} does not act on {n_qubits} qubits")
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("PauliSum is immutable")

    # construction helpers

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [(coeff, PauliString(n_qubits))])

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliSum":
        s = PauliString.from_label(label)
        return cls(s.n_qubits, [(coeff, s)])

    @classmethod
    def single(cls, n_qubits: int, qubit: int, label: str, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [(coeff, PauliString.single(n_qubits, qubit, label))])

    @classmethod
    def lowering(cls, n_qubits: int, qubit: int) -> "PauliSum":
        """``|1><0|`` on one qubit, i.e. ``(X - iY) / 2``."""
        return cls(n_qubits, [
            (0.5, PauliString.single(n_qubits, qubit, "X")),
            (-0.5j, PauliString.single(n_qubits, qubit, "Y")),
        ])

    # text notation: one "(re,im) LABEL" term per line or separated by ';'

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        pattern = re.compile(r"^\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)\s*([IXYZixyz]+)$")
        terms = []
        for chunk in re.split(r"[;\n]", text):
            chunk = chunk.strip()
            if not chunk:
                continue
            m = pattern.match(chunk)
            if m is None:
                raise ValueError(f"cannot parse Pauli term {chunk!r}; expected '(re,im) LABEL'")
            s = PauliString.from_label(m.group(3))
            terms.append((complex(float(m.group(1)), float(m.group(2))), s))
        if n_qubits is None:
            if not terms:
                raise ValueError("empty operator text needs an explicit qubit count")
            n_qubits = terms[0][1].n_qubits
        return cls(n_qubits, terms)

    def to_text(self) -> str:
        return "\n".join(f"({c.real!r},{c.imag!r}) {s.label}" for c, s in self.terms)

    # container protocol

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        body = " + ".join(f"({c:.6g}){s.label}" for c, s in self.terms) or "0"
        return f"PauliSum[{self.n_qubits}]({body})"

    def _check(self, other: "PauliSum"):
        if self.n_qubits != other.n_qubits:
            raise DimensionError(f"{self.n_qubits} vs {other.n_qubits} qubits")

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        self._check(other)
        return PauliSum(self.n_qubits, self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, ((factor * c, s) for c, s in self.terms))

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            return sum_multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    def tensor(self, other: "PauliSum") -> "PauliSum":
        """Kronecker product with ``self`` on the low register."""
        return PauliSum(
            self.n_qubits + other.n_qubits,
            ((a * b, s.tensor(t)) for a, s in self.terms for b, t in other.terms),
        ).collect()

    def collect(self, drop_tol: float = DROP_TOL) -> "PauliSum":
        return collect(self, drop_tol)

    def adjoint(self) -> "PauliSum":
        return unary_transform(self, "adjoint")

    def transpose(self) -> "PauliSum":
        return unary_transform(self, "transpose")

    def conjugate(self) -> "PauliSum":
        return unary_transform(self, "conjugate")

    def one_norm(self) -> float:
        return one_norm(self)

    def to_dense(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        return to_dense(self, limit)

    def to_sparse(self) -> sp.csr_matrix:
        dim = 1 << self.n_qubits
        if not self.terms:
            return sp.csr_matrix((dim, dim), dtype=complex)
        rows, cols, vals = [], [], []
        idx = np.arange(dim)
        for c, s in self.terms:
            src, phase = s.action()
            rows.append(idx)
            cols.append(src)
            vals.append(c * phase)
        m = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        )
        m.sum_duplicates()
        return m

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return len((self - self.adjoint()).collect(tol)) == 0


def sum_multiply(a: PauliSum, b: PauliSum) -> PauliSum:
    a._check(b)
    terms = []
    for ca, sa in a.terms:
        for cb, sb in b.terms:
            phase, s = multiply(sa, sb)
            terms.append((ca * cb * phase, s))
    return collect(PauliSum(a.n_qubits, terms))


def unary_transform(a: PauliSum, mode: str) -> PauliSum:
    """Adjoint, transpose or complex conjugate, term by term.

    X and Z are real symmetric; Y is imaginary antisymmetric, so each Y factor
    flips sign under transpose and under conjugation.
    """
    if mode == "adjoint":
        terms = ((c.conjugate(), s) for c, s in a.terms)
    elif mode == "transpose":
        terms = ((c * (-1) ** s.y_count, s) for c, s in a.terms)
    elif mode == "conjugate":
        terms = ((c.conjugate() * (-1) ** s.y_count, s) for c, s in a.terms)
    else:
        raise ValueError(f"unknown transform {mode!r}")
    return PauliSum(a.n_qubits, terms)


def collect(a: PauliSum, drop_tol: float = DROP_TOL) -> PauliSum:
    """Merge duplicate strings, drop small coefficients, sort canonically."""
    if drop_tol < 0:
        raise ValueError("drop_tol must be non-negative")
    acc: dict[PauliString, complex] = {}
    for c, s in a.terms:
        acc[s] = acc.get(s, 0j) + c
    kept = sorted(
        ((c, s) for s, c in acc.items() if abs(c) > drop_tol),
        key=lambda t: t[1].sort_key(),
    )
    return PauliSum(a.n_qubits, kept)


def one_norm(a: PauliSum) -> float:
    return float(sum(abs(c) for c, _ in a.terms))


def to_dense(a: PauliSum, limit: int = DENSE_LIMIT) -> np.ndarray:
    n = a.n_qubits
    if n > limit:
        raise CapacityError(f"{n} qubits exceeds the dense limit of {limit}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for c, s in a.terms:
        src, phase = s.action()
        out[idx, src] += c * phase
    return out


def apply(a: PauliSum, psi: np.ndarray) -> np.ndarray:
    """``A |psi>`` by signed permutations, one per term."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (1 << a.n_qubits,):
        raise DimensionError(f"state of length {psi.shape} on {a.n_qubits} qubits")
    out = np.zeros_like(psi)
    for c, s in a.terms:
        src, phase = s.action()
        out += c * phase * psi[src]
    return out
