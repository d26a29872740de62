"""Hilbertian seminorms on finite-dimensional real spaces.

A Hilbertian seminorm is stored as a symmetric positive semidefinite Gram
matrix G; the seminorm is p(v) = sqrt(v' G v) and the associated bilinear
form is <v, w>_p = v' G w.  Everything downstream (traces, Gaussian
measures, graded seminorms on the symmetric algebra) is built on the three
types defined here:

* :class:`GramForm`          -- the seminorm itself,
* :class:`DualFunctional`    -- a linear functional with its operator norm,
* :class:`OrthonormalSystem` -- an ordered p-orthonormal family.

Rank and kernel decisions use a relative eigenvalue cutoff
``psd_tol * lambda_max``; eigenvalues at or below the cutoff count as kernel
(conservative for trace-finiteness checks).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    KernelNotContained,
    NotPSD,
)


class _Infinite:
    """Tagged sentinel for an infinite value (kept distinct from float inf
    so reports stay serializable and comparisons stay explicit)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"


INFINITE = _Infinite()


def is_infinite(x) -> bool:
    return x is INFINITE


def _as_vector(v, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (dim,):
        raise DimensionMismatch(f"expected vector of length {dim}, got shape {v.shape}")
    return v


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Deterministic sign convention for eigenvector columns: the entry of
    largest magnitude is made positive (first such entry on ties)."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))
        if col[k] < 0:
            out[:, j] = -col
    return out


@dataclass(frozen=True, eq=False)
class GramForm:
    """A Hilbertian seminorm p(v) = sqrt(v' gram v) on R^dim."""

    dim: int
    gram: np.ndarray
    psd_tol: float = 1e-10

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=float)
        if g.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"gram must be {self.dim}x{self.dim}, got {g.shape}"
            )
        if not np.allclose(g, g.T, rtol=1e-12, atol=1e-12 * max(1.0, float(np.abs(g).max(initial=0.0)))):
            raise NotPSD("gram matrix is not symmetric")
        g = 0.5 * (g + g.T)  # symmetrize exactly against round-off
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        w = np.linalg.eigvalsh(g)
        lam_max = float(w[-1]) if len(w) else 0.0
        if len(w) and float(w[0]) < -self.psd_tol * max(1.0, lam_max):
            raise NotPSD(
                f"gram has eigenvalue {w[0]:.3e} below -psd_tol*max(1, lam_max)"
            )

    # -- spectral data ----------------------------------------------------

    @cached_property
    def _eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and sign-fixed eigenvectors of gram."""
        w, v = np.linalg.eigh(self.gram)
        return w, _fix_signs(v)

    @property
    def lambda_max(self) -> float:
        w, _ = self._eig
        return max(float(w[-1]), 0.0)

    @property
    def kernel_cutoff(self) -> float:
        """Eigenvalues <= this value count as kernel (ties go to the kernel)."""
        return self.psd_tol * self.lambda_max

    @cached_property
    def _split(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(positive eigenvalues, their vectors, kernel eigenvalues, kernel vectors)."""
        w, v = self._eig
        keep = w > self.kernel_cutoff
        return w[keep], v[:, keep], w[~keep], v[:, ~keep]

    @property
    def rank(self) -> int:
        return int(self._split[0].shape[0])

    # -- evaluation -------------------------------------------------------

    def __call__(self, v) -> float:
        return evaluate(self, v)

    def inner(self, v, w) -> float:
        """Bilinear form <v, w>_p = v' gram w (direct, not via polarization)."""
        v = _as_vector(v, self.dim)
        w = _as_vector(w, self.dim)
        return float(v @ self.gram @ w)

    @cached_property
    def pseudo_inverse(self) -> np.ndarray:
        """Spectral pseudo-inverse of gram (kernel directions dropped)."""
        wp, vp, _, _ = self._split
        if wp.size == 0:
            return np.zeros_like(self.gram)
        out = (vp / wp) @ vp.T
        out.setflags(write=False)
        return out

    def to_jsonable(self) -> list:
        """Row-major nested lists of doubles."""
        return [[float(x) for x in row] for row in self.gram]

    @classmethod
    def from_jsonable(cls, rows, psd_tol: float = 1e-10) -> "GramForm":
        g = np.asarray(rows, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch(f"expected square matrix, got shape {g.shape}")
        return cls(dim=g.shape[0], gram=g, psd_tol=psd_tol)


@dataclass(frozen=True, eq=False)
class DualFunctional:
    """A linear functional ell(v) = coeffs . v on R^dim."""

    dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = _as_vector(self.coeffs, self.dim).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, v) -> float:
        return float(self.coeffs @ _as_vector(v, self.dim))


@dataclass(frozen=True, eq=False)
class OrthonormalSystem:
    """An ordered q-orthonormal family of vectors.

    ``complete`` means the family spans a complement of ker(q); ``dropped``
    records indices of input vectors discarded during orthonormalization.
    """

    form: GramForm
    vectors: tuple
    complete: bool
    dropped: tuple = field(default_factory=tuple)

    def __post_init__(self):
        vecs = tuple(np.asarray(v, dtype=float) for v in self.vectors)
        for v in vecs:
            if v.shape != (self.form.dim,):
                raise DimensionMismatch(
                    f"system vector has shape {v.shape}, expected ({self.form.dim},)"
                )
            v.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        """n x k matrix whose columns are the system vectors."""
        if not self.vectors:
            return np.zeros((self.form.dim, 0))
        return np.column_stack(self.vectors)

    def gram_error(self) -> float:
        """max |<e_i, e_j>_q - delta_ij| over the system."""
        if not self.vectors:
            return 0.0
        m = self.matrix
        g = m.T @ self.form.gram @ m
        return float(np.abs(g - np.eye(len(self))).max())


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def evaluate(p: GramForm, v) -> float:
    """Seminorm value p(v) = sqrt(v' gram v), clamping tiny negative round-off."""
    v = _as_vector(v, p.dim)
    val = float(v @ p.gram @ v)
    if val < 0.0:
        scale = max(1.0, p.lambda_max * float(v @ v))
        if val < -p.psd_tol * scale:
            raise NotPSD(f"quadratic form value {val:.3e} below clamping tolerance")
        val = 0.0
    return float(np.sqrt(val))


def polarize(p: GramForm, v, w) -> float:
    """Recover the bilinear form from the seminorm via the polarization
    identity: <v, w>_p = (p(v+w)^2 - p(v)^2 - p(w)^2) / 2."""
    v = _as_vector(v, p.dim)
    w = _as_vector(w, p.dim)
    return 0.5 * (evaluate(p, v + w) ** 2 - evaluate(p, v) ** 2 - evaluate(p, w) ** 2)


def kernel_basis(p: GramForm) -> list[np.ndarray]:
    """Euclidean-orthonormal basis of ker(gram), by eigenvalue cutoff."""
    _, _, _, vk = p._split
    return [vk[:, j].copy() for j in range(vk.shape[1])]


def kernel_component(q: GramForm, vec) -> float:
    """Euclidean norm of the projection of ``vec`` onto ker(q)."""
    vec = _as_vector(vec, q.dim)
    _, _, _, vk = q._split
    if vk.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(vk.T @ vec))


def is_continuous(q: GramForm, l: DualFunctional, ker_tol: float | None = None) -> bool:
    """Whether ell is q-continuous: coeffs orthogonal to ker(q) within tolerance."""
    if l.dim != q.dim:
        raise DimensionMismatch(f"functional dim {l.dim} != form dim {q.dim}")
    if ker_tol is None:
        ker_tol = 1e-8 * max(1.0, float(np.linalg.norm(l.coeffs)))
    return kernel_component(q, l.coeffs) <= ker_tol


def dual_norm(q: GramForm, l: DualFunctional, ker_tol: float | None = None):
    """Operator seminorm q'(ell) = sup_{q(v)<=1} |ell(v)|.

    Returns INFINITE when ell has a kernel component beyond tolerance,
    otherwise sqrt(coeffs' gram^+ coeffs).
    """
    if l.dim != q.dim:
        raise DimensionMismatch(f"functional dim {l.dim} != form dim {q.dim}")
    if not is_continuous(q, l, ker_tol=ker_tol):
        return INFINITE
    val = float(l.coeffs @ q.pseudo_inverse @ l.coeffs)
    return float(np.sqrt(max(val, 0.0)))


def gram_schmidt(q: GramForm, vectors) -> OrthonormalSystem:
    """q-orthonormalize ``vectors`` (modified Gram-Schmidt in the q-inner
    product).  Vectors whose residual q-norm falls below tolerance are
    dropped; their input indices are reported on the returned system."""
    basis: list[np.ndarray] = []
    dropped: list[int] = []
    drop_scale = q.psd_tol * max(q.lambda_max, 1.0)
    for idx, v in enumerate(vectors):
        r = _as_vector(v, q.dim).copy()
        for _ in range(2):  # one reorthogonalization pass for stability
            for e in basis:
                r = r - q.inner(e, r) * e
        nrm2 = float(r @ q.gram @ r)
        if nrm2 <= drop_scale * max(1.0, float(r @ r)):
            dropped.append(idx)
            continue
        basis.append(r / np.sqrt(nrm2))
    complete = len(basis) == q.rank
    return OrthonormalSystem(
        form=q, vectors=tuple(basis), complete=complete, dropped=tuple(dropped)
    )


def whitening_system(q: GramForm) -> OrthonormalSystem:
    """The complete q-orthonormal system from the eigendecomposition of gram
    (eigenvectors scaled by 1/sqrt(eigenvalue) on the positive part)."""
    wp, vp, _, _ = q._split
    vecs = tuple(vp[:, j] / np.sqrt(wp[j]) for j in range(vp.shape[1]))
    return OrthonormalSystem(form=q, vectors=vecs, complete=True)


def kernel_contained(p: GramForm, q: GramForm) -> bool:
    """Whether ker(q) is contained in ker(p): every kernel vector of q must
    have p-norm^2 at or below psd_tol * lambda_max(p)."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    thresh = p.psd_tol * p.lambda_max
    for v in kernel_basis(q):
        if float(v @ p.gram @ v) > thresh:
            return False
    return True


def simultaneous_diagonalize(p: GramForm, q: GramForm) -> OrthonormalSystem:
    """A complete q-orthonormal system that is also p-orthogonal.

    Obtained by whitening q and eigen-decomposing the whitened p; members
    are ordered by decreasing p-norm.  Requires ker(q) contained in ker(p).
    """
    if not kernel_contained(p, q):
        raise KernelNotContained("a q-null vector has positive p-norm")
    white = whitening_system(q)
    w = white.matrix  # n x r, columns q-orthonormal
    if w.shape[1] == 0:
        return OrthonormalSystem(form=q, vectors=(), complete=True)
    p_hat = w.T @ p.gram @ w
    p_hat = 0.5 * (p_hat + p_hat.T)
    mu, u = np.linalg.eigh(p_hat)
    u = _fix_signs(u)
    order = np.argsort(mu)[::-1]  # decreasing p-norm
    g = w @ u[:, order]
    return OrthonormalSystem(
        form=q, vectors=tuple(g[:, j] for j in range(g.shape[1])), complete=True
    )


def restrict_gram(p: GramForm, basis_vectors) -> GramForm:
    """The form p restricted to span(basis_vectors), expressed in a
    Euclidean-orthonormal basis of that span (choice immaterial for traces)."""
    cols = [_as_vector(v, p.dim) for v in basis_vectors]
    if not cols:
        return GramForm(dim=0, gram=np.zeros((0, 0)), psd_tol=p.psd_tol)
    m = np.column_stack(cols)
    # Euclidean-orthonormal basis of the span via SVD (rank-revealing)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    keep = s > 1e-12 * max(s[0], 1.0) if s.size else np.zeros(0, dtype=bool)
    b = u[:, keep]
    g = b.T @ p.gram @ b
    return GramForm(dim=b.shape[1], gram=0.5 * (g + g.T), psd_tol=p.psd_tol)
