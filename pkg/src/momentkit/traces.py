"""Trace of one Hilbertian seminorm with respect to another.

The trace tr(p/q) is the supremum of sum p(e)^2 over finite q-orthonormal
sets; at finite dimension it is computed as the sum over any complete
q-orthonormal system (basis independence) and is infinite exactly when
ker(q) is not contained in ker(p).  An operator-theoretic cross-check
computes the same number as the trace of the q-whitened p.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch
from .forms import (
    GramForm,
    INFINITE,
    OrthonormalSystem,
    is_infinite,
    kernel_contained,
    restrict_gram,
    whitening_system,
)


class TraceMethod(Enum):
    ORTHONORMAL_SUM = "orthonormal_sum"
    OPERATOR_TRACE = "operator_trace"


@dataclass(frozen=True, eq=False)
class TraceReport:
    """Result of a relative-trace computation.

    ``value`` is a nonnegative float or the INFINITE sentinel;
    ``witness_basis`` is the complete q-orthonormal system summed over
    (None for infinite traces).
    """

    value: object
    witness_basis: OrthonormalSystem | None
    method: TraceMethod

    @property
    def finite(self) -> bool:
        return not is_infinite(self.value)

    def to_jsonable(self) -> dict:
        return {
            "value": "infinite" if is_infinite(self.value) else float(self.value),
            "method": self.method.value,
        }


def trace(p: GramForm, q: GramForm, method: TraceMethod = TraceMethod.ORTHONORMAL_SUM) -> TraceReport:
    """tr(p/q): INFINITE when ker(q) is not contained in ker(p), otherwise
    the sum of p(e)^2 over a complete q-orthonormal system (the whitening
    basis).  The operator method computes trace(W' G_p W) directly, which is
    the same sum rearranged."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    if not kernel_contained(p, q):
        return TraceReport(value=INFINITE, witness_basis=None, method=method)
    basis = whitening_system(q)
    w = basis.matrix
    if method is TraceMethod.OPERATOR_TRACE:
        val = float(np.trace(w.T @ p.gram @ w)) if w.shape[1] else 0.0
    else:
        val = 0.0
        for e in basis.vectors:
            val += float(e @ p.gram @ e)
    return TraceReport(value=max(val, 0.0), witness_basis=basis, method=method)


def trace_value(p: GramForm, q: GramForm):
    """Convenience: just the number (or INFINITE)."""
    return trace(p, q).value


def trace_scaling_check(p: GramForm, q: GramForm, eps: float, delta: float,
                        rel_tol: float = 1e-9) -> bool:
    """Verify tr(eps*p / delta*q) = (eps/delta)^2 tr(p/q) by computing both
    sides independently."""
    base = trace(p, q)
    if not base.finite:
        raise ValueError("trace_scaling_check requires finite tr(p/q)")
    scaled_p = GramForm(p.dim, eps**2 * np.asarray(p.gram), psd_tol=p.psd_tol)
    scaled_q = GramForm(q.dim, delta**2 * np.asarray(q.gram), psd_tol=q.psd_tol)
    lhs = trace(scaled_p, scaled_q).value
    rhs = (eps / delta) ** 2 * base.value
    return bool(abs(lhs - rhs) <= rel_tol * max(abs(rhs), 1e-300))


def trace_restriction_check(p: GramForm, q: GramForm, subspace_vectors,
                            slack: float = 1e-9) -> bool:
    """Verify tr(p|_W / q|_W) <= tr(p/q) for W = span(subspace_vectors)."""
    full = trace(p, q)
    p_w = restrict_gram(p, subspace_vectors)
    q_w = restrict_gram(q, subspace_vectors)
    restricted = trace(p_w, q_w)
    if not restricted.finite:
        # restriction can only stay infinite if the full trace already is
        return not full.finite
    if not full.finite:
        return True
    return bool(restricted.value <= full.value * (1.0 + slack) + slack)


def dominance_check(p: GramForm, q: GramForm, rng=None, n_random: int = 32,
                    slack: float = 1e-9) -> bool:
    """Verify p(v)^2 <= tr(p/q) q(v)^2.

    Checked both spectrally (lambda_max of the q-whitened p is at most the
    trace) and pointwise on the standard basis plus random vectors."""
    rep = trace(p, q)
    if not rep.finite:
        raise ValueError("dominance_check requires finite tr(p/q)")
    tr = rep.value
    w = whitening_system(q).matrix
    if w.shape[1]:
        p_hat = w.T @ p.gram @ w
        lam = float(np.linalg.eigvalsh(0.5 * (p_hat + p_hat.T))[-1])
        if lam > tr * (1.0 + slack) + slack:
            return False
    if rng is None:
        rng = np.random.default_rng(0)
    probes = [np.eye(p.dim)[i] for i in range(p.dim)]
    probes += [rng.standard_normal(p.dim) for _ in range(n_random)]
    for v in probes:
        lhs = float(v @ p.gram @ v)
        rhs = tr * float(v @ q.gram @ v)
        if lhs > rhs * (1.0 + slack) + slack:
            return False
    return True


@dataclass(frozen=True, eq=False)
class SeminormTower:
    """Finite truncation of a directed family of seminorms: diagonal forms
    with entries n^{2k} at level k, so consecutive relative traces are the
    partial sums of sum 1/n^2 (< pi^2/6)."""

    dim: int
    forms: tuple

    def consecutive_traces(self) -> list[float]:
        return [
            trace(self.forms[k], self.forms[k + 1]).value
            for k in range(len(self.forms) - 1)
        ]


def nuclear_tower(dim: int, levels: int) -> SeminormTower:
    """Build the diagonal tower (p_k)_{nn} = n^{2k}, k = 1..levels."""
    if dim < 1 or levels < 2:
        raise ValueError("need dim >= 1 and levels >= 2")
    n = np.arange(1, dim + 1, dtype=float)
    forms = tuple(
        GramForm(dim, np.diag(n ** (2 * k))) for k in range(1, levels + 1)
    )
    return SeminormTower(dim=dim, forms=forms)
