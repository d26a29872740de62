"""Gaussian measures attached to a Hilbertian seminorm.

The measure is realized through a whitening matrix W whose columns form a
complete q-orthonormal system; samples are v = W z with z standard normal,
so the q-coordinates of a sample are i.i.d. N(0,1).  Monte-Carlo estimators
partition the sample index space into contiguous blocks, one counter-based
Philox substream per block, and merge block results in fixed order — the
result is bit-identical for a given (seed, samples, streams) regardless of
scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import (
    HypothesisUnverifiable,
    KernelNotContained,
    NotInScope,
    SingularForm,
    ZeroNormDirection,
)
from .forms import (
    DualFunctional,
    GramForm,
    INFINITE,
    dual_norm,
    is_infinite,
    kernel_basis,
    whitening_system,
)
from .moments import DiscreteMeasure
from .traces import trace_value


@dataclass(frozen=True, eq=False)
class McConfig:
    """Identical (seed, samples, streams) yields bit-identical estimates."""

    seed: int
    samples: int
    streams: int = 1

    def __post_init__(self):
        if self.samples <= 0 or self.streams <= 0:
            raise ValueError("samples and streams must be positive")

    def block_counts(self) -> list[int]:
        base, rem = divmod(self.samples, self.streams)
        return [base + (1 if b < rem else 0) for b in range(self.streams)]


def _block_rng(seed: int, block_id: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block_id,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class GaussianMeasure:
    """Gaussian measure with covariance the inverse Gram of q (on the
    quotient by ker q when requested)."""

    q: GramForm
    whitening: np.ndarray  # (dim, rank), columns a complete q-orthonormal system

    @classmethod
    def from_form(cls, q: GramForm, quotient: bool = False) -> "GaussianMeasure":
        if q.rank < q.dim and not quotient:
            raise SingularForm(
                f"q has kernel of dimension {q.dim - q.rank}; pass quotient=True"
            )
        w = whitening_system(q).matrix
        w = w.copy()
        w.setflags(write=False)
        return cls(q=q, whitening=w)

    @property
    def rank(self) -> int:
        return self.whitening.shape[1]


def sample(gamma: GaussianMeasure, cfg: McConfig) -> np.ndarray:
    """All samples as an array of shape (samples, dim), deterministic."""
    blocks = []
    for b, count in enumerate(cfg.block_counts()):
        if count == 0:
            continue
        z = _block_rng(cfg.seed, b).standard_normal((count, gamma.rank))
        blocks.append(z @ gamma.whitening.T)
    return np.vstack(blocks)


def _mc_mean(gamma: GaussianMeasure, cfg: McConfig, per_sample) -> tuple:
    """Streaming mean/stderr of per_sample(z_block) merged in block order."""
    total = 0.0
    total_sq = 0.0
    n = 0
    for b, count in enumerate(cfg.block_counts()):
        if count == 0:
            continue
        z = _block_rng(cfg.seed, b).standard_normal((count, gamma.rank))
        vals = np.asarray(per_sample(z), dtype=float)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        n += count
    mean = total / n
    var = max(total_sq - n * mean * mean, 0.0) / max(n - 1, 1)
    return mean, float(np.sqrt(var / n))


@dataclass(frozen=True, eq=False)
class McReport:
    estimate: float
    stderr: float
    bound: float
    certified: bool
    seed: int

    def to_jsonable(self) -> dict:
        return {
            "estimate": float(self.estimate),
            "stderr": float(self.stderr),
            "bound": float(self.bound),
            "certified": bool(self.certified),
            "seed": int(self.seed),
        }


def second_moment_check(gamma: GaussianMeasure, w, cfg: McConfig) -> McReport:
    """MC estimate of the integral of <v, w>_q^2, which equals 1 exactly for
    q(w) = 1 (w is normalized internally)."""
    w = np.asarray(w, dtype=float)
    nrm = gamma.q(w)
    if nrm <= 0.0:
        raise ZeroNormDirection("q(w) = 0: direction lies in the kernel")
    w = w / nrm
    u = gamma.whitening.T @ (gamma.q.gram @ w)  # <Wz, w>_q = z . u
    est, stderr = _mc_mean(gamma, cfg, lambda z: (z @ u) ** 2)
    return McReport(
        estimate=est,
        stderr=stderr,
        bound=1.0,
        certified=bool(abs(est - 1.0) <= 4.0 * stderr),
        seed=cfg.seed,
    )


@dataclass(frozen=True, eq=False)
class TailReport:
    exact: float
    bound: float
    dual_norm_value: float
    ok: bool

    def to_jsonable(self) -> dict:
        return {
            "exact": float(self.exact),
            "bound": float(self.bound),
            "dual_norm": float(self.dual_norm_value),
            "certified": bool(self.ok),
        }


def tail_lower_bound_check(gamma: GaussianMeasure, l: DualFunctional) -> TailReport:
    """gamma(|l(v)| > 1) = 2(1 - Phi(1/q'(l))) for l(v) ~ N(0, q'(l)^2);
    must be >= 1/7 whenever q'(l) >= 1."""
    qp = dual_norm(gamma.q, l)
    if is_infinite(qp):
        exact = 1.0
        qp_val = float("inf")
    else:
        if qp < 1.0:
            raise NotInScope(f"dual norm {qp} < 1: hypothesis fails")
        exact = float(2.0 * norm.sf(1.0 / qp))
        qp_val = float(qp)
    return TailReport(
        exact=exact, bound=1.0 / 7.0, dual_norm_value=qp_val, ok=bool(exact >= 1.0 / 7.0)
    )


@dataclass(frozen=True, eq=False)
class ChebyshevReport:
    mc: float
    stderr: float
    bound: float
    certified: bool
    seed: int

    def to_jsonable(self) -> dict:
        return {
            "estimate": float(self.mc),
            "stderr": float(self.stderr),
            "bound": float(self.bound),
            "certified": bool(self.certified),
            "seed": int(self.seed),
        }


def chebyshev_outside_ball(
    gamma: GaussianMeasure, p: GramForm, delta: float, cfg: McConfig
) -> ChebyshevReport:
    """MC estimate of gamma(p(v) > delta) against the Chebyshev-type bound
    delta^{-2} tr(p/q)."""
    tr = trace_value(p, gamma.q)
    if is_infinite(tr):
        raise KernelNotContained("tr(p/q) is infinite")
    a = gamma.whitening.T @ p.gram @ gamma.whitening
    est, _ = _mc_mean(
        gamma, cfg, lambda z: (np.einsum("ij,jk,ik->i", z, a, z) > delta**2).astype(float)
    )
    n = cfg.samples
    stderr = float(np.sqrt(max(est * (1.0 - est), 0.0) / n))
    bound = tr / delta**2
    return ChebyshevReport(
        mc=est,
        stderr=stderr,
        bound=bound,
        certified=bool(est <= bound + 4.0 * stderr),
        seed=cfg.seed,
    )


@dataclass(frozen=True, eq=False)
class FundamentalLemmaReport:
    """Record of the quantitative concentration lemma for a discrete measure
    mu on dual vectors: if sup over the p-ball of radius delta of the
    mu-mean of l(v)^2 is at most epsilon, then the mu-mass of the closed
    unit q-dual ball is at least 1 - 7(epsilon + tr(p/(delta q)))."""

    sup_quadratic: object  # float or INFINITE
    epsilon: float
    hypothesis_certified: bool
    mass_in_unit_dual_ball: float
    trace_term: float
    bound: float
    conclusion_ok: object  # bool, or None when the hypothesis fails

    def to_jsonable(self) -> dict:
        sup = self.sup_quadratic
        return {
            "sup_quadratic": "infinite" if is_infinite(sup) else float(sup),
            "epsilon": float(self.epsilon),
            "hypothesis_certified": bool(self.hypothesis_certified),
            "mass": float(self.mass_in_unit_dual_ball),
            "trace_term": float(self.trace_term),
            "bound": float(self.bound),
            "conclusion_ok": self.conclusion_ok,
        }


def fundamental_lemma_check(
    mu: DiscreteMeasure,
    p: GramForm,
    q: GramForm,
    epsilon: float,
    delta: float,
    cert_slack: float = 1e-9,
    require_certificate: bool = False,
) -> FundamentalLemmaReport:
    """The atoms of mu are coefficient vectors of dual functionals.

    (a) certifies the hypothesis exactly through the sufficient criterion
        sup_{p(v) <= delta} sum_j w_j l_j(v)^2 <= epsilon, computed as
        delta^2 lambda_max of the second-moment matrix whitened by p
        (infinite when the second-moment matrix is nonzero on ker p);
    (b) computes the mu-mass of the closed unit q-dual ball atom by atom;
    (c) the conclusion mass >= 1 - 7(epsilon + tr(p/q)/delta^2) is asserted
        only when (a) is certified.
    """
    tr = trace_value(p, q)
    if is_infinite(tr):
        raise KernelNotContained("tr(p/q) is infinite")
    m = np.einsum("j,ji,jk->ik", mu.weights, mu.atoms, mu.atoms)

    ker = kernel_basis(p)
    sup: object
    if ker:
        k = np.column_stack(ker)
        leak = np.abs(m @ k).max() if k.size else 0.0
        scale = max(1.0, float(np.abs(m).max()))
        sup = INFINITE if leak > 1e-12 * scale else None
    else:
        sup = None
    if sup is None:
        w = whitening_system(p).matrix
        b = w.T @ m @ w
        lam = float(np.linalg.eigvalsh(b)[-1]) if b.size else 0.0
        sup = delta**2 * max(lam, 0.0)

    certified = (not is_infinite(sup)) and sup <= epsilon * (1.0 + cert_slack) + 1e-15
    if require_certificate and not certified:
        raise HypothesisUnverifiable(
            f"sufficient criterion gives {sup}, exceeds epsilon = {epsilon}"
        )

    mass = 0.0
    for atom, wgt in zip(mu.atoms, mu.weights):
        nd = dual_norm(q, DualFunctional(dim=q.dim, coeffs=atom))
        if not is_infinite(nd) and nd <= 1.0 + 1e-9:
            mass += wgt

    trace_term = tr / delta**2
    bound = 1.0 - 7.0 * (epsilon + trace_term)
    conclusion = bool(mass >= bound - 1e-12) if certified else None
    return FundamentalLemmaReport(
        sup_quadratic=sup,
        epsilon=epsilon,
        hypothesis_certified=bool(certified),
        mass_in_unit_dual_ball=float(mass),
        trace_term=float(trace_term),
        bound=float(bound),
        conclusion_ok=conclusion,
    )
