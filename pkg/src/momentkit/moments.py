"""Moment functionals on the truncated symmetric algebra.

A MomentFunctional stores moments by multi-index up to a hard degree and
acts linearly on AlgebraElements.  Construction from a discrete measure is
exact.  Positivity is certified through moment and localizing matrices;
continuity of the restriction to a graded slice is measured against the
graded seminorms of :mod:`momentkit.symalg`.  Carleman-type diagnostics run
in log space so that double-factorial growth at cutoff 200 stays finite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import (
    DegreeOverflow,
    DimensionMismatch,
    NegativeEvenMoment,
    NotSquarePositive,
)
from .forms import GramForm, INFINITE, OrthonormalSystem, is_infinite
from .symalg import (
    AlgebraElement,
    Character,
    _reference_basis,
    evaluate_character,
    gradlex_key,
    multiply,
    power,
    slice_monomials,
)


def monomials_up_to(dim: int, degree: int) -> list[tuple]:
    """All multi-indices of total degree <= degree, graded-lex order."""
    out = []
    for d in range(degree + 1):
        out.extend(slice_monomials(dim, d))
    return out


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported probability measure on R^dim."""

    dim: int
    atoms: np.ndarray  # shape (k, dim)
    weights: np.ndarray  # shape (k,), nonnegative, sums to 1

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float)).copy()
        weights = np.asarray(self.weights, dtype=float).copy()
        if atoms.shape != (len(weights), self.dim):
            raise DimensionMismatch(
                f"atoms shape {atoms.shape} vs {len(weights)} weights in dim {self.dim}"
            )
        if np.any(weights < -1e-14):
            raise ValueError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {weights.sum()}, expected 1")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def support(self) -> np.ndarray:
        """Atoms carrying strictly positive weight."""
        return self.atoms[self.weights > 0]

    def moment(self, alpha) -> float:
        alpha = tuple(int(k) for k in alpha)
        vals = np.ones(len(self.weights))
        for i, e in enumerate(alpha):
            if e:
                vals *= self.atoms[:, i] ** e
        return float(self.weights @ vals)

    def integrate(self, a: AlgebraElement) -> float:
        if a.dim != self.dim:
            raise DimensionMismatch(f"element dim {a.dim} != measure dim {self.dim}")
        return float(
            sum(
                w * evaluate_character(Character(point=atom), a)
                for atom, w in zip(self.atoms, self.weights)
            )
        )

    def to_jsonable(self) -> dict:
        return {
            "atoms": [list(map(float, a)) for a in self.atoms],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "DiscreteMeasure":
        atoms = np.atleast_2d(np.asarray(data["atoms"], dtype=float))
        return cls(dim=atoms.shape[1], atoms=atoms, weights=np.asarray(data["weights"]))


@dataclass(frozen=True, eq=False)
class QuadraticModuleSpec:
    """Finite generator list g_1..g_m (g_0 = 1 implicit); the represented
    nonnegativity set is K = {c : g_i(c) >= 0 for all i}."""

    generators: tuple

    def contains(self, point, tol: float = 1e-12) -> bool:
        ch = Character(point=np.asarray(point, dtype=float))
        return all(evaluate_character(ch, g) >= -tol for g in self.generators)

    def atoms_inside(self, nu: DiscreteMeasure, tol: float = 1e-12) -> bool:
        return all(self.contains(atom, tol) for atom in nu.support)


# ---------------------------------------------------------------------------
# Moment functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MomentFunctional:
    """Linear functional on the degree-truncated algebra, stored as a sparse
    multi-index -> moment map (absent entries are zero)."""

    dim: int
    max_degree: int
    moments: dict = field(default_factory=dict)
    source: DiscreteMeasure | None = None

    def __post_init__(self):
        clean = {}
        for alpha, v in self.moments.items():
            a = tuple(int(k) for k in alpha)
            if len(a) != self.dim or any(k < 0 for k in a):
                raise DimensionMismatch(f"bad multi-index {alpha}")
            if sum(a) > self.max_degree:
                raise DegreeOverflow(f"moment index {a} beyond degree {self.max_degree}")
            if v != 0.0:
                clean[a] = float(v)
        zero = (0,) * self.dim
        if abs(clean.get(zero, 0.0) - 1.0) > 1e-9:
            raise ValueError(f"L(1) = {clean.get(zero, 0.0)}, expected 1")
        object.__setattr__(self, "moments", clean)

    def moment(self, alpha) -> float:
        a = tuple(int(k) for k in alpha)
        if sum(a) > self.max_degree:
            raise DegreeOverflow(f"moment of degree {sum(a)} not stored")
        return self.moments.get(a, 0.0)

    def __call__(self, a: AlgebraElement) -> float:
        if a.dim != self.dim:
            raise DimensionMismatch(f"element dim {a.dim} != functional dim {self.dim}")
        if a.degree() > self.max_degree:
            raise DegreeOverflow(
                f"element degree {a.degree()} exceeds stored degree {self.max_degree}"
            )
        return float(sum(c * self.moments.get(alpha, 0.0) for alpha, c in a.terms.items()))

    def extend(self, new_max_degree: int) -> "MomentFunctional":
        """Recompute to a higher degree from the source measure."""
        if new_max_degree <= self.max_degree:
            return self
        if self.source is None:
            raise DegreeOverflow(
                "cannot extend a functional without a source measure"
            )
        return from_measure(self.source, new_max_degree)

    def to_jsonable(self) -> dict:
        ordered = sorted(self.moments.items(), key=lambda kv: gradlex_key(kv[0]))
        return {
            "dim": self.dim,
            "max_degree": self.max_degree,
            "moments": [{"alpha": list(a), "value": float(v)} for a, v in ordered],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "MomentFunctional":
        moments = {tuple(e["alpha"]): e["value"] for e in data["moments"]}
        return cls(dim=data["dim"], max_degree=data["max_degree"], moments=moments)


def from_measure(nu: DiscreteMeasure, max_degree: int) -> MomentFunctional:
    """moments[alpha] = sum_j w_j atom_j^alpha, exactly as floating sums."""
    moments = {}
    for alpha in monomials_up_to(nu.dim, max_degree):
        moments[alpha] = nu.moment(alpha)
    return MomentFunctional(
        dim=nu.dim, max_degree=max_degree, moments=moments, source=nu
    )


def _abs_scale(L: MomentFunctional, a: AlgebraElement) -> float:
    """Magnitude scale of L(a^2) used for clamping tolerances."""
    total = 1.0
    for alpha, ca in a.terms.items():
        for beta, cb in a.terms.items():
            gamma = tuple(x + y for x, y in zip(alpha, beta))
            total += abs(ca * cb * L.moments.get(gamma, 0.0))
    return total


def s_L(L: MomentFunctional, a: AlgebraElement, tol: float = 1e-9) -> float:
    """The seminorm s_L(a) = sqrt(L(a^2)); clamps tiny negatives, raises
    NotSquarePositive when L(a^2) is negative beyond tolerance."""
    val = L(multiply(a, a))
    if val < 0.0:
        if val < -tol * _abs_scale(L, a):
            raise NotSquarePositive(f"L(a^2) = {val} < 0")
        val = 0.0
    return float(np.sqrt(val))


def moment_matrix(L: MomentFunctional, d: int) -> np.ndarray:
    """M[alpha, beta] = moments[alpha + beta] over monomials of degree <= d
    (graded-lex order; see :func:`monomials_up_to`)."""
    if 2 * d > L.max_degree:
        raise DegreeOverflow(f"moment matrix needs degree {2 * d} > {L.max_degree}")
    basis = monomials_up_to(L.dim, d)
    m = np.empty((len(basis), len(basis)))
    for i, alpha in enumerate(basis):
        for j in range(i, len(basis)):
            beta = basis[j]
            gamma = tuple(x + y for x, y in zip(alpha, beta))
            m[i, j] = m[j, i] = L.moments.get(gamma, 0.0)
    return m


def localizing_matrix(L: MomentFunctional, g: AlgebraElement, d: int) -> np.ndarray:
    """M_g[alpha, beta] = L(g * x^(alpha+beta)) over monomials of degree <= d."""
    if 2 * d + g.degree() > L.max_degree:
        raise DegreeOverflow(
            f"localizing matrix needs degree {2 * d + g.degree()} > {L.max_degree}"
        )
    basis = monomials_up_to(L.dim, d)
    m = np.empty((len(basis), len(basis)))
    for i, alpha in enumerate(basis):
        for j in range(i, len(basis)):
            beta = basis[j]
            gamma = tuple(x + y for x, y in zip(alpha, beta))
            val = 0.0
            for idx, c in g.terms.items():
                shifted = tuple(x + y for x, y in zip(idx, gamma))
                val += c * L.moments.get(shifted, 0.0)
            m[i, j] = m[j, i] = val
    return m


def psd_within(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    w = np.linalg.eigvalsh(matrix)
    scale = max(1.0, abs(w[-1]))
    return bool(w[0] >= -tol * scale)


def square_positive_check(L: MomentFunctional, tol: float = 1e-10) -> bool:
    """L is PSD on squares of the truncation iff the half-degree moment
    matrix is PSD."""
    return psd_within(moment_matrix(L, L.max_degree // 2), tol)


def cbs_check(
    L: MomentFunctional, a: AlgebraElement, b: AlgebraElement, slack: float = 1e-9
) -> bool:
    """Cauchy-Bunyakovsky-Schwarz: L(ab)^2 <= L(a^2) L(b^2)."""
    lhs = L(multiply(a, b)) ** 2
    rhs = L(multiply(a, a)) * L(multiply(b, b))
    scale = max(abs(lhs), abs(rhs), 1.0)
    return bool(lhs <= rhs + slack * scale)


def _kernel_tol(values) -> float:
    return 1e-10 * max(1.0, max((abs(v) for v in values), default=0.0))


def _slice_functional_coeffs(
    L: MomentFunctional,
    p: GramForm,
    slice_degree: int,
    system: OrthonormalSystem | None,
):
    """Values of L on the orthonormalized monomial basis of the given slice.

    Returns (values on seminorm-positive monomials, values on monomials
    touching a kernel factor)."""
    u, n_on = _reference_basis(p, system)
    gens = [
        AlgebraElement.from_vector(u[:, i], max(slice_degree, 1)) for i in range(p.dim)
    ]
    pos_vals, ker_vals = [], []
    cache: dict = {}

    def gen_power(i: int, e: int) -> AlgebraElement:
        key = (i, e)
        if key not in cache:
            cache[key] = power(gens[i], e)
        return cache[key]

    for alpha in slice_monomials(p.dim, slice_degree):
        elem = AlgebraElement.one(p.dim, max(slice_degree, 1))
        for i, e in enumerate(alpha):
            if e:
                elem = multiply(elem, gen_power(i, e))
        val = L(elem)
        if any(alpha[i] for i in range(n_on, p.dim)):
            ker_vals.append(val)
        else:
            pos_vals.append(val)
    return pos_vals, ker_vals


def continuity_constant(
    L: MomentFunctional,
    p_2d: GramForm,
    d: int,
    system: OrthonormalSystem | None = None,
):
    """Smallest C with |L(b)| <= C * p~^(2d)(b) on the degree-2d slice: the
    l2 norm of L's values on the orthonormalized monomial basis; INFINITE
    when L is nonzero on a monomial touching the kernel."""
    pos_vals, ker_vals = _slice_functional_coeffs(L, p_2d, 2 * d, system)
    tol = _kernel_tol(pos_vals + ker_vals)
    if any(abs(v) > tol for v in ker_vals):
        return INFINITE
    return float(np.sqrt(sum(v * v for v in pos_vals)))


def square_constant(
    L: MomentFunctional,
    p_2d: GramForm,
    d: int,
    system: OrthonormalSystem | None = None,
):
    """Smallest C with L(b^2) <= C * (p~^(d)(b))^2 for b in the degree-d
    slice: lambda_max of the matrix L(m_beta m_beta') over orthonormalized
    monomials of degree d.  INFINITE when any entry touching a kernel
    monomial is nonzero.

    This is the constant that certifies square positivity transfer through
    the graded seminorm; it is generally smaller or larger than the linear
    continuity constant and the two must not be conflated.
    """
    u, n_on = _reference_basis(p_2d, system)
    gens = [AlgebraElement.from_vector(u[:, i], 2 * d) for i in range(p_2d.dim)]
    cache: dict = {}

    def gen_power(i: int, e: int) -> AlgebraElement:
        key = (i, e)
        if key not in cache:
            cache[key] = power(gens[i], e)
        return cache[key]

    monos = slice_monomials(p_2d.dim, d)
    elems = []
    kernel_flags = []
    for alpha in monos:
        elem = AlgebraElement.one(p_2d.dim, 2 * d)
        for i, e in enumerate(alpha):
            if e:
                elem = multiply(elem, gen_power(i, e))
        elems.append(elem)
        kernel_flags.append(any(alpha[i] for i in range(n_on, p_2d.dim)))
    k = len(monos)
    mat = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            mat[i, j] = mat[j, i] = L(multiply(elems[i], elems[j]))
    tol = _kernel_tol(mat.ravel())
    pos_idx = [i for i in range(k) if not kernel_flags[i]]
    ker_idx = [i for i in range(k) if kernel_flags[i]]
    if ker_idx:
        touching = np.abs(mat[np.ix_(ker_idx, range(k))])
        if touching.size and touching.max() > tol:
            return INFINITE
    if not pos_idx:
        return 0.0
    block = mat[np.ix_(pos_idx, pos_idx)]
    w = np.linalg.eigvalsh(block)
    return float(max(w[-1], 0.0))


# ---------------------------------------------------------------------------
# Carleman diagnostics (log space)
# ---------------------------------------------------------------------------


class CarlemanVerdict(Enum):
    DIVERGENT_LIKELY = "DIVERGENT_LIKELY"
    CONVERGENT_LIKELY = "CONVERGENT_LIKELY"
    UNDETERMINED = "UNDETERMINED"


@dataclass(frozen=True, eq=False)
class CarlemanDiagnostic:
    """terms[n-1] = t_n = L(v^{2n})^{-1/(2n)}; the verdict is an explicitly
    heuristic three-way classification of the decay of t_n."""

    terms: np.ndarray
    partial_sums: np.ndarray
    fitted_decay_exponent: float
    verdict: CarlemanVerdict
    tail_sum_estimate: object  # float, INFINITE, or None

    def to_jsonable(self) -> dict:
        tail = self.tail_sum_estimate
        if is_infinite(tail):
            tail = "infinite"
        return {
            "terms": [float(t) for t in self.terms],
            "partial_sums": [float(s) for s in self.partial_sums],
            "fitted_decay_exponent": float(self.fitted_decay_exponent),
            "verdict": self.verdict.value,
            "tail_sum_estimate": tail,
        }


def carleman_from_log_moments(
    log_even_moments, margin: float = 0.1
) -> CarlemanDiagnostic:
    """Diagnostic from log L(v^{2n}), n = 1..N.  All computation on t_n is
    done from the logs, so the raw moments may exceed float range."""
    logs = np.asarray(log_even_moments, dtype=float)
    n_max = len(logs)
    if n_max < 4:
        raise ValueError("need at least 4 even moments")
    ns = np.arange(1, n_max + 1)
    log_t = -logs / (2.0 * ns)
    terms = np.exp(log_t)
    partial = np.cumsum(terms)
    half = n_max // 2
    slope, _ = np.polyfit(np.log(ns[half - 1 :]), log_t[half - 1 :], 1)
    slope = float(slope)
    if slope >= -1.0 + margin:
        verdict = CarlemanVerdict.DIVERGENT_LIKELY
        tail = INFINITE
    elif slope <= -1.0 - margin:
        verdict = CarlemanVerdict.CONVERGENT_LIKELY
        ratio = terms[-1] / terms[-2] if terms[-2] > 0 else 0.0
        tail = float(partial[-1] + terms[-1] * ratio / (1.0 - ratio)) if ratio < 1 else None
    else:
        verdict = CarlemanVerdict.UNDETERMINED
        tail = None
    return CarlemanDiagnostic(
        terms=terms,
        partial_sums=partial,
        fitted_decay_exponent=slope,
        verdict=verdict,
        tail_sum_estimate=tail,
    )


def log_even_moments_from_measure(nu: DiscreteMeasure, v, n_max: int) -> np.ndarray:
    """log integral of <v, .>^{2n} for n = 1..N via log-sum-exp over atoms."""
    v = np.asarray(v, dtype=float)
    vals = nu.atoms @ v
    out = np.empty(n_max)
    with np.errstate(divide="ignore"):
        log_w = np.log(np.maximum(nu.weights, 0.0))
        log_abs = np.log(np.abs(vals))
    for n in range(1, n_max + 1):
        out[n - 1] = logsumexp(log_w + 2 * n * log_abs)
    return out


def carleman_diagnostic(
    L: MomentFunctional, v: AlgebraElement, n_max: int, margin: float = 0.1
) -> CarlemanDiagnostic:
    """Diagnostic for the direction v (degree-1 element).  Even moments come
    from the source measure when present (log space, any N) and otherwise
    from the stored moments (requires degree 2N)."""
    if not v.is_homogeneous(1):
        raise DimensionMismatch("direction must be a degree-1 element")
    if L.source is not None:
        logs = log_even_moments_from_measure(L.source, v.linear_coeffs(), n_max)
        return carleman_from_log_moments(logs, margin=margin)
    if 2 * n_max > L.max_degree:
        raise DegreeOverflow(
            f"need even moments to degree {2 * n_max}, stored {L.max_degree}"
        )
    logs = np.empty(n_max)
    vec = v.linear_coeffs()
    elem = AlgebraElement.from_vector(vec, 2 * n_max)
    current = AlgebraElement.one(L.dim, 2 * n_max)
    for n in range(1, n_max + 1):
        current = multiply(multiply(current, elem), elem)
        val = L(current)
        if val < -1e-12 * _abs_scale(L, current):
            raise NegativeEvenMoment(f"L(v^{2 * n}) = {val} < 0")
        logs[n - 1] = np.log(max(val, 1e-300))
    return carleman_from_log_moments(logs, margin=margin)


def log_gaussian_even_moments(n_max: int) -> np.ndarray:
    """log (2n-1)!! for n = 1..N (standard Gaussian directional moments)."""
    ns = np.arange(1, n_max + 1)
    return gammaln(2 * ns + 1) - ns * np.log(2.0) - gammaln(ns + 1)


def log_squared_exponential_moments(n_max: int) -> np.ndarray:
    """log e^{2n^2} = 2n^2 (an indeterminate-type growth profile)."""
    ns = np.arange(1, n_max + 1)
    return 2.0 * ns.astype(float) ** 2


# ---------------------------------------------------------------------------
# Growth sequences m_k, z_k
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BksReport:
    m: np.ndarray
    z: tuple  # entries float or INFINITE
    checks: dict
    probe_results: tuple

    def to_jsonable(self) -> dict:
        return {
            "m": [float(x) for x in self.m],
            "z": ["infinite" if is_infinite(x) else float(x) for x in self.z],
            "checks": dict(self.checks),
            "probes": [dict(p) for p in self.probe_results],
        }


def bks_growth_sequences(
    L: MomentFunctional,
    E: list,
    forms: list,
    n_max: int,
    probes: list | None = None,
    slack: float = 1e-9,
) -> BksReport:
    """Growth sequences over a finite generating family E of degree-1
    elements:

        m_k = sqrt(max over 2k-tuples from E of |L(v_1 ... v_{2k})|)
        z_k = (max_{v in E} p_{2k}(v))^k * sqrt(C_{L,2k})

    with forms[k-1] = p_{2k}.  Checks: m_k <= z_k, log-convexity
    m_k^2 <= m_{k-1} m_{k+1} (m_0 = 1), monotone k-th roots, and for each
    probe v = sum lambda_i E_i the composite bound

        L(v^{2k})^{1/(2k)} <= K_v * m_{2k}^{1/(2k)},   K_v = 1 + sum |lambda_i|.
    """
    if len(forms) != n_max:
        raise DimensionMismatch(f"need {n_max} forms, got {len(forms)}")
    elems = []
    for e in E:
        if isinstance(e, AlgebraElement):
            elems.append(e)
        else:
            elems.append(AlgebraElement.from_vector(e, L.max_degree))
    if 2 * n_max > L.max_degree:
        raise DegreeOverflow(
            f"need moments to degree {2 * n_max}, stored {L.max_degree}"
        )

    m = np.zeros(n_max + 1)
    m[0] = float(np.sqrt(abs(L(AlgebraElement.one(L.dim, L.max_degree)))))
    for k in range(1, n_max + 1):
        best = 0.0
        for combo in itertools.combinations_with_replacement(range(len(elems)), 2 * k):
            prod = AlgebraElement.one(L.dim, L.max_degree)
            for i in combo:
                prod = multiply(prod, elems[i])
            best = max(best, abs(L(prod)))
        m[k] = np.sqrt(best)

    z = []
    for k in range(1, n_max + 1):
        p2k = forms[k - 1]
        sup_p = max(p2k(e.linear_coeffs()) for e in elems)
        c = continuity_constant(L, p2k, k)
        z.append(INFINITE if is_infinite(c) else float(sup_p**k * np.sqrt(c)))

    definit_ok = all(
        is_infinite(zk) or mk <= zk * (1 + slack) + slack
        for mk, zk in zip(m[1:], z)
    )
    log_convex_ok = all(
        m[k] ** 2 <= m[k - 1] * m[k + 1] * (1 + slack) + slack
        for k in range(1, n_max)
    )
    roots = [m[k] ** (1.0 / k) if m[k] > 0 else 0.0 for k in range(1, n_max + 1)]
    roots_ok = all(
        roots[i] <= roots[i + 1] * (1 + slack) + slack for i in range(len(roots) - 1)
    )

    probe_results = []
    bound_ok = True
    for lam in probes or []:
        lam = np.asarray(lam, dtype=float)
        if len(lam) != len(elems):
            raise DimensionMismatch("probe length must match |E|")
        v = AlgebraElement.zero(L.dim, L.max_degree)
        for c, e in zip(lam, elems):
            v = v + float(c) * e
        k_v = 1.0 + float(np.sum(np.abs(lam)))
        worst = 0.0
        ok = True
        for k in range(1, n_max // 2 + 1):
            val = max(L(power(v, 2 * k)), 0.0)
            lhs = val ** (1.0 / (2 * k))
            rhs = k_v * m[2 * k] ** (1.0 / (2 * k))
            worst = max(worst, lhs - rhs)
            if lhs > rhs * (1 + slack) + slack:
                ok = False
        probe_results.append(
            {"lambda": [float(x) for x in lam], "K_v": k_v, "ok": ok, "worst_gap": worst}
        )
        bound_ok = bound_ok and ok

    checks = {
        "definit_ok": bool(definit_ok),
        "log_convex_ok": bool(log_convex_ok),
        "roots_monotone_ok": bool(roots_ok),
        "bound_2k_ok": bool(bound_ok),
    }
    return BksReport(
        m=m[1:], z=tuple(z), checks=checks, probe_results=tuple(probe_results)
    )
