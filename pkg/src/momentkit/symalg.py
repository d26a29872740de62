"""Degree-truncated symmetric algebra S(R^n) and its graded seminorms.

Elements are sparse maps multi-index -> coefficient, truncated at a hard
degree D.  Characters are point evaluations.  For a Hilbertian seminorm s
on the degree-1 slice, the graded seminorm s~^(d) on S(R^n)_d follows the
canonical convention

    *the orthonormalized monomial basis has identity Gram*:

diagonalize s into an s-orthonormal system (e_i) plus a kernel completion,
re-express a_d in monomials of that basis, and take the l2-norm of the
coefficients weighted by the product of factor norms (kernel factors
contribute 0).  On decompositions into s-orthogonal factors this reproduces
the matched-order product formula <b_1,b_1>_s ... <b_d,b_d>_s.

The reference system may be supplied explicitly (any complete s-orthonormal
system); multi-form constructions such as the tilde-trace identity need
coherent reference bases across forms, which the default eigendecomposition
cannot provide when the two forms do not commute.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegreeOverflow,
    DimensionMismatch,
    IncompleteSystem,
    InfiniteTrace,
    NotContinuous,
    NotHomogeneous,
)
from .forms import (
    DualFunctional,
    GramForm,
    INFINITE,
    OrthonormalSystem,
    dual_norm,
    is_infinite,
    kernel_basis,
    simultaneous_diagonalize,
)
from .traces import trace


# ---------------------------------------------------------------------------
# Multi-index helpers
# ---------------------------------------------------------------------------


def _canon_alpha(alpha, dim: int) -> tuple:
    t = tuple(int(k) for k in alpha)
    if len(t) != dim or any(k < 0 for k in t):
        raise DimensionMismatch(f"bad multi-index {alpha} for dim {dim}")
    return t


def gradlex_key(alpha: tuple) -> tuple:
    """Sort key for graded-lexicographic order: by total degree, then lex."""
    return (sum(alpha), alpha)


def slice_monomials(dim: int, degree: int) -> list[tuple]:
    """All multi-indices of total degree ``degree`` in lex order."""
    if degree == 0:
        return [(0,) * dim]
    if dim == 0:
        return []
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining + 1):
            rec(prefix + (k,), remaining - k, slots - 1)

    rec((), degree, dim)
    out.sort()
    return out


def multinomial(alpha: tuple) -> int:
    """d! / alpha! for d = |alpha| (number of ordered words with content alpha)."""
    d = sum(alpha)
    val = math.factorial(d)
    for k in alpha:
        val //= math.factorial(k)
    return val


# ---------------------------------------------------------------------------
# Algebra elements and characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Truncated element of S(R^dim): sparse multi-index -> coefficient."""

    dim: int
    max_degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for alpha, c in self.terms.items():
            a = _canon_alpha(alpha, self.dim)
            if sum(a) > self.max_degree:
                raise DegreeOverflow(
                    f"term {a} exceeds truncation degree {self.max_degree}"
                )
            c = float(c)
            if c != 0.0:
                clean[a] = clean.get(a, 0.0) + c
        object.__setattr__(self, "terms", clean)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(dim: int, max_degree: int) -> "AlgebraElement":
        return AlgebraElement(dim, max_degree, {})

    @staticmethod
    def one(dim: int, max_degree: int) -> "AlgebraElement":
        return AlgebraElement(dim, max_degree, {(0,) * dim: 1.0})

    @staticmethod
    def variable(i: int, dim: int, max_degree: int) -> "AlgebraElement":
        alpha = tuple(1 if j == i else 0 for j in range(dim))
        return AlgebraElement(dim, max_degree, {alpha: 1.0})

    @staticmethod
    def from_vector(v, max_degree: int) -> "AlgebraElement":
        """Degree-1 element sum v_i x_i."""
        v = np.asarray(v, dtype=float)
        terms = {}
        for i, c in enumerate(v):
            if c != 0.0:
                alpha = tuple(1 if j == i else 0 for j in range(len(v)))
                terms[alpha] = float(c)
        return AlgebraElement(len(v), max_degree, terms)

    # -- structure -------------------------------------------------------

    def degree(self) -> int:
        """Degree of the element (0 for the zero element)."""
        return max((sum(a) for a in self.terms), default=0)

    def graded_component(self, d: int) -> "AlgebraElement":
        return AlgebraElement(
            self.dim,
            self.max_degree,
            {a: c for a, c in self.terms.items() if sum(a) == d},
        )

    def is_homogeneous(self, d: int) -> bool:
        return all(sum(a) == d for a in self.terms)

    def coefficient(self, alpha) -> float:
        return self.terms.get(_canon_alpha(alpha, self.dim), 0.0)

    def sorted_terms(self) -> list[tuple]:
        return sorted(self.terms.items(), key=lambda kv: gradlex_key(kv[0]))

    def linear_coeffs(self) -> np.ndarray:
        """Coefficient vector of the degree-1 component."""
        v = np.zeros(self.dim)
        for a, c in self.terms.items():
            if sum(a) == 1:
                v[a.index(1)] = c
        return v

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_compatible(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0.0) + c
        return AlgebraElement(self.dim, max(self.max_degree, other.max_degree), terms)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "AlgebraElement":
        return AlgebraElement(
            self.dim, self.max_degree, {a: scalar * c for a, c in self.terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return self.__rmul__(other)

    def _check_compatible(self, other: "AlgebraElement"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dims {self.dim} != {other.dim}")

    def __repr__(self):
        parts = [f"{c:+g}*x^{list(a)}" for a, c in self.sorted_terms()]
        return f"AlgebraElement({' '.join(parts) or '0'})"

    def to_jsonable(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"alpha": list(a), "c": float(c)} for a, c in self.sorted_terms()
            ],
        }


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Commutative product by sparse convolution of multi-indices; raises
    DegreeOverflow when a product term exceeds the truncation degree."""
    a._check_compatible(b)
    cap = max(a.max_degree, b.max_degree)
    terms: dict = {}
    for alpha, ca in a.terms.items():
        for beta, cb in b.terms.items():
            gamma = tuple(x + y for x, y in zip(alpha, beta))
            if sum(gamma) > cap:
                raise DegreeOverflow(
                    f"product term of degree {sum(gamma)} exceeds truncation {cap}"
                )
            terms[gamma] = terms.get(gamma, 0.0) + ca * cb
    return AlgebraElement(a.dim, cap, terms)


def power(a: AlgebraElement, k: int) -> AlgebraElement:
    out = AlgebraElement.one(a.dim, a.max_degree)
    for _ in range(k):
        out = multiply(out, a)
    return out


@dataclass(frozen=True, eq=False)
class Character:
    """A character of S(R^n): evaluation at a point of R^n."""

    point: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.point, dtype=float).copy()
        p.setflags(write=False)
        object.__setattr__(self, "point", p)

    @property
    def dim(self) -> int:
        return len(self.point)


def evaluate_character(alpha: Character, a: AlgebraElement) -> float:
    """hat a (alpha): polynomial evaluation of a at the character's point."""
    if alpha.dim != a.dim:
        raise DimensionMismatch(f"character dim {alpha.dim} != element dim {a.dim}")
    total = 0.0
    for idx, c in a.sorted_terms():
        val = c
        for k, e in zip(alpha.point, idx):
            if e:
                val *= k**e
        total += val
    return float(total)


def compose_linear(a: AlgebraElement, coeff_rows: np.ndarray) -> AlgebraElement:
    """Substitute x_k -> sum_i coeff_rows[k, i] * y_i and expand.

    Used to re-express an element in a different degree-1 basis.
    """
    coeff_rows = np.asarray(coeff_rows, dtype=float)
    if coeff_rows.shape != (a.dim, a.dim):
        raise DimensionMismatch(
            f"substitution matrix {coeff_rows.shape} != ({a.dim}, {a.dim})"
        )
    images = [
        AlgebraElement.from_vector(coeff_rows[k], a.max_degree) for k in range(a.dim)
    ]
    power_cache: dict = {}

    def img_power(k: int, e: int) -> AlgebraElement:
        key = (k, e)
        if key not in power_cache:
            power_cache[key] = power(images[k], e)
        return power_cache[key]

    out = AlgebraElement.zero(a.dim, a.max_degree)
    for idx, c in a.terms.items():
        term = AlgebraElement.one(a.dim, a.max_degree)
        for k, e in enumerate(idx):
            if e:
                term = multiply(term, img_power(k, e))
        out = out + c * term
    return out


# ---------------------------------------------------------------------------
# Graded seminorms
# ---------------------------------------------------------------------------


def _reference_basis(s: GramForm, system: OrthonormalSystem | None):
    """Full basis of R^n made of an s-orthonormal part plus a kernel
    completion.  Returns (basis matrix U with those columns, number of
    s-orthonormal columns)."""
    ker = kernel_basis(s)
    if system is None:
        from .forms import whitening_system

        on_vecs = list(whitening_system(s).vectors)
    else:
        if system.form is not s and not np.array_equal(system.form.gram, s.gram):
            raise DimensionMismatch("reference system belongs to a different form")
        if len(system) != s.rank:
            raise IncompleteSystem(
                f"reference system has {len(system)} vectors, form rank is {s.rank}"
            )
        on_vecs = list(system.vectors)
    cols = on_vecs + ker
    if len(cols) != s.dim:
        raise IncompleteSystem("orthonormal part plus kernel does not span")
    u = np.column_stack(cols)
    return u, len(on_vecs)


def graded_inner(
    s: GramForm,
    d: int,
    a_d: AlgebraElement,
    b_d: AlgebraElement,
    system: OrthonormalSystem | None = None,
) -> float:
    """Inner product on S(R^n)_d under the canonical convention (monomials
    of the reference s-orthonormal basis are orthonormal; monomials touching
    kernel factors carry weight 0)."""
    for elem in (a_d, b_d):
        if not elem.is_homogeneous(d):
            raise NotHomogeneous(f"element {elem!r} is not homogeneous of degree {d}")
    if a_d.dim != s.dim:
        raise DimensionMismatch(f"element dim {a_d.dim} != form dim {s.dim}")
    if d == 0:
        zero_idx = (0,) * s.dim
        return a_d.coefficient(zero_idx) * b_d.coefficient(zero_idx)
    u, n_on = _reference_basis(s, system)
    subst = np.linalg.inv(u).T  # row k: coordinates of x_k in the reference basis
    a_ref = compose_linear(a_d, subst)
    b_ref = compose_linear(b_d, subst)
    total = 0.0
    for alpha, ca in a_ref.terms.items():
        if any(alpha[i] for i in range(n_on, s.dim)):
            continue  # kernel factor -> weight 0
        cb = b_ref.terms.get(alpha)
        if cb is not None:
            total += ca * cb
    return float(total)


def graded_norm(
    s: GramForm,
    d: int,
    a_d: AlgebraElement,
    system: OrthonormalSystem | None = None,
) -> float:
    """The graded Hilbertian seminorm s~^(d)(a_d); see the module docstring
    for the convention."""
    val = graded_inner(s, d, a_d, a_d, system=system)
    return float(np.sqrt(max(val, 0.0)))


# ---------------------------------------------------------------------------
# The weighted tilde seminorms and their trace identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradedSeminormTower:
    """Per-degree data defining the weighted seminorms p~ and q~ on the
    truncated algebra:

        p~(a)^2 = lam_0^2 |a^(0)|^2 + sum_d lam_d^2 C_{2d} (p_{2d}~^(d)(a^(d)))^2
        q~(a)^2 = eta_0^2 |a^(0)|^2 + sum_d eta_d^2 (q_{2d}~^(d)(a^(d)))^2

    ``base_forms[d-1] = (p_2d, q_2d)``; ``lam``/``eta`` have length D+1
    (index 0 is the constant slice); ``constants[d-1] = C_{L,2d}``.
    """

    dim: int
    max_degree: int
    base_forms: tuple
    lam: tuple
    eta: tuple
    constants: tuple

    def __post_init__(self):
        d_max = self.max_degree
        if len(self.base_forms) != d_max:
            raise DimensionMismatch(
                f"need {d_max} base form pairs, got {len(self.base_forms)}"
            )
        if len(self.lam) != d_max + 1 or len(self.eta) != d_max + 1:
            raise DimensionMismatch("weights must have length max_degree + 1")
        if len(self.constants) != d_max:
            raise DimensionMismatch("constants must have length max_degree")
        if any(w <= 0 for w in self.lam) or any(w <= 0 for w in self.eta):
            raise ValueError("weights must be positive")
        if any(c < 0 for c in self.constants):
            raise ValueError("constants must be nonnegative")
        for p2d, q2d in self.base_forms:
            if p2d.dim != self.dim or q2d.dim != self.dim:
                raise DimensionMismatch("base form dimension mismatch")

    @property
    def lambda_inverse_square_sum(self) -> float:
        """sum of lam_d^{-2} over the truncated range d = 0..D (the finite
        rendering of the summability hypothesis)."""
        return float(sum(1.0 / w**2 for w in self.lam))


def p_tilde(
    tower: GradedSeminormTower,
    a: AlgebraElement,
    systems: dict | None = None,
) -> float:
    """The weighted seminorm p~(a).  ``systems`` optionally maps degree d to
    a reference OrthonormalSystem for p_{2d}."""
    if a.degree() > tower.max_degree:
        raise DegreeOverflow(
            f"element degree {a.degree()} exceeds tower degree {tower.max_degree}"
        )
    zero_idx = (0,) * tower.dim
    total = (tower.lam[0] * a.coefficient(zero_idx)) ** 2
    for d in range(1, tower.max_degree + 1):
        comp = a.graded_component(d)
        if not comp.terms:
            continue
        p2d = tower.base_forms[d - 1][0]
        sysd = systems.get(d) if systems else None
        gn = graded_norm(p2d, d, comp, system=sysd)
        total += tower.lam[d] ** 2 * tower.constants[d - 1] * gn**2
    return float(np.sqrt(total))


def q_tilde(
    tower: GradedSeminormTower,
    a: AlgebraElement,
    systems: dict | None = None,
) -> float:
    """The weighted seminorm q~(a) (weights eta_d, forms q_{2d}, no C)."""
    if a.degree() > tower.max_degree:
        raise DegreeOverflow(
            f"element degree {a.degree()} exceeds tower degree {tower.max_degree}"
        )
    zero_idx = (0,) * tower.dim
    total = (tower.eta[0] * a.coefficient(zero_idx)) ** 2
    for d in range(1, tower.max_degree + 1):
        comp = a.graded_component(d)
        if not comp.terms:
            continue
        q2d = tower.base_forms[d - 1][1]
        sysd = systems.get(d) if systems else None
        gn = graded_norm(q2d, d, comp, system=sysd)
        total += tower.eta[d] ** 2 * gn**2
    return float(np.sqrt(total))


@dataclass(frozen=True, eq=False)
class TildeTraceReport:
    formula: float
    direct: float
    per_degree: tuple
    rel_error: float
    agree: bool

    def to_jsonable(self) -> dict:
        return {
            "formula": self.formula,
            "direct": self.direct,
            "per_degree": [
                {"degree": d, "formula": f, "direct": s} for d, f, s in self.per_degree
            ],
            "rel_error": self.rel_error,
            "agree": self.agree,
        }


def tilde_trace_identity(
    tower: GradedSeminormTower, d_max: int | None = None, rel_tol: float = 1e-8
) -> TildeTraceReport:
    """Two-path evaluation of tr(p~/q~).

    Formula path:  lam_0^2/eta_0^2 + sum_d (lam_d^2/eta_d^2) C_{2d} tr(p_2d/q_2d)^d.

    Direct path: per degree d, take the q~-orthonormal monomial family built
    on a complete q_{2d}-orthonormal system E_d (members eta_d^{-1} e_{i_1}
    ... e_{i_d} over ordered index tuples, so a monomial with repeated
    factors enters with multiplicity d!/alpha!) and sum p~(.)^2 over the
    family.  E_d is chosen p-orthogonal (simultaneous diagonalization) and
    the p-norms are evaluated with the matching reference system, so both
    paths compute the same quantity; the comparison checks the
    combinatorial bookkeeping, not a tautology.
    """
    if d_max is None:
        d_max = tower.max_degree
    if not 1 <= d_max <= tower.max_degree:
        raise DimensionMismatch(f"d_max {d_max} outside 1..{tower.max_degree}")
    formula = tower.lam[0] ** 2 / tower.eta[0] ** 2
    direct = formula
    per_degree = [(0, formula, formula)]
    for d in range(1, d_max + 1):
        p2d, q2d = tower.base_forms[d - 1]
        tr = trace(p2d, q2d)
        if is_infinite(tr.value):
            raise InfiniteTrace(f"tr(p_{2*d}/q_{2*d}) is infinite")
        weight = (tower.lam[d] ** 2 / tower.eta[d] ** 2) * tower.constants[d - 1]
        f_d = weight * tr.value**d

        # direct orthonormal sum over the monomial family of E_d
        e_sys = simultaneous_diagonalize(p2d, q2d)
        members = list(e_sys.vectors)
        mu = [float(v @ p2d.gram @ v) for v in members]
        # p-orthonormal reference: normalize the members with positive p-norm
        cutoff = p2d.kernel_cutoff
        ref_vecs = tuple(
            v / np.sqrt(m) for v, m in zip(members, mu) if m > cutoff
        )
        ref_sys = (
            OrthonormalSystem(form=p2d, vectors=ref_vecs, complete=True)
            if len(ref_vecs) == p2d.rank
            else None
        )
        s_d = 0.0
        for alpha in slice_monomials(len(members), d):
            elem = AlgebraElement.one(tower.dim, tower.max_degree)
            for i, e in enumerate(alpha):
                for _ in range(e):
                    elem = multiply(
                        elem, AlgebraElement.from_vector(members[i], tower.max_degree)
                    )
            gn = graded_norm(p2d, d, elem, system=ref_sys)
            s_d += multinomial(alpha) * gn**2
        s_d *= weight
        formula += f_d
        direct += s_d
        per_degree.append((d, f_d, s_d))
    rel_error = abs(formula - direct) / max(abs(formula), 1e-300)
    return TildeTraceReport(
        formula=formula,
        direct=direct,
        per_degree=tuple(per_degree),
        rel_error=rel_error,
        agree=bool(rel_error <= rel_tol),
    )


# ---------------------------------------------------------------------------
# Character bound and polarization bound
# ---------------------------------------------------------------------------


def character_norm_bound(
    l: DualFunctional,
    r: GramForm,
    s: GramForm,
    d: int,
    a_d: AlgebraElement,
) -> dict:
    """Check |alpha_ell(a_d)| <= (r'(ell) tr(r/s))^d s~^(d)(a_d) for the
    multiplicative extension alpha_ell(v_1...v_d) = ell(v_1)...ell(v_d).

    Note the bound requires tr(r/s) >= 1 to be provable (the sharp exponent
    on the trace is d/2); callers generate scenarios in that regime.
    """
    tr = trace(r, s)
    if is_infinite(tr.value):
        raise InfiniteTrace("tr(r/s) is infinite")
    rp = dual_norm(r, l)
    if is_infinite(rp):
        raise NotContinuous("functional is not r-continuous")
    lhs = abs(evaluate_character(Character(point=l.coeffs), a_d))
    rhs = (rp * tr.value) ** d * graded_norm(s, d, a_d)
    ok = lhs <= rhs * (1.0 + 1e-9) + 1e-12
    return {"lhs": lhs, "rhs": rhs, "dual_norm": rp, "trace": tr.value, "ok": bool(ok)}


def polarization_bound_check(
    slice_functional,
    r: GramForm,
    d: int,
    rng=None,
    n_tuples: int = 64,
    slack: float = 1e-9,
) -> bool:
    """Given a functional on the degree-d slice with |L(v^d)| <= r(v)^d
    (certified on a sample), verify the polarization bound

        |L(v_1 ... v_d)| <= (d^d / d!) r(v_1) ... r(v_d)

    on random tuples.  ``slice_functional`` is a callable on AlgebraElement.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    n = r.dim
    const = d**d / math.factorial(d)
    max_degree = d
    # hypothesis certification on single vectors
    for _ in range(n_tuples):
        v = rng.standard_normal(n)
        elem = power(AlgebraElement.from_vector(v, max_degree), d)
        if abs(slice_functional(elem)) > r(v) ** d * (1.0 + slack) + slack:
            return False
    # polarization bound on tuples
    for _ in range(n_tuples):
        vs = [rng.standard_normal(n) for _ in range(d)]
        elem = AlgebraElement.one(n, max_degree)
        bound = const
        for v in vs:
            elem = multiply(elem, AlgebraElement.from_vector(v, max_degree))
            bound *= r(v)
        if abs(slice_functional(elem)) > bound * (1.0 + slack) + slack:
            return False
    return True
