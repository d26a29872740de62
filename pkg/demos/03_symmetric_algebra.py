"""
Graded seminorms on the symmetric algebra
=========================================

Polynomials in n commuting variables carry, per degree slice, a seminorm
induced by a base form on degree one.  Weighting the slices gives the
tower norms p~ and q~, whose relative trace satisfies a closed formula.
"""

import numpy as np

from momentkit import (
    AlgebraElement,
    DualFunctional,
    GradedSeminormTower,
    GramForm,
    character_norm_bound,
    evaluate_character,
    graded_norm,
    multiply,
    p_tilde,
    tilde_trace_identity,
)
from momentkit.symalg import Character

# x1 * x2 as a degree-2 element of R[x1, x2].
a = AlgebraElement(2, 2, {(1, 1): 1.0})
b = AlgebraElement(2, 2, {(2, 0): 1.0, (0, 2): 1.0})
sq = multiply(AlgebraElement(2, 4, {(1, 1): 1.0}),
              AlgebraElement(2, 4, {(1, 1): 1.0}))
print("(x1*x2)^2 terms:", sq.terms)

# Slice norm under the Euclidean base form: monomial coefficients are
# an orthonormal frame, so ||x1 x2|| = 1 and ||x1^2 + x2^2|| = sqrt(2).
e2 = GramForm(dim=2, gram=np.eye(2))
print("graded norm of x1*x2:      ", graded_norm(e2, 2, a))
print("graded norm of x1^2 + x2^2:", graded_norm(e2, 2, b))

# Point evaluation is an algebra character.
alpha = Character(point=np.array([3.0, 4.0]))
print("(x1^2 + x2^2)(3, 4) =", evaluate_character(alpha, b))

# A two-level tower: weighted combination of slice norms.
tower = GradedSeminormTower(
    dim=2,
    max_degree=2,
    base_forms=((e2, e2), (e2, e2)),
    lam=(1.0, 1.0, 0.5),
    eta=(1.0, 1.0, 1.0),
    constants=(2.0, 4.5),
)
elem = AlgebraElement(2, 2, {(0, 0): 1.0, (1, 0): 1.0, (2, 0): 1.0})
print("p~(1 + x1 + x1^2) =", p_tilde(tower, elem))

# The tower trace: closed formula versus a direct orthonormal-sum over
# the graded slices.  Both paths must agree.
rep = tilde_trace_identity(tower)
print("tilde trace formula:", rep.formula)
print("tilde trace direct: ", rep.direct)
print("agree:", rep.agree)

# Characters are bounded by the trace-weighted tower norm:
# |alpha_l(a_d)| <= (r'(l) tr(r/s))^d s~(a_d).
r = GramForm(dim=2, gram=np.eye(2))
s = GramForm(dim=2, gram=0.5 * np.eye(2))
l = DualFunctional(dim=2, coeffs=np.array([1.0, 1.0]))
chk = character_norm_bound(l, r, s, 2, a)
print("character bound ok:", chk["ok"], " lhs:", chk["lhs"], " rhs:", chk["rhs"])
