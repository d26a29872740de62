"""
Moment functionals and growth diagnostics
=========================================

A positive linear functional on the polynomial algebra, stored as a
finite table of moments.  From it: moment and localizing matrices,
Cauchy-Schwarz checks, continuity constants against a tower norm, and
Carleman-type diagnostics of moment growth.
"""

import numpy as np

from momentkit import (
    AlgebraElement,
    DiscreteMeasure,
    GramForm,
    carleman_diagnostic,
    cbs_check,
    continuity_constant,
    from_measure,
    moment_matrix,
    s_L,
    square_constant,
)
from momentkit.moments import (
    CarlemanVerdict,
    carleman_from_log_moments,
    log_squared_exponential_moments,
)

# The uniform measure on {(1,2), (-1,0)} in R^2, stored to degree 4.
nu = DiscreteMeasure(dim=2, atoms=np.array([[1.0, 2.0], [-1.0, 0.0]]),
                     weights=np.array([0.5, 0.5]))
L = from_measure(nu, 4)
print("L(x1^2) =", L.moment((2, 0)), " L(x1 x2) =", L.moment((1, 1)))

# The degree-1 quadratic seminorm s_L(a) = sqrt(L(a^2)).
x2 = AlgebraElement(2, 2, {(0, 1): 1.0})
print("s_L(x2) =", s_L(L, x2), " (sqrt of L(x2^2) =", L.moment((0, 2)), ")")

# Cauchy-Schwarz |L(ab)|^2 <= L(a^2) L(b^2) for positive L.
a = AlgebraElement(2, 2, {(1, 0): 1.0})
b = AlgebraElement(2, 2, {(0, 1): 1.0})
print("CBS holds:", cbs_check(L, a, b))

# Moment matrix on monomials up to degree 2 is PSD for a true measure.
m = moment_matrix(L, 2)
print("moment matrix PSD:", np.linalg.eigvalsh(m)[0] >= -1e-12)

# Two distinct constants against the slice geometry of p = identity:
# the linear continuity constant and the certified square constant.
p = GramForm(dim=2, gram=np.eye(2))
print("continuity constant (deg 1):", continuity_constant(L, p, 1))
print("square constant (deg 1):    ", square_constant(L, p, 1))

# Carleman diagnostics.  A Gaussian direction has divergent sum of
# reciprocal even-moment roots (quasi-analytic regime) ...
v = AlgebraElement(2, 1, {(1, 0): 1.0})
diag = carleman_diagnostic(L, v, n_max=100)
print("compact-support verdict:", diag.verdict)

# ... while moments growing like e^{2 n^2} give a convergent sum with
# tail exactly 1/(e - 1).
fast = carleman_from_log_moments(log_squared_exponential_moments(200))
print("squared-exponential verdict:", fast.verdict,
      " tail:", fast.tail_sum_estimate, " 1/(e-1) =", 1 / (np.e - 1))
assert fast.verdict is CarlemanVerdict.CONVERGENT_LIKELY
