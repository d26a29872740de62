"""
Hilbertian seminorms from Gram matrices
=======================================

A seminorm p(a) = sqrt(a^T G a) for a PSD matrix G.  This demo walks
through evaluation, the polarized inner product, kernels, dual norms
(including the infinite case), and orthonormalization.
"""

import numpy as np

from momentkit import (
    DualFunctional,
    GramForm,
    dual_norm,
    gram_schmidt,
    is_infinite,
    kernel_basis,
    whitening_system,
)

# A rank-2 seminorm on R^2 and a degenerate one.
p = GramForm(dim=2, gram=np.diag([1.0, 4.0]))
print("p(1, 1)        =", p(np.array([1.0, 1.0])))  # sqrt(1 + 4)
print("p inner (e1,e2)=", p.inner(np.array([1.0, 0.0]), np.array([0.0, 1.0])))

# A seminorm with a kernel: G = all-ones, so (1, -1) has length zero.
sing = GramForm(dim=2, gram=np.ones((2, 2)))
v = np.array([1.0, -1.0]) / np.sqrt(2)
print("degenerate p on (1,-1)/sqrt2:", sing(v))
print("kernel basis:", kernel_basis(sing))

# Dual norm p'(l) = sup { l(a) : p(a) <= 1 }.  Finite only when the
# functional annihilates the kernel.
q = GramForm(dim=2, gram=np.diag([4.0, 1.0]))
e1_star = DualFunctional(dim=2, coeffs=np.array([1.0, 0.0]))
print("dual of e1* under diag(4,1):", dual_norm(q, e1_star))
l_bad = DualFunctional(dim=2, coeffs=np.array([1.0, 1.0]))  # sees the kernel
d = dual_norm(sing, l_bad)
print("dual against a kernel direction is infinite:", is_infinite(d))

# Gram-Schmidt inside the p-geometry drops null directions and returns
# which input positions were discarded.
sys = gram_schmidt(p, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
print("orthonormal system:\n", sys.matrix)

# The whitening system is a canonical complete orthonormal system.
w = whitening_system(p)
print("whitened Gram == identity:",
      np.allclose(w.matrix.T @ p.gram @ w.matrix, np.eye(2)))
