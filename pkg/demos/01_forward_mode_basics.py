"""Dual numbers in action: one forward pass yields value and slope.

A dual scalar (a, b) behaves like a + b*eps with eps^2 = 0, so arithmetic
carries exact first derivatives.  Seeding the inputs of a function with a
direction vector and running it once produces f(x) and grad f(x)^T v with
no extra passes and no stored tape.
"""

import numpy as np

from rfgopt import DualScalar, dual_apply, jvp

# f(x) = 5x + 3 evaluated at the dual point 4 + 1*eps: the tangent slot of
# the result is f'(4)
y = dual_apply("mul", DualScalar(5, 0), DualScalar(4, 1))
y = dual_apply("add", y, DualScalar(3, 0))
print(f"f(x) = 5x + 3 at x = 4:          value {y.primal:g}, derivative {y.tangent:g}")

# a multivariate objective written as a plain numpy expression works
# unchanged on arrays of dual scalars
f = lambda x: 0.5 * np.sum((2 * x) ** 2)
te = jvp(f, [0.0, 4.0, 6.0], [1.0, 1.0, 1.0])
print(f"0.5||2x||^2 at (0,4,6) along 1:  value {te.value:g}, derivative {te.directional_derivative:g}")

# directional derivatives are linear in the seed
v, w = np.array([1.0, 0.0, 2.0]), np.array([0.5, -1.0, 0.0])
lhs = jvp(f, [0.0, 4.0, 6.0], 2 * v - 3 * w).directional_derivative
rhs = 2 * jvp(f, [0.0, 4.0, 6.0], v).directional_derivative \
    - 3 * jvp(f, [0.0, 4.0, 6.0], w).directional_derivative
print(f"linearity in the seed:           {lhs:g} == {rhs:g}")

# probing with unit seeds reads off gradient components one at a time
g = [jvp(lambda x: 0.5 * np.sum(x ** 2), [0.0, 1.0, 2.0], e).directional_derivative
     for e in np.eye(3)]
print(f"unit-seed probes of 0.5||x||^2 at (0,1,2) recover the gradient: {g}")
