"""What the randomized forward gradient looks like, moment by moment.

The estimate along a direction z is (directional derivative) * z.  At
unit coordinate variance its mean is the true gradient; scaling z by s
scales the whole estimate by s^2 (so variance tuning and learning-rate
tuning are the same knob); and for least-squares objectives the
forward-difference version splits exactly into the h = 0 part plus a
computable step-size term.
"""

import numpy as np

from rfgopt import DistributionSpec, rfg, rfg_moments, sample_vector, stream
from rfgopt.quadratic import QuadraticProblem, rfg_decomposition

gen = stream(11, "demo3")
p = QuadraticProblem.from_data(gen.normal(size=(6, 4)), gen.normal(size=6))
obj = p.objective()
x = gen.normal(size=4)
g = obj.exact_gradient(x)

# unbiasedness at unit coordinate variance
spec = DistributionSpec("gaussian", 1.0)
draws = stream(11, "draws")
mean = np.zeros(4)
n = 20_000
for _ in range(n):
    mean += rfg(obj, x, sample_vector(spec, 4, draws), 0.0)
mean /= n
print("gradient:        ", np.round(g, 4))
print(f"estimate mean ({n} draws):", np.round(mean, 4))

# scaling invariance: s^2 appears as a learning-rate factor
z = sample_vector(spec, 4, draws)
print("scaling: estimate(3z) == 9 * estimate(z):",
      np.allclose(rfg(obj, x, 3 * z, 0.0), 9 * rfg(obj, x, z, 0.0)))

# closed-form mean and variance (the variance constant is kurtosis + d - 2)
mean_an, var_an = rfg_moments(p, x, spec, 0.0)
print("closed-form mean:", np.round(mean_an, 4), f"  total variance: {var_an:.4g}")

# forward-difference decomposition on quadratics is exact
exact, bias = rfg_decomposition(p, x, z, h=0.05)
direct = rfg(obj, x, z, 0.05)
print("decomposition max |(exact+bias) - direct|:", np.abs(exact + bias - direct).max())
