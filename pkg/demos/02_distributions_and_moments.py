"""The five direction laws and the moments that drive estimator quality.

Each law is symmetric with iid coordinates; what differentiates them is
the kurtosis (fourth standardized moment).  The estimator's relative
squared error at the optimal variance 1/(d + kurtosis - 1) is
1 - 1/(d + kurtosis - 1), so smaller kurtosis is strictly better.  The
Monte-Carlo harness verifies every closed form used here.
"""

from rfgopt import (
    DistributionSpec,
    KINDS,
    kurtosis,
    optimal_variance,
    sixth_standardized_moment,
    stream,
)
from rfgopt.moments import check_moment_identities
import numpy as np

print(f"{'law':<10} {'kurtosis':>8} {'6th moment':>11} "
      f"{'optimal var (d=10)':>19} {'min rel sq error':>17}")
for kind in KINDS:
    k4 = kurtosis(kind)
    var = optimal_variance(10, kind)
    print(f"{kind:<10} {k4:>8.3g} {sixth_standardized_moment(kind):>11.6g} "
          f"{var:>19.4g} {1 - var:>17.4g}")

# spot-verify the four direction-moment identities for one law
print("\nMonte-Carlo spot check (wigner, d=3, n=2e5):")
gen = stream(7, "demo-data")
U, _ = np.linalg.qr(gen.normal(size=(3, 3)))
reports = check_moment_identities(
    DistributionSpec("wigner", 1.0), 3,
    gen.normal(size=3), gen.normal(size=3), gen.normal(size=(4, 3)),
    gen.normal(size=3), U, 200_000, stream(7, "demo-mc"),
)
for rep in reports:
    print(" ", rep)
