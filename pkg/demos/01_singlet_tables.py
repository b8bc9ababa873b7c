"""
Singlet outcome tables
======================

Each pair of polarizer angles defines one context with its own joint law of
the two outcomes. This script builds the four tables used in the standard
CHSH setup and checks that they never signal.
"""
import math

from kolmobell import build_family, no_signaling_report, singlet_table

###############################################################################
# One context
# -----------
# Outcomes are listed in the order (+,+), (+,-), (-,+), (-,-).

for delta in (0.0, math.pi / 3, math.pi / 2):
    t = singlet_table(delta, 0.0)
    print(f"angle difference {delta:.4f}: {t.values}  correlation {t.correlation():+.4f}")

###############################################################################
# The four CHSH contexts
# ----------------------

family = build_family(angles_a=[0.0, math.pi / 2], angles_b=[math.pi / 4, -math.pi / 4],
                      model="singlet")
for (i, j) in family.contexts():
    print(f"context ({i},{j}):", [round(p, 6) for p in family.table(i, j)])

###############################################################################
# Marginals
# ---------
# Alice's marginal does not depend on Bob's setting, and vice versa.

report = no_signaling_report(family)
print("signaling:", report.signaling, "max deviation:", report.max_deviation)
