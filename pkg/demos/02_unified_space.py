"""
One probability space for four incompatible contexts
=====================================================

The gates at each lab pick a channel at random. Putting that choice into the
sample space gives 16 atoms carrying all four tables at once. Conditioning on
the gates gives back each table exactly.
"""
import math

from kolmobell import (
    a_value,
    b_value,
    build_family,
    build_space,
    conditional_probability,
    gate_a,
    gate_b,
    independence_check_eta,
    joint_distribution,
    probability,
)
from kolmobell.space import to_slot_tuple

family = build_family(angles_a=[0.0, math.pi / 2], angles_b=[math.pi / 4, -math.pi / 4],
                      model="singlet")
space = build_space(family)  # gates open with probability 1/2 each

###############################################################################
# The atoms
# ---------
# Shown in zero-padded form: one slot per channel, 0 where the channel is closed.

for atom in space.atoms:
    print(to_slot_tuple(atom), f"{space.mass(atom):.6f}")
print("total mass:", space.total_mass())

###############################################################################
# Gate variables
# --------------

print("P(eta_a = 1) =", probability(space, gate_a(1)))
print("P(eta_a = 1, eta_b = 1) =", probability(space, gate_a(1) & gate_b(1)))
print("independence:", independence_check_eta(space))

###############################################################################
# Conditioning recovers the tables
# --------------------------------

for (i, j) in family.contexts():
    given = gate_a(i) & gate_b(j)
    recovered = [conditional_probability(space, a_value(i, e) & b_value(j, f), given)
                 for e, f in [(1, 1), (1, -1), (-1, 1), (-1, -1)]]
    print(f"({i},{j}) recovered {[round(p, 6) for p in recovered]}"
          f"  table {[round(p, 6) for p in family.table(i, j)]}")

###############################################################################
# Joint law including the zero outcomes
# -------------------------------------

for cell, p in sorted(joint_distribution(space, 1, 1).items()):
    print(f"P(A1={cell[0]:+d}, B1={cell[1]:+d}) = {p:.6f}")
