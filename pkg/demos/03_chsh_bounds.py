"""
Conditional versus absolute CHSH
================================

Conditional correlations reproduce the singlet cosines and reach 2*sqrt(2).
Absolute correlations live on a single space, so they obey the CHSH bound;
with uniform gates they are a quarter of the conditional ones.
"""
import math

from kolmobell import analyze, build_family, build_space, chsh, max_chsh

space = build_space(build_family(angles_a=[0.0, math.pi / 2],
                                 angles_b=[math.pi / 4, -math.pi / 4], model="singlet"))

report = analyze(space)
for pair in report.pairs:
    print(f"({pair.i},{pair.j})  C = {pair.conditional:+.6f}  E = {pair.absolute:+.6f}")

s = chsh(space, (1, 1, 1, -1))
print("conditional CHSH:", s.value_conditional, " 2*sqrt(2) =", 2 * math.sqrt(2))
print("absolute CHSH:   ", s.value_absolute)
for name, b in report.bounds.to_dict().items():
    print(f"  {name}: {b['value']:.6f} <= {b['limit']}  {'pass' if b['pass'] else 'FAIL'}")

###############################################################################
# The bound 4 is only reached by perfectly (anti)correlated tables
# -----------------------------------------------------------------

diag, anti = [0.5, 0, 0, 0.5], [0, 0.5, 0.5, 0]
grid = dict(zip([(1, 1), (1, 2), (2, 1), (2, 2)], [diag, diag, diag, anti]))
print("hand-built grid:", max_chsh(build_space(build_family(grid, m=2, n=2))))
