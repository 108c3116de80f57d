"""Solve every phase-boundary constant for a handful of (p, s) families.

Each family of mixtures lam*x^p + (1-lam)*x^s falls into one of five
structural regimes, and the regime decides which boundary constants
exist at all. The p = 2 families carry their own pair of cut points.
"""
from parisi_zero import boundaries, regime

FAMILIES = [(2, 3), (2, 4), (2, 8), (3, 20), (4, 18), (4, 28), (4, 38), (3, 3)]


def show(p, s):
    r = regime(p, s)
    b = boundaries(p, s)
    print(f"(p, s) = ({p}, {s})   regime: {r.tag}")
    if b.p2 is not None:
        for name, val in b.p2.items():
            print(f"    {name:<22s} {val if val is None else format(val, '.15f')}")
    if b.general is not None:
        for name, val in b.general.items():
            print(f"    {name:<22s} {val:.15f}")
    if b.p2 is None and b.general is None:
        print("    no interior boundaries, one phase for all lam")
    print()


for p, s in FAMILIES:
    show(p, s)

# The (2, 4) family is the classic testbed: below lambda_1to1F the
# measure is a single step, above lambda_1Fto1 = 12/13 it is fully
# continuous, and in between a continuous piece grows out of the step.
b24 = boundaries(2, 4)
print("check: lambda_1Fto1 for (2,4) minus 12/13 =",
      b24.p2["lambda_1Fto1"] - 12.0 / 13.0)
