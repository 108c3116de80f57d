import numpy as np

from parisi_zero import boundaries, classify

# Walk lam across [0, 1] for the (4, 38) family, which passes through
# four distinct boundaries, and draw the resulting phase band.

P, S = 4, 38
GLYPH = {"RS": ".", "OneRSB": "1", "TwoRSB": "2", "TwoFRSB": "F",
         "OneFRSB": "f", "FRSB": "c", "Unresolved": "?"}

b = boundaries(P, S)
print(f"(p, s) = ({P}, {S}) boundary constants:")
for name, val in b.general.items():
    print(f"  {name:<14s} {val:.12f}")
print()

# The interesting region is squeezed near lam = 1, so sweep two windows:
# a coarse one over the whole interval and a fine one over the top band.
for lo, hi, n, label in [(0.0, 1.0, 61, "coarse"),
                         (0.97, 1.0, 61, "fine, lam in [0.97, 1]")]:
    lams = np.linspace(lo, hi, n)
    marks = []
    for lam in lams:
        c = classify(P, S, float(lam))
        marks.append(GLYPH[c.phase])
    print(f"{label}:")
    print("  " + "".join(marks))
print()
print("legend: 1 = one step, 2 = two steps, F = two steps + continuous part,")
print("        f = one step + continuous part")
print()

# Energy is continuous across each boundary even though the structure
# of the optimal measure changes. Probe the 2-step boundary both ways.
cut = b.general["lambda_1to2"]
lo = classify(P, S, cut - 1e-6)
hi = classify(P, S, cut + 1e-6)
print(f"at lambda_1to2 = {cut:.12f}:")
print(f"  below  phase={lo.phase:<7s} energy={lo.energy:.12f}")
print(f"  above  phase={hi.phase:<7s} energy={hi.energy:.12f}")
print(f"  energy gap {abs(hi.energy - lo.energy):.3e}")
