"""Cross-examine the analytic answers with a structure-blind search.

oracle_profile minimizes the energy functional over k-step measures for
k = 0, 1, 2, ... without knowing any of the closed-form constructions.
If the analytic phase says 'one step', the profile should flatline at
k = 1; if the phase has a continuous part, every extra step should keep
buying a little energy and the analytic value should sit underneath the
whole ladder.
"""
from parisi_zero import classify, make_mixture, oracle_profile

CASES = [
    (2, 5, 1.00, "replica symmetric, expect saturation at k = 0"),
    (4, 18, 0.50, "one-step, expect saturation at k = 1"),
    (4, 38, 0.80, "two-step, expect saturation at k = 2"),
    (2, 4, 0.95, "continuous, expect no saturation"),
]

for p, s, lam, note in CASES:
    m = make_mixture(p, s, lam)
    c = classify(p, s, lam)
    prof = oracle_profile(m, kmax=3, restarts=8, seed=7, gap_tol=1e-7)
    print(f"(p={p}, s={s}, lam={lam})  {note}")
    print(f"  analytic: phase={c.phase}  energy={c.energy:.12f}")
    for k, ek in enumerate(prof.energies):
        gap = ek - c.energy
        print(f"  oracle k={k}: energy={ek:.12f}  above analytic by {gap:+.3e}")
    print(f"  verdict: {prof.tag}")
    print()

# The k = 1 optimum at a one-step point should reproduce the analytic
# atom, not just the energy.
m = make_mixture(4, 18, 0.5)
c = classify(4, 18, 0.5)
sm = oracle_profile(m, kmax=1, restarts=8, seed=7).measures[1]
print("one-step point, analytic atom vs oracle atom:")
print(f"  analytic {c.measure.atom:.10f}")
print(f"  oracle   {sm.atom:.10f}")
