"""One optimal measure from each phase, spelled out segment by segment.

A measure here is a piecewise density on [0, 1) plus a point mass at 1:
const segments are flat steps, full segments follow the closed-form
density 0.5 * xi'''(x) / xi''(x)**1.5. The classifier returns the
measure already calibrated, so this is mostly a pretty-printer.
"""
import json

from parisi_zero import classify, to_json_dict

POINTS = [
    ("RS", 2, 5, 1.0),
    ("OneRSB", 4, 18, 0.5),
    ("TwoRSB", 4, 38, 0.8),
    ("TwoFRSB", 3, 20, 0.96),
    ("OneFRSB", 3, 20, 0.982),
    ("FRSB", 2, 4, 0.95),
]

for want, p, s, lam in POINTS:
    c = classify(p, s, lam)
    assert c.phase == want, (c.phase, want)
    nu = c.measure
    print(f"{want}  at (p={p}, s={s}, lam={lam})")
    for seg in nu.segments:
        if seg.kind == "const":
            print(f"  [{seg.lo:.6f}, {seg.hi:.6f})  const  value={seg.value:.10f}")
        else:
            print(f"  [{seg.lo:.6f}, {seg.hi:.6f})  full")
    print(f"  atom at 1: {nu.atom:.10f}")
    r = c.report
    print(f"  certificate: normalization={r.normalization_error:.2e}"
          f"  min_g={r.min_g:+.2e}  support={r.support_residual:.2e}"
          f"  passed={r.passed}")
    print()

# Measures serialize to plain JSON, the same format the command line
# verify subcommand reads back.
nu = classify(4, 18, 0.5).measure
print("JSON form of the one-step measure:")
print(json.dumps(to_json_dict(nu), indent=2))
