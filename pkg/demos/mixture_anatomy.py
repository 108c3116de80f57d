import numpy as np

from parisi_zero import c_log, make_mixture, solve_z, xi_deriv

# A mixture is lam * x**p + (1 - lam) * x**s. Everything downstream is
# driven by its first three derivatives, so start by looking at those.

m = make_mixture(4, 18, 0.5)
print(f"mixture: p={m.p} s={m.s} lam={m.lam}")

for x in (0.0, 0.25, 0.5, 0.75, 1.0):
    row = [xi_deriv(m, x, k) for k in (0, 1, 2, 3)]
    print("  x={:.2f}  xi={:.6f}  xi'={:.6f}  xi''={:.6f}  xi'''={:.6f}".format(x, *row))

# The one-step tilt z solves c(z) = 1/xi'(1), where c is a log-shaped
# transform that is well behaved for z > -1. Below xi'(1) = 2 the only
# root is z = 0 and the model is replica symmetric.
print()
print("tilt equation c(z) = 1/xi'(1):")
for (p, s, lam) in [(2, 5, 1.0), (3, 3, 1.0), (4, 18, 0.5), (4, 38, 0.3)]:
    mm = make_mixture(p, s, lam)
    z = solve_z(mm)
    a = xi_deriv(mm, 1.0, 1)
    resid = c_log(z) - 1.0 / a
    print(f"  p={p:<2d} s={s:<2d} lam={lam:.2f}  xi'(1)={a:8.4f}  z={z:.12f}  residual={resid:+.2e}")

# Sanity anchor: the pure 2-spin model has ground-state energy sqrt(2)
# and sits at z = 0.
m2 = make_mixture(2, 2, 1.0)
print()
print("pure 2-spin: z =", solve_z(m2), " (RS, energy sqrt(2) =", np.sqrt(2.0), ")")
