#!/usr/bin/env python3
"""Independent oracles for frozen test constants.

Every numeric literal frozen into the test suite that is not a textbook
closed form is produced here by a method independent of the library code
(mpmath root finding, Monte-Carlo integration, brute-force enumeration,
Bessel series).  Run and paste the printed values; tests reference this
script by name.
"""
import math

import mpmath as mp
import numpy as np

mp.mp.dps = 30

print("== Luxemburg norm of 1 on a unit-area domain ==")
# norm = 1/s* where (s*+1) log(s*+1) - s* = 1
s_star = mp.findroot(lambda s: (s + 1) * mp.log(s + 1) - s - 1, 1.7)
print(f"s*      = {mp.nstr(s_star, 17)}")
print(f"1/s*    = {mp.nstr(1 / s_star, 17)}")

print()
print("== Monte-Carlo integral of nu_upper(2 + r^2, 1) over the unit disc ==")
# nu_upper(b, 1) for b in [2,3]: only m=0 counts (2|b| >= 4 > 1) -> b/2pi.
# Exact value: int_disc (2+r^2)/2pi dx = int_0^1 (2+r^2) r dr = 1.25.
rng = np.random.default_rng(20240817)
N = 1_000_000
pts = rng.uniform(-1.0, 1.0, size=(2 * N, 2))
pts = pts[(pts ** 2).sum(axis=1) < 1.0][:N]
b = 2.0 + (pts ** 2).sum(axis=1)
dens = b / (2.0 * math.pi)  # nu_upper(b,1) on this b-range
area = math.pi
est = area * dens.mean()
serr = area * dens.std(ddof=1) / math.sqrt(len(dens))
print(f"samples = {len(dens)}")
print(f"estimate = {est:.9f}")
print(f"stderr   = {serr:.3e}")
print(f"analytic = {1.25}")

print()
print("== Brute-force dyadic square count: side 1/8 squares inside unit disc ==")
# squares on the (2^-3 Z)^2 lattice whose closed square fits in the closed
# unit disc centered at the origin; farthest point of a square from 0 is a corner
k = 3
s = 2.0 ** -k
count = 0
rng_idx = range(-2 ** (k + 1) - 2, 2 ** (k + 1) + 3)
for i in rng_idx:
    for j in rng_idx:
        ox, oy = i * s, j * s
        corners = [(ox, oy), (ox + s, oy), (ox, oy + s), (ox + s, oy + s)]
        if all(x * x + y * y <= 1.0 for x, y in corners):
            count += 1
print(f"k=3 squares inside unit disc: {count}")

print()
print("== Epsilon-envelope limits of the raw Landau density at (b,l)=(1,2) ==")
for sgn, name in ((-1.0, "lower"), (+1.0, "upper")):
    vals = []
    for p in range(4, 13):
        eps = 10.0 ** -p
        lam = 2.0 + sgn * eps
        m = math.floor(lam / 2.0)
        vals.append((2 * m + 1) / (2 * math.pi))
    assert max(vals) - min(vals) == 0.0
    print(f"nu_{name}(1,2) -> {vals[0]:.12f}  ({'1' if sgn<0 else '3'}/2pi)")

print()
print("== Hardy tail w_0 for h = 1 + cos(theta)/2 (Bessel series) ==")
# e_n = e^{in(theta + sin(theta)/2)}/sqrt(2pi); coefficient of frequency n+k
# is J_k(n/2)/sqrt(2pi) (Jacobi-Anger).  ||P_- e_n||^2 = sum_{k<-n} J_k(n/2)^2.
w0 = mp.mpf(0)
per_n = []
for n in range(1, 41):
    sn = mp.mpf(0)
    for kk in range(n + 1, n + 80):
        sn += mp.besselj(kk, mp.mpf(n) / 2) ** 2
    per_n.append(sn)
    w0 += sn
print(f"||P_- e_1||^2 = {mp.nstr(per_n[0], 12)}")
print(f"||P_- e_2||^2 = {mp.nstr(per_n[1], 12)}")
print(f"w_0 = sum_(n>=1) = {mp.nstr(w0, 12)}")
print(f"w_1 = sum_(n>=2) = {mp.nstr(w0 - per_n[0], 12)}")

print()
print("== Dirichlet Laplacian on (0,1)^2: eigenvalues pi^2 (m^2+n^2) ==")
eigs = sorted(math.pi ** 2 * (m * m + n * n) for m in range(1, 5) for n in range(1, 5))
print("first six:", ", ".join(f"{e:.6f}" for e in eigs[:6]))

print()
print("== Quintic step s(x) = x^3 (10 - 15 x + 6 x^2): slope bound ==")
x = np.linspace(0.0, 1.0, 100001)
sp = 30.0 * x ** 2 * (1.0 - x) ** 2
print(f"sup |s'| = {sp.max():.10f}  (analytic 15/8 = {15/8})")
