# Reference values for tests/oracles.rs, by direct numerical integration
# of the defining integrals at 30 digits.
from mpmath import mp, mpf, mpc, quad, pi, exp, log, inf

mp.dps = 30

def line_log(pieces, z):
    acc = mpc(0)
    for a, b, c in pieces:
        f = lambda t: c * (1 / (t - z) - t / (1 + t * t))
        pts = [a, b] if b != inf else [a, a + 1, inf]
        if a < z.real < pts[1]:
            pts.insert(1, z.real)
        acc += quad(f, pts)
    return acc / pi

def schwarz(arcs, z):
    acc = mpc(0)
    for a, b, c in arcs:
        f = lambda th: c * (exp(1j * th) + z) / (exp(1j * th) - z)
        acc += quad(f, [a, b])
    return acc

def circle_log(arcs, z):
    return 1j * schwarz(arcs, z) / (2 * pi)

def outer_log(arcs, z):
    total = sum(c * (b - a) for a, b, c in arcs)
    return (schwarz(arcs, z) + total) / (4 * pi)

def show(name, v):
    print(f"    ({name}, {mp.nstr(v.real, 20)}, {mp.nstr(v.imag, 20)}),")

third = pi / 3
gamma = [(mpf(-2), mpf(-0.5), mpf("0.8")), (mpf(-0.5), mpf(1), mpf("-1.3")), (mpf(2), mpf(4), third),
         (mpf(5), inf, mpf("0.5"))]
arcs = [(mpf("-2.2"), mpf("-0.7"), mpf("0.9")), (mpf("0.4"), mpf("1.9"), mpf("-0.6"))]
mu = [(mpf("-2.4"), mpf("-1.1"), mpf("0.7")), (mpf("1.1"), mpf("2.4"), mpf("0.7"))]
eta = [(mpf(2), mpf(10) / 3, pi), (mpf(10) / 3, mpf(17) / 4, third)]

for z in [mpc("0.3", "0.7"), mpc("-1.5", "-0.4"), mpc("2.5", "0.01"), mpc("5", "2")]:
    show(f"line z=({z.real}, {z.imag})", line_log(gamma, z))
for z in [mpc("0.3", "0.2"), mpc("1.7", "-0.9"), mpc("-0.1", "-0.95")]:
    show(f"circle z=({z.real}, {z.imag})", circle_log(arcs, z))
    show(f"outer z=({z.real}, {z.imag})", outer_log(mu, z))
for z in [mpc("0.2", "0.3"), mpc("-2.5", "1.1")]:
    show(f"N z=({z.real}, {z.imag})", log(mpf("2.5")) + line_log(eta, z + 1 / z))
