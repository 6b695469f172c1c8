"""Smoke test for the dirac_nlcs_py extension.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import math

import dirac_nlcs_py as dn


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    p = dn.Params()
    close(p.omega_b, 1.0, 0.0)
    close(p.x0, -2.0, 0.0)
    close(dn.eigenfunction(p, 0, -2.0), (2 * math.pi) ** -0.25, 1e-15)
    for n in range(6):
        close(dn.energy(p, n), math.sqrt(n), 1e-15)

    strained = dn.Params.from_strain("x", 0.21)
    close(strained.zeta, 0.58 / 1.063, 1e-12)

    lo, hi = dn.density_maxima(p, 1)
    close(hi - p.x0, math.sqrt(1.5), 1e-10)
    close(p.x0 - lo, math.sqrt(1.5), 1e-10)

    close(dn.bessel_i(1, 1.0), 0.5651591039924851, 1e-14)

    s = dn.CoherentState("shifted1", 1.5 + 0.5j, delta=0.3)
    assert s.eigen_residual() < 1e-9
    occ = s.occupation()
    lam = abs(s.alpha) ** 2
    for n, prob, poisson in occ[1:10]:
        close(prob, math.exp(-lam) * lam ** (n - 1) / math.factorial(n - 1), 1e-12)
        close(prob, poisson, 1e-12)
    close(sum(q for _, q, _ in occ) + s.tail_bound, 1.0, 1e-10)

    for family, limit in [("identity", 0.5), ("shifted1", 1.0), ("shifted2", 2.0)]:
        hur = dn.CoherentState(family, 1e-6).uncertainty()["hur"]
        close(hur, limit, 1e-4)

    pristine, aniso = s.mean_energy(strained)
    close(aniso, math.sqrt(strained.v_xx * strained.v_yy) * pristine, 1e-15)

    xs = [p.x0 + 0.01 * i for i in range(-1500, 1501)]
    rho = s.density(p, xs)
    close(sum(rho) * 0.01, 1.0, 1e-6)

    try:
        dn.CoherentState("nope", 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown family accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
