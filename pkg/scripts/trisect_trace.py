"""Trace the joint rho/z trisection on a polynomial that vanishes at both ends.

Prints the state table and the distance of the final z from the closed-form
argmax 1/2 + 2 rho / 3 (valid for G = x(1-x), eps = 1/4 on [0, 1]).
"""

import argparse
from dataclasses import dataclass

from cantorlab.creals import Interval, q
from cantorlab.handles import polynomial_handle
from cantorlab.schwarz import d2_bound_certificate, rho_z_search, verify_max_certificate


@dataclass
class TrisectConfig:
    coeffs: str = "0,1,-1"
    x: str = "1/2"
    eps: str = "1/4"
    steps: int = 20


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, val in vars(TrisectConfig()).items():
        ap.add_argument(f"--{name}", type=type(val), default=val)
    cfg = TrisectConfig(**vars(ap.parse_args()))
    G = polynomial_handle([q(c) for c in cfg.coeffs.split(",")], Interval(0, 1))
    cert = rho_z_search(G, q(cfg.x), cfg.steps, q(cfg.eps))
    print(f"{'n':>3} {'b-a':>12} {'d-c':>12} {'delta':>12}")
    for s in cert.states:
        print(f"{s.step:>3} {float(s.b - s.a):>12.4g} {float(s.d - s.c):>12.4g} {float(s.delta):>12.4g}")
    z, rho = cert.z_point, cert.rho_point
    print(f"z ~ {float(z):.8f}, rho ~ {float(rho):.8f}")
    print(f"|z - (1/2 + 2 rho/3)| = {float(abs(z - (q(1, 2) + 2 * rho / 3))):.3g}")
    print(f"bad margin steps: {verify_max_certificate(G, cert)}")
    d2 = d2_bound_certificate(G, z, q(cfg.eps), 1, q(1, 10**6))
    print(f"D2 at z ~ {float(d2.quotient.mid):.6g}, bound {float(d2.bound):.6g}, holds={d2.holds}")


if __name__ == "__main__":
    main()
