"""Tabulate the loop-field mismatch across the ground plane versus offset h.

The raw mismatch of tangential H and normal B at x3 = +-h shrinks linearly
in h (it is the field gradient times 2h). Linear extrapolation of each side
to x3 = 0 removes it.
"""

from soilmpt.model import SoilParams
from soilmpt.sources import LoopSource, loop_field_halfspace

SOIL = SoilParams(1.6, 1.0006)
LOOP = LoopSource(radius=0.135, height=0.2, current=10.0)


def mismatch(up, dn):
    return max(abs(up[0] - dn[0]) / abs(up[0]), abs(up[2] - SOIL.mu_rs * dn[2]) / abs(up[2]))


def main():
    print(f"{'rho':>6} {'h':>8} {'raw':>10} {'extrapolated':>13}")
    for rho in (0.05, 0.135, 0.3):
        def f(x3):
            return loop_field_halfspace(LOOP, SOIL, 1e5, [rho, 0.0, x3])
        for h in (1e-3, 1e-4, 1e-5, 1e-6):
            up, dn = f(h), f(-h)
            ext = mismatch(2 * up - f(2 * h), 2 * dn - f(-2 * h))
            print(f"{rho:6.3f} {h:8.0e} {mismatch(up, dn):10.2e} {ext:13.2e}")


if __name__ == "__main__":
    main()
