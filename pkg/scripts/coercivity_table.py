"""Coercivity constants per case and their drift when beta_k grows by 4.

    python3 scripts/coercivity_table.py [--factor 4] [--local]
"""
import argparse

from vortexps.multiplier import coercivity_drift
from vortexps.profile import ModeParams

CASES = [("EasyHigh", 1e3, 5, 1.0), ("EasyLow", 1e3, 5, 0.0), ("Case1", 1e4, 84, 0.05),
         ("Case2", 1e4, 84, 0.6), ("Case3", 1e4, 84, 0.99), ("Case4", 1e3, 5, 0.9999)]


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--factor", type=float, default=4.0)
    p.add_argument("--local", action="store_true", help="drop the nonlocal term")
    a = p.parse_args()
    print(f"{'case':<9} {'alpha':>7} {'k':>3} {'nu':>7} {'power':>6} {'shift':>5} "
          f"{'c_fit':>9} {'c_fit x' + format(a.factor, 'g'):>9} {'drift':>7}")
    for name, alpha, k, nu in CASES:
        mp = ModeParams.from_nu(alpha, k, nu)
        assert mp.case_tag.value == name, (name, mp.case_tag)
        r1, r2, d = coercivity_drift(alpha, k, nu, factor=a.factor, include_nonlocal=not a.local)
        print(f"{name:<9} {alpha:>7g} {k:>3d} {nu:>7g} {r1.power:>6.3f} {r1.constant_shift:>5g} "
              f"{r1.c_fit:>9.4g} {r2.c_fit:>9.4g} {d:>7.1%}", flush=True)


if __name__ == "__main__":
    main()
