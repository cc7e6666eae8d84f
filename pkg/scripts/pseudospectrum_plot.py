"""Resolvent-norm contours of one angular mode, with its eigenvalues listed.

    python3 scripts/pseudospectrum_plot.py --alpha 1e3 --k 3 --rect 0,12,0,120
"""
import argparse
from pathlib import Path

from vortexps.cli import write_atomic
from vortexps.resolvent import eigenvalues, pseudospectrum
from vortexps.svg import contour_plot


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--alpha", type=float, default=1e3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--rect", default="0,12,0,120", help="xmin,xmax,ymin,ymax")
    p.add_argument("--nx", type=int, default=40)
    p.add_argument("--ny", type=int, default=40)
    p.add_argument("--out", default="runs/scripts")
    a = p.parse_args()
    rect = tuple(float(v) for v in a.rect.split(","))
    ps = pseudospectrum(a.alpha, a.k, rect, a.nx, a.ny, route="half")
    ev = eigenvalues(a.alpha, a.k, count=8)
    for z, s in zip(ev.values, ev.stable):
        print(f"{z.real:12.6f} {z.imag:+12.6f}i  {'stable' if s else 'unstable'}")
    path = Path(a.out) / f"pseudospectrum_a{a.alpha:g}_k{a.k}.svg"
    write_atomic(path, contour_plot(ps.x, ps.y, ps.resnorm, ps.levels(),
                                    title=f"resolvent norm, alpha = {a.alpha:g}, k = {a.k}"))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
