"""Command-line front end.

    vortexps [--config FILE] [--out DIR] <command> [flags]

Commands: sweep, scaling, pseudospectrum, spectrum, verify, multiplier.
Settings come from flags, then a `key = value` config file, then the
RunConfig defaults; the output root defaults to $VORTEXPS_OUT or ./runs.

Exit codes: 0 ok, 1 falsified check, 2 usage/config error, 3 results
not truncation-stable.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError
from .grid import LogGrid

log = logging.getLogger("vortexps")

ENV_OUT = "VORTEXPS_OUT"
EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_UNSTABLE = 0, 1, 2, 3


# {{{ config

@dataclass
class RunConfig:
    """Run settings.  t_min/t_max/n left as None select the automatic grid
    (resolved in h for the given k and beta_k)."""
    t_min: float | None = None
    t_max: float | None = None
    n: int | None = None
    eps0: float = 0.462
    eps1: float = 0.426
    include_nonlocal: bool = True
    out: str = "runs"
    stability_rtol: float = 0.01
    nu_tol: float = 1e-4
    seed: int = 0
    workers: int = 1
    route: str = "structured"

    def validate(self):
        if not (0 < self.eps0 < 1 and 0 < self.eps1 < 1):
            raise ConfigurationError("eps0 and eps1 must lie in (0, 1)")
        if self.n is not None and self.n < 16:
            raise ConfigurationError("n must be >= 16")
        if self.stability_rtol <= 0 or self.nu_tol <= 0:
            raise ConfigurationError("tolerances must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.route not in ("structured", "half", "log"):
            raise ConfigurationError(f"unknown route {self.route!r}")
        if (self.t_min is None) != (self.t_max is None):
            raise ConfigurationError("give both t_min and t_max or neither")
        if self.t_min is not None:
            LogGrid(self.t_min, self.t_max, self.n or 600)
        return self

    def grid(self):
        """Explicit LogGrid or None (automatic)."""
        if self.t_min is None and self.n is None:
            return None
        if self.t_min is None:
            from .grid import T_MAX, T_MIN
            return LogGrid(T_MIN, T_MAX, self.n)
        return LogGrid(self.t_min, self.t_max, self.n or 600)

    def digest(self):
        d = asdict(self)
        d.pop("out")
        d.pop("workers")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def _coerce(name, raw):
    types = {f.name: f.type for f in fields(RunConfig)}
    if name not in types:
        raise ConfigurationError(f"unknown config key {name!r}")
    typ = str(types[name])
    raw = str(raw).strip()
    if raw.lower() in ("none", ""):
        return None
    if "bool" in typ:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"{name}: expected a boolean, got {raw!r}")
    try:
        if "int" in typ:
            return int(float(raw))
        if "float" in typ:
            return float(raw)
    except ValueError:
        raise ConfigurationError(f"{name}: cannot parse {raw!r}") from None
    return raw


def read_config_file(path):
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = _coerce(key.replace("-", "_"), val)
    return out


def build_config(args):
    vals = {}
    env = os.environ.get(ENV_OUT)
    if env:
        vals["out"] = env
    if getattr(args, "config", None):
        vals.update(read_config_file(args.config))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            vals[f.name] = v
    return RunConfig(**vals).validate()

# }}}


# {{{ output

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def csv_text(header, columns, rows, footer=()):
    """'#' metadata lines, a column header, rows, and '#' footer lines."""
    buf = io.StringIO()
    for key, val in header.items():
        buf.write(f"# {key} = {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def csv_body(text):
    return "".join(line + "\n" for line in text.splitlines() if not line.startswith("#"))


@dataclass
class RunManifest:
    command: str
    argv: list
    config: dict
    config_digest: str
    started: str
    finished: str = ""
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)
    stability: dict = field(default_factory=dict)
    cells: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)

    def write(self, path):
        write_atomic(path, json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable))

    @classmethod
    def load(cls, path):
        return cls(**json.loads(Path(path).read_text()))


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def _versions():
    import scipy

    from . import __version__
    return {"vortexps": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": sys.version.split()[0]}


def _now():
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


class Run:
    """Collects artifacts of one command and owns its manifest."""

    def __init__(self, name, command, cfg, argv, resume=False):
        self.root = Path(cfg.out)
        self.path = self.root / f"{name}.manifest.json"
        self.t0 = time.time()
        self.man = RunManifest(command, list(argv), asdict(cfg), cfg.digest(), _now(),
                               versions=_versions())
        if resume and self.path.exists():
            old = RunManifest.load(self.path)
            if old.config_digest == self.man.config_digest:
                self.man.cells = {k: v for k, v in old.cells.items()
                                  if (self.root / v["file"]).exists()}
                self.man.artifacts = sorted({v["file"] for v in self.man.cells.values()})
            else:
                log.warning("manifest %s was written with another config; not resuming", self.path)

    def save(self, rel, text):
        write_atomic(self.root / rel, text)
        if rel not in self.man.artifacts:
            self.man.artifacts.append(rel)
        return self.root / rel

    def cell(self, key):
        return self.man.cells.get(key)

    def done(self, key, rel, summary):
        self.man.cells[key] = dict(file=rel, **summary)
        self.man.write(self.path)

    def finish(self):
        self.man.finished = _now()
        self.man.wall_time = round(time.time() - self.t0, 3)
        self.man.artifacts = sorted(set(self.man.artifacts))
        self.man.write(self.path)
        return self.path

# }}}


# {{{ commands

def _tag(x):
    return f"{x:g}".replace("+", "")


def _sweep_text(res, cfg):
    hdr = dict(command="sweep", alpha=res.alpha, k=res.k, beta_k=res.beta,
               include_nonlocal=res.include_nonlocal, grid=list(res.grid),
               grid_refined=list(res.grid_refined), route=cfg.route,
               stability_rtol=cfg.stability_rtol, eps0=cfg.eps0, eps1=cfg.eps1)
    rows = zip(res.nu, res.lam, res.sigma_min, 1 / res.sigma_min, res.stable)
    foot = [f"psi = {res.psi!r}", f"nu_star = {res.nu_star!r}", f"lambda_star = {res.lam_star!r}",
            f"psi_refined = {res.psi_refined!r}", f"psi_stable = {int(res.psi_stable)}"]
    return csv_text(hdr, ["nu", "lambda", "sigma_min", "resnorm", "stable"], rows, foot)


def _nus(args):
    if args.nus:
        return np.array(args.nus, float)
    if args.nu_min is not None or args.nu_max is not None or args.nu_count is not None:
        return np.linspace(args.nu_min if args.nu_min is not None else -0.5,
                           args.nu_max if args.nu_max is not None else 1.5,
                           args.nu_count or 41)
    return None


def _one_sweep(alpha, k, cfg, nus=None, lams=None):
    from .resolvent import sweep_lambda
    return sweep_lambda(alpha, k, nus=nus, lams=lams, grid=cfg.grid(),
                        include_nonlocal=cfg.include_nonlocal, workers=cfg.workers,
                        route=cfg.route, nu_tol=cfg.nu_tol, rtol=cfg.stability_rtol)


def cmd_sweep(args, cfg):
    from .svg import line_plot
    suffix = "" if cfg.include_nonlocal else "_local"
    name = f"sweep_a{_tag(args.alpha)}_k{args.k}{suffix}"
    run = Run(name, "sweep", cfg, args.argv)
    res = _one_sweep(args.alpha, args.k, cfg, _nus(args), args.lambdas)
    run.save(name + ".csv", _sweep_text(res, cfg))
    run.man.stability = {"points_stable": int(res.stable.sum()), "points": int(len(res.nu)),
                         "psi_stable": bool(res.psi_stable)}
    if args.svg:
        run.save(name + ".svg", line_plot([("sigma_min", res.nu, res.sigma_min)], "nu = lambda/beta_k",
                                          "sigma_min", f"alpha={args.alpha:g} k={args.k}", logy=True))
    run.finish()
    print(f"psi = {res.psi:.8g} at nu = {res.nu_star:.6g} (stable: {res.psi_stable})")
    return EXIT_OK if res.stable.any() else EXIT_UNSTABLE


def cmd_scaling(args, cfg):
    from .resolvent import fit_scaling
    from .svg import line_plot
    alphas = [float(a) for a in args.alphas]
    suffix = "" if cfg.include_nonlocal else "_local"
    name = f"scaling_k{args.k}{suffix}"
    run = Run(name, "scaling", cfg, args.argv, resume=args.resume)
    table = []
    for a in alphas:
        key = _tag(a)
        got = run.cell(key)
        if got is None:
            res = _one_sweep(a, args.k, cfg)
            rel = f"{name}_a{key}.csv"
            run.save(rel, _sweep_text(res, cfg))
            got = dict(alpha=a, psi=res.psi, psi_refined=res.psi_refined, nu_star=res.nu_star,
                       psi_stable=bool(res.psi_stable))
            run.done(key, rel, got)
        else:
            log.info("alpha = %g taken from the manifest", a)
        table.append(got)
    psis = [c["psi"] for c in table]
    stable = [c["psi_stable"] for c in table]
    slope, icpt, rms = fit_scaling(alphas, psis)
    foot = [f"exponent = {slope!r}", f"intercept = {icpt!r}", f"rms = {rms!r}", "target = 1/3"]
    hdr = dict(command="scaling", k=args.k, include_nonlocal=cfg.include_nonlocal, route=cfg.route,
               grid="auto" if cfg.grid() is None else list(cfg.grid().key()))
    rows = [(c["alpha"], c["psi"], c["psi_refined"], c["nu_star"], c["psi_stable"]) for c in table]
    run.save(name + ".csv", csv_text(hdr, ["alpha", "psi", "psi_refined", "nu_star", "stable"], rows, foot))
    run.man.stability = {"psi_stable": stable}
    if args.svg:
        run.save(name + ".svg", line_plot([("psi", alphas, psis)], "alpha", "psi",
                                          f"k={args.k}, exponent {slope:.3f}", logx=True, logy=True))
    run.finish()
    print(f"fitted exponent = {slope:.4f} (target 1/3), intercept = {icpt:.4f}, rms = {rms:.3g}")
    return EXIT_OK if all(stable) else EXIT_UNSTABLE


def cmd_pseudospectrum(args, cfg):
    from .resolvent import pseudospectrum
    from .svg import contour_plot
    rect = tuple(float(v) for v in args.rect)
    if len(rect) != 4:
        raise ConfigurationError("--rect needs xmin,xmax,ymin,ymax")
    ps = pseudospectrum(args.alpha, args.k, rect, args.nx, args.ny, grid=cfg.grid(),
                        include_nonlocal=cfg.include_nonlocal, workers=cfg.workers, route=cfg.route)
    name = f"pseudospectrum_a{_tag(args.alpha)}_k{args.k}"
    run = Run(name, "pseudospectrum", cfg, args.argv)
    rows = [(x, y, ps.resnorm[j, i]) for j, y in enumerate(ps.y) for i, x in enumerate(ps.x)]
    hdr = dict(command="pseudospectrum", alpha=args.alpha, k=args.k, rect=list(rect),
               nx=args.nx, ny=args.ny, grid=list(ps.grid), include_nonlocal=cfg.include_nonlocal)
    run.save(name + ".csv", csv_text(hdr, ["re", "im", "resnorm"], rows))
    if args.svg:
        run.save(name + ".svg", contour_plot(ps.x, ps.y, ps.resnorm, ps.levels(),
                                             title=f"resolvent norm, alpha={args.alpha:g} k={args.k}"))
    run.finish()
    print(f"resolvent norm range [{np.nanmin(ps.resnorm):.4g}, {np.nanmax(ps.resnorm):.4g}]")
    return EXIT_OK


def cmd_spectrum(args, cfg):
    from .resolvent import eigenvalues
    res = eigenvalues(args.alpha, args.k, grid=cfg.grid(), include_nonlocal=cfg.include_nonlocal,
                      count=args.count)
    name = f"spectrum_a{_tag(args.alpha)}_k{args.k}"
    run = Run(name, "spectrum", cfg, args.argv)
    rows = [(j, z.real, z.imag, s) for j, (z, s) in enumerate(zip(res.values, res.stable))]
    hdr = dict(command="spectrum", alpha=args.alpha, k=args.k, grid=list(res.grid),
               include_nonlocal=cfg.include_nonlocal)
    run.save(name + ".csv", csv_text(hdr, ["index", "re", "im", "stable"], rows))
    run.man.stability = {"stable": int(res.stable.sum()), "total": int(len(res.stable))}
    run.finish()
    for z, s in list(zip(res.values, res.stable))[:10]:
        print(f"{z.real:.10g} {z.imag:+.10g}i {'stable' if s else 'unstable'}")
    return EXIT_OK if res.stable.any() else EXIT_UNSTABLE


def cmd_verify(args, cfg):
    from .verify import VerifyConfig, run_all
    vc = VerifyConfig(eps0=cfg.eps0, eps1=cfg.eps1, seed=cfg.seed, workers=cfg.workers)
    if args.delta is not None:
        vc.delta = args.delta
    if args.samples is not None:
        vc.metric_samples = args.samples
    rep = run_all(vc)
    run = Run("verify", "verify", cfg, args.argv)
    run.save("verify.json", rep.to_json() + "\n")
    run.save("verify.txt", rep.to_text() + "\n")
    run.man.stability = {"passed": rep.passed}
    run.finish()
    print(rep.to_text())
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_multiplier(args, cfg):
    from .multiplier import C0_WORK, coercivity_check, make_multiplier_spec
    from .profile import ModeParams
    mp = ModeParams.from_nu(args.alpha, args.k, args.nu, eps0=cfg.eps0, eps1=cfg.eps1)
    spec = make_multiplier_spec(mp, args.c0 if args.c0 is not None else C0_WORK)
    rep = coercivity_check(mp, spec, grid=cfg.grid(), include_nonlocal=cfg.include_nonlocal,
                           check_stability=args.stability)
    name = f"multiplier_a{_tag(args.alpha)}_k{args.k}_nu{_tag(args.nu)}"
    run = Run(name, "multiplier", cfg, args.argv)
    run.save(name + ".json", json.dumps(rep.to_dict(), indent=2, sort_keys=True, default=_jsonable) + "\n")
    run.man.stability = {"lambda_min_refined": rep.lambda_min_refined}
    run.finish()
    print(f"case {rep.case_tag}: c_fit = {rep.c_fit:.6g} (power {rep.power:.4g}, shift {rep.constant_shift:g})")
    return EXIT_OK if rep.positive else EXIT_FAILED

# }}}


# {{{ argument parsing

def _floats(s):
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="vortexps", description="Resolvent and coercivity computations "
                                "for the angular modes of the linearized Oseen vortex operator.")
    p.add_argument("--config", help="key = value file (overridden by flags)")
    p.add_argument("--out", help=f"output root (default ${ENV_OUT} or ./runs)")
    p.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run settings")
    g.add_argument("--t-min", dest="t_min", type=float)
    g.add_argument("--t-max", dest="t_max", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--eps0", type=float)
    g.add_argument("--eps1", type=float)
    g.add_argument("--no-nonlocal", dest="include_nonlocal", action="store_const", const=False)
    g.add_argument("--stability-rtol", dest="stability_rtol", type=float)
    g.add_argument("--nu-tol", dest="nu_tol", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--route", choices=["structured", "half", "log"])

    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", parents=[common], help="resolvent norm along lambda")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--nu-min", type=float)
    s.add_argument("--nu-max", type=float)
    s.add_argument("--nu-count", type=int)
    s.add_argument("--nus", type=_floats)
    s.add_argument("--lambdas", type=_floats)
    s.add_argument("--svg", action="store_true")

    s = sub.add_parser("scaling", parents=[common], help="Psi(alpha) and its fitted exponent")
    s.add_argument("--alphas", type=_floats, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--resume", action="store_true")
    s.add_argument("--svg", action="store_true")

    s = sub.add_parser("pseudospectrum", parents=[common], help="resolvent norm on a rectangle")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--rect", type=_floats, required=True, help="xmin,xmax,ymin,ymax")
    s.add_argument("--nx", type=int, default=40)
    s.add_argument("--ny", type=int, default=40)
    s.add_argument("--svg", action="store_true")

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues of the half-line mode operator")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--count", type=int)

    s = sub.add_parser("verify", parents=[common], help="inequality battery")
    s.add_argument("--delta", type=float, help="override the constant in delta r^2 g^2 <= sigma")
    s.add_argument("--samples", type=int, help="metric samples per gamma")

    s = sub.add_parser("multiplier", parents=[common], help="coercivity certificate at one nu")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--c0", type=float)
    s.add_argument("--stability", action="store_true", help="repeat on the enlarged grid")
    return p


COMMANDS = dict(sweep=cmd_sweep, scaling=cmd_scaling, pseudospectrum=cmd_pseudospectrum,
                spectrum=cmd_spectrum, verify=cmd_verify, multiplier=cmd_multiplier)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad usage
    args.argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigurationError, DomainError) as exc:
        print(f"vortexps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

# }}}
