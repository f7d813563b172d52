"""Command-line front end: ``egsplit {wick,omega,split,qed,validate}``."""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import io
import json
import sys
import warnings

import numpy as np

from . import qed, scaling, validate
from .config import ConfigError, RunConfig, load_config
from .dirac import identity4, slash
from .splitter import (SplittingError, ThresholdWarning, av_causal, check_versor, ret_causal,
                       ret_noncausal, theta_multiply)
from .wick import (WickError, Vertex, enumerate_contractions, epstein_glaser_sums, patterns_to_json,
                   qed_vertex, scalar_field)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector(text):
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"not a 4-vector: {text!r}") from exc
    if len(values) != 4:
        raise UsageError(f"not a 4-vector: {text!r}")
    return np.array(values)


def _cx(z):
    z = complex(z)
    return [z.real, z.imag]


# -- scalar distributions addressable by id ----------------------------------------------

def scalar_registry(m):
    sig_scalar, sig_vector = qed.self_energy_parts(m)
    return {
        "f": qed.vacuum_polarization_f(m),
        "g": qed.vacuum_polarization_g(m),
        "sigma_1": sig_scalar,
        "sigma_pslash": sig_vector,
        "C2_scalar": qed.c2_scalar(m),
        "K2_scalar": qed.k2_scalar(m),
    }


# -- grid evaluation ---------------------------------------------------------------------

def _evaluate(job):
    func, p = job
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdWarning)
        return func(p)


def map_grid(func, grid, jobs):
    """Ordered evaluation, optionally fanned out over processes."""
    if jobs <= 1:
        return [_evaluate((func, p)) for p in grid]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate, [(func, p) for p in grid]))


class _SplitRow:
    def __init__(self, name, m, versor, p_ref, omega, cfg):
        self.name, self.m, self.versor, self.p_ref, self.omega, self.cfg = name, m, versor, p_ref, omega, cfg

    def __call__(self, p):
        d = scalar_registry(self.m)[self.name]
        if self.omega is not None:
            d = d.with_omega(self.omega)
        value = d(p)
        if d.omega < 0:
            ret = theta_multiply(d, p, cfg=self.cfg) if self.versor is None else \
                ret_noncausal(d, self.versor, p, cfg=self.cfg)
            av = ret - value
        elif self.versor is None and self.p_ref is None and d.causal:
            ret, av = ret_causal(d, p, self.cfg), av_causal(d, p, self.cfg)
        else:
            v = np.array([1.0, 0, 0, 0]) if self.versor is None else self.versor
            ret = ret_noncausal(d, v, p, self.p_ref, self.cfg)
            av = ret - value
        return {"p": [float(x) for x in p], "ret": _cx(ret), "av": _cx(av), "d": _cx(value),
                "check_ret_minus_av_minus_d": abs(ret - av - value)}


class _QedRow:
    def __init__(self, kernel, m, e2, cfg):
        self.kernel, self.m, self.e2, self.cfg = kernel, m, e2, cfg

    def __call__(self, p):
        m, e2 = self.m, self.e2
        row = {"p": [float(x) for x in p], "p2": float(p[0] ** 2 - p[1:] @ p[1:])}
        if self.kernel == "pi":
            value = qed.pi_scalar(p, m, self.cfg) * e2
            tensor = qed.pi_tilde(p, m, e2, self.cfg)
            row.update(pi=_cx(value), transversality=float(np.max(np.abs(qed.transversality(tensor, p)))))
        elif self.kernel == "sigma":
            mat = qed.sigma_tilde(p, m, e2)
            a = np.trace(mat) / 4
            b = np.trace(mat @ slash(p)) / 4 / row["p2"]
            row.update(scalar=_cx(a), pslash=_cx(b))
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", qed.BranchWarning)
                row.update(upsilon=_cx(qed.upsilon_tilde(p, m, e2)))
        return row


# -- commands ------------------------------------------------------------------------------

def cmd_wick(args, cfg):
    m = cfg.mass
    if args.vertex == "qed":
        v1, v2 = qed_vertex(1, m), qed_vertex(2, m)
    else:
        v1, v2 = Vertex((scalar_field(mass=m),), 1), Vertex((scalar_field(mass=m),), 2)
    out = {"vertex": args.vertex, "patterns": json.loads(patterns_to_json(enumerate_contractions(v1, v2)))}
    if args.partitions:
        out["partition_sums"] = [s.to_dict() for s in epstein_glaser_sums(args.partitions)]
    return out, None


def cmd_omega(args, cfg):
    patterns = enumerate_contractions(qed_vertex(1, cfg.mass), qed_vertex(2, cfg.mass))
    out = {"degrees": [{"scalar_id": p.scalar_factor_id, "q": p.q, "omega": p.omega} for p in patterns]}
    if args.estimate:
        d = scalar_registry(cfg.mass)[args.estimate]
        est = scaling.singular_order_estimate(d)
        out["estimate"] = {"scalar_id": d.name, "omega_formula": d.omega, "omega_est": est.omega,
                           "error": est.error, "lambdas": list(est.lambdas)}
    return out, None


def cmd_split(args, cfg):
    reg = scalar_registry(cfg.mass)
    if args.scalar_id not in reg:
        raise UsageError(f"unknown scalar id {args.scalar_id!r}; choose from {sorted(reg)}")
    versor = None if args.versor is None else check_versor(_vector(args.versor))
    p_ref = None if args.normalization_point is None else _vector(args.normalization_point)
    freedom = {}
    if args.freedom:
        try:
            raw = json.loads(args.freedom)
            freedom = {tuple(int(k) for k in key.split(",")): complex(*val) for key, val in raw.items()}
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad --freedom: {exc}") from exc
    d = reg[args.scalar_id]
    omega = d.omega if args.omega is None else args.omega
    for alpha in freedom:
        if len(alpha) != 4 or sum(alpha) > omega:
            raise UsageError(f"freedom index {alpha} exceeds omega = {omega}")
    rows = map_grid(_SplitRow(args.scalar_id, cfg.mass, versor, p_ref, args.omega, cfg.quadrature),
                    cfg.grid(), args.jobs)
    for row in rows:
        shift = sum(c * np.prod(np.power(row["p"], a)) for a, c in freedom.items())
        for key in ("ret", "av"):
            row[key] = _cx(complex(*row[key]) + shift)
    out = {
        "scalar_id": d.name,
        "omega": omega,
        "normalization_point": None if p_ref is None else [float(x) for x in p_ref],
        "freedom": [{"alpha": list(a), "C": _cx(c)} for a, c in sorted(freedom.items())],
        "frame_versor": None if versor is None else [float(x) for x in versor],
        "grid": rows,
    }
    if args.omega_estimate:
        est = scaling.singular_order_estimate(d)
        out["omega_estimate"] = {"omega_est": est.omega, "error": est.error}
    return out, rows


def cmd_qed(args, cfg):
    if args.kernel == "s2-table":
        rows = [{"group": k, "monomial": " ".join(t.monomial), "coefficient_id": t.coefficient_id,
                 "prefactor": _cx(t.prefactor), "pattern": t.pattern_id, "argument": t.argument}
                for k, t in enumerate(qed.s2_table())]
        return {"kernel": "s2-table", "terms": rows}, rows
    rows = map_grid(_QedRow(args.kernel, cfg.mass, cfg.e2, cfg.quadrature), cfg.grid(), args.jobs)
    out = {"kernel": args.kernel, "mass": cfg.mass, "e2": cfg.e2, "grid": rows}
    if args.kernel == "sigma":
        p = np.array([cfg.mass, 0.0, 0.0, 0.0])
        value = qed.sigma_tilde(p, cfg.mass, cfg.e2)
        expected = cfg.e2 * (2 * np.pi) ** -4 * 3 / 8 * (slash(p) - cfg.mass * identity4)
        out["on_shell"] = {"p": [float(x) for x in p], "deviation": float(np.max(np.abs(value - expected)))}
    return out, rows


def cmd_validate(args, cfg):
    results = validate.run_checks(args.only)
    for r in results:
        print(r.line(), file=sys.stderr)
    return validate.report(results), None


# -- output -----------------------------------------------------------------------------------

def _flatten(row):
    flat = {}
    for key, value in row.items():
        if isinstance(value, list):
            for k, x in enumerate(value):
                flat[f"{key}_{k}"] = x
        else:
            flat[key] = value
    return flat


def render(payload, rows, fmt):
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    if rows is None:
        raise UsageError("csv output is only available for grid data")
    flat = [_flatten(r) for r in rows]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat[0]) if flat else [], lineterminator="\n")
    writer.writeheader()
    for r in flat:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def build_parser():
    def add_globals(target, suppress):
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        target.add_argument("--config", help="flat key = value run configuration", **kw)
        target.add_argument("--out", help="write output here instead of stdout", **kw)
        target.add_argument("--format", choices=("json", "csv"), **(kw or {"default": "json"}))
        target.add_argument("--jobs", type=int, help="processes for grid evaluation", **(kw or {"default": 1}))

    parser = _Parser(prog="egsplit", description=__doc__)
    add_globals(parser, suppress=False)
    # global flags are also accepted after the subcommand
    common = _Parser(add_help=False)
    add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("wick", parents=[common], help="contraction patterns between two vertices")
    p.add_argument("--vertex", choices=("qed", "scalar"), default="qed")
    p.add_argument("--partitions", type=int, help="also emit A', R', D for this order")
    p.set_defaults(func=cmd_wick)

    p = sub.add_parser("omega", parents=[common], help="singularity degrees, optionally a scaling estimate")
    p.add_argument("--estimate", help="scalar id to estimate numerically")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("split", parents=[common], help="retarded/advanced parts on the configured grid")
    p.add_argument("scalar_id")
    p.add_argument("--versor", help="t,x,y,z of the time-like versor")
    p.add_argument("--normalization-point", help="t,x,y,z")
    p.add_argument("--freedom", help='JSON {"a0,a1,a2,a3": [re, im]}')
    p.add_argument("--omega", type=int, help="override the singular order")
    p.add_argument("--omega-estimate", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("qed", parents=[common], help="closed-form kernels on the configured grid")
    p.add_argument("kernel", choices=("pi", "sigma", "upsilon", "s2-table"))
    p.set_defaults(func=cmd_qed)

    p = sub.add_parser("validate", parents=[common], help="run the oracle suite")
    p.add_argument("--only", nargs="*", help="check numbers or names")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        payload, rows = args.func(args, cfg)
        text = render(payload, rows, args.format)
    except (UsageError, ConfigError, WickError, SplittingError) as exc:
        print(f"egsplit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "validate" and not payload["passed"]:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
