"""Command-line interface.

Every command prints one JSON object (or CSV) carrying the numeric backend
used. Exit codes: 0 on any computed answer, 2 on malformed input, 3 when a
size cap is exceeded, 4 when a precondition fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import bounds, domination, measure, z2
from .errors import CapExceeded, GraphError, PreconditionError
from .graph import load_graph, make_family, mask_of, members
from .numeric import BACKENDS, check_backend, fmt, to_rational
from .xi import XiCache, ovoep, xi_enumerate

EXIT_PARSE, EXIT_CAP, EXIT_PRECONDITION = 2, 3, 4


class ParseError(ValueError):
    pass


# --- argument helpers -------------------------------------------------------

def parse_p(text):
    """Scalar (``0.7``, ``7/10``) or JSON vector (``[0.5, 0.6]``)."""
    if text is None:
        return None
    text = str(text).strip()
    if text.startswith("["):
        try:
            vals = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad parameter vector: {exc}") from None
        return [str(v) if isinstance(v, str) else v for v in vals]
    try:
        to_rational(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad parameter {text!r}") from None
    return text


def parse_range(text):
    """``start:stop:step`` with inclusive stop, evaluated exactly."""
    try:
        start, stop, step = (to_rational(part) for part in text.split(":"))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad range {text!r}; expected start:stop:step") from None
    if step <= 0:
        raise ParseError("range step must be positive")
    out = []
    i = 0
    while start + i * step <= stop:
        out.append(start + i * step)
        i += 1
    return out


def _graph(args):
    if bool(args.family) == bool(args.graph):
        raise ParseError("give exactly one of --family or --graph")
    return make_family(args.family) if args.family else load_graph(args.graph)


def _p(args):
    if args.p is None:
        raise ParseError("--p is required")
    return parse_p(args.p)


def _json_list(text, what):
    try:
        vals = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad {what}: {exc}") from None
    if not isinstance(vals, list):
        raise ParseError(f"{what} must be a JSON list")
    return vals


def _load_dist(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read distribution {path}: {exc}") from None
    return measure.Dist.from_json(data.get("dist", data))


def _render(x, backend):
    if isinstance(x, Fraction) and backend != "rational":
        return float(x)
    return fmt(x)


# --- commands ---------------------------------------------------------------

def cmd_xi(args):
    g, p = _graph(args), _p(args)
    if args.method == "enumerate":
        cache = XiCache(g, p, args.backend)
        value = xi_enumerate(g, [-x for x in cache.q])
    else:
        value = XiCache(g, p, args.backend).value(g.full)
    return {"value": fmt(value)}


def cmd_member(args):
    return measure.membership(_graph(args), _p(args), args.backend).to_json()


def cmd_boundary(args):
    r, t = measure.boundary_crossing(_graph(args), _p(args), args.backend, tol=args.tol)
    return {"r": [fmt(x) for x in r], "t": fmt(t)}


def _base_measure(args):
    g = _graph(args)
    d = measure.construct_measure(g, _p(args), args.backend)
    return g, d


def cmd_measure(args):
    g, p = _graph(args), _p(args)
    if args.or_c is not None:
        d = measure.or_composition(g, p, parse_p(args.or_c), args.backend)
    else:
        d = measure.construct_measure(g, p, args.backend)
    if args.and_x is not None:
        d = domination.min_composition(d, parse_p(args.and_x))
    neg = d.negative_config()
    out = {"dist": d.to_json()}
    if neg is not None:
        out["signed"] = True
        out["negative_config"] = neg
    return out


def cmd_ovoep(args):
    g = _graph(args)
    w = mask_of(_json_list(args.w, "--w"))
    value = ovoep(g, w, args.v, _p(args), backend=args.backend)
    return {"value": fmt(value), "w": members(w), "v": args.v}


def cmd_bounds(args):
    op = args.op
    if op in bounds.CLOSED_FORMS:
        report = bounds.closed_forms(op, k=args.k, D=args.D, d=args.d, p=args.p and to_rational(args.p))
        out = report.to_json()
        out["value"] = _render(report.value, args.backend)
        return out
    if op == "halfball":
        return {"dist": bounds.kfuzz_halfball_brf(args.k).to_json()}
    g = _graph(args)
    if op == "thm2":
        markers = mask_of(_json_list(args.markers, "--markers")) if args.markers else 0
        c = bounds.thm2_vector(g, _p(args), markers, args.backend)
        return {"name": "thm2_vector", "value": [fmt(x) for x in c], "kind": bounds.LOWER}
    if op in ("lll", "fp"):
        q = parse_p(args.q) if args.q is not None else None
        if q is None:
            p = _p(args)
            q = [1 - to_rational(x) for x in p] if isinstance(p, list) else 1 - to_rational(p)
        q = [float(to_rational(x)) for x in q] if isinstance(q, list) else float(to_rational(q))
        s = [float(x) for x in _json_list(args.s, "--s")] if args.s else None
        check = bounds.lll_check if op == "lll" else bounds.fp_check
        out = check(g, q, s=s, search=args.search).to_json()
        out["kind"] = bounds.SUFFICIENT
        return out
    if op == "intrinsic":
        vec = measure.intrinsic_vector(g, _p(args), args.radius, args.backend)
        return {"vertices": [b.to_json() for b in vec]}
    raise ParseError(f"unknown bounds op {op!r}")


def _dist_pair(args):
    if args.dist_y:
        dY = _load_dist(args.dist_y)
    else:
        _, dY = _base_measure(args)
    if args.dist_x:
        dX = _load_dist(args.dist_x)
    elif args.product is not None:
        dX = measure.product(parse_p(args.product), dY.n, args.backend)
    else:
        raise ParseError("give --dist-x or --product")
    return dY, dX


def cmd_dominate(args):
    dY, dX = _dist_pair(args)
    exact = True if args.exact else None
    res = domination.strassen_dominates(dY, dX, exact=exact)
    out = res.to_json()
    if not args.plan:
        out.pop("plan", None)
    out["necessary"] = list(domination.necessary_check(dY, dX, exact=exact))
    return out


def _subject(args):
    kind = args.measure
    if kind == "file":
        if not args.dist:
            raise ParseError("--measure file needs --dist")
        return _load_dist(args.dist)
    if kind == "halfball":
        return bounds.kfuzz_halfball_brf(args.k)
    if kind == "product":
        g = _graph(args)
        return measure.product(_p(args), g.n, args.backend)
    if kind == "counterexample":
        return domination.counterexample(_graph(args), _p(args), args.backend).dist
    _, d = _base_measure(args)
    return d


def cmd_sigma(args):
    d = _subject(args)
    value = domination.dominated_value(d, tol=args.tol, exact=not args.float_flow)
    return {"value": _render(value, args.backend), "measure": args.measure, "tol": args.tol}


def cmd_counterexample(args):
    ce = domination.counterexample(_graph(args), _p(args), args.backend)
    out = ce.to_json()
    if args.sigma:
        out["sigma"] = _render(domination.dominated_value(ce.dist), args.backend)
    return out


def cmd_sample(args):
    d = _load_dist(args.dist) if args.dist else _base_measure(args)[1]
    draws = measure.sample(d, args.seed, args.count)
    return {
        "columns": ["draw", "config"],
        "rows": [(i, format(c, f"0{d.n}b")[::-1]) for i, c in enumerate(draws)],
        "n": d.n,
    }


def cmd_russo(args):
    g = _graph(args)
    d = measure.construct_measure(g, _p(args), args.backend)
    if args.target is not None:
        target = parse_p(args.target)
        target = [to_rational(x) for x in target] if isinstance(target, list) else [to_rational(target)] * g.n
        target = [float(x) for x in target] if args.backend != "rational" else target
    else:
        target = list(bounds.thm2_vector(g, _p(args), 0, args.backend))
    pairs = domination.russo_sample(domination.conditional_oracle(d), target, args.seed, args.count)
    ordered = sum(1 for z, x in pairs if z & x == x)
    return {
        "count": len(pairs),
        "ordered": ordered,
        "target": [fmt(x) for x in target],
        "x_freq": [sum(x >> v & 1 for _, x in pairs) / len(pairs) for v in range(g.n)],
        "z_freq": [sum(z >> v & 1 for z, _ in pairs) / len(pairs) for v in range(g.n)],
    }


def cmd_grid(args):
    op = args.op
    if op == "spiral":
        order = z2.spiral_order(args.N)
        shapes = z2.spiral_shapes(args.N)
        return {"N": args.N, "order": [list(c) for c in order], "shapes": [list(s.params) for s in shapes]}
    p = _p(args)
    if op == "ovoep":
        shape = z2.GridShape(args.n, args.k, args.l)
        return {"shape": list(shape.params), "value": fmt(z2.shape_ovoep(shape, p, args.backend))}
    if op == "a_estimate":
        caps = tuple(_json_list(args.caps, "--caps"))
        return z2.a_estimate(p, caps, args.backend).to_json()
    if op == "density":
        rows = z2.density_rows(range(1, args.N + 1), p, args.backend)
        return {"columns": ["N", "p", "xi_log_density", "backend"], "rows": rows}
    if op == "ovoep_table":
        caps = tuple(_json_list(args.caps, "--caps"))
        return {"columns": ["n", "k", "l", "p", "ovoep", "backend"], "rows": z2.ovoep_rows(caps, p, args.backend)}
    raise ParseError(f"unknown grid op {op!r}")


COMMANDS = {
    "xi": cmd_xi,
    "member": cmd_member,
    "boundary": cmd_boundary,
    "measure": cmd_measure,
    "ovoep": cmd_ovoep,
    "bounds": cmd_bounds,
    "dominate": cmd_dominate,
    "sigma": cmd_sigma,
    "counterexample": cmd_counterexample,
    "sample": cmd_sample,
    "russo": cmd_russo,
    "grid": cmd_grid,
}


# --- parser -----------------------------------------------------------------

def _common(sub):
    sub.add_argument("--family", help='family spec, e.g. "kfuzz:k=2,n=9" or "grid:N=4"')
    sub.add_argument("--graph", help="graph file (JSON or edge list)")
    sub.add_argument("--p", help="parameter: scalar or JSON vector")
    sub.add_argument("--backend", choices=BACKENDS, default=None, help="numeric backend")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--output", help="write here instead of stdout")


def _command_options(name, sub):
    if name == "xi":
        sub.add_argument("--method", choices=("dc", "enumerate"), default="dc")
    elif name == "boundary":
        sub.add_argument("--tol", type=float, default=1e-12)
    elif name == "measure":
        sub.add_argument("--or-c", dest="or_c", help="OR with an independent product of these marginals")
        sub.add_argument("--and-x", dest="and_x", help="AND with an independent product of these marginals")
    elif name == "ovoep":
        sub.add_argument("--w", required=True, help="JSON list of vertices")
        sub.add_argument("--v", type=int, required=True)
    elif name == "bounds":
        ops = sorted(bounds.CLOSED_FORMS) + ["halfball", "thm2", "lll", "fp", "intrinsic"]
        sub.add_argument("--op", required=True, choices=ops)
        sub.add_argument("--k", type=int)
        sub.add_argument("--D", type=int)
        sub.add_argument("--d", type=int)
        sub.add_argument("--q", help="failure probabilities for lll/fp (default 1 - p)")
        sub.add_argument("--s", help="JSON weight vector to verify instead of searching")
        sub.add_argument("--search", choices=(bounds.FIXED_POINT, bounds.UNIFORM), default=bounds.FIXED_POINT)
        sub.add_argument("--markers", help="JSON list of vertices in components modelling infinite graphs")
        sub.add_argument("--radius", type=int, default=3)
    elif name == "dominate":
        sub.add_argument("--dist-y", dest="dist_y", help="dominating law (default: Shearer on --family/--p)")
        sub.add_argument("--dist-x", dest="dist_x", help="dominated law")
        sub.add_argument("--product", help="dominated law is the product with these marginals")
        sub.add_argument("--exact", action="store_true", help="run the flow in rationals")
        sub.add_argument("--plan", action="store_true", help="include the coupling plan")
    elif name == "sigma":
        sub.add_argument("--measure", choices=("shearer", "product", "halfball", "counterexample", "file"),
                         default="shearer")
        sub.add_argument("--dist")
        sub.add_argument("--k", type=int)
        sub.add_argument("--tol", type=float, default=1e-9)
        sub.add_argument("--float-flow", dest="float_flow", action="store_true",
                         help="run the flow in floats (cannot resolve a value of exactly zero)")
    elif name == "counterexample":
        sub.add_argument("--sigma", action="store_true", help="also report the dominated value")
    elif name == "sample":
        sub.add_argument("--dist")
        sub.add_argument("--count", type=int, default=10)
    elif name == "russo":
        sub.add_argument("--target", help="product marginals (default: the uniformly dominated vector)")
        sub.add_argument("--count", type=int, default=1000)
    elif name == "grid":
        sub.add_argument("--op", required=True, choices=("ovoep", "a_estimate", "spiral", "density", "ovoep_table"))
        sub.add_argument("--n", type=int, default=0)
        sub.add_argument("--k", type=int, default=0)
        sub.add_argument("--l", type=int, default=0)
        sub.add_argument("--N", type=int, default=4)
        sub.add_argument("--caps", default="[3, 3, 3]")


def build_parser():
    parser = argparse.ArgumentParser(prog="shearerlab", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    commands = {}
    for name in COMMANDS:
        sub = subs.add_parser(name)
        _common(sub)
        _command_options(name, sub)
        commands[name] = sub
    sweep = subs.add_parser("sweep", help="run a command over a homogeneous p-range, one CSV row per p")
    sweep.add_argument("target", choices=sorted(COMMANDS))
    sweep.add_argument("--range", dest="p_range", required=True, help="start:stop:step (inclusive)")
    sweep.add_argument("--jobs", type=int, default=1)
    parser.command_parsers = commands
    return parser


# --- output -----------------------------------------------------------------

def _scalar(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return v


def _to_csv(result, header_comment=None):
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if "columns" in result and "rows" in result:
        writer.writerow(result["columns"])
        for row in result["rows"]:
            writer.writerow(row)
    else:
        keys = list(result)
        writer.writerow(keys)
        writer.writerow([_scalar(result[k]) for k in keys])
    return buf.getvalue()


def _sweep_point(target, params, p):
    args = argparse.Namespace(**params)
    args.p = p
    result = COMMANDS[target](args)
    return {k: v for k, v in result.items() if k not in ("columns", "rows")}


def run_sweep(args, target_args):
    points = parse_range(args.p_range)
    params = vars(target_args).copy()
    texts = [str(p) for p in points]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, [args.target] * len(texts), [params] * len(texts), texts))
    else:
        results = [_sweep_point(args.target, params, t) for t in texts]
    keys = []
    for res in results:
        for k in res:
            if k not in keys and k != "backend":
                keys.append(k)
    rows = []
    for p, res in zip(points, results):
        value = str(p) if target_args.backend == "rational" else float(p)
        rows.append([value, target_args.backend] + [_scalar(res.get(k)) for k in keys])
    return {"columns": ["p", "backend"] + keys, "rows": rows}


def run(argv=None) -> tuple[int, str]:
    """Parse ``argv``, execute, and return ``(exit status, output text)``."""
    parser = build_parser()
    try:
        args, extras = parser.parse_known_args(argv)
        if extras and args.command != "sweep":
            parser.error(f"unrecognized arguments: {' '.join(extras)}")
    except SystemExit as exc:
        return int(exc.code or 0), ""
    try:
        if args.command == "sweep":
            try:
                target_args = parser.command_parsers[args.target].parse_args(extras)
            except SystemExit as exc:
                return int(exc.code or 0), ""
            target_args.backend = check_backend(target_args.backend)
            result = run_sweep(args, target_args)
            args.output = target_args.output
            command = "shearerlab " + " ".join(shlex.quote(a) for a in (argv if argv is not None else sys.argv[1:]))
            text = _to_csv(result, f"generated by: {command}")
        else:
            args.backend = check_backend(args.backend)
            result = COMMANDS[args.command](args)
            result = {"command": args.command, "backend": args.backend, **result}
            if args.format == "csv":
                text = _to_csv(result)
            else:
                text = json.dumps(result) + "\n"
    except PreconditionError as exc:
        return EXIT_PRECONDITION, f"error: {exc}\n"
    except CapExceeded as exc:
        return EXIT_CAP, f"error: {exc}\n"
    except (ParseError, GraphError, ValueError) as exc:
        return EXIT_PARSE, f"error: {exc}\n"
    if args.output:
        Path(args.output).write_text(text)
        return 0, ""
    return 0, text


def main(argv=None) -> int:
    status, text = run(argv)
    stream = sys.stdout if status == 0 else sys.stderr
    stream.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
