"""Command-line interface: ``spinnet <command> ...``.

All spins are given as integers equal to 2j. Exit codes: 0 success,
1 computation or verification failure, 2 usage or parse error, 3 resource
budget exceeded. Floats are printed with repr, the shortest string that
round-trips binary64.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path


from . import graphs, semiclassics, statesum
from .dynamics import parse_program, path_sum, run_program
from .errors import (
    InputError,
    MoveError,
    NonEuclideanError,
    ParseError,
    ProgramError,
    ResourceError,
    SpinnetError,
    TruncationError,
)
from .exact import SignedSqrtRational
from .simulator import SimState, recoupling_matrix
from .trees import format_bracket, k_assignments, parse_bracket
from .wigner import (
    clebsch_gordan,
    residual_biedenharn_elliott,
    residual_orthogonality,
    residual_racah,
    triangle_ok,
    wigner_6j,
    wigner_6j_oracle,
    wigner_9j,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class _Failure(SpinnetError):
    """A check requested on the command line did not pass."""


def fmt_float(x) -> str:
    return repr(float(x))


def fmt_complex(z) -> str:
    z = complex(z)
    return f"{fmt_float(z.real)} {fmt_float(z.imag)}"


def fmt_exact(v: SignedSqrtRational) -> str:
    """``sign num/den float``, or ``0 0 0.0`` for zero."""
    if v.is_zero():
        return "0 0 0.0"
    sign = "+" if v.sign > 0 else "-"
    r = v.radicand
    return f"{sign} {r.numerator}/{r.denominator} {fmt_float(v)}"


def _tree_arg(text):
    tree, _ = parse_bracket(text)
    return tree


# ----------------------------------------------------------------- commands


def cmd_sixj(args, out):
    v = wigner_6j(*args.spins)
    print(fmt_exact(v), file=out)
    if args.verify:
        j1, j2, j3, j4, j5, j6 = args.spins
        ref = wigner_6j_oracle(j1, j2, j3, j4, j5, j6)
        if (ref.sign, ref.radicand) != (v.sign, v.radicand):
            raise _Failure(f"oracle disagrees: {fmt_exact(ref)}")
        print("verify ok", file=out)


def cmd_cg(args, out):
    print(fmt_exact(clebsch_gordan(*args.spins)), file=out)


def cmd_ninej(args, out):
    v = wigner_9j(*args.spins)
    print(fmt_exact(v), file=out)
    if args.verify:
        # <(13)(24) | (12)(34)> = sqrt((2j12+1)(2j34+1)(2j13+1)(2j24+1)) {9j}
        j1, j2, j12, j3, j4, j34, j13, j24, J = args.spins
        rows = ((j1, j2, j12), (j3, j4, j34), (j13, j24, J))
        cols = ((j1, j3, j13), (j2, j4, j24), (j12, j34, J))
        if all(triangle_ok(*t) for t in rows + cols):
            spins = [j1, j2, j3, j4]
            m = recoupling_matrix(((1, 2), (3, 4)), ((1, 3), (2, 4)), spins, J)
            k_in = k_assignments(((1, 2), (3, 4)), spins, J).index((j12, j34))
            k_out = k_assignments(((1, 3), (2, 4)), spins, J).index((j13, j24))
            dims = ((j12 + 1) * (j34 + 1) * (j13 + 1) * (j24 + 1)) ** 0.5
            ref = m[k_out, k_in] / dims
        else:
            ref = 0.0
        if abs(ref - float(v)) > 1e-12:
            raise _Failure(f"recoupling cross-check gives {fmt_float(ref)}")
        print("verify ok", file=out)


def cmd_graph(args, out):
    try:
        g = graphs.build_graph(args.n, args.kind)
    except ResourceError as exc:
        # an unsupported n is a usage error on the command line
        raise InputError(str(exc)) from None
    if args.action == "stats":
        degs = sorted(g.degrees())
        degree = str(degs[0]) if len(degs) == 1 else f"{degs[0]}-{degs[-1]}"
        conn = "yes" if g.is_connected() else "no"
        print(f"|V|={len(g)} degree={degree} connected={conn}", file=out)
    elif args.action == "diameter":
        d = graphs.diameter(g)
        text = f"diameter={d}"
        if args.kind == "rotation":
            text += f" bound={fmt_float(graphs.diameter_bound(args.n))}"
        print(text, file=out)
    elif args.action == "path":
        if len(args.trees) != 2:
            raise InputError("path needs two bracket strings")
        t1, t2 = (_tree_arg(t) for t in args.trees)
        steps = graphs.find_path(g, t1, t2)
        print(f"length={len(steps)}", file=out)
        print(format_bracket(g.vertices[g.vertex(t1)]), file=out)
        for move, tree in steps:
            print(f"{move} -> {format_bracket(tree)}", file=out)
    else:
        out.write(graphs.export_edges(g))


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def cmd_simulate(args, out):
    program = parse_program(_read(args.program), source=args.program)
    tree = _tree_arg(args.state)
    keys = k_assignments(tree, args.spins, args.J)
    if not keys:
        raise InputError("no admissible intermediate spins for these leaf spins and J")
    k = tuple(args.k) if args.k is not None else keys[0]
    M = args.J if args.M is None else args.M
    s = SimState.basis(tree, args.spins, args.J, k, M)
    final = run_program(s, program)
    print(f"# basis {format_bracket(final.tree)}", file=out)
    for (k, M), a in sorted(final.amplitudes.items(), key=lambda item: (item[0][0], -item[0][1])):
        label = ",".join(map(str, k)) if k else "-"
        print(f"k={label} M={M} {fmt_complex(a)}", file=out)


def cmd_pathsum(args, out):
    b_in, b_out = _tree_arg(args.source), _tree_arg(args.target)
    g = graphs.build_graph(b_in.n, args.graph)
    z = path_sum(g, b_in, b_out, args.spins, args.J, args.weighting, args.lmax)
    v_in, v_out = g.vertices[g.vertex(b_in)], g.vertices[g.vertex(b_out)]
    k_in = k_assignments(v_in, args.spins, args.J)
    k_out = k_assignments(v_out, args.spins, args.J)
    print(f"# {format_bracket(v_out)} <- {format_bracket(v_in)}", file=out)
    for i, ko in enumerate(k_out):
        for j, ki in enumerate(k_in):
            print(f"{','.join(map(str, ko)) or '-'} {','.join(map(str, ki)) or '-'} {fmt_complex(z[i, j])}",
                  file=out)


def cmd_prsum(args, out):
    t = statesum.parse_triangulation(_read(args.triangulation), source=args.triangulation)
    coloring = {}
    if args.coloring:
        coloring = statesum.parse_coloring(_read(args.coloring), source=args.coloring)
    C = float(args.C)
    if set(coloring) >= set(t.edges):
        value = statesum.state_functional(t, coloring, args.L, C, unnormalized=args.unnormalized)
    else:
        value = statesum.partition_sum(t, args.L, C, fixed_boundary=coloring,
                                       budget=args.budget, unnormalized=args.unnormalized)
    print(fmt_complex(value) if isinstance(value, complex) else fmt_float(value), file=out)


def _k_range(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 1 <= lo <= hi, got {text!r}")
    return range(lo, hi + 1)


def cmd_asympt(args, out):
    if args.sweep == "pr-sweep":
        envelope = args.envelope
        rows = semiclassics.pr_sweep(args.base, args.k, envelope=envelope)
        out.write(semiclassics.sweep_csv(rows))
    elif args.sweep == "wigner-sweep":
        print("k,ratio", file=out)
        for row in semiclassics.wigner_sweep(args.base, args.k):
            print(f"{row['k']},{fmt_float(row['ratio'])}", file=out)
    else:
        print("n,catalan,double_factorial,quadruple_factorial", file=out)
        for n in args.k:
            if n < 4:
                continue
            ratios = [graphs.asymptotic_count_ratio(n, s)
                      for s in ("catalan", "double_factorial", "quadruple_factorial")]
            print(",".join([str(n)] + [fmt_float(r) for r in ratios]), file=out)


def cmd_calibrate(args, out):
    record = semiclassics.calibrate()
    text = json.dumps(record, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}", file=out)
    else:
        out.write(text)


def _random_triads(rng, max_two_j, count, make):
    found = []
    while len(found) < count:
        args = make(rng, max_two_j)
        if args is not None:
            found.append(args)
    return found


def _random_sixj_args(rng, max_two_j, triads):
    spins = [rng.randint(0, max_two_j) for _ in range(len("abcdefpqr"))]
    named = dict(zip("abcdefpqr", spins))
    if all(triangle_ok(*(named[c] for c in t)) for t in triads):
        return named
    return None


def cmd_identities(args, out):
    """Randomized Biedenharn-Elliott, Racah and orthogonality residuals."""
    rng = random.Random(args.seed)
    be_triads = ("pqr", "ead", "fbc", "pad", "pbc", "eqd", "fqc", "ear", "fbr")
    worst = {"biedenharn_elliott": 0.0, "racah": 0.0, "orthogonality": 0.0}
    for s in _random_triads(rng, args.max_two_j, args.count,
                            lambda r, m: _random_sixj_args(r, m, be_triads)):
        rhs = abs(float(wigner_6j(s["p"], s["q"], s["r"], s["e"], s["a"], s["d"])
                        * wigner_6j(s["p"], s["q"], s["r"], s["f"], s["b"], s["c"])))
        res = residual_biedenharn_elliott(*(s[c] for c in "abcdefpqr"))
        worst["biedenharn_elliott"] = max(worst["biedenharn_elliott"], res / max(1.0, rhs))
    for s in _random_triads(rng, args.max_two_j, args.count,
                            lambda r, m: _random_sixj_args(r, m, ("acq", "bdq", "adp", "bcp"))):
        a, b, c, d, p, q = (s[x] for x in "abcdpq")
        rhs = abs(float(wigner_6j(a, c, q, b, d, p)))
        worst["racah"] = max(worst["racah"], residual_racah(a, b, c, d, p, q) / max(1.0, rhs))
    for s in _random_triads(rng, args.max_two_j, args.count,
                            lambda r, m: _random_sixj_args(r, m, ("adp", "cbp", "adq", "cbq"))):
        a, b, c, d, p, q = (s[x] for x in "abcdpq")
        worst["orthogonality"] = max(worst["orthogonality"], residual_orthogonality(a, b, c, d, p, q))
    for name, value in worst.items():
        print(f"{name} {fmt_float(value)}", file=out)
    if args.tol is not None and max(worst.values()) > args.tol:
        raise _Failure(f"residual above {args.tol}")


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinnet", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sixj", help="exact 6j symbol {j1 j2 j3; j4 j5 j6}")
    s.add_argument("spins", type=int, nargs=6, metavar="TWO_J")
    s.add_argument("--verify", action="store_true", help="cross-check against the CG-overlap oracle")
    s.set_defaults(func=cmd_sixj)

    s = sub.add_parser("cg", help="Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>")
    s.add_argument("spins", type=int, nargs=6, metavar="TWO_X",
                   help="two_j1 two_m1 two_j2 two_m2 two_J two_M")
    s.set_defaults(func=cmd_cg)

    s = sub.add_parser("ninej", help="exact 9j symbol, rows given in order")
    s.add_argument("spins", type=int, nargs=9, metavar="TWO_J")
    s.add_argument("--verify", action="store_true", help="cross-check against a recoupling matrix")
    s.set_defaults(func=cmd_ninej)

    s = sub.add_parser("graph", help="rotation and twist-rotation graphs",
                       description="stats prints |V|, degree and connectivity; diameter "
                                   "prints the exact diameter (and the n lg n bound for rotation "
                                   "graphs); path prints a shortest move sequence; export prints "
                                   "the edge list.")
    s.add_argument("n", type=int, help="number of leaves minus one")
    s.add_argument("kind", choices=graphs.KINDS)
    s.add_argument("action", choices=("stats", "diameter", "path", "export"))
    s.add_argument("trees", nargs="*", help="two bracket strings for path")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("simulate", help="run a gate program on a coupled basis state",
                       description="Output lines are 'k=<two_k,...> M=<two_M> re im' for every "
                                   "nonzero amplitude of the final state.")
    s.add_argument("program")
    s.add_argument("--state", required=True, help="bracket string of the input basis tree")
    s.add_argument("--spins", type=int, nargs="+", required=True, help="leaf two_j by label")
    s.add_argument("--J", type=int, required=True, help="total two_J")
    s.add_argument("--k", type=int, nargs="*", help="intermediate two_k in post-order (default: first)")
    s.add_argument("--M", type=int, help="two_M (default two_J)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("pathsum", help="path-sum functional between two trees",
                       description="Output lines are 'k_out k_in re im' for the summed matrix.")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("--spins", type=int, nargs="+", required=True)
    s.add_argument("--J", type=int, required=True)
    s.add_argument("--graph", choices=graphs.KINDS, default="rotation")
    s.add_argument("--weighting", choices=("uniform", "inverse_length"), default="uniform")
    s.add_argument("--lmax", type=int, help="longest path (default: graph diameter)")
    s.set_defaults(func=cmd_pathsum)

    s = sub.add_parser("prsum", help="finite-cutoff state sum on a triangulation",
                       description="With a coloring of every edge prints the state functional; "
                                   "otherwise sums over the uncolored edges.")
    s.add_argument("triangulation")
    s.add_argument("--coloring", help="file of 'J <edge-id> <two_j>' lines")
    s.add_argument("--L", type=int, required=True, help="cutoff as two_L")
    s.add_argument("--C", type=float, default=1.0, help="positive constant in Lambda = 4L^3/3C")
    s.add_argument("--budget", type=int, default=statesum.DEFAULT_BUDGET)
    s.add_argument("--unnormalized", action="store_true", help="drop the Lambda^(-N0) factor")
    s.set_defaults(func=cmd_prsum)

    s = sub.add_parser("asympt", help="asymptotic sweeps as CSV",
                       description="pr-sweep columns: k,exact,estimate,envelope,normalized_error "
                                   "for two_j = k*base. wigner-sweep columns: k,ratio. counts "
                                   "columns: n and exact/estimate ratios.")
    s.add_argument("sweep", choices=("pr-sweep", "wigner-sweep", "counts"))
    s.add_argument("--base", type=int, nargs=6, default=[2] * 6, metavar="TWO_J")
    s.add_argument("--k", type=_k_range, default=range(10, 61), help="lo:hi inclusive")
    s.add_argument("--envelope", choices=("nominal", "calibrated"), default="nominal")
    s.set_defaults(func=cmd_asympt)

    s = sub.add_parser("calibrate", help="refit the oscillatory amplitude and error levels")
    s.add_argument("--out", help="write JSON here instead of stdout")
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("identities", help="randomized 6j identity residuals")
    s.add_argument("--count", type=int, default=200)
    s.add_argument("--max-two-j", type=int, default=16)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, help="fail when a residual exceeds this")
    s.set_defaults(func=cmd_identities)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        args.func(args, out)
    except ResourceError as exc:
        detail = f" (required {exc.required}, allowed {exc.allowed})" if exc.required is not None else ""
        print(f"error: {exc}{detail}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParseError, InputError, MoveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_Failure, ProgramError, NonEuclideanError, TruncationError, SpinnetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
