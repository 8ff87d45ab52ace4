"""Command line front end.

Input documents are JSON; polynomials are strings such as ``"x^2 - 1/3*x*y"``.
Exit codes: 0 success, 2 verification failure, 1 usage or parse error.
"""
import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import bpoisson, cotangent, forms, lie, linearize, numeric, symplectic
from .jet import DimensionError, Substitution, VectorFieldJet, default_names, parse_jet

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

# library errors that mean "the input does not have the required property"
VERIFY_ERRORS = (
    linearize.NoSolutionError, linearize.NotReductiveError, linearize.NotPreparedError,
    symplectic.NormalizeFirstError, symplectic.NotEquivariantError,
    symplectic.DegenerateFormError, symplectic.IllPosedFlowError, forms.NotClosedError,
    bpoisson.NotBExactError, bpoisson.NotPoissonError, bpoisson.SplitFailure,
)


class VerificationFailed(Exception):
    """A postcondition re-check failed; the report is still written."""


class UsageError(Exception):
    pass


# -- parsing helpers ----------------------------------------------------------------
def _load(path):
    if path is None:
        raise UsageError("--input is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _names(doc, n):
    names = doc.get("names") or doc.get("rep", {}).get("names")
    return list(names) if names else default_names(n)


def _rational(v):
    return Fraction(str(v))


def _matrices(doc):
    return [[[_rational(v) for v in row] for row in M] for M in doc.get("action", [])]


def _order(args, doc, default_key="order"):
    order = args.order if args.order is not None else doc.get(default_key)
    if order is None and "rep" in doc:
        order = doc["rep"].get("order")
    if order is None:
        raise UsageError("no jet order: pass --order or put 'order' in the input")
    order = int(order)
    if order < 1:
        raise UsageError("the jet order must be at least 1")
    return order


def _form(entries, n, degree, order, names):
    terms = {}
    for idx, poly in entries:
        key, sign = forms._sort_sign(tuple(int(i) for i in idx))
        if key is None:
            continue
        c = parse_jet(poly, n, order, names)
        c = c if sign > 0 else -c
        terms[key] = terms[key] + c if key in terms else c
    return forms.FormJet(n, degree, terms, order)


def _float_rep(r):
    return lie.Representation(r.algebra, [VectorFieldJet([c.map_coeffs(float) for c in f], f.order)
                                          for f in r.fields])


def _require_exact(args):
    if args.field != "exact":
        raise UsageError(f"{args.command} needs exact coefficients (--field exact)")


def _fmt(v):
    return str(v) if not isinstance(v, float) else repr(v)


def _mat_str(M):
    return "[" + ", ".join("[" + ", ".join(_fmt(v) for v in row) + "]" for row in M) + "]"


def _map_lines(m, names, label="m"):
    return [f"{label}[{names[i]}] = {s}" for i, s in enumerate(m.to_strs(names))]


def _residual_ok(value, args):
    if args.field == "float":
        return abs(value) <= args.tolerance
    return value == 0


# -- subcommands ---------------------------------------------------------------------
def cmd_verify_rep(args, out):
    doc = _load(args.input)
    r = lie.Representation.from_dict(doc, args.order)
    if args.field == "float":
        r = _float_rep(r)
    rep = lie.check_representation(r)
    residual = float(rep.residual) if args.field == "float" else rep.residual
    out.append(f"representation: dim {r.algebra.dim}, {r.nvars} variables, order {r.order}")
    out.append(f"residual: {_fmt(residual)}")
    out.extend(f"violation: {v}" for v in rep.violations)
    out.append("brackets:")
    out.extend(f"  {line}" for line in r.algebra.table())
    if not _residual_ok(rep.residual, args):
        raise VerificationFailed("verify-rep: fields do not satisfy the bracket relations")


def cmd_linearize(args, out):
    _require_exact(args)
    doc = _load(args.input)
    order = _order(args, doc)
    r = lie.Representation.from_dict(doc, order)
    names = _names(doc, r.nvars)
    chk = lie.check_representation(r)
    if chk.residual != 0:
        out.append(f"residual: {chk.residual}")
        raise VerificationFailed("linearize: input is not a representation")
    m, lin, report = linearize.linearize_rep(r, order)
    # re-verify from scratch: push the input forward and compare with its linear part
    again = lie.pushforward_rep(r, m)
    A = lie.linear_part(r)
    target = A.fields(again.order)
    res = max((f - g).truncate(again.order).max_abs() for f, g in zip(again.fields, target))
    out.append(f"linearization to order {order}: residual {res}")
    for k, size, cres in report.defects:
        out.append(f"degree {k}: defect {size}")
    out.extend(_map_lines(m, names))
    for i, M in enumerate(A.matrices):
        out.append(f"linear[{r.algebra.names[i]}] = {_mat_str(M)}")
    if res != 0:
        raise VerificationFailed("linearize: pushforward is not linear")


def _darboux_input(args, doc):
    n = int(doc["nvars"])
    order = _order(args, doc)
    names = _names(doc, n)
    omega = _form(doc["form"], n, 2, order, names)
    return n, order, names, omega


def cmd_darboux(args, out):
    _require_exact(args)
    doc = _load(args.input)
    n, order, names, omega = _darboux_input(args, doc)
    m, rep = symplectic.darboux(omega, order)
    out.append(f"darboux to order {order}: pullback residual {rep.pullback_residual}")
    out.extend(_map_lines(m, names))
    if not rep.ok:
        raise VerificationFailed("darboux: pullback is not the standard form")


def cmd_equivariant_darboux(args, out):
    _require_exact(args)
    doc = _load(args.input)
    n, order, names, omega = _darboux_input(args, doc)
    mats = _matrices(doc)
    if not mats:
        raise UsageError("equivariant-darboux needs an 'action' list of matrices")
    target = _form(doc["target"], n, 2, order, names) if "target" in doc else None
    m, rep = symplectic.equivariant_darboux(omega, mats, order, target)
    out.append(f"equivariant darboux to order {order}: pullback residual "
               f"{rep.pullback_residual}, commutation residual {rep.commutation_residual}")
    out.extend(_map_lines(m, names))
    if not rep.ok:
        raise VerificationFailed("equivariant-darboux: postcondition failed")


def cmd_cotangent_lift(args, out):
    _require_exact(args)
    doc = _load(args.input)
    r = lie.Representation.from_dict(doc, args.order)
    ctx = cotangent.CotangentContext(r.nvars, r.order)
    lifted = [cotangent.cotangent_lift(f) for f in r.fields]
    lr = lie.Representation(r.algebra, lifted)
    res = lie.check_representation(lr).residual
    theta = max(cotangent.theta_preservation(f, ctx) for f in lifted)
    out.append(f"lift residual {res}, theta preservation residual {theta}")
    for name, f in zip(r.algebra.names, lifted):
        out.append(f"{name}^ = [" + ", ".join(f.to_strs(ctx.names)) + "]")
    if res != 0 or theta != 0:
        raise VerificationFailed("cotangent-lift: lift is not a representation preserving theta")


def cmd_moment_map(args, out):
    doc = _load(args.input)
    r = lie.Representation.from_dict(doc, args.order)
    ctx = cotangent.CotangentContext(r.nvars, r.order + 1)
    mu = cotangent.moment_map(r)
    worst = 0
    for f, m in zip(r.fields, mu):
        worst = max(worst, cotangent.check_hamiltonian(cotangent.cotangent_lift(f), m, ctx))
    for name, m in zip(r.algebra.names, mu):
        out.append(f"mu[{name}] = {m.to_str(ctx.names)}")
    out.append(f"hamiltonian residual {worst}")
    if worst != 0:
        raise VerificationFailed("moment-map: i_xi omega + d mu does not vanish")


def _points_csv(names, pts, ranks):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(names) + ["rank"])
    for p, r in zip(pts, ranks):
        w.writerow([_fmt(v) for v in p] + [int(r)])
    return buf.getvalue()


def cmd_orbit_dim(args, out):
    doc = _load(args.input)
    r = lie.Representation.from_dict(doc, args.order)
    n = r.nvars
    names = _names(doc, n)
    if "points" in doc:
        pts = [tuple(_rational(v) for v in p) for p in doc["points"]]
    else:
        _need_seed(args)
        pts = cotangent.sample_points(n, args.samples, "random", args.seed)
    if args.field == "float":
        pts = [tuple(float(v) for v in p) for p in pts]
    ranks = [cotangent.orbit_dimension(r.fields, p) for p in pts]
    return _points_csv(names, pts, ranks)


def _need_seed(args):
    if args.seed is None:
        raise UsageError(f"{args.command} samples points at random and needs --seed")


def cmd_strata_scan(args, out):
    doc = _load(args.input)
    r = lie.Representation.from_dict(doc, args.order)
    ctx = cotangent.CotangentContext(r.nvars, r.order + 1)
    mu = cotangent.moment_map(r)
    if args.sampler == "random":
        _need_seed(args)
    pts = cotangent.sample_points(2 * r.nvars, args.samples, args.sampler, args.seed or 0,
                                  box=args.box, region=args.region)
    if args.field == "float":
        pts = [tuple(float(v) for v in p) for p in pts]
    scan = cotangent.strata_scan(mu, pts, names=ctx.names)
    out.append(f"strata scan: {len(pts)} points ({args.sampler}, region {args.region})")
    for rank, count in scan.counts.items():
        wit = ", ".join(_fmt(v) for v in scan.witnesses[rank])
        out.append(f"rank {rank}: {count} points, witness ({wit})")
    for rank, minors in scan.vanishing_minors.items():
        out.append(f"rank {rank}: {len(minors)} maximal minors vanish on every sample")
    return _points_csv(ctx.names, pts, scan.ranks)


def _bform_input(args, doc):
    n = int(doc["nvars"])
    N = _order(args, doc)
    names = _names(doc, n)
    zi = int(doc.get("z", n - 2))
    # exact polynomial input: one extra order is available to the b-Moser step
    smooth = _form(doc.get("smooth", []), n, 2, N + 1, names)
    log = _form(doc.get("log", []), n, 1, N + 1, names)
    return n, N, names, bpoisson.BForm.from_parts(smooth, log, zi)


def cmd_b_darboux(args, out):
    _require_exact(args)
    doc = _load(args.input)
    n, N, names, omega = _bform_input(args, doc)
    mats = _matrices(doc)
    if mats:
        m, rep = bpoisson.equivariant_b_darboux(omega, mats, N)
    else:
        m, rep = bpoisson.b_darboux(omega, N)
    divisible = all(e[omega.zi] > 0 for e in m[omega.zi].coeffs)
    out.append(f"b-darboux to order {N}: pullback residual {rep.pullback_residual}, "
               f"commutation residual {rep.commutation_residual}, "
               f"z-component divisible by z: {divisible}")
    out.extend(_map_lines(m, names))
    if not rep.ok or not divisible:
        raise VerificationFailed("b-darboux: postcondition failed")


def cmd_split(args, out):
    _require_exact(args)
    doc = _load(args.input)
    n = int(doc["nvars"])
    N = _order(args, doc)
    names = _names(doc, n)
    P = bpoisson.BivectorJet(n, {(int(i), int(j)): parse_jet(s, n, N, names)
                                 for i, j, s in doc["bivector"]}, N)
    mats = _matrices(doc)
    m, rep = bpoisson.weinstein_split(P, N, mats or None)
    # oracle: brackets of the new coordinate functions in the old coordinates
    sub_res = _split_bracket_check(P, m, rep, N)
    out.append(f"split to order {N}: rank {rep.rank}, residual {rep.residual}, "
               f"commutation residual {rep.commutation_residual}, bracket check {sub_res}")
    out.extend(_map_lines(m, names))
    for (i, j), f in sorted(rep.transverse.items()):
        out.append(f"f[{names[i]},{names[j]}] = {f.to_str(names)}")
    if not rep.ok or sub_res != 0:
        raise VerificationFailed("split: postcondition failed")


def _split_bracket_check(P, m, rep, N):
    """``{m_i, m_j}`` in old coordinates against the split bivector composed with ``m``."""
    n = P.nvars
    target = bpoisson.bivector_pushforward(P, m, order=N)
    sub = Substitution(m.components)
    worst = 0
    for i in range(n):
        for j in range(i + 1, n):
            lhs = bpoisson.poisson_bracket(P, m[i], m[j])
            rhs = sub.apply(target[i, j])
            order = min(lhs.order, rhs.order, N)
            worst = max(worst, (lhs.truncate(order) - rhs.truncate(order)).max_abs())
    return worst


DEMOS = {"cairns-ghys": numeric.cairns_ghys_fields, "gs-remark": numeric.gs_remark_fields}


def cmd_demo(args, out):
    _need_seed(args)
    fields = DEMOS[args.name]()
    pts = numeric.cone_samples(args.samples, args.seed, "any", args.box)
    ranks, _ = numeric.orbit_dims_many(fields, pts, args.tolerance)
    s = pts[:, 0] ** 2 + pts[:, 1] ** 2 - pts[:, 2] ** 2
    inside, outside = ranks[s <= 0], ranks[s > 0]
    out.append(f"demo {args.name}: {len(pts)} samples in [-{args.box}, {args.box}]^3, "
               f"seed {args.seed}, rtol {args.tolerance}")
    out.append(f"outside the cone: {len(outside)} samples, rank 3 at "
               f"{int((outside == 3).sum())}")
    out.append(f"inside the cone: {len(inside)} samples, ranks "
               f"{sorted(set(int(v) for v in inside))}")
    body = _points_csv(["x", "y", "z"], [[repr(float(v)) for v in p] for p in pts], ranks)
    if (inside == 3).any():
        raise VerificationFailed("demo: rank 3 inside the cone", body)
    return body


COMMANDS = {
    "verify-rep": cmd_verify_rep, "linearize": cmd_linearize, "darboux": cmd_darboux,
    "equivariant-darboux": cmd_equivariant_darboux, "cotangent-lift": cmd_cotangent_lift,
    "moment-map": cmd_moment_map, "orbit-dim": cmd_orbit_dim, "strata-scan": cmd_strata_scan,
    "b-darboux": cmd_b_darboux, "split": cmd_split, "demo": cmd_demo,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON input document")
    common.add_argument("--order", type=int, help="jet order N (default: from the input)")
    common.add_argument("--field", choices=["exact", "float"], default="exact")
    common.add_argument("--seed", type=int, help="seed for randomized sampling")
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--out", help="write the report (or CSV) here instead of stdout")
    common.add_argument("--tolerance", type=float, default=1e-9,
                        help="float residual / relative rank tolerance")
    p = argparse.ArgumentParser(prog="jetnormal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "strata-scan":
            sp.add_argument("--sampler", choices=["random", "grid"], default="random")
            sp.add_argument("--region", choices=["box", "omega"], default="box")
            sp.add_argument("--box", type=int, default=3)
        if name == "demo":
            sp.add_argument("name", choices=sorted(DEMOS))
            sp.add_argument("--box", type=float, default=numeric.DEFAULT_BOX)
    return p


def run(argv=None, stdout=None, stderr=None):
    """Run one subcommand; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    lines = []
    body = None
    code = EXIT_OK
    try:
        if args.order is not None and args.order < 1:
            raise UsageError("the jet order must be at least 1")
        body = COMMANDS[args.command](args, lines)
    except VerificationFailed as exc:
        code = EXIT_VERIFY
        if len(exc.args) > 1:
            body = exc.args[1]
        lines.append(f"FAILED: {exc.args[0]}")
    except VERIFY_ERRORS as exc:
        code = EXIT_VERIFY
        lines.append(f"FAILED: {args.command}: {type(exc).__name__}: {exc}")
    except (UsageError, DimensionError, KeyError, ValueError, TypeError) as exc:
        msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"jetnormal {args.command}: error: {msg}", file=stderr)
        return EXIT_USAGE
    report = "\n".join(lines) + ("\n" if lines else "")
    if body is not None:
        # CSV goes to --out (or stdout); the summary then goes to stderr
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(body)
            stdout.write(report)
        else:
            stdout.write(body)
            stderr.write(report)
    elif args.out:
        with open(args.out, "w") as fh:
            fh.write(report)
    else:
        stdout.write(report)
    if code == EXIT_VERIFY:
        stderr.write(lines[-1] + "\n")
    return code


def main():
    sys.exit(run())
