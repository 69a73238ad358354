"""Command-line interface: ``poissondiff <command> --tau a,b,c,d ...``.

Exit status is 0 on success, 1 on a computation error (or a failed
``verify``), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import asymptotics, exact, montecarlo, verify
from .core import Rates, RatesError, classify, orient
from .laplace import LaplaceError
from .study import StudyReport, base_meta, convergence_study


def _rates(text):
    try:
        return Rates.parse(text)
    except RatesError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _ladder(text):
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse ladder {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poissondiff", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help, n=False, u=False, tol=False, tau=True):
        p = sub.add_parser(name, help=help)
        if tau:
            p.add_argument("--tau", type=_rates, required=True, help="intensities a,b,c,d")
        if n:
            p.add_argument("--n", type=int, required=True)
        if u:
            p.add_argument("--u", type=float, default=1.0)
        if tol:
            p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        return p

    command("classify", "case of the proposition and canonical orientation")
    command("pmf", "exact conditional pmf table", n=True, tol=True)
    command("moments", "exact mean and variance next to the expansion", n=True, tol=True)
    command("asympt", "closed-form E, E', V, V' and quasi-powers derivatives")
    command("saddle", "stationary point and Laplace data", u=True)
    command("gn", "exact log G_n(u) against its asymptote", n=True, u=True, tol=True)
    p = command("sample", "rejection samples of X_n", n=True)
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--raw", action="store_true", help="emit the samples instead of a summary")
    command("clt", "Kolmogorov distance of the normalised exact law to N(0, 1)", n=True, tol=True)
    p = command("study", "convergence ladder of the moment expansion", tol=True)
    p.add_argument("--ladder", type=_ladder, default=[10, 20, 40, 80, 160])
    p = command("verify", "run cross-validation suites", tau=False)
    p.add_argument("--suite", choices=("all", *verify.SUITES), default="all")
    p.add_argument("--seed", type=int, default=None)
    return parser


def _flags(args) -> dict:
    out = {}
    for key, value in vars(args).items():
        if isinstance(value, Rates):
            value = list(value)
        out[key] = value
    return out


def _report(args, rows, verdicts=None, **meta) -> StudyReport:
    head = base_meta(args.command, _flags(args))
    head.update(meta)
    return StudyReport(head, rows, verdicts or {})


def cmd_classify(args):
    case = classify(args.tau)
    o = orient(args.tau)
    return _report(args, [{"case": case.kind.value, "zero": case.zero,
                           "oriented": list(o.oriented_rates), "sign": o.sign}])


def cmd_pmf(args):
    dist = exact.conditional_pmf(args.tau, args.n, args.tol)
    rows = [{"m": int(m), "prob": float(p)} for m, p in zip(dist.support, dist.probs)]
    return _report(args, rows, support=[dist.support_lo, dist.support_hi],
                   truncation_bound=dist.truncation_bound)


def cmd_moments(args):
    dist = exact.conditional_pmf(args.tau, args.n, args.tol)
    mom = exact.exact_moments(dist)
    row = {"n": args.n, "mean": mom.mean, "variance": mom.variance, "error_bound": mom.error_bound}
    if not classify(args.tau).is_dirac:
        me = asymptotics.moment_expansion(args.tau)
        row.update(mean_expansion=me.mean(args.n), variance_expansion=me.variance(args.n))
    return _report(args, [row])


def cmd_asympt(args):
    me = asymptotics.moment_expansion(args.tau)
    qp = asymptotics.quasi_powers(args.tau)
    row = {"E": me.e_lead, "E_prime": me.e_const, "V": me.v_lead, "V_prime": me.v_const,
           "f1": qp.f1, "f2": qp.f2, "g1": qp.g1, "g2": qp.g2,
           "gamma_1": asymptotics.gamma_of_u(args.tau, 1.0)}
    return _report(args, [row])


def cmd_saddle(args):
    sd = asymptotics.saddle_point(args.tau, args.u)
    return _report(args, [{"x_star": sd.x_star, "y_star": sd.y_star, "z_star": sd.z_star,
                           "psi_star": sd.psi_star, "phi_star": sd.phi_star,
                           "hessian_det": sd.hessian_det, "dimension": sd.dimension,
                           "frame_rates": list(sd.frame_rates), "frame_u": sd.frame_u}])


def cmd_gn(args):
    value = exact.evaluate_gn(args.tau, args.n, args.u, args.tol)
    row = {"n": args.n, "u": args.u, "log_gn": value.log_value,
           "truncation_bound": value.truncation_bound}
    if not classify(args.tau).is_dirac:
        approx = asymptotics.gn_asymptote(args.tau, args.n, args.u)
        row.update(log_asymptote=approx, ratio=math.exp(approx - value.log_value))
    return _report(args, [row])


def cmd_sample(args):
    batch = montecarlo.sample_conditional(args.tau, args.n, args.count, args.seed, args.workers)
    meta = {"attempts": batch.attempts, "accepted": batch.accepted,
            "acceptance_rate": batch.acceptance_rate}
    if args.raw:
        return _report(args, [{"index": i, "x": int(x)} for i, x in enumerate(batch.samples)], **meta)
    if classify(args.tau).is_dirac:
        center, spread = 0.0, 1.0
    else:
        me = asymptotics.moment_expansion(args.tau)
        center, spread = args.n * me.e_lead, math.sqrt(args.n * me.v_lead)
    s = montecarlo.summarize(batch, center, spread)
    return _report(args, [{"mean": s.mean, "variance": s.variance, "stderr_mean": s.stderr_mean,
                           "stderr_var": s.stderr_var, "ks_to_gaussian": s.ks_to_gaussian}], **meta)


def cmd_clt(args):
    dist = exact.conditional_pmf(args.tau, args.n, args.tol)
    me = asymptotics.moment_expansion(args.tau)
    center, spread = args.n * me.e_lead, math.sqrt(args.n * me.v_lead)
    return _report(args, [{"n": args.n, "center": center, "spread": spread,
                           "ks": exact.normalized_kolmogorov_distance(dist, center, spread)}])


def cmd_study(args):
    return convergence_study(args.tau, args.ladder, args.tol, flags=_flags(args))


def cmd_verify(args):
    results = verify.run_suite(args.suite, args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [{"check": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    return _report(args, rows, {r.name: r.passed for r in results})


COMMANDS = {name[4:]: fn for name, fn in globals().items() if name.startswith("cmd_")}

COMPUTATION_ERRORS = (RatesError, ValueError, ArithmeticError, LaplaceError,
                      montecarlo.AcceptanceTooLowError)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except COMPUTATION_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(report.to_csv() if args.format == "csv" else report.to_json() + "\n")
    if args.command == "verify" and not all(report.verdicts.values()):
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
