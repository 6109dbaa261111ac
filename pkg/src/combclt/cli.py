"""Batch front end.

Subcommands: combing build|validate, spectral analyze, fn synthesize|check,
qm count|defect|holder, clt drift|sample|empirical|typicality, compare
gensets.  Each command writes one JSON report; histogram-style results also
get a CSV and (unless --no-plot) a rendered PNG next to the report.

Exit codes: 0 for pass verdicts, 2 for computed negative verdicts (for
example an acceptor that is not almost semisimple), 1 for usage errors.
The environment variable COMBCLT_TOL overrides the default eigenvalue
tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, cltstats, combable, combing, digraph, fixtures
from . import plotting, quasimorphism, reports, spectral
from .groups import FreeGroup, oracle_from_dict


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _tolerances():
    eigen = float(os.environ.get("COMBCLT_TOL", "1e-12"))
    return {
        "eigen_tol": eigen,
        "support_rel_tol": 1e-9,
        "identity_tol": 1e-10,
        "agreement_tol": 1e-8,
    }


def _parse_word(text: str) -> tuple:
    if "," in text:
        return tuple(s for s in text.split(",") if s)
    return tuple(text)


def _load_fixture(ns) -> fixtures.Fixture:
    if getattr(ns, "group_file", None):
        with open(ns.group_file, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        oracle = oracle_from_dict(doc)
        genset = ns.genset or "standard"
        comb = combing.lex_first_combing(
            oracle, genset,
            letter_order=_parse_word(ns.order) if getattr(ns, "order", None) else None,
            cone_depth=getattr(ns, "depth", 2) or 2,
            verify_radius=getattr(ns, "verify_radius", 6) or 6)
        return fixtures.Fixture(Path(ns.group_file).stem, oracle, genset, comb,
                                "group file", None)
    name = ns.fixture
    if name in fixtures.GROUP_FIXTURES:
        return fixtures.fixture(name)
    raise _usage_error(f"unknown fixture {name!r}; group fixtures: "
                       f"{', '.join(fixtures.GROUP_FIXTURES)}")


def _usage_error(message: str) -> SystemExit:
    sys.stderr.write(f"combclt: error: {message}\n")
    return SystemExit(1)


def _load_digraph(ns):
    """Digraph plus optional attached weights, from a fixture name or file."""
    if getattr(ns, "digraph_file", None):
        return digraph.load_digraph(ns.digraph_file), None, Path(ns.digraph_file).stem
    name = ns.fixture
    if name in fixtures.DIGRAPH_FIXTURES:
        dg, weights = fixtures.digraph_fixture(name)
        return dg, weights, name
    if name in fixtures.GROUP_FIXTURES:
        return fixtures.fixture(name).combing.digraph, None, name
    raise _usage_error(f"unknown fixture {name!r}")


def _resolve_phi(fx: fixtures.Fixture, spec: str):
    """A callable on group elements for the named weight function."""
    oracle = fx.oracle
    if spec == "fixture":
        if fx.phi_oracle is None:
            raise _usage_error(f"fixture {fx.name} has no attached function")
        return fx.phi_oracle, f"{fx.name} weight"
    if spec == "word-length":
        return (lambda el: oracle.word_length(el, fx.genset)), f"|.|_{fx.genset}"
    if spec.startswith("count:"):
        sigma = _parse_word(spec.split(":", 1)[1])
        qm = quasimorphism.counting_qm(
            oracle, quasimorphism.make_pattern(oracle, sigma, fx.genset))
        return qm, qm.label
    if spec.startswith("genset-length:"):
        name = spec.split(":", 1)[1]
        if isinstance(oracle, FreeGroup) and name == "S2" and "S2" in oracle.gensets:
            return fixtures.s2_length, "|.|_S2"
        return (lambda el: oracle.word_length(el, name)), f"|.|_{name}"
    if spec.startswith("genset-qm:"):
        name = spec.split(":", 1)[1]
        if isinstance(oracle, FreeGroup) and name == "S_asym":
            return (lambda el: fixtures.asym_length(el)
                    - fixtures.asym_inverse_length(el)), "psi_S_asym"
        qm = quasimorphism.genset_qm(oracle, name)
        return qm, qm.label
    raise _usage_error(f"unknown function spec {spec!r}")


def _resolve_fn(fx: fixtures.Fixture, spec: str, depth: int, verify_radius: int):
    """A CombableFunction for the function specifier (word-length directly,
    anything else through synthesis); may return a SynthesisFailure."""
    if spec == "word-length":
        return combable.word_length_function(fx.combing), "word-length"
    phi, label = _resolve_phi(fx, spec)
    fn = combable.synthesize_dphi(fx.combing, phi,
                                  refine_depth=depth, verify_radius=verify_radius)
    return fn, label


def _emit(ns, command: str, result, verdict: str) -> int:
    doc = reports.report_document(command, {k: v for k, v in vars(ns).items()
                                            if k != "func"},
                                  _tolerances(), result, verdict)
    if ns.out:
        reports.write_json(doc, ns.out)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0 if verdict == "pass" else 2


def _sibling(ns, suffix: str):
    return Path(ns.out).with_suffix(suffix) if ns.out else None


# -- combing ---------------------------------------------------------------

def cmd_combing_build(ns) -> int:
    fx = _load_fixture(ns)
    radius = min(ns.verify_radius or fx.combing.verified_radius,
                 fx.combing.verified_radius)
    report = combing.validate_combing(fx.combing, radius)
    result = {
        "fixture": fx.name,
        "genset": fx.genset,
        "vertices": fx.combing.digraph.vertex_count,
        "edges": len(fx.combing.digraph.edges),
        "verified_radius": fx.combing.verified_radius,
        "validation": report,
    }
    if ns.bundle:
        bundle = combing.combing_to_dict(fx.combing)
        bundle["fixture"] = fx.name
        reports.write_json(bundle, ns.bundle)
    return _emit(ns, "combing build", result, "pass" if report.ok else "invalid-combing")


def cmd_combing_validate(ns) -> int:
    fx = _load_fixture(ns)
    radius = ns.verify_radius or min(6, fx.combing.verified_radius)
    report = combing.validate_combing(fx.combing, radius)
    return _emit(ns, "combing validate", report,
                 "pass" if report.ok else "invalid-combing")


# -- spectral ---------------------------------------------------------------

def cmd_spectral_analyze(ns) -> int:
    dg, _, name = _load_digraph(ns)
    try:
        semi = digraph.check_almost_semisimple(dg, n_max=ns.n_max)
    except digraph.InsufficientGrowth as exc:
        return _emit(ns, "spectral analyze", {"digraph": name, "error": str(exc)},
                     "finite-language")
    if not semi.verdict:
        return _emit(ns, "spectral analyze",
                     {"digraph": name, "semisimplicity": semi},
                     "not-almost-semisimple")
    data = spectral.analyze(dg, eigen_tol=_tolerances()["eigen_tol"])
    result = {
        "digraph": name,
        "mode": data.mode,
        "lambda": data.lam,
        "lambda_exact": data.exact.lam if data.exact else None,
        "rho_one": data.rho_one,
        "ell_v1": data.ell_v1,
        "mu": data.mu,
        "N": data.N,
        "support": sorted(data.support),
        "components": [
            {"vertices": sorted(c), "xi": x}
            for c, x in zip(data.decomposition.components,
                            data.decomposition.per_component_eigenvalue)],
        "semisimplicity": semi,
    }
    return _emit(ns, "spectral analyze", result, "pass")


# -- fn ----------------------------------------------------------------------

def cmd_fn_synthesize(ns) -> int:
    fx = _load_fixture(ns)
    fn, label = _resolve_fn(fx, ns.fn, ns.depth, ns.verify_radius)
    if isinstance(fn, combable.SynthesisFailure):
        return _emit(ns, "fn synthesize", {"fn": label, "failure": fn},
                     "not-weakly-combable-at-depth")
    result = {
        "fn": label,
        "provenance": fn.provenance,
        "vertices": fn.combing.digraph.vertex_count,
        "dphi": {str(v): fn.dphi[v] for v in fn.combing.digraph.vertices()},
        "verified_radius": fn.combing.verified_radius,
    }
    if ns.bundle:
        reports.write_json(combable.function_to_dict(fn), ns.bundle)
    return _emit(ns, "fn synthesize", result, "pass")


def cmd_fn_check(ns) -> int:
    fx = _load_fixture(ns)
    phi, label = _resolve_phi(fx, ns.fn)
    lip = combable.check_lipschitz(phi, fx.oracle, fx.genset, ns.radius)
    fn, _ = _resolve_fn(fx, ns.fn, ns.depth, min(ns.radius, fx.combing.verified_radius))
    result = {"fn": label, "lipschitz": lip}
    verdict = "pass"
    if isinstance(fn, combable.SynthesisFailure):
        result["synthesis_failure"] = fn
        verdict = "not-weakly-combable-at-depth"
    else:
        sub = combable.check_subdivision(fn, min(ns.radius, fn.combing.verified_radius))
        mismatch = combable.verify_conformance(fn, phi, fn.combing.verified_radius)
        result["subdivision"] = sub
        result["conformance_counterexample"] = mismatch
        if mismatch is not None:
            verdict = "conformance-failed"
    return _emit(ns, "fn check", result, verdict)


# -- qm ----------------------------------------------------------------------

def cmd_qm_count(ns) -> int:
    fx = _load_fixture(ns)
    pattern = quasimorphism.make_pattern(fx.oracle, _parse_word(ns.sigma), fx.genset)
    words = [_parse_word(w) for w in ns.word or []]
    if ns.ball_radius:
        ball = fx.oracle.ball(fx.genset, ns.ball_radius)
        words.extend(tuple(el) for shell in ball.shells[:ns.ball_radius + 1]
                     for el in shell)
    rows = []
    for w in words:
        joined = "".join(w)
        rows.append({
            "word": joined,
            "count": quasimorphism.greedy_count(w, pattern.sigma),
            "count_inverse": quasimorphism.greedy_count(w, pattern.inverse),
            "phi": (quasimorphism.greedy_count(w, pattern.sigma)
                    - quasimorphism.greedy_count(w, pattern.inverse)),
            "max_disjoint": quasimorphism.max_disjoint_count(w, pattern.sigma),
            "big_count": quasimorphism.big_count(w, pattern.sigma),
        })
    return _emit(ns, "qm count", {"sigma": "".join(pattern.sigma), "rows": rows},
                 "pass")


def cmd_qm_defect(ns) -> int:
    fx = _load_fixture(ns)
    phi, label = _resolve_phi(fx, ns.fn)
    report = quasimorphism.defect_estimate(phi, fx.oracle, ns.radius, fx.genset)
    result = {"fn": label, "lower_bound": report.lower_bound,
              "witness": [fx.oracle.element_str(w) for w in report.witness or ()],
              "radius": report.radius,
              "note": "lower bound at this radius"}
    return _emit(ns, "qm defect", result, "pass")


def cmd_qm_holder(ns) -> int:
    fx = _load_fixture(ns)
    pattern = quasimorphism.make_pattern(fx.oracle, _parse_word(ns.sigma), fx.genset)
    if ns.big:
        psi = quasimorphism.BigCountingQuasimorphism(fx.oracle, pattern)
    else:
        psi = quasimorphism.counting_qm(fx.oracle, pattern)
    a = fx.oracle.evaluate(_parse_word(ns.a), fx.genset)
    report = quasimorphism.holder_diagnostic(psi, fx.oracle, a, ns.radius,
                                             pair_budget=ns.pair_budget,
                                             seed=ns.seed)
    if ns.out and not ns.no_plot:
        plotting.save_decay_figure(report.levels, _sibling(ns, ".png"),
                                   f"{psi.label}: Delta_a differences by level")
    return _emit(ns, "qm holder", report,
                 "holder-violation" if report.violation else "pass")


# -- clt ----------------------------------------------------------------------

def _fn_and_spectral(ns):
    """Resolve (weights, spectral data, label) for drift-style commands; the
    spectral analysis runs on the function's own (refined) acceptor."""
    if ns.fixture in fixtures.DIGRAPH_FIXTURES:
        dg, weights = fixtures.digraph_fixture(ns.fixture)
        data = spectral.analyze(dg, eigen_tol=_tolerances()["eigen_tol"])
        return weights, data, f"{ns.fixture} weights"
    fx = _load_fixture(ns)
    fn, label = _resolve_fn(fx, ns.fn, ns.depth, ns.verify_radius)
    if isinstance(fn, combable.SynthesisFailure):
        raise _SynthFailed(fn, label)
    data = spectral.analyze(fn.combing.digraph, eigen_tol=_tolerances()["eigen_tol"])
    return fn, data, label


class _SynthFailed(Exception):
    def __init__(self, failure, label):
        self.failure = failure
        self.label = label


def cmd_clt_drift(ns) -> int:
    try:
        fn, data, label = _fn_and_spectral(ns)
    except _SynthFailed as exc:
        return _emit(ns, "clt drift", {"fn": exc.label, "failure": exc.failure},
                     "not-weakly-combable-at-depth")
    clt = cltstats.drift_variance(data, fn,
                                  agreement_tol=_tolerances()["agreement_tol"])
    result = {"fn": label, "clt": clt, "mode": clt.mode,
              "acceptor_vertices": data.digraph.vertex_count}
    if ns.check_n:
        mom = cltstats.moment_oracle(data, fn, ns.check_n)
        result["moment_check"] = {
            "n": ns.check_n,
            "mean": mom.mean, "variance": mom.variance,
            "mean_exact": mom.mean_exact, "variance_exact": mom.variance_exact,
            "abs_var_over_n_minus_sigma_sq": abs(mom.variance / ns.check_n - clt.sigma_sq),
        }
    return _emit(ns, "clt drift", result,
                 "pass" if clt.agreement_ok else "component-disagreement")


def cmd_clt_sample(ns) -> int:
    try:
        fn, data, label = _fn_and_spectral(ns)
    except _SynthFailed as exc:
        return _emit(ns, "clt sample", {"fn": exc.label, "failure": exc.failure},
                     "not-weakly-combable-at-depth")
    batch = cltstats.sample(data, ns.n, ns.count, ns.seed, fn=fn)
    letter_freq = {}
    if batch.words is not None:
        for word in batch.words:
            for letter in word:
                letter_freq[letter] = letter_freq.get(letter, 0) + 1
    result = {
        "fn": label, "n": ns.n, "count": ns.count, "seed": ns.seed,
        "letter_frequencies": {k: v / (ns.n * ns.count)
                               for k, v in sorted(letter_freq.items())},
        "first_words": ["".join(w) for w in (batch.words or ())[:10]],
        "phi_mean": float(batch.phi_values.mean()) if batch.phi_values is not None else None,
        "phi_variance": float(batch.phi_values.var()) if batch.phi_values is not None else None,
    }
    return _emit(ns, "clt sample", result, "pass")


def cmd_clt_empirical(ns) -> int:
    try:
        fn, data, label = _fn_and_spectral(ns)
    except _SynthFailed as exc:
        return _emit(ns, "clt empirical", {"fn": exc.label, "failure": exc.failure},
                     "not-weakly-combable-at-depth")
    clt = cltstats.drift_variance(data, fn)
    report = cltstats.empirical_clt(data, fn, ns.n, ns.count, ns.seed, clt=clt)
    if ns.out:
        reports.write_histogram_csv(report.histogram, _sibling(ns, ".csv"))
        if not ns.no_plot:
            plotting.save_histogram_figure(
                report.histogram, _sibling(ns, ".png"),
                f"{label}: standardized sums at n = {ns.n}")
    return _emit(ns, "clt empirical", {"fn": label, "report": report}, "pass")


def cmd_clt_typicality(ns) -> int:
    try:
        fn, data, label = _fn_and_spectral(ns)
    except _SynthFailed as exc:
        return _emit(ns, "clt typicality", {"fn": exc.label, "failure": exc.failure},
                     "not-weakly-combable-at-depth")
    clt = cltstats.drift_variance(data, fn)
    gamma = cltstats.sample_ray(data, ns.ray_length, ns.seed)
    profile = cltstats.typicality_profile(data, fn, gamma, ns.n, ns.m, clt.E)
    if ns.out:
        reports.write_histogram_csv(profile.histogram, _sibling(ns, ".csv"))
        if not ns.no_plot:
            plotting.save_histogram_figure(
                profile.histogram, _sibling(ns, ".png"),
                f"{label}: window increments, n = {ns.n}, m = {ns.m}")
    return _emit(ns, "clt typicality",
                 {"fn": label, "profile": profile, "E": clt.E, "sigma": clt.sigma},
                 "pass")


# -- compare -------------------------------------------------------------------

def cmd_compare_gensets(ns) -> int:
    fx = _load_fixture(ns)
    length_oracle = None
    if isinstance(fx.oracle, FreeGroup) and ns.genset2 == "S2":
        length_oracle = fixtures.s2_length
    check_lengths = tuple(int(x) for x in ns.check_lengths.split(",") if x) \
        if ns.check_lengths else ()
    report = cltstats.compare_gensets(
        fx.combing, ns.genset2, length_oracle=length_oracle,
        synth_depth=ns.depth, synth_radius=ns.verify_radius,
        check_lengths=check_lengths, ball_radius2=ns.ball_radius2)
    if ns.out and report.deviation_rows and not ns.no_plot:
        plotting.save_deviation_figure(
            report.deviation_rows, report.K_fitted, _sibling(ns, ".png"),
            f"length comparison {fx.genset} vs {ns.genset2}")
    # the counting bound is >=; equality is legitimate (e.g. identical sets)
    verdict = "pass" if report.inequality_margin >= -1e-9 else "growth-bound-violated"
    return _emit(ns, "compare gensets", report, verdict)


# -- parser -----------------------------------------------------------------

def _add_common(p, out=True):
    p.add_argument("--fixture", default="F2_standard",
                   help="fixture name (see --list-fixtures)")
    p.add_argument("--group-file", help="group description JSON instead of a fixture")
    p.add_argument("--genset", help="generating set name (with --group-file)")
    if out:
        p.add_argument("--out", help="report JSON path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="combclt",
                     description="geodesic combings and their central limit statistics")
    parser.add_argument("--version", action="version", version=f"combclt {__version__}")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    comb = sub.add_parser("combing", help="build and validate combings")
    comb_sub = comb.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = comb_sub.add_parser("build")
    _add_common(p)
    p.add_argument("--order", help="comma-separated letter order for lex-first builds")
    p.add_argument("--depth", type=int, default=2, help="cone depth")
    p.add_argument("--verify-radius", type=int, default=None)
    p.add_argument("--bundle", help="write a combing bundle JSON here")
    p.set_defaults(func=cmd_combing_build)
    p = comb_sub.add_parser("validate")
    _add_common(p)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--order")
    p.add_argument("--verify-radius", type=int, default=None)
    p.set_defaults(func=cmd_combing_validate)

    spec = sub.add_parser("spectral", help="Perron-Frobenius / chain structure")
    spec_sub = spec.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = spec_sub.add_parser("analyze")
    p.add_argument("--fixture", default="F2_standard")
    p.add_argument("--digraph-file")
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectral_analyze)

    fn = sub.add_parser("fn", help="combable functions")
    fn_sub = fn.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = fn_sub.add_parser("synthesize")
    _add_common(p)
    p.add_argument("--fn", required=True,
                   help="word-length | fixture | count:SIGMA | genset-length:NAME | genset-qm:NAME")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--verify-radius", type=int, default=6)
    p.add_argument("--bundle", help="write a function bundle JSON here")
    p.set_defaults(func=cmd_fn_synthesize)
    p = fn_sub.add_parser("check")
    _add_common(p)
    p.add_argument("--fn", required=True)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--depth", type=int, default=3)
    p.set_defaults(func=cmd_fn_check)

    qm = sub.add_parser("qm", help="quasimorphisms and counting functions")
    qm_sub = qm.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = qm_sub.add_parser("count")
    _add_common(p)
    p.add_argument("--sigma", required=True)
    p.add_argument("--word", action="append")
    p.add_argument("--ball-radius", type=int, default=0)
    p.set_defaults(func=cmd_qm_count)
    p = qm_sub.add_parser("defect")
    _add_common(p)
    p.add_argument("--fn", required=True)
    p.add_argument("--radius", type=int, default=4)
    p.set_defaults(func=cmd_qm_defect)
    p = qm_sub.add_parser("holder")
    _add_common(p)
    p.add_argument("--sigma", required=True)
    p.add_argument("--a", required=True, help="the translating element, as a word")
    p.add_argument("--radius", type=int, default=12)
    p.add_argument("--pair-budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--big", action="store_true",
                   help="use the big (overlapping) counting function")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_qm_holder)

    clt = sub.add_parser("clt", help="central limit statistics")
    clt_sub = clt.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, handler in (("drift", cmd_clt_drift), ("sample", cmd_clt_sample),
                          ("empirical", cmd_clt_empirical),
                          ("typicality", cmd_clt_typicality)):
        p = clt_sub.add_parser(name)
        _add_common(p)
        p.add_argument("--fn", default="word-length")
        p.add_argument("--depth", type=int, default=3)
        p.add_argument("--verify-radius", type=int, default=6)
        if name == "drift":
            p.add_argument("--check-n", type=int, default=0,
                           help="also run the exact moment oracle at this length")
        if name in ("sample", "empirical"):
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--count", type=int, required=True)
            p.add_argument("--seed", type=int, required=True)
        if name == "typicality":
            p.add_argument("--ray-length", type=int, required=True)
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--m", type=int, required=True)
            p.add_argument("--seed", type=int, required=True)
        if name in ("empirical", "typicality"):
            p.add_argument("--no-plot", action="store_true")
        p.set_defaults(func=handler)

    cmp_ = sub.add_parser("compare", help="generating-set comparison")
    cmp_sub = cmp_.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = cmp_sub.add_parser("gensets")
    _add_common(p)
    p.add_argument("--genset2", required=True)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--verify-radius", type=int, default=7)
    p.add_argument("--ball-radius2", type=int, default=7)
    p.add_argument("--check-lengths", default="",
                   help="comma-separated word lengths for exhaustive deviation tables")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_compare_gensets)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    return ns.func(ns)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
