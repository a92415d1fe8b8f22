"""``primverify`` command line.

Every subcommand builds a :class:`VerificationReport`, prints it in the chosen
format and exits with 0 (all checks as expected), 1 (a refutation), 2 (bad
configuration or checkpoint) or 3 (indeterminate or incomplete).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .constants import (C_REFERENCE_DIGITS, DELTA_N_LITERATURE, EPSILON0_START_INDEX, epsilon0_bound,
                        erdos_constant_C, race_density_interval, twin_prime_constants)
from .interval import (MAX_RATIONAL_PRIME, CertifiedConstant, Interval, Provenance, Status, certify_less,
                       e_gamma, euler_gamma, rational_mertens_identity)
from .mertens import (P_10_8, check_fg_ratio, check_pair_criterion, check_rs_product, mertens_pair_check,
                      pair_criterion_limit, scan_mertens)
from .primes import DEFAULT_SEGMENT_ODDS, default_threads, primes_array
from .primitive import (BRUTE_DEFAULT_N, BRUTE_MAX_N, ZHANG_OMEGA_RANGE, brute_force_scan, check_odd_branch,
                        evaluate_set, f_value, read_set_file)
from .report import EXIT_CONFIG, CheckResult, VerificationReport, oriented
from .scan import CheckpointError
from .zhang import (check_banks_martin_finite, f_nk_truncated, h_N2_checks, h_nk_finite, scan_zhang)

COMMANDS = ("constants", "mertens", "zhang", "pairs", "nk", "set-eval", "brute", "rs-product", "fg-ratio")
DESK_BOUND = 10**8
LONG_BOUND = P_10_8
SCAN_COMMANDS = ("mertens", "zhang", "fg-ratio")
EPSILON0_LIMIT = "2.37e-7"
RACE_LIMIT = "4.2e-3"
EXTERNAL_A3 = "0.92"
PAIR_LIMIT_AT_P_10_8 = 1_055_356


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    bound: int | None = None
    threads: int = 1
    checkpoint_path: str | None = None
    output_format: str = "text"
    long_mode: bool = False
    resume: bool = False
    stop_after_segments: int | None = None
    checkpoint_every: int = 1
    segment_odds: int = DEFAULT_SEGMENT_ODDS
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.output_format not in ("json", "csv", "text"):
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.checkpoint_every < 1:
            raise ConfigError("checkpoint interval must be at least 1 segment")
        if self.stop_after_segments is not None and self.stop_after_segments < 1:
            raise ConfigError("--stop-after-segments must be positive")
        if self.resume and not self.checkpoint_path:
            raise ConfigError("--resume needs --checkpoint")
        if not 1 << 10 <= self.segment_odds <= 1 << 26:
            raise ConfigError("segment size must lie in [2^10, 2^26]")
        if self.command in SCAN_COMMANDS:
            if self.bound is None or self.bound < 2:
                raise ConfigError("--bound must be at least 2")
            limit = LONG_BOUND if self.long_mode else DESK_BOUND
            if self.bound > limit:
                hint = "" if self.long_mode else " (use --long for up to p_(10^8))"
                raise ConfigError(f"--bound {self.bound} exceeds {limit}{hint}")
        if self.command == "brute":
            limit = BRUTE_MAX_N if self.long_mode else ZHANG_OMEGA_RANGE
            if self.bound is None or not 2 <= self.bound <= limit:
                raise ConfigError(f"--max must lie in [2, {limit}]")


# constants ---------------------------------------------------------------------


def _constant_check(name: str, lhs: Interval, rhs: Interval) -> CheckResult:
    st = certify_less(lhs, rhs)
    return CheckResult("constants", name, st, oriented(st, lhs, rhs))


def run_constants(cfg: RunConfig) -> tuple[list[CheckResult], dict]:
    C = erdos_constant_C()
    eg, g = e_gamma(), euler_gamma()
    c2, c2p = twin_prime_constants()
    eps0 = epsilon0_bound()
    race_eps, race = race_density_interval(DELTA_N_LITERATURE)
    ref = Interval.from_decimal(C_REFERENCE_DIGITS)
    unit = Interval.from_decimal("1e-11")
    f2 = f_value(2)

    consts = [
        C, eg, g,
        CertifiedConstant("twin_c2", c2, Provenance.COMPUTED, 1e-3, "2 prod_{p>2}(1-1/(p-1)^2)"),
        CertifiedConstant("twin_c2_prime", c2p, Provenance.COMPUTED, 1e-3, "prod_{p>2}(1+1/(p(p-2)))"),
        CertifiedConstant("epsilon0_tail", eps0.bound, Provenance.COMPUTED, 1e-9,
                          f"sum_(n>{EPSILON0_START_INDEX}) 1/(5 p_n log^4 p_n); {eps0.method}"),
        CertifiedConstant("race_density_bound", race, Provenance.COMPUTED, 1e-9,
                          "delta/eps + 16 eps at eps = sqrt(delta)/4"),
        CertifiedConstant("delta_non_mertens", Interval.point(DELTA_N_LITERATURE), Provenance.EXTERNAL, 1.0,
                          "logarithmic density of non-Mertens primes, cited"),
        CertifiedConstant("f_A3_bound", Interval.from_decimal(EXTERNAL_A3), Provenance.EXTERNAL, 1.0,
                          "f(A_3) < 0.92, cited and never recomputed"),
    ]
    checks = [
        CheckResult("constants", "C width < 1e-9",
                    Status.CERTIFIED if C.value.width < 1e-9 else Status.REFUTED, None,
                    detail={"width": C.value.width}),
        _constant_check("|C - 1.63661632336| < 1e-11", _abs(C.value - ref), unit),
        _constant_check("C < 1.637", C.value, Interval.from_decimal("1.637")),
        _constant_check("epsilon0 < 2.37e-7", eps0.bound, Interval.from_decimal(EPSILON0_LIMIT)),
        _constant_check("race bound < 4.2e-3", race, Interval.from_decimal(RACE_LIMIT)),
        _contains_check("c2 = 1.3203...", c2, Interval(1.3203, 1.3204), prefix=True),
        _contains_check("c2 * c2' contains 2", c2 * c2p, Interval(2.0, 2.0)),
        _contains_check("f(2) = 0.7213...", f2, Interval(0.7213, 0.7214), prefix=True),
        check_odd_branch(C),
    ]
    summary = {c.name: {"lo": repr(c.value.lo), "hi": repr(c.value.hi), "provenance": c.provenance.value}
               for c in consts}
    summary["C_contains_reference_literal"] = ref.lo >= C.value.lo and ref.hi <= C.value.hi
    summary["race_epsilon"] = [repr(race_eps.lo), repr(race_eps.hi)]
    extra = {"constants": [c.to_dict() for c in consts]}
    return checks, {"summary": summary, "extra": extra}


def _abs(iv: Interval) -> Interval:
    if iv.lo >= 0:
        return iv
    if iv.hi <= 0:
        return -iv
    return Interval(0.0, max(-iv.lo, iv.hi))


def _contains_check(name: str, enclosure: Interval, target: Interval, prefix: bool = False) -> CheckResult:
    """Containment of a quoted value.

    With ``prefix`` the quoted value is a truncated decimal ``d...``: the
    enclosure must lie inside [target.lo, target.hi].
    """
    if prefix:
        ok = target.lo <= enclosure.lo and enclosure.hi < target.hi
    else:
        ok = enclosure.lo <= target.lo and target.hi <= enclosure.hi
    return CheckResult("constants", name, Status.CERTIFIED if ok else Status.REFUTED, None,
                       detail={"enclosure": enclosure.to_hex()})


# scans ---------------------------------------------------------------------------


def _scan_kwargs(cfg: RunConfig) -> dict:
    return dict(threads=cfg.threads, segment_odds=cfg.segment_odds, checkpoint_path=cfg.checkpoint_path,
                resume=cfg.resume, checkpoint_every=cfg.checkpoint_every, max_segments=cfg.stop_after_segments)


def run_mertens(cfg: RunConfig):
    r = scan_mertens(cfg.bound, **_scan_kwargs(cfg))
    return r.checks(), {"summary": r.summary(), "digests": [r.digest], "complete": r.complete}


def run_zhang(cfg: RunConfig):
    r = scan_zhang(cfg.bound, **_scan_kwargs(cfg))
    return r.checks(), {"summary": r.summary(), "digests": [r.digest], "complete": r.complete}


def run_fg_ratio(cfg: RunConfig):
    r = check_fg_ratio(cfg.bound, threads=cfg.threads, segment_odds=cfg.segment_odds)
    summary = {"bound": r.bound, "checked": r.checked, "argmax": r.argmax,
               "argmax_ratio": [repr(r.argmax_ratio.lo), repr(r.argmax_ratio.hi)],
               "failures": len(r.failures), "indeterminate": len(r.indeterminate)}
    return r.checks(), {"summary": summary, "digests": [r.digest]}


def run_rs_product(cfg: RunConfig):
    x_max = cfg.bound or 285
    checks = check_rs_product(x_max)
    bad = [c.subject for c in checks if not c.ok]
    return checks, {"summary": {"x_max": x_max, "checked_points": len(checks), "failures": len(bad)}}


def run_pairs(cfg: RunConfig):
    pairs = cfg.options.get("pairs") or [(3, 3), (3, 5), (101, 10**6)]
    checks = [mertens_pair_check(p, q) for p, q in pairs]
    p_crit = cfg.options.get("criterion_prime") or P_10_8
    checks.append(check_pair_criterion(p_crit))
    limit = pair_criterion_limit(p_crit)
    if p_crit == P_10_8:
        target = Interval.from_int(PAIR_LIMIT_AT_P_10_8)
        st = certify_less(target, limit)
        checks.append(CheckResult("pair-limit", f"4.999 (log {p_crit})^4 > {PAIR_LIMIT_AT_P_10_8}", st,
                                  oriented(st, target, limit)))
    return checks, {"summary": {"pairs": [list(x) for x in pairs], "criterion_prime": p_crit,
                                "limit": [repr(limit.lo), repr(limit.hi)]}}


def run_nk(cfg: RunConfig):
    checks = h_N2_checks()
    summary: dict = {}
    for c in checks:
        if "value" in c.detail:
            summary["h_N2_truncated"] = c.detail["decimal"]
    Q = cfg.options.get("Q")
    k = cfg.options.get("k") or 2
    if Q:
        values = {}
        for j in range(1, k + 2):
            v = h_nk_finite(Q, j)
            values[str(j)] = [repr(v.lo), repr(v.hi)]
        for j in range(1, k + 1):
            checks.append(check_banks_martin_finite(Q, j))
        summary["Q"] = list(Q)
        summary["h_Nk_Q"] = values
    ob = cfg.options.get("omega_bound")
    if ob:
        summary["f_Nk_truncated"] = {str(j): [repr(v.lo), repr(v.hi)]
                                     for j in range(1, k + 1) for v in [f_nk_truncated(j, ob)]}
        summary["omega_bound"] = ob
    # k = 1 column of the g-identity, exactly
    bad = []
    rmax = cfg.options.get("identity_max") or 97
    for r in primes_array(rmax).tolist():
        lhs, rhs = rational_mertens_identity(r)
        if lhs != rhs:
            bad.append(r)
    checks.append(CheckResult("g-identity", f"primes r <= {rmax}",
                              Status.REFUTED if bad else Status.CERTIFIED, None, detail={"mismatches": bad}))
    return checks, {"summary": summary}


def run_set_eval(cfg: RunConfig):
    values = list(cfg.options.get("members") or [])
    if cfg.options.get("file"):
        values += read_set_file(cfg.options["file"])
    if not values:
        raise ConfigError("no members given")
    checks, info = evaluate_set(values)
    return checks, {"summary": {"support": info["support"], "f_decimal": info["f_decimal"],
                                "size": len(info["members"])}, "extra": info}


def run_brute(cfg: RunConfig):
    r = brute_force_scan(cfg.bound, max_n=BRUTE_MAX_N)
    return r.results(), {"summary": r.summary()}


RUNNERS = {
    "constants": run_constants, "mertens": run_mertens, "zhang": run_zhang, "pairs": run_pairs,
    "nk": run_nk, "set-eval": run_set_eval, "brute": run_brute, "rs-product": run_rs_product,
    "fg-ratio": run_fg_ratio,
}


def run(cfg: RunConfig) -> VerificationReport:
    """Execute one configured verification and assemble its report."""
    cfg.validate()
    t0 = time.perf_counter()
    checks, info = RUNNERS[cfg.command](cfg)
    report = VerificationReport(cfg.command, _config_echo(cfg), checks, info.get("summary", {}),
                                info.get("digests", []), complete=info.get("complete", True),
                                details=info.get("extra", {}))
    report.wall_time = time.perf_counter() - t0
    return report


def _config_echo(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    if d["options"].get("pairs"):
        d["options"]["pairs"] = [list(x) for x in d["options"]["pairs"]]
    return d


# argument parsing ------------------------------------------------------------------


def _int(text: str) -> int:
    """Integers, also written as 1e7 or 10^7."""
    t = text.strip().replace("_", "")
    if "^" in t:
        b, e = t.split("^", 1)
        return int(b) ** int(e)
    if "e" in t.lower():
        m, e = t.lower().split("e", 1)
        if "." not in m:
            return int(m) * 10 ** int(e)
    return int(t)


def _int_list(text: str) -> list[int]:
    return [_int(x) for x in text.replace(" ", "").split(",") if x]


def _pair(text: str) -> tuple[int, int]:
    a, b = _int_list(text)
    return a, b


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $PRIMVERIFY_THREADS or 1)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", help="also write the report to this file")
    common.add_argument("--long", action="store_true", help="lift desk-scale limits")

    scan = argparse.ArgumentParser(add_help=False)
    scan.add_argument("--bound", type=_int, default=10**7)
    scan.add_argument("--checkpoint", help="checkpoint file")
    scan.add_argument("--resume", action="store_true", help="resume from --checkpoint if it exists")
    scan.add_argument("--checkpoint-every", type=int, default=1, metavar="SEGMENTS")
    scan.add_argument("--stop-after-segments", type=int, default=None, metavar="N")
    scan.add_argument("--segment-odds", type=_int, default=DEFAULT_SEGMENT_ODDS)

    ap = argparse.ArgumentParser(prog="primverify", description="Certified checks on primes and primitive sets.")
    ap.add_argument("--version", action="version", version=f"primverify {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="certified constants with provenance")
    sub.add_parser("mertens", parents=[common, scan], help="Mertens prime scan")
    sub.add_parser("zhang", parents=[common, scan], help="Zhang prime scan")
    fg = sub.add_parser("fg-ratio", parents=[common], help="f(p)/(e^gamma g(p)) < 1.082")
    fg.add_argument("--bound", type=_int, default=10**6)
    fg.add_argument("--segment-odds", type=_int, default=DEFAULT_SEGMENT_ODDS)
    rs = sub.add_parser("rs-product", parents=[common], help="product inequality on [1, x_max]")
    rs.add_argument("--max", dest="bound", type=_int, default=285)
    pr = sub.add_parser("pairs", parents=[common], help="Mertens pairs and the pair criterion")
    pr.add_argument("--pair", dest="pairs", type=_pair, action="append", metavar="P,Q")
    pr.add_argument("--criterion-prime", type=_int, default=None)
    nk = sub.add_parser("nk", parents=[common], help="h(N_2), finite-support h(N_k(Q)), f(N_k) truncations")
    nk.add_argument("--Q", type=_int_list, default=None, help="comma-separated primes")
    nk.add_argument("--Q-file", default=None, help="file of primes, one per line")
    nk.add_argument("--k", type=int, default=2)
    nk.add_argument("--omega-bound", type=_int, default=None)
    nk.add_argument("--identity-max", type=int, default=97)
    se = sub.add_parser("set-eval", parents=[common], help="evaluate a finite primitive set")
    se.add_argument("members", nargs="*", type=_int)
    se.add_argument("--file", default=None)
    br = sub.add_parser("brute", parents=[common], help="exhaustive primitive subsets of [2, N]")
    br.add_argument("--max", dest="bound", type=int, default=BRUTE_DEFAULT_N)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    threads = ns.threads if ns.threads is not None else default_threads()
    cfg = RunConfig(ns.command, getattr(ns, "bound", None), threads, getattr(ns, "checkpoint", None),
                    ns.format, ns.long, getattr(ns, "resume", False),
                    getattr(ns, "stop_after_segments", None), getattr(ns, "checkpoint_every", 1),
                    getattr(ns, "segment_odds", DEFAULT_SEGMENT_ODDS))
    if ns.command == "pairs":
        cfg.options = {"pairs": ns.pairs, "criterion_prime": ns.criterion_prime}
    elif ns.command == "nk":
        Q = ns.Q
        if ns.Q_file:
            Q = (Q or []) + read_set_file(ns.Q_file)
        if ns.k < 1:
            raise ConfigError("--k must be at least 1")
        if not 2 <= ns.identity_max <= MAX_RATIONAL_PRIME:
            raise ConfigError(f"--identity-max must lie in [2, {MAX_RATIONAL_PRIME}]")
        cfg.options = {"Q": Q, "k": ns.k, "omega_bound": ns.omega_bound, "identity_max": ns.identity_max}
    elif ns.command == "set-eval":
        cfg.options = {"members": ns.members, "file": ns.file}
    return cfg


def render(report: VerificationReport, fmt: str) -> str:
    if fmt == "json":
        return report.to_json()
    if fmt == "csv":
        return report.to_csv()
    return report.to_text()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:2] == ["set", "eval"]:
        argv = ["set-eval"] + argv[2:]
    ns = build_parser().parse_args(argv)  # exits with status 2 on bad flags
    try:
        cfg = config_from_args(ns)
        report = run(cfg)
    except (ConfigError, CheckpointError, ValueError, OSError) as exc:
        print(f"primverify: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(report, cfg.output_format)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if ns.output:
        with open(ns.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    return report.exit_status()


if __name__ == "__main__":
    sys.exit(main())
