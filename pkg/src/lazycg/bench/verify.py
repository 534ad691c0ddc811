"""Post-hoc audit of a trace against its experiment.

The instance is rebuilt from the config, its optimum is brute-forced, and the
per-row guarantees of the algorithm that produced the trace are checked: the
bound recurrences are replayed from the recorded ``phi`` column and every
row's primal gap must respect the bound in force.  Domains too large for
brute force only get the checks that need no optimum.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .. import bruteforce
from ..algorithms import run_adversarial
from ..algorithms import schedules as sch
from ..objectives import RunningAggregate
from .config import build_domain, build_objective, build_stream

SKIPPED = "skipped: oracle-contract checks only"
REPLAY_RTOL = 1e-10
SLACK = 1e-9


@dataclass
class Report:
    status: str = "pass"
    row: int = None
    message: str = ""
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return self.status != "fail"

    def fail(self, row, message):
        if self.status != "fail":
            self.status, self.row, self.message = "fail", row, message

    def __str__(self):
        if self.status == "fail":
            return f"fail at row t={self.row}: {self.message}"
        text = "pass" if self.status == "pass" else SKIPPED
        return f"{text} ({', '.join(self.checks)})" if self.checks else text


def _close(a, b):
    return abs(a - b) <= REPLAY_RTOL * max(1.0, abs(a), abs(b))


def _rows(data):
    return [r for r in data.rows if r["t"] >= 1]


def _check_counters(data, report):
    report.checks.append("counters")
    prev = None
    for r in data.rows:
        if prev is not None:
            for key in ("lp_calls", "cache_hits"):
                if r[key] < prev[key]:
                    report.fail(r["t"], f"{key} decreased")
                    return
        prev = r


def _check_wolfe(data, report, f_star, tol):
    report.checks.append("wolfe gap >= primal gap")
    for r in data.rows:
        gap = r["wolfe_gap"]
        if not math.isnan(gap) and r["f"] - f_star > gap + tol:
            report.fail(r["t"], f"primal gap {r['f'] - f_star:.6g} exceeds Wolfe gap {gap:.6g}")
            return


def _check_primal(data, report, f_star, tol, factor=1.0, name="primal gap <= phi"):
    report.checks.append(name)
    for r in data.rows:
        if math.isnan(r["phi"]):
            continue
        if r["f"] - f_star > factor * r["phi"] + tol:
            report.fail(r["t"], f"primal gap {r['f'] - f_star:.17g} exceeds "
                                f"{factor:g} * phi = {factor * r['phi']:.17g}")
            return


def _check_envelope(data, report, envelope, tol):
    report.checks.append("geometric envelope")
    for r in _rows(data):
        bound = envelope(r["t"])
        if r["phi"] > bound * (1.0 + REPLAY_RTOL) + tol:
            report.fail(r["t"], f"phi {r['phi']:.17g} above envelope {bound:.17g}")
            return


def _replay(data, report, update):
    report.checks.append("phi recurrence")
    prev = data.rows[0]["phi"]
    for r in _rows(data):
        expected = update(prev, r)
        if expected is not None and not _close(r["phi"], expected):
            report.fail(r["t"], f"phi {r['phi']:.17g} does not follow the recurrence "
                                f"(expected {expected:.17g})")
            return
        prev = r["phi"]


def _verify_textbook(data, p, report, f_star, tol):
    K, C, phi0 = p["K"], p["C"], p["phi0"]
    _replay(data, report, lambda prev, r: sch.lcg_phi_update(
        prev, C, sch.lcg_schedule_gamma(r["t"], K), K))
    if f_star is None:
        return
    _check_primal(data, report, f_star, tol)
    report.checks.append("textbook rate")
    for r in data.rows:
        bound = sch.textbook_bound(r["t"] + 1, C, phi0, K)
        if r["f"] - f_star > bound + tol:
            report.fail(r["t"], f"primal gap above the rate bound {bound:.6g}")
            return


def _verify_parameter_free(data, p, report, f_star, tol):
    report.checks.append("phi halving")
    prev = data.rows[0]["phi"]
    for r in _rows(data):
        if r["answer"] == "negative":
            ok = (r["phi"] <= prev / 2.0 * (1 + REPLAY_RTOL) if p.get("phi_from_gap")
                  else _close(r["phi"], prev / 2.0))
        else:
            ok = r["phi"] == prev
        if not ok:
            report.fail(r["t"], "phi changed other than by halving after a negative answer")
            return
        prev = r["phi"]
    if f_star is None:
        return
    # a negative answer at phi certifies a primal gap <= phi = 2 * (phi / 2)
    _check_primal(data, report, f_star, tol, 2.0, "primal gap <= 2 phi")
    eps = p.get("epsilon")
    if not isinstance(eps, float) or math.isnan(eps):
        return
    rows = _rows(data)
    hit = [r for r in rows if r["f"] - f_star <= eps]
    if not hit:
        return
    first = hit[0]["t"]
    negatives = sum(1 for r in rows if r["t"] <= first and r["answer"] == "negative")
    phi0 = data.rows[0]["phi"]
    report.checks.append("negative-call budget")
    budget = sch.negative_call_budget(phi0, eps)
    if negatives > budget:
        report.fail(first, f"{negatives} negative calls exceed the budget {budget}")
        return
    C = p.get("C")
    if isinstance(C, float) and not math.isnan(C) and C > 0:
        report.checks.append("iteration budget")
        limit = sch.parameter_free_budget(phi0, eps, p["K"], C)
        if first > limit:
            report.fail(first, f"gap {eps} reached after {first} > {limit:.6g} iterations")


def _verify_pairwise(data, p, report, f_star, tol):
    K, C, S, a, kappa = p["K"], p["C"], p["S"], p["alpha_card"], p["kappa"]

    def update(prev, r):
        eta = kappa * math.sqrt(prev)
        return sch.lpcg_phi_update(prev, eta, C, K, math.sqrt(2.0 * a * prev / S))

    _replay(data, report, update)
    _check_envelope(data, report, lambda t: sch.lpcg_envelope(t, p["phi0"], p["B"]), 0.0)
    if f_star is not None:
        _check_primal(data, report, f_star, tol)


def _verify_local(data, p, report, f_star, tol):
    K, S, beta, n, mu, D, alpha = (p[k] for k in ("K", "S", "beta", "n", "mu", "D", "alpha"))
    _replay(data, report, lambda prev, r: sch.llcg_phi_update(
        prev, beta, alpha, n, mu, sch.llcg_radius(prev, S), D, K))
    _check_envelope(data, report, lambda t: sch.llcg_envelope(t, p["phi0"], alpha, K), 0.0)
    report.checks.append("local step radius")
    for r in _rows(data):
        step = r.get("local_step", math.nan)
        if not math.isnan(step) and step > r["local_bound"] + SLACK:
            report.fail(r["t"], f"local step {step:.6g} leaves the ball {r['local_bound']:.6g}")
            break
    if f_star is not None:
        _check_primal(data, report, f_star, tol)


def _verify_online(data, p, report, agg_opt):
    K, C, b = p["K"], p["C"], p["b"]
    report.checks.append("phi_bar recurrence")
    for r in _rows(data):
        expected = sch.locg_phi_bar(r["h"], C, b, r["gamma"], r["t"], K)
        if not _close(r["phi_bar"], expected):
            report.fail(r["t"], f"phi_bar {r['phi_bar']:.17g} != {expected:.17g}")
            return
        if r["answer"] != "negative" and not _close(r["phi"], r["h"] - r["f_pre"] + r["f"]):
            report.fail(r["t"], "positive-round phi does not equal h - F(x_t) + F(x_t+1)")
            return
    if agg_opt is None:
        return
    report.checks.append("aggregate gap <= h")
    for r, opt in zip(_rows(data), agg_opt):
        tol = SLACK * max(1.0, abs(opt))
        if r["f_pre"] - opt > r["h"] + tol:
            report.fail(r["t"], f"F_t(x_t) - min F_t = {r['f_pre'] - opt:.17g} exceeds "
                                f"h_t = {r['h']:.17g}")
            return
        if r["f"] - opt > r["phi"] + tol:
            report.fail(r["t"], "F_t(x_t+1) - min F_t exceeds phi_t")
            return


_OFFLINE = {
    "lazy_cg_textbook": _verify_textbook,
    "lazy_cg_parameter_free": _verify_parameter_free,
    "lazy_pairwise_cg": _verify_pairwise,
    "lazy_local_cg": _verify_local,
    "vanilla_fw": lambda *args: None,
}


def _online_optima(data, cfg, domain, seed):
    """Brute-force ``min F_t`` per round, or None when the domain is too large."""
    algorithm = data.algorithm
    stream = build_stream(cfg, domain, seed)
    if algorithm == "lazy_online_cg":
        try:
            V = np.asarray(domain.enumerate_vertices(10**4))
        except Exception:
            return None
        agg = RunningAggregate(domain.dimension)
        out = []
        for loss in list(stream)[: len(_rows(data))]:
            agg.add(loss)
            if np.any(agg.Q):
                out.append(bruteforce.minimum(agg.objective(), domain)[0])
            else:
                out.append(float(np.min(V @ agg.q)) + agg.const)
        return out
    # the surrogate losses depend on the iterates: rerun and insist on an identical trace
    spec = next(s for s in cfg.solvers if s.name == data.params.get("solver"))
    if not bruteforce.is_enumerable(stream[0], domain) or (
            domain.dimension > 8):
        return None
    p = data.params
    config = spec.config.replace(K=p["K"], max_iters=p["max_iters"], oracle=p["oracle"],
                                 cache_enabled=bool(p["cache_enabled"]))
    rerun = run_adversarial(stream, domain, config,
                            minimizer=bruteforce.domain_minimizer(domain))
    for r, q in zip(_rows(data), rerun.records[1:]):
        for key in ("f", "f_pre", "h", "phi"):
            if r[key] != q[key]:
                raise ValueError(f"replay of the run diverged at t={r['t']} ({key})")
    return [q["agg_opt"] for q in rerun.records[1:]]


def verify_trace(data, cfg, seed=None):
    """Audit ``data`` (a :class:`~lazycg.bench.trace_io.TraceData`) against ``cfg``."""
    report = Report()
    p = data.params
    seed = p.get("seed", seed)
    domain = build_domain(cfg)
    _check_counters(data, report)
    algorithm = data.algorithm
    if algorithm in ("lazy_online_cg", "run_adversarial"):
        try:
            agg_opt = _online_optima(data, cfg, domain, seed)
        except ValueError as exc:
            report.fail(None, str(exc))
            return report
        _verify_online(data, p, report, agg_opt)
        if agg_opt is None and report.status == "pass":
            report.status = "skipped"
        return report
    if algorithm not in _OFFLINE:
        report.fail(None, f"unknown algorithm {algorithm!r}")
        return report
    f = build_objective(cfg, domain, seed)
    f_star = None
    if bruteforce.is_enumerable(f, domain):
        f_star = bruteforce.minimum(f, domain)[0]
        tol = SLACK * max(1.0, abs(f_star))
        _check_wolfe(data, report, f_star, tol)
    else:
        tol = SLACK
    _OFFLINE[algorithm](data, p, report, f_star, tol)
    if f_star is None and report.status == "pass":
        report.status = "skipped"
    return report
