"""Experiment configuration files.

An experiment is one INI file::

    [experiment]
    name = simplex_demo          ; file name prefix of the traces

    [domain]
    kind = simplex               ; simplex | hypercube | spanning_tree | shortest_path
    n = 4
    mu = 1.0                     ; optional

    [objective]                  ; offline solvers
    generator = regression       ; regression | distance
    density = 0.5
    m = 10
    seed = 1

    [stream]                     ; online solvers
    generator = linear
    rounds = 300
    seed = 0

    [solver.lazy]                ; one section per run, any SolverConfig field
    algorithm = lazy_cg_parameter_free
    K = 1.0
    max_iters = 500

``curvature = exact`` and ``f_star = exact`` ask for brute-force values.
Graph domains take ``nodes`` (complete graph) or ``nodes`` plus
``edges = 0-1 1-2 ...``; shortest paths also need ``source`` and ``sink``.
"""

import configparser
import dataclasses
import itertools

from .. import bruteforce
from ..algorithms import OFFLINE_SOLVERS, ONLINE_SOLVERS, SolverConfig
from ..domains import Hypercube, ProbabilitySimplex, ShortestPathPolytope, SpanningTreePolytope
from ..objectives import distance_objective, generate_linear_stream, generate_regression_instance

SOLVER_PREFIX = "solver."
DOMAIN_KINDS = ("simplex", "hypercube", "spanning_tree", "shortest_path")
EXACT = "exact"
_SPECIAL_KEYS = ("algorithm",)


class ConfigError(ValueError):
    """Malformed experiment file; the message names the offending location."""


@dataclasses.dataclass
class SolverSpec:
    name: str
    algorithm: str
    config: SolverConfig
    exact_curvature: bool = False
    exact_f_star: bool = False

    @property
    def online(self):
        return self.algorithm in ONLINE_SOLVERS


@dataclasses.dataclass
class ExperimentConfig:
    path: str
    name: str
    domain: dict
    objective: dict
    stream: dict
    solvers: list

    def seed(self, override=None):
        section = self.stream if self.stream else self.objective
        if override is not None:
            return int(override)
        return int(section["seed"])


def _where(path, section, key=None):
    return f"{path}: [{section}]" + (f" {key}" if key else "")


def _convert(path, section, key, raw, kind):
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if raw.lower() == "none":
            return None
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{_where(path, section, key)}: cannot read {raw!r} as "
                          f"{kind.__name__}") from None


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SolverConfig)}
_FIELDS_LOWER = {name.lower(): name for name in _FIELD_TYPES}


def _solver_spec(path, section, items):
    if "algorithm" not in items:
        raise ConfigError(f"{_where(path, section)}: missing 'algorithm'")
    algorithm = items["algorithm"].strip()
    if algorithm not in OFFLINE_SOLVERS and algorithm not in ONLINE_SOLVERS:
        known = ", ".join(sorted({**OFFLINE_SOLVERS, **ONLINE_SOLVERS}))
        raise ConfigError(f"{_where(path, section, 'algorithm')}: unknown algorithm "
                          f"{algorithm!r} (known: {known})")
    kwargs = {}
    exact = {"curvature": False, "f_star": False}
    for key, raw in items.items():
        if key in _SPECIAL_KEYS:
            continue
        name = _FIELDS_LOWER.get(key.lower())
        if name is None:
            raise ConfigError(f"{_where(path, section, key)}: unknown solver option")
        if name in exact and raw.strip().lower() == EXACT:
            exact[name] = True
            continue
        kwargs[name] = _convert(path, section, key, raw, _FIELD_TYPES[name])
    try:
        config = SolverConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{_where(path, section)}: {exc}") from None
    return SolverSpec(section[len(SOLVER_PREFIX):], algorithm, config,
                      exact["curvature"], exact["f_star"])


def parse_config(path):
    """Read and validate an experiment file; raises :class:`ConfigError`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not parser.has_section("domain"):
        raise ConfigError(f"{path}: missing [domain] section")
    domain = dict(parser["domain"])
    objective = dict(parser["objective"]) if parser.has_section("objective") else {}
    stream = dict(parser["stream"]) if parser.has_section("stream") else {}
    name = parser.get("experiment", "name", fallback="run") if parser.has_section(
        "experiment") else "run"
    solvers = [_solver_spec(path, s, dict(parser[s]))
               for s in parser.sections() if s.startswith(SOLVER_PREFIX)]
    if not solvers:
        raise ConfigError(f"{path}: no [solver.*] sections")
    cfg = ExperimentConfig(path, name, domain, objective, stream, solvers)
    for spec in solvers:
        needed = "stream" if spec.online else "objective"
        section = stream if spec.online else objective
        if not section:
            raise ConfigError(f"{path}: [solver.{spec.name}] needs a [{needed}] section")
        if "seed" not in section:
            raise ConfigError(f"{_where(path, needed)}: missing 'seed'")
        _convert(path, needed, "seed", section["seed"], int)
    build_domain(cfg)
    return cfg


def _int(cfg, section, values, key, default=None):
    if key not in values:
        if default is not None:
            return default
        raise ConfigError(f"{_where(cfg.path, section)}: missing {key!r}")
    return _convert(cfg.path, section, key, values[key], int)


def _float(cfg, section, values, key, default=None):
    if key not in values:
        return default
    return _convert(cfg.path, section, key, values[key], float)


def _edges(cfg, values):
    nodes = _int(cfg, "domain", values, "nodes")
    if "edges" not in values:
        return nodes, list(itertools.combinations(range(nodes), 2))
    edges = []
    for token in values["edges"].replace(",", " ").split():
        try:
            u, v = token.split("-")
            edges.append((int(u), int(v)))
        except ValueError:
            raise ConfigError(f"{_where(cfg.path, 'domain', 'edges')}: bad edge "
                              f"{token!r}, expected u-v") from None
    return nodes, edges


def build_domain(cfg):
    values = cfg.domain
    kind = values.get("kind", "").strip()
    mu = _float(cfg, "domain", values, "mu")
    try:
        if kind == "simplex":
            return ProbabilitySimplex(_int(cfg, "domain", values, "n"),
                                      mu=1.0 if mu is None else mu)
        if kind == "hypercube":
            return Hypercube(_int(cfg, "domain", values, "n"), mu=mu)
        if kind == "spanning_tree":
            nodes, edges = _edges(cfg, values)
            return SpanningTreePolytope(nodes, edges, mu=mu)
        if kind == "shortest_path":
            nodes, edges = _edges(cfg, values)
            return ShortestPathPolytope(nodes, edges, _int(cfg, "domain", values, "source"),
                                        _int(cfg, "domain", values, "sink"), mu=mu)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{_where(cfg.path, 'domain')}: {exc}") from None
    raise ConfigError(f"{_where(cfg.path, 'domain', 'kind')}: unknown kind {kind!r} "
                      f"(known: {', '.join(DOMAIN_KINDS)})")


def build_objective(cfg, domain, seed=None):
    values = cfg.objective
    seed = cfg.seed(seed)
    generator = values.get("generator", "regression").strip()
    if generator == "regression":
        density = _float(cfg, "objective", values, "density", 0.5)
        m = _int(cfg, "objective", values, "m", domain.dimension)
        try:
            return generate_regression_instance(domain, density, m, seed)
        except ValueError as exc:
            raise ConfigError(f"{_where(cfg.path, 'objective')}: {exc}") from None
    if generator == "distance":
        return distance_objective(domain, seed)
    raise ConfigError(f"{_where(cfg.path, 'objective', 'generator')}: unknown generator "
                      f"{generator!r}")


def build_stream(cfg, domain, seed=None):
    values = cfg.stream
    seed = cfg.seed(seed)
    generator = values.get("generator", "linear").strip()
    if generator != "linear":
        raise ConfigError(f"{_where(cfg.path, 'stream', 'generator')}: unknown generator "
                          f"{generator!r}")
    rounds = _int(cfg, "stream", values, "rounds")
    if rounds < 1:
        raise ConfigError(f"{_where(cfg.path, 'stream', 'rounds')}: need at least one round")
    return generate_linear_stream(domain.dimension, rounds, seed)


def resolve_solver_config(spec, f, domain):
    """Fill in ``curvature = exact`` and ``f_star = exact`` by brute force."""
    config = spec.config
    if spec.exact_curvature:
        config = config.replace(curvature=bruteforce.exact_curvature(f, domain))
    if spec.exact_f_star:
        if not bruteforce.is_enumerable(f, domain):
            raise ConfigError(f"[solver.{spec.name}] f_star = exact: {domain!r} is too "
                              "large for brute force")
        config = config.replace(f_star=bruteforce.minimum(f, domain)[0])
    return config
