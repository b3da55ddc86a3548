"""Command-line interface.

Settings resolve in the order defaults < ``--config`` file (JSON or YAML) <
``ARTIFACT_<FLAG>`` environment variables < command-line flags. Exit codes:
0 on success, 2 on usage errors, 1 on runtime errors (no output file is left
behind).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, ensembles, expanalytic, harness, kernels, mplaw, spectra

ENV_PREFIX = "ARTIFACT_"


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _flag_bool(text):
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


# dest -> (type, default)
OPTIONS = {
    "kernel": (str, "squared_exponential"),
    "domain": (str, "interval"),
    "sigma": (float, None),
    "r": (float, None),
    "h": (float, None),
    "n_points": (int, None),
    "eps": (_float_list, None),
    "sigmas": (_float_list, None),
    "rs": (_float_list, None),
    "top": (int, None),
    "alpha": (float, None),
    "sigma2": (float, 1.0),
    "d": (int, None),
    "k_over_n": (_float_list, None),
    "n": (_int_list, None),
    "tau": (_float_list, None),
    "dense": (_flag_bool, False),
    "dist": (str, "gaussian"),
    "cov_kernel": (str, None),
    "cov_sigma": (float, None),
    "rank_levels": (_float_list, [0.5, 1.0, 1.5]),
    "samples": (int, 1),
    "n_terms": (int, None),
    "seed": (int, 0),
    "threads": (int, None),
    "max_points": (int, kernels.DEFAULT_MAX_POINTS),
    "format": (str, None),
    "output": (str, "-"),
    "timings": (_flag_bool, False),
}

SUBCOMMANDS = {
    "spectrum": ("kernel", "domain", "sigma", "r", "h", "n_points", "top"),
    "complexity": ("kernel", "domain", "sigma", "r", "h", "n_points", "eps"),
    "sweep-sigma": ("kernel", "domain", "r", "sigmas", "eps"),
    "sweep-res": ("kernel", "domain", "sigma", "rs", "eps"),
    "sweep-eps": ("kernel", "domain", "sigma", "r", "eps"),
    "mp": ("alpha", "sigma2", "eps", "d", "k_over_n"),
    "exp-analytic": ("n", "tau", "eps", "dense"),
    "embed": ("dist", "n", "d", "alpha", "eps", "cov_kernel", "cov_sigma", "rank_levels"),
    "field-sample": ("kernel", "domain", "sigma", "r", "h", "n_points", "eps", "n_terms", "samples"),
}
COMMON = ("seed", "threads", "max_points", "format", "output", "timings")

HELP = {
    "kernel": "kernel family: sq-exp, exp, sq-exp-half (or full names)",
    "domain": "interval, square or sphere",
    "sigma": "correlation length",
    "r": "points per sigma (h = sigma / r)",
    "h": "grid spacing",
    "n_points": "number of sphere points",
    "eps": "comma-separated tolerances",
    "sigmas": "comma-separated correlation lengths",
    "rs": "comma-separated resolutions",
    "top": "emit only the leading eigenvalues",
    "alpha": "aspect ratio n/d",
    "sigma2": "entry variance",
    "d": "ambient dimension",
    "k_over_n": "comma-separated k/n values for the best-k error",
    "n": "comma-separated sizes",
    "tau": "comma-separated inverse correlation lengths (index units)",
    "dense": "also decompose the dense matrix",
    "dist": "gaussian or rademacher",
    "cov_kernel": "covariance family on the index set (correlated ensembles)",
    "cov_sigma": "covariance correlation length in index units",
    "rank_levels": "eps**2/d levels for the eps-rank comparison",
    "samples": "number of realizations",
    "n_terms": "number of KL terms (overrides --eps)",
    "seed": "master seed",
    "threads": "worker threads (default: available cores)",
    "max_points": "dense-matrix point cap",
    "format": "csv or json (default json for mp, csv otherwise)",
    "output": "output path, '-' for stdout",
    "timings": "include wall-clock columns (breaks byte-identical output)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def _flag(dest):
    return "--" + dest.replace("_", "-")


def build_parser():
    parser = _Parser(prog="klcomplexity", description="Intrinsic complexity of random fields.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, dests in SUBCOMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON or YAML config file")
        group = p.add_mutually_exclusive_group() if "r" in dests and "h" in dests else None
        for dest in dests + COMMON:
            target = group if group is not None and dest in ("r", "h") else p
            kind = OPTIONS[dest][0]
            if kind is _flag_bool:
                target.add_argument(_flag(dest), dest=dest, action="store_const", const=True,
                                    default=None, help=HELP[dest])
            else:
                target.add_argument(_flag(dest), dest=dest, type=kind, default=None,
                                    help=HELP[dest])
    return parser


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError("--config", str(exc)) from exc
    if path.endswith((".yaml", ".yml")):
        import yaml

        data = yaml.safe_load(text)
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError("--config", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("--config", "config file must hold a mapping")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve_config(args, environ=None):
    """Merge defaults, config file, environment and flags for ``args.command``."""
    environ = os.environ if environ is None else environ
    dests = SUBCOMMANDS[args.command] + COMMON
    resolved = {dest: OPTIONS[dest][1] for dest in dests}
    if args.config:
        for key, value in _load_config(args.config).items():
            if key not in resolved:
                raise UsageError("--config", f"unknown setting {key!r} for {args.command}")
            resolved[key] = _convert(key, value, "--config")
    for dest in dests:
        env_key = ENV_PREFIX + dest.upper()
        if env_key in environ:
            resolved[dest] = _convert(dest, environ[env_key], env_key)
    for dest in dests:
        value = getattr(args, dest, None)
        if value is not None:
            resolved[dest] = value
            if dest in ("r", "h"):
                resolved["h" if dest == "r" else "r"] = None
    if resolved.get("format") is None:
        resolved["format"] = "json" if args.command == "mp" else "csv"
    if resolved.get("threads") is None:
        resolved["threads"] = os.cpu_count() or 1
    resolved["command"] = args.command
    return resolved


def _convert(dest, value, source):
    kind = OPTIONS[dest][0]
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(source, f"invalid value {value!r} for {_flag(dest)}") from exc


def _require(cfg, *dests):
    for dest in dests:
        if cfg.get(dest) is None:
            raise UsageError(_flag(dest), "required")


def _check_eps_list(cfg, allow_one=True):
    _require(cfg, "eps")
    if not cfg["eps"]:
        raise UsageError("--eps", "empty list")
    for eps in cfg["eps"]:
        if not (0.0 < eps <= 1.0) or (not allow_one and eps == 1.0):
            raise UsageError("--eps", f"tolerance {eps!r} outside (0, 1]")


def _check_kernel(cfg, need_sigma=True):
    try:
        kernels.KernelSpec(cfg["kernel"], 1.0)
    except ValueError as exc:
        raise UsageError("--kernel", str(exc)) from exc
    if cfg["domain"] not in ("interval", "square", "sphere"):
        raise UsageError("--domain", f"unknown domain {cfg['domain']!r}")
    if need_sigma:
        _require(cfg, "sigma")
        if not cfg["sigma"] > 0:
            raise UsageError("--sigma", "must be positive")


def _planned_points(cfg, sigma, r=None, h=None, n_points=None):
    domain = cfg["domain"]
    if r is not None:
        if not r > 0:
            raise UsageError("--r", "must be positive")
        h = sigma / r
    if domain == "sphere":
        if n_points is None:
            if h is None:
                raise UsageError("--r", "sphere needs --r, --h or --n-points")
            n_points = kernels.sphere_points_for_spacing(h)
        if n_points < 16:
            raise UsageError("--n-points", "sphere needs at least 16 points")
        return n_points
    if h is None:
        raise UsageError("--r", "one of --r or --h is required")
    if not 0 < h <= 0.5:
        raise UsageError("--h" if r is None else "--r", f"grid spacing {h:g} outside (0, 0.5]")
    m = int(round(1.0 / h))
    return m if domain == "interval" else m * m


def _check_cap(cfg, n, flag):
    if n > cfg["max_points"]:
        raise UsageError(flag, f"{n} points exceeds the cap of {cfg['max_points']} (see --max-points)")


def validate(cfg):
    """Check every constraint before any work starts; raises :class:`UsageError`."""
    cmd = cfg["command"]
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("--format", "must be csv or json")
    if cfg["threads"] < 1:
        raise UsageError("--threads", "must be at least 1")
    if cfg["seed"] < 0:
        raise UsageError("--seed", "must be non-negative")
    if cmd in ("spectrum", "complexity", "field-sample"):
        _check_kernel(cfg)
        if sum(cfg.get(k) is not None for k in ("r", "h", "n_points")) > 1:
            raise UsageError("--r", "give only one of --r, --h, --n-points")
        n = _planned_points(cfg, cfg["sigma"], cfg.get("r"), cfg.get("h"), cfg.get("n_points"))
        _check_cap(cfg, n, "--r" if cfg.get("r") is not None else "--h")
        if cmd == "complexity":
            _check_eps_list(cfg)
        if cmd == "field-sample":
            if cfg["n_terms"] is None:
                _check_eps_list(cfg)
            elif cfg["n_terms"] < 0 or cfg["n_terms"] > n:
                raise UsageError("--n-terms", f"must lie in [0, {n}]")
            if cfg["samples"] < 1:
                raise UsageError("--samples", "must be positive")
    elif cmd == "sweep-sigma":
        _check_kernel(cfg, need_sigma=False)
        _require(cfg, "r", "sigmas")
        _check_eps_list(cfg)
        for sigma in cfg["sigmas"]:
            if not sigma > 0:
                raise UsageError("--sigmas", "must be positive")
            _check_cap(cfg, _planned_points(cfg, sigma, r=cfg["r"]), "--sigmas")
    elif cmd == "sweep-res":
        _check_kernel(cfg)
        _require(cfg, "rs")
        _check_eps_list(cfg)
        for r in cfg["rs"]:
            if r < 2:
                raise UsageError("--rs", "resolutions must be at least 2")
            _check_cap(cfg, _planned_points(cfg, cfg["sigma"], r=r), "--rs")
    elif cmd == "sweep-eps":
        _check_kernel(cfg)
        _require(cfg, "r")
        _check_eps_list(cfg)
        _check_cap(cfg, _planned_points(cfg, cfg["sigma"], r=cfg["r"]), "--r")
    elif cmd == "mp":
        _require(cfg, "alpha")
        if not cfg["alpha"] > 0:
            raise UsageError("--alpha", "must be positive")
        if not cfg["sigma2"] > 0:
            raise UsageError("--sigma2", "must be positive")
        _check_eps_list(cfg)
        if cfg["d"] is not None and cfg["d"] < 1:
            raise UsageError("--d", "must be positive")
        for k in cfg["k_over_n"] or []:
            if not 0.0 <= k <= 1.0:
                raise UsageError("--k-over-n", "values must lie in [0, 1]")
    elif cmd == "exp-analytic":
        _require(cfg, "n", "tau")
        _check_eps_list(cfg)
        if min(cfg["n"]) < 1:
            raise UsageError("--n", "must be positive")
        if min(cfg["tau"]) <= 0:
            raise UsageError("--tau", "must be positive")
        if cfg["dense"] and max(cfg["n"]) > cfg["max_points"]:
            raise UsageError("--n", "dense decomposition exceeds --max-points")
    elif cmd == "embed":
        _require(cfg, "n")
        _check_eps_list(cfg)
        if cfg["dist"] not in ("gaussian", "rademacher", "bernoulli"):
            raise UsageError("--dist", "must be gaussian or rademacher")
        if (cfg["d"] is None) == (cfg["alpha"] is None):
            raise UsageError("--d", "give exactly one of --d or --alpha")
        if cfg["alpha"] is not None and not cfg["alpha"] > 0:
            raise UsageError("--alpha", "must be positive")
        if cfg["d"] is not None and cfg["d"] < 1:
            raise UsageError("--d", "must be positive")
        if cfg["cov_kernel"] is not None:
            _require(cfg, "cov_sigma")
            try:
                kernels.KernelSpec(cfg["cov_kernel"], cfg["cov_sigma"])
            except ValueError as exc:
                raise UsageError("--cov-kernel", str(exc)) from exc
            if max(cfg["n"]) > cfg["max_points"]:
                raise UsageError("--n", "covariance size exceeds --max-points")


def _kernel_from(cfg, sigma=None):
    return kernels.KernelSpec(cfg["kernel"], cfg["sigma"] if sigma is None else sigma)


def _cmd_spectrum(cfg):
    spec = _kernel_from(cfg)
    cloud, s = harness.kernel_spectrum(spec, cfg["domain"], spec.sigma, r=cfg["r"], h=cfg["h"],
                                       n_points=cfg["n_points"], max_points=cfg["max_points"])
    lam = s.eigenvalues if cfg["top"] is None else s.eigenvalues[: cfg["top"]]
    rows = [{"index": i + 1, "eigenvalue": float(v)} for i, v in enumerate(lam)]
    meta = {"n": cloud.n, "h": cloud.h, "trace": s.trace, "frobenius_sq": s.frobenius_sq}
    return rows, [], meta


def _cmd_complexity(cfg):
    spec = _kernel_from(cfg)
    cloud, s = harness.kernel_spectrum(spec, cfg["domain"], spec.sigma, r=cfg["r"], h=cfg["h"],
                                       n_points=cfg["n_points"], max_points=cfg["max_points"])
    rows = harness._kernel_rows("complexity", spec, cloud, s, cfg["eps"], cfg["r"], 0.0)
    out = []
    for row in rows:
        d = row.as_dict()
        d["truncation_error"] = spectra.truncation_error(s, row.n_under)
        out.append(d)
    return out, [], {"trace": s.trace, "frobenius_sq": s.frobenius_sq}


def _rows_and_fits(rows, fits, cfg):
    return [row.as_dict(cfg["timings"]) for row in rows], [f.as_dict() for f in fits], {}


def _cmd_sweep_sigma(cfg):
    rows, fits = harness.sigma_sweep(cfg["kernel"], cfg["domain"], cfg["r"], cfg["sigmas"],
                                     cfg["eps"], threads=cfg["threads"],
                                     max_points=cfg["max_points"])
    return _rows_and_fits(rows, fits, cfg)


def _cmd_sweep_res(cfg):
    rows = harness.resolution_sweep(cfg["kernel"], cfg["domain"], cfg["sigma"], cfg["rs"],
                                    cfg["eps"], threads=cfg["threads"],
                                    max_points=cfg["max_points"])
    return _rows_and_fits(rows, [], cfg)


def _cmd_sweep_eps(cfg):
    rows, fits = harness.eps_sweep(cfg["kernel"], cfg["domain"], cfg["sigma"], cfg["r"],
                                   cfg["eps"], max_points=cfg["max_points"])
    return _rows_and_fits(rows, fits, cfg)


def _cmd_mp(cfg):
    p = mplaw.MPParams(cfg["sigma2"], cfg["alpha"])
    rows = []
    for eps in cfg["eps"]:
        y = mplaw.solve_quantile(eps, p)
        rho = mplaw.asymptotic_ratio(eps, p)
        row = {
            "eps": eps,
            "y": y,
            "rho": rho,
            "drho_deps": mplaw.rho_derivative(eps, p) if eps < 1.0 else None,
            "partial_moment_at_y": mplaw.partial_moment(y, p, 1),
            "best_k_error_roundtrip": mplaw.best_k_error(rho, p),
        }
        if cfg["d"] is not None:
            row["eps_rank_ratio"] = mplaw.asymptotic_eps_rank_ratio(eps, cfg["d"], p)
        rows.append(row)
    for k in cfg["k_over_n"] or []:
        rows.append({"k_over_n": k, "best_k_error": mplaw.best_k_error(k, p)})
    meta = {"lambda_minus": p.lambda_minus, "lambda_plus": p.lambda_plus, "atom": p.atom}
    return rows, [], meta


def _cmd_exp_analytic(cfg):
    rows = []
    for n in cfg["n"]:
        for tau in cfg["tau"]:
            spec = expanalytic.solve_thetas(n, tau)
            s = spec.to_spectrum()
            dense = spectra.sym_eig(kernels.exponential_index_covariance(n, 1.0 / tau)) if cfg["dense"] else None
            for eps in cfg["eps"]:
                nu = spectra.n_under(s, eps)
                row = {
                    "n": n,
                    "tau": tau,
                    "eps": eps,
                    "n_under": nu,
                    "ratio": nu / n,
                    "t_asymptotic": expanalytic.asymptotic_t(eps, tau),
                    "lambda_1": float(spec.lambdas[0]),
                    "lambda_n": float(spec.lambdas[-1]),
                    "trace": s.trace,
                    "fallback_roots": spec.fallback_count,
                }
                if dense is not None:
                    row["dense_n_under"] = spectra.n_under(dense, eps)
                    row["max_rel_eig_error"] = float(
                        np.max(np.abs(spec.lambdas - dense.eigenvalues) / dense.eigenvalues)
                    )
                rows.append(row)
    return rows, [], {}


def _cmd_embed(cfg):
    if cfg["cov_kernel"] is None:
        alpha = cfg["alpha"] if cfg["alpha"] is not None else None
        rows = []
        for idx, n in enumerate(cfg["n"]):
            d = cfg["d"] if cfg["d"] is not None else int(round(n / alpha))
            spec = ensembles.EnsembleSpec(n, d, cfg["dist"],
                                          seed=harness.row_seed(cfg["seed"], "embed", idx))
            g = ensembles.gram_spectrum(ensembles.sample_iid(spec))
            rows.extend(harness._gram_rows("embed", spec.dist, n, d, g,
                                           mplaw.MPParams(1.0, n / d), cfg["eps"],
                                           cfg["rank_levels"], 0.0))
        return _rows_and_fits(rows, [], cfg)
    rows = []
    for idx, n in enumerate(cfg["n"]):
        d = cfg["d"] if cfg["d"] is not None else int(round(n / cfg["alpha"]))
        cloud = kernels.index_cloud(n)
        c = kernels.assemble_covariance(kernels.KernelSpec(cfg["cov_kernel"], cfg["cov_sigma"]),
                                        cloud, max_points=cfg["max_points"])
        spec = ensembles.EnsembleSpec(n, d, cfg["dist"], covariance=c,
                                      seed=harness.row_seed(cfg["seed"], "embed-cov", idx))
        g = ensembles.gram_spectrum(ensembles.sample_correlated(spec))
        p = mplaw.MPParams(1.0, n / d)
        for eps in cfg["eps"]:
            nu = ensembles.empirical_embedding_dim(g, eps)
            rows.append({
                "n": n, "d": d, "dist": spec.dist, "cov_kernel": cfg["cov_kernel"],
                "cov_sigma": cfg["cov_sigma"], "eps": eps, "n_under": nu, "ratio": nu / n,
                "mp_rho": mplaw.asymptotic_ratio(eps, p),
                "lower_bound": spectra.lower_bound(g.trace_hat, g.frobenius_sq_hat, eps) if eps < 1 else 0.0,
            })
    return rows, [], {}


def _cmd_field_sample(cfg):
    spec = _kernel_from(cfg)
    cloud, s = harness.kernel_spectrum(spec, cfg["domain"], spec.sigma, r=cfg["r"], h=cfg["h"],
                                       n_points=cfg["n_points"], max_points=cfg["max_points"],
                                       want_vectors=True)
    n_terms = cfg["n_terms"]
    if n_terms is None:
        n_terms = spectra.n_under(s, min(cfg["eps"]))
    fields = ensembles.sample_kl_field(s.eigenvalues, s.vectors, n_terms, cfg["samples"],
                                       seed=cfg["seed"])
    rows = []
    coord_names = [f"x{j}" for j in range(cloud.points.shape[1])]
    for i in range(fields.shape[0]):
        for j in range(cloud.n):
            row = {"sample": i, "point": j}
            row.update({name: float(v) for name, v in zip(coord_names, cloud.points[j])})
            row["value"] = float(fields[i, j])
            rows.append(row)
    meta = {"n": cloud.n, "h": cloud.h, "n_terms": n_terms,
            "truncation_error": spectra.truncation_error(s, n_terms)}
    return rows, [], meta


COMMANDS = {
    "spectrum": _cmd_spectrum,
    "complexity": _cmd_complexity,
    "sweep-sigma": _cmd_sweep_sigma,
    "sweep-res": _cmd_sweep_res,
    "sweep-eps": _cmd_sweep_eps,
    "mp": _cmd_mp,
    "exp-analytic": _cmd_exp_analytic,
    "embed": _cmd_embed,
    "field-sample": _cmd_field_sample,
}


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if not math.isfinite(value) else value
    return value


def render(cfg, rows, fits, meta):
    header = {"program": "klcomplexity", "version": __version__, "rng": ensembles.RNG_NAME}
    config = {k: v for k, v in sorted(cfg.items())}
    if cfg["format"] == "json":
        doc = {"meta": {**header, **meta}, "config": config, "rows": rows, "fits": fits}
        return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(_jsonable(header)) + "\n")
    buf.write("# config: " + json.dumps(_jsonable(config), sort_keys=True) + "\n")
    if meta:
        buf.write("# meta: " + json.dumps(_jsonable(meta), sort_keys=True) + "\n")
    for fit in fits:
        buf.write("# fit: " + json.dumps(_jsonable(fit)) + "\n")
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(col)) for col in columns])
    return buf.getvalue()


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".klc-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None, environ=None):
    """Entry point returning the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args, environ)
        validate(cfg)
    except UsageError as exc:
        sys.stderr.write(f"klcomplexity {args.command}: error: {exc}\n")
        return 2
    try:
        rows, fits, meta = COMMANDS[cfg["command"]](cfg)
        text = render(cfg, rows, fits, meta)
        _write(cfg["output"], text)
    except (ValueError, RuntimeError, ArithmeticError, MemoryError, OSError,
            np.linalg.LinAlgError, AssertionError) as exc:
        # output is written to a temp file and renamed, so nothing partial remains
        sys.stderr.write(f"klcomplexity {cfg['command']}: {type(exc).__name__}: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
