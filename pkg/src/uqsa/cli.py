"""Declarative study runner.

A study is a YAML document::

    model: ishigami            # registry name, or {name: ..., <model options>}
    seed: 42                   # required; there is no silent default
    output_dir: results        # optional; --output-dir overrides
    parameters:                # optional; defaults to the model's canonical specs
      - {name: x1, dist: uniform, lo: -3.14159, hi: 3.14159}
      - {name: T, dist: normal, mean: 893.0, relative_uncertainty: 0.01}
    methods:                   # executed in declaration order
      oat:     {rel_step: 0.01, scheme: forward}
      src:     {n_samples: 10000}
      srrc:    {n_samples: 10000}
      pcc:     {n_samples: 10000}
      prcc:    {n_samples: 10000}
      morris:  {trajectories: 100, levels: 20, grid_fraction: null}
      sobol:   {n_samples: 10000}
      mc_uq:   {n_samples: 10000}
      det_uq:  {source: oat}            # or morris; that method must also run
      mcfc_sweep:   {j_lo: 0.0, j_hi: 6000.0, steps: 61, n_samples: 10000}
      mcfc_battery: {n_samples: 10000, trajectories: 100, levels: 20,
                     sobol_samples: 10000}

Unknown keys anywhere are rejected. Every run writes one artifact per
method, the figure-ready plot files, a combined ``summary.json``, and the
resolved configuration (defaults filled in) for provenance. Exit codes:
0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import yaml

from .local_sa import OATSensitivity
from .mcfc_study import DEFAULT_STUDY_SEED, optimum_battery, sweep
from .models import default_specs, get_model, list_models
from .morris import MorrisScreening
from .problem import ParameterSpec, sample_matrix
from .regression_sa import PCCAnalyzer, SRCAnalyzer
from .sobol import SobolEstimator
from .uq import CovarianceMatrix, _deterministic_result, _mc_result
from .validation import evaluate_rows


class ConfigError(Exception):
    """Invalid study configuration; the message carries the offending key path."""


MODEL_OPTION_KEYS = {
    "sobol_g": {"a"},
    "ishigami": {"a", "b"},
    "morris_fn": {"coeff_seed"},
    "sfs1": set(), "sfs2": set(), "sfs3": set(), "sfs4": set(),
    "mcfc_power": {"delta_h", "area"},
    "mcfc_eta": {"delta_h", "area"},
}

METHOD_DEFAULTS = {
    "oat": {"rel_step": 0.01, "scheme": "forward"},
    "src": {"n_samples": 10000},
    "srrc": {"n_samples": 10000},
    "pcc": {"n_samples": 10000},
    "prcc": {"n_samples": 10000},
    "morris": {"trajectories": 100, "levels": 20, "grid_fraction": None},
    "sobol": {"n_samples": 10000},
    "mc_uq": {"n_samples": 10000},
    "det_uq": {"source": "oat"},
    "mcfc_sweep": {"j_lo": 0.0, "j_hi": 6000.0, "steps": 61, "n_samples": 10000},
    "mcfc_battery": {"n_samples": 10000, "trajectories": 100, "levels": 20,
                     "sobol_samples": 10000},
}

PARAMETER_KEYS = {"name", "dist", "lo", "hi", "mean", "sd", "relative_uncertainty",
                  "nominal", "morris_bounds", "positive_only"}


@dataclass
class StudyConfig:
    model_name: str
    model_options: Dict
    seed: int
    parameters: List[ParameterSpec]
    methods: Dict[str, Dict]
    output_dir: Optional[str]


def _require(cond, path, message):
    if not cond:
        raise ConfigError(f"{path}: {message}")


def _as_int(value, path):
    _require(isinstance(value, int) and not isinstance(value, bool), path,
             f"expected an integer, got {value!r}")
    return value


def _as_float(value, path):
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), path,
             f"expected a number, got {value!r}")
    value = float(value)
    _require(math.isfinite(value), path, "must be finite")
    return value


def _check_keys(mapping, allowed, path):
    unknown = sorted(set(mapping) - set(allowed))
    _require(not unknown, path, f"unknown key(s): {', '.join(unknown)}")


def _parse_parameter(entry, path):
    _require(isinstance(entry, dict), path, "each parameter must be a mapping")
    _check_keys(entry, PARAMETER_KEYS, path)
    _require("name" in entry and isinstance(entry["name"], str), path,
             "parameter needs a string 'name'")
    dist = entry.get("dist")
    _require(dist in ("uniform", "normal"), path,
             "dist must be 'uniform' or 'normal'")
    morris_bounds = None
    if entry.get("morris_bounds") is not None:
        mb = entry["morris_bounds"]
        _require(isinstance(mb, (list, tuple)) and len(mb) == 2, path,
                 "morris_bounds must be a [lo, hi] pair")
        morris_bounds = (_as_float(mb[0], path), _as_float(mb[1], path))
    try:
        if dist == "uniform":
            _check_keys(entry, {"name", "dist", "lo", "hi", "nominal", "morris_bounds"},
                        path)
            _require("lo" in entry and "hi" in entry, path, "uniform needs lo and hi")
            spec = ParameterSpec.uniform(
                entry["name"], _as_float(entry["lo"], path), _as_float(entry["hi"], path),
                nominal=None if entry.get("nominal") is None
                else _as_float(entry["nominal"], path))
            if morris_bounds is not None:
                spec = ParameterSpec(name=spec.name, dist="uniform", nominal=spec.nominal,
                                     lo=spec.lo, hi=spec.hi, morris_bounds=morris_bounds)
        else:
            _require("mean" in entry, path, "normal needs a mean")
            has_sd = entry.get("sd") is not None
            has_rel = entry.get("relative_uncertainty") is not None
            _require(has_sd != has_rel, path,
                     "normal needs exactly one of sd or relative_uncertainty")
            spec = ParameterSpec.normal(
                entry["name"], _as_float(entry["mean"], path),
                rel_uncertainty=_as_float(entry["relative_uncertainty"], path) if has_rel else None,
                sd=_as_float(entry["sd"], path) if has_sd else None,
                positive_only=bool(entry.get("positive_only", False)),
                morris_bounds=morris_bounds)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return spec


def load_config(path):
    """Parse and validate a study configuration file."""
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    return parse_config(raw, source=str(path))


def parse_config(raw, source="config"):
    _require(isinstance(raw, dict), source, "top level must be a mapping")
    _check_keys(raw, {"model", "seed", "output_dir", "parameters", "methods"}, source)

    _require("model" in raw, f"{source}.model", "is required")
    model_entry = raw["model"]
    if isinstance(model_entry, str):
        model_name, model_options = model_entry, {}
    elif isinstance(model_entry, dict):
        _require("name" in model_entry, f"{source}.model.name", "is required")
        model_name = model_entry["name"]
        model_options = {k: v for k, v in model_entry.items() if k != "name"}
    else:
        raise ConfigError(f"{source}.model: must be a name or a mapping")
    _require(model_name in list_models(), f"{source}.model",
             f"unknown model {model_name!r}; known: {', '.join(list_models())}")
    _check_keys(model_options, MODEL_OPTION_KEYS[model_name], f"{source}.model")

    _require("seed" in raw, f"{source}.seed",
             "is required (runs must be reproducible)")
    seed = _as_int(raw["seed"], f"{source}.seed")

    output_dir = raw.get("output_dir")
    if output_dir is not None:
        _require(isinstance(output_dir, str), f"{source}.output_dir",
                 "must be a string")

    if raw.get("parameters") is not None:
        entries = raw["parameters"]
        _require(isinstance(entries, list) and entries, f"{source}.parameters",
                 "must be a non-empty list")
        parameters = [_parse_parameter(e, f"{source}.parameters[{i}]")
                      for i, e in enumerate(entries)]
    else:
        parameters = default_specs(model_name)

    model = _build_model(model_name, model_options, source)
    names = [p.name for p in parameters]
    _require(len(set(names)) == len(names), f"{source}.parameters",
             "parameter names must be unique")
    _require(tuple(names) == model.param_names, f"{source}.parameters",
             f"must match the model signature {list(model.param_names)} in order, "
             f"got {names}")

    _require("methods" in raw and isinstance(raw["methods"], dict) and raw["methods"],
             f"{source}.methods", "must be a non-empty mapping")
    methods = {}
    for name, settings in raw["methods"].items():
        _require(name in METHOD_DEFAULTS, f"{source}.methods",
                 f"unknown method {name!r}; known: {', '.join(METHOD_DEFAULTS)}")
        settings = {} if settings is None else settings
        _require(isinstance(settings, dict), f"{source}.methods.{name}",
                 "settings must be a mapping")
        _check_keys(settings, METHOD_DEFAULTS[name], f"{source}.methods.{name}")
        merged = dict(METHOD_DEFAULTS[name])
        merged.update(settings)
        methods[name] = _validate_method(name, merged, f"{source}.methods.{name}")

    if "det_uq" in methods:
        src_method = methods["det_uq"]["source"]
        _require(src_method in methods, f"{source}.methods.det_uq.source",
                 f"requires the {src_method!r} method to run in the same study")
    for name in ("mcfc_sweep", "mcfc_battery"):
        if name in methods:
            _require(model_name in ("mcfc_power", "mcfc_eta"),
                     f"{source}.methods.{name}", "is only valid for the MCFC models")

    return StudyConfig(model_name=model_name, model_options=model_options, seed=seed,
                       parameters=parameters, methods=methods, output_dir=output_dir)


def _validate_method(name, settings, path):
    out = dict(settings)
    for key, value in settings.items():
        if key in ("n_samples", "trajectories", "levels", "steps", "sobol_samples"):
            out[key] = _as_int(value, f"{path}.{key}")
            _require(out[key] > 0, f"{path}.{key}", "must be positive")
        elif key in ("rel_step", "j_lo", "j_hi"):
            out[key] = _as_float(value, f"{path}.{key}")
        elif key == "grid_fraction" and value is not None:
            out[key] = _as_float(value, f"{path}.{key}")
        elif key == "scheme":
            _require(value in ("forward", "central"), f"{path}.{key}",
                     "must be 'forward' or 'central'")
        elif key == "source":
            _require(value in ("oat", "morris"), f"{path}.{key}",
                     "must be 'oat' or 'morris'")
    if name == "mcfc_sweep":
        _require(0.0 <= out["j_lo"] < out["j_hi"], f"{path}", "needs 0 <= j_lo < j_hi")
        _require(out["steps"] >= 2, f"{path}.steps", "must be at least 2")
    return out


def _build_model(name, options, source="config"):
    try:
        return get_model(name, **options)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}.model: {exc}") from exc


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(directory, stem, rows, fmt):
    """Write a list of row dicts as CSV (shortest round-trip floats) or JSON."""
    if fmt == "json":
        path = directory / f"{stem}.json"
        with open(path, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path.name
    path = directory / f"{stem}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if rows:
            header = list(rows[0])
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(row[k]) for k in header])
    return path.name


def write_json(directory, stem, payload):
    path = directory / f"{stem}.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path.name


def _uq_payload(result):
    payload = {
        "method": result.method,
        "mean": result.mean,
        "variance": result.variance,
        "sd": result.sd,
        "ci95": [result.ci95[0], result.ci95[1]],
    }
    if result.n_samples is not None:
        payload["n_samples"] = result.n_samples
    return payload


class StudyRunner:
    """Executes the requested methods in order and writes the artifacts."""

    def __init__(self, config, threads=1, fmt="csv"):
        self.config = config
        self.threads = threads
        self.fmt = fmt
        self.model = _build_model(config.model_name, config.model_options)
        self.specs = config.parameters
        self.names = [s.name for s in self.specs]
        self.x0 = np.array([s.nominal for s in self.specs])
        self._mc_cache = {}
        self._fitted = {}
        self.plot_rows = {}

    def _mc_run(self, n_samples):
        """One shared sample set per size; regression methods and Monte Carlo
        UQ post-process the same draws."""
        if n_samples not in self._mc_cache:
            X = sample_matrix(self.specs, n_samples, self.config.seed)
            y = evaluate_rows(self.model, X.values, threads=self.threads)
            self._mc_cache[n_samples] = (X, y)
        return self._mc_cache[n_samples]

    def run_method(self, name, settings, outdir):
        if name == "oat":
            an = OATSensitivity(rel_step=settings["rel_step"], scheme=settings["scheme"])
            an.analyze(self.model, self.x0, threads=self.threads)
            self._fitted["oat"] = an
            rows = [{"parameter": p, "raw": float(an.raw_[i]),
                     "normalized": float(an.normalized_[i]), "scheme": an.scheme,
                     "delta": float(an.rel_step)} for i, p in enumerate(self.names)]
            return write_table(outdir, "oat", rows, self.fmt)

        if name in ("src", "srrc", "pcc", "prcc"):
            X, y = self._mc_run(settings["n_samples"])
            rank = name in ("srrc", "prcc")
            if name in ("src", "srrc"):
                an = SRCAnalyzer(rank=rank).fit(X, y)
                r2 = an.r_squared_
            else:
                an = PCCAnalyzer(rank=rank).fit(X, y)
                r2 = None
            self._fitted[name] = an
            label = name.upper()
            rows = [{"parameter": p, "method": label,
                     "coefficient": float(an.coefficients_[i]),
                     "r_squared": (float(r2) if r2 is not None else "")}
                    for i, p in enumerate(self.names)]
            self.plot_rows.setdefault("regression", []).extend(
                {"parameter": r["parameter"], "method": label,
                 "coefficient": r["coefficient"]} for r in rows)
            return write_table(outdir, name, rows, self.fmt)

        if name == "morris":
            an = MorrisScreening(n_trajectories=settings["trajectories"],
                                 n_levels=settings["levels"],
                                 grid_fraction=settings["grid_fraction"],
                                 seed=self.config.seed)
            an.analyze(self.model, self.specs, threads=self.threads)
            self._fitted["morris"] = an
            rows = [{"parameter": p, "mu": float(an.mu_[i]),
                     "mu_star": float(an.mu_star_[i]), "sigma": float(an.sigma_[i]),
                     "mu_norm": float(an.mu_norm_[i]),
                     "mu_star_norm": float(an.mu_star_norm_[i])}
                    for i, p in enumerate(self.names)]
            self.plot_rows["morris"] = [
                {"parameter": r["parameter"], "mu_star": r["mu_star"],
                 "sigma": r["sigma"]} for r in rows]
            return write_table(outdir, "morris", rows, self.fmt)

        if name == "sobol":
            an = SobolEstimator(n_samples=settings["n_samples"], seed=self.config.seed)
            an.analyze(self.model, self.specs, threads=self.threads)
            self._fitted["sobol"] = an
            rows = [{"parameter": p, "S": float(an.first_order_[i]),
                     "T": float(an.total_[i]), "N": an.n_samples_,
                     "seed": self.config.seed} for i, p in enumerate(self.names)]
            self.plot_rows["sobol"] = [
                {"parameter": r["parameter"], "S": r["S"], "T": r["T"]} for r in rows]
            return write_table(outdir, "sobol", rows, self.fmt)

        if name == "mc_uq":
            _, y = self._mc_run(settings["n_samples"])
            result = _mc_result(y, settings["n_samples"])
            return write_json(outdir, "mc_uq", _uq_payload(result))

        if name == "det_uq":
            source = self._fitted.get(settings["source"])
            if source is None:
                raise RuntimeError(f"det_uq needs the {settings['source']!r} method "
                                   "to have run first")
            profile = source.raw_ if settings["source"] == "oat" else source.mu_star_
            y0 = float(self.model(self.x0))
            cov = CovarianceMatrix.diagonal(self.specs)
            result = _deterministic_result(y0, profile, cov,
                                           f"deterministic_{settings['source']}")
            payload = _uq_payload(result)
            payload["source"] = settings["source"]
            return write_json(outdir, "det_uq", payload)

        if name == "mcfc_sweep":
            from .models import McfcParams
            params = McfcParams(**self.config.model_options)
            result = sweep(j_lo=settings["j_lo"], j_hi=settings["j_hi"],
                           steps=settings["steps"], n_samples=settings["n_samples"],
                           seed=self.config.seed, params=params)
            rows = [{"j": float(result.j_grid[i]),
                     "nominal_P": float(result.nominal_power[i]),
                     "mean_P": float(result.mean_power[i]),
                     "sd_P": float(result.sd_power[i]),
                     "nominal_eta": float(result.nominal_eta[i]),
                     "mean_eta": float(result.mean_eta[i]),
                     "sd_eta": float(result.sd_eta[i])}
                    for i in range(result.j_grid.size)]
            self.plot_rows["sweep"] = rows
            self._fitted["mcfc_sweep"] = result
            return write_table(outdir, "sweep", rows, self.fmt)

        if name == "mcfc_battery":
            from .models import McfcParams
            params = McfcParams(**self.config.model_options)
            swept = self._fitted.get("mcfc_sweep")
            j_star = swept.j_star if swept is not None else None
            result = optimum_battery(j_star=j_star, n_samples=settings["n_samples"],
                                     trajectories=settings["trajectories"],
                                     levels=settings["levels"],
                                     sobol_samples=settings["sobol_samples"],
                                     seed=self.config.seed, params=params,
                                     threads=self.threads)
            self._fitted["mcfc_battery"] = result
            ranking = write_table(outdir, "ranking", result.ranking_power.rows(),
                                  self.fmt)
            uq_payload = {
                "j_star": result.j_star,
                "power": {k: _uq_payload(v) for k, v in result.uq_power.items()},
                "eta": {k: _uq_payload(v) for k, v in result.uq_eta.items()},
            }
            write_json(outdir, "uq_summary", uq_payload)
            return ranking

        raise RuntimeError(f"unhandled method {name!r}")

    def emit_plot_data(self, outdir):
        """Figure-ready tables for whichever methods ran."""
        written = []
        if "regression" in self.plot_rows:
            written.append(write_table(outdir, "regression_bars",
                                       self.plot_rows["regression"], self.fmt))
        if "morris" in self.plot_rows:
            written.append(write_table(outdir, "morris_bars",
                                       self.plot_rows["morris"], self.fmt))
        if "sobol" in self.plot_rows:
            written.append(write_table(outdir, "sobol_bars",
                                       self.plot_rows["sobol"], self.fmt))
        if "sweep" in self.plot_rows:
            written.append(write_table(outdir, "sweep_bands",
                                       self.plot_rows["sweep"], self.fmt))
        return written


def resolved_config_dict(config):
    """The configuration with every default filled in, for provenance.

    The output directory is a runtime destination, not part of the study
    definition, so it is omitted and re-running the echoed file reproduces
    the outputs byte for byte wherever they are written.
    """
    parameters = []
    for p in config.parameters:
        entry = {"name": p.name, "dist": p.dist}
        if p.dist == "uniform":
            entry.update({"lo": p.lo, "hi": p.hi, "nominal": p.nominal})
        else:
            entry.update({"mean": p.nominal, "sd": p.sd,
                          "positive_only": p.positive_only})
        if p.morris_bounds is not None:
            entry["morris_bounds"] = list(p.morris_bounds)
        parameters.append(entry)
    model = {"name": config.model_name, **config.model_options} \
        if config.model_options else config.model_name
    return {"model": model, "seed": config.seed, "parameters": parameters,
            "methods": {k: dict(v) for k, v in config.methods.items()}}


def run_study(config, output_dir, threads=1, fmt="csv"):
    """Execute a validated study; returns (exit_code, summary dict)."""
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    runner = StudyRunner(config, threads=threads, fmt=fmt)
    summary = {"model": config.model_name, "seed": config.seed, "methods": {}}
    failed = False
    with open(outdir / "resolved_config.yaml", "w") as fh:
        yaml.safe_dump(resolved_config_dict(config), fh, sort_keys=True)
    for name, settings in config.methods.items():
        if failed:
            summary["methods"][name] = {"status": "skipped"}
            continue
        try:
            artifact = runner.run_method(name, settings, outdir)
            summary["methods"][name] = {"status": "ok", "artifact": artifact}
        except Exception as exc:  # noqa: BLE001 - reported in the summary
            summary["methods"][name] = {"status": "failed", "error": str(exc)}
            failed = True
    if not failed:
        for artifact in runner.emit_plot_data(outdir):
            summary.setdefault("plot_data", []).append(artifact)
    if "mcfc_sweep" in runner._fitted:
        s = runner._fitted["mcfc_sweep"]
        summary["sweep_optimum"] = {"j_star": s.j_star, "power_star": s.power_star,
                                    "eta_star": s.eta_star}
    write_json(outdir, "summary", summary)
    return (3 if failed else 0), summary


def main(argv=None):
    parser = argparse.ArgumentParser(prog="uqsa",
                                     description="sensitivity and uncertainty studies")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a study configuration")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the configuration seed")
    run_p.add_argument("--threads", type=int, default=1)
    run_p.add_argument("--output-dir", default=None)
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")

    val_p = sub.add_parser("validate", help="check a configuration and exit")
    val_p.add_argument("config")

    sub.add_parser("list-models", help="list registered model names")

    args = parser.parse_args(argv)

    if args.command == "list-models":
        for name in list_models():
            print(name)
        return 0

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read configuration: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"{args.config}: OK")
        return 0

    if args.seed is not None:
        config.seed = args.seed
    output_dir = args.output_dir or config.output_dir or "."
    try:
        code, summary = run_study(config, output_dir, threads=args.threads,
                                  fmt=args.format)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    for name, info in summary["methods"].items():
        line = f"{name}: {info['status']}"
        if info.get("artifact"):
            line += f" ({info['artifact']})"
        if info.get("error"):
            line += f" [{info['error']}]"
        print(line)
    if code != 0:
        print("study failed; partial outputs retained", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
