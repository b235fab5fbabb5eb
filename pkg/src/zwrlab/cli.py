"""Command-line front end: ``zwrlab {scan,path,predict,pulse,propagate}``.

Runs are described by a YAML file whose physical keys carry their unit as a
suffix (``intensity_max_wcm2``, ``ramp_fs``...).  Flags override the file and
every run writes the resolved configuration next to its outputs.

Exit status: 0 success, 2 invalid configuration, 3 nothing found (no seed),
4 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import units

SCHEMA = "zwrlab/1"

EXIT_OK, EXIT_CONFIG, EXIT_NOT_FOUND, EXIT_NUMERICAL = 0, 2, 3, 4

log = logging.getLogger("zwrlab")


class ConfigError(ValueError):
    pass


class NotFound(RuntimeError):
    pass


# -- configuration -------------------------------------------------------------------

# alternative unit suffixes, converted to the canonical key on load
_ALT_UNITS = {
    "_gwcm2": ("_wcm2", 1e9),
    "_ps": ("_fs", 1e3),
}

_NUM, _INT, _BOOL, _STR = "number", "integer", "boolean", "string"

SCHEMA_TREE = {
    "model": {
        "source": ("choice:default,tabulated", "default"),
        "curves_file": ("path?", None),
        "mass_au": ("number?", None),
        "r_e_au": ("number?", None),
    },
    "numerics": {
        "numerov_step_au": (_NUM, 0.01),
    },
    "workers": (_INT, 1),
    "out": (_STR, "zwrlab-out"),
    "scan": {
        "v": (_INT, 1),
        "wavelengths_nm": ("numbers", [549.0, 549.5, 550.0]),
        "intensity_min_wcm2": (_NUM, 0.0),
        "intensity_max_wcm2": (_NUM, 2.0e9),
        "samples": (_INT, 60),
        "spacing": ("choice:log,linear", "log"),
        "refine": (_BOOL, True),
        "threshold_cm1": (_NUM, 1e-4),
    },
    "path": {
        "v": (_INT, 1),
        "seed_wavelength_nm": (_NUM, 549.5),
        "seed_index": (_INT, 0),
        "intensity_min_wcm2": (_NUM, 0.0),
        "intensity_max_wcm2": (_NUM, 2.0e9),
        "samples": (_INT, 60),
        "lambda_min_nm": (_NUM, 549.0),
        "lambda_max_nm": (_NUM, 556.0),
        "lambda_step_nm": (_NUM, 0.25),
        "assign": (_BOOL, True),
    },
    "predict": {
        "v": (_INT, 1),
        "v_plus": (_INT, 0),
        "wavelengths_nm": ("numbers", [550.0, 550.5, 551.0, 551.5]),
        "intensity_max_wcm2": (_NUM, 2.0e9),
        "chi_rad": (_NUM, -0.25 * np.pi),
        "valid_only": (_BOOL, True),
    },
    "pulse": {
        "points": ("pairs?", None),
        "path_csv": ("path?", None),
        "ramp_fs": (_NUM, 5000.0),
        "plateau_fs": (_NUM, 140000.0),
        "dt_au": (_NUM, 3.0),
    },
    "propagate": {
        "pulse_csv": ("path?", None),
        "initial_v": ("integers", [0, 1, 2]),
        "labels": ("integers", [0, 1, 2]),
        "record_every": (_INT, 1000),
        "absorber": (_BOOL, True),
        "floquet_estimate": (_BOOL, True),
    },
}


def default_config() -> dict:
    def walk(node):
        return {k: walk(v) if isinstance(v, dict) else copy.deepcopy(v[1]) for k, v in node.items()}
    return walk(SCHEMA_TREE)


def _coerce(kind: str, value, where: str):
    optional = kind.endswith("?")
    kind = kind.rstrip("?")
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{where}: value required")
    if kind == _NUM:
        if isinstance(value, str):
            # YAML 1.1 reads 2e9 (no exponent sign) as a string
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        if not np.isfinite(value):
            raise ConfigError(f"{where}: not finite")
        return float(value)
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind == _BOOL:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if kind in (_STR, "path"):
        if not isinstance(value, str) or not value:
            raise ConfigError(f"{where}: expected a non-empty string, got {value!r}")
        return value
    if kind.startswith("choice:"):
        allowed = kind.split(":", 1)[1].split(",")
        if value not in allowed:
            raise ConfigError(f"{where}: expected one of {allowed}, got {value!r}")
        return value
    if kind in ("numbers", "integers"):
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{where}: expected a non-empty list")
        inner = _NUM if kind == "numbers" else _INT
        return [_coerce(inner, x, f"{where}[{i}]") for i, x in enumerate(value)]
    if kind == "pairs":
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{where}: expected a non-empty list of [lambda_nm, intensity_wcm2]")
        out = []
        for i, pair in enumerate(value):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"{where}[{i}]: expected [lambda_nm, intensity_wcm2]")
            out.append([_coerce(_NUM, x, f"{where}[{i}][{j}]") for j, x in enumerate(pair)])
        return out
    raise AssertionError(kind)


def _canonical_key(key: str, schema: dict):
    if key in schema:
        return key, 1.0
    for alt, (canon, factor) in _ALT_UNITS.items():
        if key.endswith(alt):
            base = key[: -len(alt)] + canon
            if base in schema:
                return base, factor
    return None, None


def _merge(schema: dict, target: dict, data, prefix: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or '<root>'}: expected a mapping")
    for key, value in data.items():
        where = f"{prefix}.{key}" if prefix else str(key)
        canon, factor = _canonical_key(str(key), schema)
        if canon is None:
            raise ConfigError(f"{where}: unknown key")
        node = schema[canon]
        if isinstance(node, dict):
            _merge(node, target[canon], value, f"{prefix}.{canon}" if prefix else canon)
            continue
        coerced = _coerce(node[0], value, where)
        if factor != 1.0:
            coerced = coerced * factor
        target[canon] = coerced


def _check(cfg: dict):
    def positive(path, x):
        if not x > 0:
            raise ConfigError(f"{path}: must be positive")

    if cfg["workers"] < 1:
        raise ConfigError("workers: must be >= 1")
    positive("numerics.numerov_step_au", cfg["numerics"]["numerov_step_au"])
    for block in ("scan", "path"):
        b = cfg[block]
        if not 0.0 <= b["intensity_min_wcm2"] < b["intensity_max_wcm2"]:
            raise ConfigError(f"{block}.intensity_min_wcm2: empty intensity range "
                              f"[{b['intensity_min_wcm2']}, {b['intensity_max_wcm2']}]")
        if b["samples"] < 20:
            raise ConfigError(f"{block}.samples: need at least 20")
        if b["v"] < 0:
            raise ConfigError(f"{block}.v: must be >= 0")
    for i, lam in enumerate(cfg["scan"]["wavelengths_nm"]):
        positive(f"scan.wavelengths_nm[{i}]", lam)
    pth = cfg["path"]
    if not pth["lambda_min_nm"] < pth["lambda_max_nm"]:
        raise ConfigError("path.lambda_min_nm: must be below path.lambda_max_nm")
    if not pth["lambda_min_nm"] <= pth["seed_wavelength_nm"] <= pth["lambda_max_nm"]:
        raise ConfigError("path.seed_wavelength_nm: outside [lambda_min_nm, lambda_max_nm]")
    positive("path.lambda_step_nm", pth["lambda_step_nm"])
    positive("predict.intensity_max_wcm2", cfg["predict"]["intensity_max_wcm2"])
    pl = cfg["pulse"]
    if pl["ramp_fs"] < 0 or pl["plateau_fs"] < 0:
        raise ConfigError("pulse.ramp_fs: durations must be >= 0")
    positive("pulse.dt_au", pl["dt_au"])
    if pl["points"] is not None and pl["path_csv"] is not None:
        raise ConfigError("pulse.points: give either points or path_csv, not both")
    pr = cfg["propagate"]
    if pr["record_every"] < 1:
        raise ConfigError("propagate.record_every: must be >= 1")
    for v in pr["initial_v"] + pr["labels"]:
        if v < 0:
            raise ConfigError("propagate.initial_v: levels must be >= 0")
    if cfg["model"]["source"] == "tabulated" and cfg["model"]["curves_file"] is None:
        raise ConfigError("model.curves_file: required for a tabulated model")


def _parse_override(text: str) -> dict:
    if "=" not in text:
        raise ConfigError(f"--set {text!r}: expected KEY.PATH=VALUE")
    key, raw = text.split("=", 1)
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{key}: cannot parse value {raw!r}: {exc}") from None
    node: dict = {}
    cur = node
    parts = key.strip().split(".")
    for part in parts[:-1]:
        cur[part] = {}
        cur = cur[part]
    cur[parts[-1]] = value
    return node


def load_config(path=None, overrides=(), workers=None, out=None) -> dict:
    """Defaults <- file <- --set overrides <- dedicated flags, validated."""
    cfg = default_config()
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from None
        _merge(SCHEMA_TREE, cfg, data or {}, "")
    for text in overrides:
        _merge(SCHEMA_TREE, cfg, _parse_override(text), "")
    if workers is not None:
        _merge(SCHEMA_TREE, cfg, {"workers": workers}, "")
    if out is not None:
        _merge(SCHEMA_TREE, cfg, {"out": out}, "")
    _check(cfg)
    return cfg


# -- shared plumbing -----------------------------------------------------------------

def build_model(model_cfg: dict):
    from .potentials import default_model, load_tabulated

    if model_cfg["source"] == "default":
        return default_model()
    kw = {}
    if model_cfg["mass_au"] is not None:
        kw["mass"] = model_cfg["mass_au"]
    if model_cfg["r_e_au"] is not None:
        kw["r_e"] = model_cfg["r_e_au"]
    return load_tabulated(model_cfg["curves_file"], **kw)


def _grid(p, cfg):
    from .floquet import numerov_grid
    return numerov_grid(p, step=cfg["numerics"]["numerov_step_au"])


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.12e}"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_json(path: Path, payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(type(x))


def _pool_map(fn, tasks, workers: int):
    """Ordered map; results come back in task order whatever the pool size."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as ex:
        return list(ex.map(fn, tasks))


def _point_dict(q) -> dict:
    return {"lambda_nm": q.wavelength, "intensity_wcm2": q.intensity, "gamma_cm1": q.gamma_cm1,
            "reE_au": q.energy.real, "crossing": q.crossing, "v_plus": q.assignment}


# -- scan ----------------------------------------------------------------------------

def _scan_task(args):
    from .zwrmap import ShallowDipError, find_dips, refine_zwr, scan_intensity
    from .floquet import SiegertError

    cfg, lam = args
    s = cfg["scan"]
    p = build_model(cfg["model"])
    grid = _grid(p, cfg)
    scan = scan_intensity(p, lam, (s["intensity_min_wcm2"], s["intensity_max_wcm2"]), s["v"],
                          n_samples=s["samples"], spacing=s["spacing"], grid=grid)
    zwrs, shallow = [], []
    if s["refine"]:
        for br in find_dips(scan):
            try:
                zwrs.append(_point_dict(refine_zwr(p, lam, br, s["v"], s["threshold_cm1"], grid)))
            except ShallowDipError as exc:
                shallow.append(_point_dict(exc.point))
            except SiegertError as exc:
                log.warning("refinement failed at %.4f nm near %.4g W/cm2: %s", lam, br.i_min, exc)
    return list(scan.rows()), zwrs, shallow


def cmd_scan(cfg: dict, out: Path) -> int:
    s = cfg["scan"]
    results = _pool_map(_scan_task, [(cfg, lam) for lam in s["wavelengths_nm"]], cfg["workers"])
    rows = [r for res in results for r in res[0]]
    write_csv(out / "scan.csv", ["lambda_nm", "intensity_wcm2", "gamma_cm1", "reE_au", "converged"],
              rows)
    per = [{"lambda_nm": lam, "zwrs": z, "shallow_dips": sh}
           for lam, (_, z, sh) in zip(s["wavelengths_nm"], results)]
    write_json(out / "scan.json", {"command": "scan", "v": s["v"], "wavelengths": per,
                                   "threshold_cm1": s["threshold_cm1"]})
    n = sum(len(x["zwrs"]) for x in per)
    print(f"scan: {len(rows)} samples, {n} accepted ZWRs -> {out}")
    return EXIT_OK


# -- path ----------------------------------------------------------------------------

def slope_segments(path) -> list[dict]:
    """Runs of equal dI/dlambda sign along a wavelength-sorted path."""
    s = path.sorted()
    lam = s.wavelengths
    segs = []
    for i, sign in enumerate(s.slope_signs()):
        if segs and segs[-1]["sign"] == sign:
            segs[-1]["lambda_to_nm"] = float(lam[i + 1])
        else:
            segs.append({"sign": sign, "lambda_from_nm": float(lam[i]), "lambda_to_nm": float(lam[i + 1])})
    return segs


def find_seed(p, cfg, grid):
    from .zwrmap import ShallowDipError, find_dips, refine_zwr, scan_intensity

    c = cfg["path"]
    scan = scan_intensity(p, c["seed_wavelength_nm"], (c["intensity_min_wcm2"], c["intensity_max_wcm2"]),
                          c["v"], n_samples=c["samples"], grid=grid)
    accepted = []
    for br in find_dips(scan):
        try:
            accepted.append(refine_zwr(p, c["seed_wavelength_nm"], br, c["v"], grid=grid))
        except ShallowDipError:
            continue
    accepted.sort(key=lambda q: q.intensity)
    if len(accepted) <= c["seed_index"]:
        raise NotFound(f"no seed: {len(accepted)} accepted ZWR(s) for v = {c['v']} at "
                       f"{c['seed_wavelength_nm']} nm, seed_index = {c['seed_index']}")
    return accepted[c["seed_index"]]


def cmd_path(cfg: dict, out: Path) -> int:
    from .zwrmap import assign_v_plus, trace_path

    c = cfg["path"]
    p = build_model(cfg["model"])
    grid = _grid(p, cfg)
    try:
        seed = find_seed(p, cfg, grid)
    except NotFound as exc:
        write_json(out / "path.json", {"command": "path", "status": "no seed", "v": c["v"],
                                       "message": str(exc)})
        raise
    if c["assign"]:
        seed = assign_v_plus(p, seed)
    path = trace_path(p, seed, c["lambda_step_nm"], (c["lambda_min_nm"], c["lambda_max_nm"]),
                      v=c["v"], grid=grid, assign=c["assign"])
    write_csv(out / "path.csv",
              ["lambda_nm", "intensity_wcm2", "gamma_cm1", "reE_au", "crossing", "v_plus"],
              [(q.wavelength, q.intensity, q.gamma_cm1, q.energy.real, q.crossing, q.assignment)
               for q in path.points])
    tags: dict = {}
    for q in path.points:
        tags[q.crossing] = tags.get(q.crossing, 0) + 1
    write_json(out / "path.json", {
        "command": "path", "status": "ok", "v": c["v"], "seed": _point_dict(seed),
        "n_points": len(path), "slope_segments": slope_segments(path),
        "crossing_tags": dict(sorted(tags.items())),
        "unassigned": sum(q.v_plus is None for q in path.points),
        "dead_ends_nm": [q.wavelength for q in path.dead_ends],
    })
    print(f"path: {len(path)} points over {path.wavelengths.min():.3f}-{path.wavelengths.max():.3f} nm -> {out}")
    return EXIT_OK


# -- predict -------------------------------------------------------------------------

def _predict_task(args):
    from . import semiclassical as sc
    from .potentials import FieldPoint

    cfg, lam = args
    c = cfg["predict"]
    p = build_model(cfg["model"])
    found = []
    for lam_i, inten in sc.predict_zwr(p, c["v"], c["v_plus"], [lam], i_max=c["intensity_max_wcm2"],
                                       chi=c["chi_rad"]):
        fp = FieldPoint(inten, lam_i)
        try:
            valid = bool(sc.validity(p, fp, sc.solve_tilde_level(p, fp, c["v"])).valid)
        except sc.SemiclassicalError:
            valid = False
        kind = _crossing(p, fp)
        if c["valid_only"] and not valid:
            continue
        found.append({"lambda_nm": lam_i, "intensity_wcm2": inten, "valid": valid, "crossing": kind})
    return found


def _crossing(p, fp):
    from .zwrmap import crossing_tag
    return crossing_tag(p, fp)


def cmd_predict(cfg: dict, out: Path) -> int:
    c = cfg["predict"]
    results = _pool_map(_predict_task, [(cfg, lam) for lam in c["wavelengths_nm"]], cfg["workers"])
    cands = [x for r in results for x in r]
    lam = np.array([x["lambda_nm"] for x in cands])
    inten = np.array([x["intensity_wcm2"] for x in cands])
    slopes = (np.diff(inten) / np.diff(lam)).tolist() if len(cands) > 1 and np.all(np.diff(lam) > 0) else []
    write_json(out / "predict.json", {"command": "predict", "v": c["v"], "v_plus": c["v_plus"],
                                      "chi_rad": c["chi_rad"], "candidates": cands,
                                      "slopes_wcm2_per_nm": slopes})
    write_csv(out / "predict.csv", ["lambda_nm", "intensity_wcm2", "valid", "crossing"],
              [(x["lambda_nm"], x["intensity_wcm2"], x["valid"], x["crossing"]) for x in cands])
    print(f"predict: {len(cands)} candidate(s) -> {out}")
    return EXIT_OK


# -- pulse / propagate ---------------------------------------------------------------

def _pulse_points(cfg):
    pl = cfg["pulse"]
    if pl["points"] is not None:
        return [tuple(x) for x in pl["points"]]
    if pl["path_csv"] is not None:
        try:
            with open(pl["path_csv"], newline="") as fh:
                rows = list(csv.DictReader(fh))
            return [(float(r["lambda_nm"]), float(r["intensity_wcm2"])) for r in rows]
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"pulse.path_csv: cannot read ZWR path: {exc}") from None
    raise ConfigError("pulse.points: give points or path_csv")


def make_pulse(cfg):
    from .pulsecraft import PulseError, build_pulse

    pl = cfg["pulse"]
    try:
        return build_pulse(_pulse_points(cfg), units.fs_to_au(pl["ramp_fs"]),
                           units.fs_to_au(pl["plateau_fs"]), pl["dt_au"])
    except PulseError as exc:
        raise ConfigError(f"pulse: {exc}") from None


def cmd_pulse(cfg: dict, out: Path) -> int:
    pulse = make_pulse(cfg)
    pulse.write_csv(out / "pulse.csv")
    write_json(out / "pulse.json", {"command": "pulse", "n_samples": len(pulse.t),
                                    "duration_au": pulse.duration,
                                    "duration_fs": units.au_to_fs(pulse.duration),
                                    "peak_intensity_wcm2": float(pulse.intensity.max()),
                                    "lambda_range_nm": [float(pulse.wavelength.min()),
                                                        float(pulse.wavelength.max())]})
    print(f"pulse: {len(pulse.t)} samples, {units.au_to_fs(pulse.duration):.1f} fs -> {out}")
    return EXIT_OK


def _load_pulse(cfg):
    from .pulsecraft import read_pulse_csv

    path = cfg["propagate"]["pulse_csv"]
    if path is None:
        return make_pulse(cfg)
    try:
        return read_pulse_csv(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"propagate.pulse_csv: {exc}") from None


def _propagate_task(args):
    from .boundstates import eigenstates
    from .tdse import propagate, tdse_grid

    cfg, v0 = args
    c = cfg["propagate"]
    p = build_model(cfg["model"])
    pulse = _load_pulse(cfg)
    grid = tdse_grid(p)
    labels = tuple(c["labels"])
    basis = eigenstates(p, grid, max(max(labels), v0) + 1)
    rec = propagate(p, pulse, basis[v0], record_every=c["record_every"], labels=labels,
                    basis=basis, absorber=c["absorber"])
    return rec


def cmd_propagate(cfg: dict, out: Path) -> int:
    from .pulsecraft import sample_widths, survival

    c = cfg["propagate"]
    pulse = _load_pulse(cfg)
    records = _pool_map(_propagate_task, [(cfg, v) for v in c["initial_v"]], cfg["workers"])
    summary = []
    for v0, rec in zip(c["initial_v"], records):
        rec.write_csv(out / f"populations_v{v0}.csv")
        summary.append({"initial_v": v0, "final": {str(k): x for k, x in rec.final.items()},
                        "dissociated": rec.dissociated()})
    payload = {"command": "propagate", "runs": summary, "duration_au": pulse.duration}
    if c["floquet_estimate"]:
        p = build_model(cfg["model"])
        t, widths = sample_widths(p, pulse, tuple(c["initial_v"]), grid=_grid(p, cfg))
        est = survival(t, widths, tuple(c["initial_v"]))
        payload["floquet_survival"] = {str(k): x for k, x in est.final.items()}
    write_json(out / "propagate.json", payload)
    for s in summary:
        print(f"propagate: from v = {s['initial_v']}: " +
              ", ".join(f"P{k} = {x:.4f}" for k, x in s["final"].items()))
    return EXIT_OK


COMMANDS = {"scan": cmd_scan, "path": cmd_path, "predict": cmd_predict, "pulse": cmd_pulse,
            "propagate": cmd_propagate}


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zwrlab", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", metavar="PATH", help="YAML run configuration")
    ap.add_argument("--workers", type=int, metavar="N", help="worker processes (default 1)")
    ap.add_argument("--out", metavar="DIR", help="output directory")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", dest="overrides",
                    help="override one config key, e.g. scan.v=0 (repeatable)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    from .boundstates import BoundStateError
    from .floquet import SiegertError
    from .potentials import CurveFileError, DomainError, NoCrossingError
    from .semiclassical import SemiclassicalError
    from .tdse import PropagationError
    from .zwrmap import ScanError

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.overrides, args.workers, args.out)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.resolved.yaml").write_text(yaml.safe_dump(cfg, sort_keys=True))
        return COMMANDS[args.command](cfg, out)
    except (ConfigError, CurveFileError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (SiegertError, ScanError, PropagationError, SemiclassicalError, BoundStateError,
            DomainError, NoCrossingError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
