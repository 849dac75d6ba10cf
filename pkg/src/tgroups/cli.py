"""Batch experiment driver.

    tgroups <subcommand> CONFIG [--sieve-limit N] [--out-dir DIR] [--workers N] [--set key=value ...]

CONFIG is a flat ``key = value`` file with dotted keys (no section header);
command-line options override it.  Every report starts with the resolved
config, and all files are computed in memory first and then moved into place
atomically.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .divisors import RESCALE_MODES, beta_rescale
from .errors import BudgetExceeded, ConfigError, RangeExceeded, Unsupported, VerificationFailed
from .isomorphy import CRITERION_KINDS, criterion_sum, power_block_pairing
from .primes import PrimeRange, default_cache_path
from .primesets import (BlockSpec, build_family, build_witness_pairs, density_profile,
                        normalized_block_sums, short_interval_profile)
from .schedules import (EpsilonSchedule, LogSequence, growth_ratio_profile, interval_density_profile,
                        interval_prime_count_profile, short_interval_quotient)
from .separation import SeparationInstance, build_admissible, lift, separate, shifted_reciprocal_log
from .series import Kernel, classify, trace

SUBCOMMANDS = ("construct", "evaluate", "classify", "witnesses", "rescale", "lift",
               "criterion", "separate", "profile")

EXIT_OK, EXIT_CONFIG, EXIT_RANGE, EXIT_BUDGET, EXIT_VERIFY = 0, 2, 3, 4, 5

# key -> (parser, default); None default means required when the subcommand reads it
COMMON = {
    "sieve.limit": (int, 10 ** 7),
    "sieve.cache": ("bool", True),
    "workers": (int, 1),
    "seed": (int, 0),
    "output.prefix": (str, ""),
}
FAMILY = {
    "family.beta": ("real", 1.0),
    "family.t0": ("real", 1.0),
    "family.a": ("real", 0.0),
    "family.scale": (str, "unit"),
    "schedule.kind": (str, "reciprocal_log"),
    "schedule.domain_start": (int, 2),
    "schedule.table": ("table", None),
    "n.lo": (int, None),
    "n.hi": (int, None),
}
KERNEL = {"kernel.beta": ("real", 1.0), "kernel.omega": ("real", 2 * math.pi)}
GRID = {"t.values": ("reals", None)}

SCHEMA = {
    "construct": {**FAMILY},
    "evaluate": {**FAMILY, **KERNEL, **GRID},
    "classify": {**FAMILY, **KERNEL, **GRID},
    "witnesses": {"witness.kind": (str, "full_spectrum"), "witness.beta": ("real", 1.0),
                  "witness.lambda": ("real", 0.5), "witness.max_pairs": (int, 0),
                  "n.lo": (int, None), "n.hi": (int, None)},
    "rescale": {"rescale.beta0": ("real", 1.0), "rescale.beta": ("real", 0.5), "rescale.mode": (str, "l1"),
                "rescale.s": ("real", 2.0), "rescale.a": ("real", None), "rescale.source_limit": (int, None),
                "n.lo": (int, 0), "n.hi": (int, 0)},
    "lift": {"lift.index": (str, "range"), "schedule.kind": (str, "reciprocal_log"),
             "schedule.domain_start": (int, 2), "schedule.table": ("table", None),
             "n.lo": (int, 0), "n.hi": (int, 0), "lift.targets": ("reals", ()),
             "lift.ell_lo": (int, 7), "lift.ell_hi": (int, 12), "lift.N0": (int, 1),
             "budget": (int, 10 ** 7)},
    "criterion": {"criterion.pairing": (str, "full_spectrum"), "criterion.kind": (str, "sqrt_gap"),
                  "criterion.beta": ("real", 1.0), "criterion.beta_target": ("real", 1.0),
                  "criterion.lambda": ("real", 0.5), "criterion.a": ("real", 2.0),
                  "criterion.source_limit": (int, 0), "n.lo": (int, 0), "n.hi": (int, 0)},
    "separate": {**KERNEL, "instance.generators": ("reals", None), "instance.u": ("real", None),
                 "instance.coefficients": ("fractions", None), "instance.u_irrational": ("real", 0.0),
                 "separate.ell_start": (int, 0), "separate.ell_max": (int, 64), "budget": (int, 10 ** 7)},
    "profile": {"profile.kind": (str, "growth_ratio"), "profile.s": ("real", 2.0), "profile.c": ("real", 1.0),
                "profile.t": ("real", 1.0), "profile.a": ("real", 0.0), **FAMILY},
}

PROFILE_KINDS = ("growth_ratio", "interval_quotient", "interval_density", "prime_count", "short_interval",
                 "family_density")


# -- config ----------------------------------------------------------------------

def _real(text: str) -> float:
    """Decimal string or a/b; decimal strings are rounded once, exactly."""
    text = text.strip()
    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not a real number: {text!r}") from e


def _parse(kind, text: str):
    try:
        if kind == "real":
            return _real(text)
        if kind == "reals":
            return tuple(_real(v) for v in text.split(",") if v.strip())
        if kind == "fractions":
            out = []
            for v in text.split(","):
                f = Fraction(v.strip())
                out.append((f.numerator, f.denominator))
            return tuple(out)
        if kind == "table":
            return {int(k): _real(v) for k, v in (item.split(":") for item in text.split(",") if item.strip())}
        if kind == "bool":
            low = text.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if kind is int:
            return int(text.strip())
        return text.strip()
    except ConfigError:
        raise
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"cannot parse {text!r}") from e


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        text = Path(path).read_text()
        parser.read_string("[config]\n" + text)
    except (OSError, configparser.Error) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return dict(parser["config"])


def resolve(subcommand: str, raw: dict[str, str]) -> dict:
    """Typed config with defaults filled in; unknown keys are errors."""
    if subcommand not in SCHEMA:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    schema = {**COMMON, **SCHEMA[subcommand]}
    raw = dict(raw)
    named = raw.pop("subcommand", subcommand).strip()
    if named != subcommand:
        raise ConfigError(f"config names subcommand {named!r}, not {subcommand!r}")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown keys for {subcommand}: {', '.join(unknown)}")
    cfg = {"subcommand": subcommand}
    for key, (kind, default) in schema.items():
        cfg[key] = _parse(kind, raw[key]) if key in raw else default
    if cfg["sieve.limit"] < 100:
        raise ConfigError("sieve.limit must be at least 100")
    if cfg["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    return cfg


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")


def _echo(cfg: dict) -> list[tuple[str, str]]:
    """Config echoed into report headers; ``workers`` is left out so that
    reports do not depend on it."""
    out = []
    for k in sorted(cfg):
        if k == "workers":
            continue
        v = cfg[k]
        if isinstance(v, dict):
            v = ",".join(f"{a}:{b!r}" for a, b in sorted(v.items()))
        elif isinstance(v, tuple):
            v = ",".join(f"{x[0]}/{x[1]}" if isinstance(x, tuple) else repr(x) for x in v)
        elif isinstance(v, float):
            v = repr(v)
        out.append((k, str(v)))
    return out


# -- report files ------------------------------------------------------------------

def _stamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def csv_report(cfg: dict, stamp: str, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# generated {stamp}\n")
    for k, v in _echo(cfg):
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(r.get(h)) for h in header])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def json_report(cfg: dict, stamp: str, body: dict) -> str:
    """JSON with the timestamp alone on the second line so it can be masked."""
    doc = {"config": dict(_echo(cfg)), "tgroups_version": __version__, **_plain(body)}
    inner = json.dumps(doc, indent=1, sort_keys=False, allow_nan=False)
    return "{\n \"generated\": " + json.dumps(stamp) + ",\n" + inner[2:] + "\n"


def write_atomic(out_dir: Path, files: dict[str, str]) -> list[Path]:
    """Stage every file as a temporary in ``out_dir``, then rename each into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", suffix=".tmp", dir=out_dir)
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
                fh.flush()
                os.fsync(fh.fileno())
            staged.append((tmp, out_dir / name))
    except BaseException:
        for tmp, _ in staged:
            Path(tmp).unlink(missing_ok=True)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]


# -- builders ----------------------------------------------------------------------

def _sieve(cfg: dict) -> PrimeRange:
    limit = cfg["sieve.limit"]
    path = default_cache_path(limit) if cfg["sieve.cache"] else None
    return PrimeRange(limit, cache_path=path, workers=cfg["workers"])


def _schedule(cfg: dict, beta: float = 1.0, t0: float = 1.0) -> EpsilonSchedule:
    kind = cfg["schedule.kind"]
    ds = cfg["schedule.domain_start"]
    if kind == "reciprocal_log":
        return EpsilonSchedule.reciprocal_log(ds)
    if kind == "beta_damped":
        return EpsilonSchedule.beta_damped(beta, t0, ds)
    if kind == "explicit":
        _require(cfg, "schedule.table")
        return EpsilonSchedule.explicit(cfg["schedule.table"])
    raise Unsupported(f"schedule kind {kind!r} is not available from a config")


def _n_range(cfg: dict) -> range:
    _require(cfg, "n.lo", "n.hi")
    if cfg["n.hi"] < cfg["n.lo"]:
        raise ConfigError("n.hi must be >= n.lo")
    return range(cfg["n.lo"], cfg["n.hi"] + 1)


def _family(cfg: dict, sieve: PrimeRange):
    beta, t0 = cfg["family.beta"], cfg["family.t0"]
    spec = BlockSpec(beta, t0, cfg["family.a"], _schedule(cfg, beta, t0), cfg["family.scale"])
    return build_family(spec, _n_range(cfg), sieve)


def _kernel(cfg: dict) -> Kernel:
    return Kernel(cfg["kernel.beta"], cfg["kernel.omega"])


# -- subcommands -------------------------------------------------------------------
# Each returns {file name: (kind, payload)} with kind "csv" -> (header, rows) or "json" -> dict.

def cmd_construct(cfg):
    sieve = _sieve(cfg)
    fam = _family(cfg, sieve)
    dens = {r["n"]: r["cumulative_density"] for r in density_profile(fam, sieve)}
    norm = {}
    if fam.spec.beta == 1 and fam.spec.exponent_scale == "unit":
        norm = {r["n"]: r["value"] for r in normalized_block_sums(fam)}
    rows = [{"n": b.n, "eps": b.eps, "lo": b.interval.lo, "hi": b.interval.hi, "closed": b.interval.closed,
             "count": b.count, "reciprocal_sum": b.reciprocal_sum, "normalized_sum": norm.get(b.n),
             "cumulative_density": dens[b.n]} for b in fam.blocks]
    header = ["n", "eps", "lo", "hi", "closed", "count", "reciprocal_sum", "normalized_sum", "cumulative_density"]
    return {"blocks.csv": ("csv", (header, rows)), "family.json": ("json", fam.to_dict())}


def _grid(cfg):
    _require(cfg, "t.values")
    if not cfg["t.values"]:
        raise ConfigError("t.values is empty")
    return cfg["t.values"]


def cmd_evaluate(cfg):
    sieve = _sieve(cfg)
    fam, kern = _family(cfg, sieve), _kernel(cfg)
    rows = []
    for t in _grid(cfg):
        tr = trace(kern, fam, t)
        for i in range(len(tr)):
            rows.append({"t": t, "block_n": int(tr.block_n[i]), "cutoff": tr.cutoffs[i],
                         "block_sum": tr.block_sums[i], "partial_sum": tr.partial_sums[i]})
    return {"evaluate.csv": ("csv", (["t", "block_n", "cutoff", "block_sum", "partial_sum"], rows))}


def cmd_classify(cfg):
    sieve = _sieve(cfg)
    fam, kern = _family(cfg, sieve), _kernel(cfg)
    summary, traces = [], []
    for t in _grid(cfg):
        tr = trace(kern, fam, t)
        try:
            c = classify(tr)
            label, score, reason = c.label, c.score, c.diagnostics.get("reason")
            slope = c.diagnostics.get("fitted_slope")
        except ValueError as e:
            label, score, reason, slope = "inconclusive", 0.0, str(e), None
        summary.append({"t": t, "label": label, "score": score, "fitted_slope": slope, "points": len(tr),
                        "last_cutoff": tr.cutoffs[-1] if len(tr) else None,
                        "last_partial_sum": tr.partial_sums[-1] if len(tr) else None, "reason": reason})
        traces += [{"t": t, "block_n": int(tr.block_n[i]), "cutoff": tr.cutoffs[i],
                    "partial_sum": tr.partial_sums[i]} for i in range(len(tr))]
    head = ["t", "label", "score", "fitted_slope", "points", "last_cutoff", "last_partial_sum", "reason"]
    return {"classify.csv": ("csv", (head, summary)),
            "classify_traces.csv": ("csv", (["t", "block_n", "cutoff", "partial_sum"], traces))}


def cmd_witnesses(cfg):
    sieve = _sieve(cfg)
    w = build_witness_pairs(cfg["witness.kind"], cfg["witness.beta"], cfg["witness.lambda"], _n_range(cfg), sieve)
    inside = w.inside()
    if not bool(np.all(inside)):
        raise VerificationFailed(f"{int(np.count_nonzero(~inside))} pairs fall outside their enclosure")
    mp = cfg["witness.max_pairs"] or None
    rows = [{**lv} for lv in w.levels]
    return {"witnesses.json": ("json", w.to_dict(mp)),
            "witness_levels.csv": ("csv", (["n", "pairs", "eps", "lower", "upper"], rows))}


def cmd_rescale(cfg):
    sieve = _sieve(cfg)
    _require(cfg, "rescale.source_limit")
    if cfg["rescale.mode"] not in RESCALE_MODES:
        raise ConfigError(f"rescale.mode must be one of {RESCALE_MODES}")
    B = sieve.primes_between(2, cfg["rescale.source_limit"])
    nr = (cfg["n.lo"], cfg["n.hi"]) if cfg["n.hi"] else None
    rep = beta_rescale(B, cfg["rescale.beta0"], cfg["rescale.beta"], cfg["rescale.mode"], sieve,
                       s=cfg["rescale.s"], a=cfg["rescale.a"], n_range=nr)
    if np.any(rep.gap > rep.bound * (1 + 1e-12)):
        raise VerificationFailed("the truncated gap exceeds its per-pair bound")
    rows = [{"n": int(n), "gap": g, "bound": b, "envelope": e}
            for n, g, b, e in zip(rep.n, rep.gap, rep.bound, rep.envelope)]
    body = {"params": rep.params, "excluded": rep.excluded, "bijection": rep.bijection.to_dict()}
    return {"rescale.csv": ("csv", (["n", "gap", "bound", "envelope"], rows)), "rescale.json": ("json", body)}


def cmd_lift(cfg):
    sieve = _sieve(cfg)
    extra = {}
    if cfg["lift.index"] == "range":
        A, eps = _n_range(cfg), _schedule(cfg)
    elif cfg["lift.index"] == "admissible":
        if not cfg["lift.targets"]:
            raise ConfigError("lift.targets is required for the admissible index set")
        q_limit = int(math.floor(math.log(sieve.limit) - 0.5))
        adm = build_admissible(cfg["lift.targets"], shifted_reciprocal_log, (cfg["lift.ell_lo"], cfg["lift.ell_hi"]),
                               cfg["lift.N0"], q_limit, cfg["budget"])
        if not adm.certificates and adm.truncated and "budget" in adm.truncated:
            raise BudgetExceeded(f"no platoon within the budget: {adm.truncated}")
        A, eps = adm.A, adm.eps
        extra = {"certificates": [c.to_dict() for c in adm.certificates], "ell_max": adm.ell_max,
                 "index_truncated": adm.truncated}
    else:
        raise ConfigError("lift.index must be 'range' or 'admissible'")
    L = lift(A, eps, sieve)
    rows = [{"n": b.n, "eps": b.eps, "lo": b.interval.lo, "hi": b.interval.hi, "count": int(b.primes.size),
             "normalized_sum": b.normalized_sum} for b in L.blocks]
    return {"lift.csv": ("csv", (["n", "eps", "lo", "hi", "count", "normalized_sum"], rows)),
            "lift.json": ("json", {**L.to_dict(), **extra})}


def cmd_criterion(cfg):
    sieve = _sieve(cfg)
    kind = cfg["criterion.kind"]
    if kind not in CRITERION_KINDS:
        raise ConfigError(f"criterion.kind must be one of {CRITERION_KINDS}")
    src = cfg["criterion.pairing"]
    beta, bt = cfg["criterion.beta"], cfg["criterion.beta_target"]
    if src in ("full_spectrum", "powers"):
        pairing = build_witness_pairs(src, beta, cfg["criterion.lambda"], _n_range(cfg), sieve)
    elif src == "power_blocks":
        if not cfg["criterion.source_limit"]:
            raise ConfigError("criterion.source_limit is required for power_blocks")
        B = sieve.primes_between(2, cfg["criterion.source_limit"])
        pairing = power_block_pairing(B, beta, cfg["criterion.a"])
    else:
        raise ConfigError("criterion.pairing must be full_spectrum, powers or power_blocks")
    tr = criterion_sum(pairing, beta, bt, kind)
    rows = [{"n": int(n), "pairs": int(c), "truncated_sum": s} for n, c, s in zip(tr.n, tr.pair_counts, tr.sums)]
    return {"criterion.csv": ("csv", (["n", "pairs", "truncated_sum"], rows))}


def cmd_separate(cfg):
    _require(cfg, "instance.generators", "instance.u", "instance.coefficients")
    sieve = _sieve(cfg)
    inst = SeparationInstance(list(cfg["instance.generators"]), cfg["instance.u"],
                              list(cfg["instance.coefficients"]), cfg["instance.u_irrational"])
    res = separate(inst, sieve, ell_start=cfg["separate.ell_start"] or None, ell_max=cfg["separate.ell_max"],
                   budget=cfg["budget"], kernel=_kernel(cfg))
    if not res.levels and res.truncated and "budget" in res.truncated:
        raise BudgetExceeded(f"no level within the budget: {res.truncated}")
    bad = [lv.ell for lv in res.levels if not lv.ok]
    if bad:
        raise VerificationFailed(f"levels {bad} miss their harmonic window or distance bound")
    summary, traces = [], []
    for name, ev in res.evidence.items():
        c, tr = ev["classification"], ev["trace"]
        summary.append({"name": name, "t": ev["t"], "label": c.label, "score": c.score, "points": len(tr),
                        "last_partial_sum": tr.partial_sums[-1] if len(tr) else None,
                        "reason": c.diagnostics.get("reason")})
        traces += [{"name": name, "t": ev["t"], "block_n": int(tr.block_n[i]), "cutoff": tr.cutoffs[i],
                    "partial_sum": tr.partial_sums[i]} for i in range(len(tr))]
    body = {"schema": "tgroups.separator/1", "a": res.a, "s_index": res.s_index, "C": res.C,
            "truncated": res.truncated,
            "levels": [{"ell": lv.ell, "c": lv.c, "m0": lv.m0, "Q": lv.Q, "harmonic_sum": lv.harmonic_sum,
                        "max_bound": lv.max_bound, "limit": lv.limit} for lv in res.levels],
            "B": res.B.to_dict()}
    return {"separator.json": ("json", body),
            "evidence.csv": ("csv", (["name", "t", "label", "score", "points", "last_partial_sum", "reason"],
                                     summary)),
            "evidence_traces.csv": ("csv", (["name", "t", "block_n", "cutoff", "partial_sum"], traces))}


def cmd_profile(cfg):
    kind = cfg["profile.kind"]
    if kind not in PROFILE_KINDS:
        raise ConfigError(f"profile.kind must be one of {PROFILE_KINDS}")
    ns = _n_range(cfg)
    seq = LogSequence.stretched(cfg["profile.s"], cfg["profile.c"]) if kind != "short_interval" else None
    if kind == "growth_ratio":
        rows, head = growth_ratio_profile(seq, ns), ["n", "ratio", "log_ratio"]
    elif kind == "interval_quotient":
        rows, head = [{"n": n, "quotient": short_interval_quotient(seq, n)} for n in ns], ["n", "quotient"]
    elif kind == "interval_density":
        rows, head = interval_density_profile(seq, ns), ["n", "ratio"]
    elif kind == "prime_count":
        rows, head = interval_prime_count_profile(seq, ns, _sieve(cfg)), ["n", "alpha_n", "predicted", "ratio"]
    elif kind == "short_interval":
        rows = short_interval_profile(_sieve(cfg), _schedule(cfg), ns, cfg["profile.t"], cfg["profile.a"])
        head = ["n", "eps", "ratio", "limit"]
    else:
        sieve = _sieve(cfg)
        rows, head = density_profile(_family(cfg, sieve), sieve), ["n", "cumulative_density"]
    return {"profile.csv": ("csv", (head, rows))}


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def run(cfg: dict, out_dir: Path, stamp: str | None = None) -> list[Path]:
    """Compute every report for ``cfg`` and write them atomically under ``out_dir``."""
    stamp = stamp or _stamp()
    produced = COMMANDS[cfg["subcommand"]](cfg)
    prefix = cfg["output.prefix"]
    files = {}
    for name, (kind, payload) in produced.items():
        text = csv_report(cfg, stamp, *payload) if kind == "csv" else json_report(cfg, stamp, payload)
        files[prefix + name] = text
    return write_atomic(out_dir, files)


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, RangeExceeded):
        return EXIT_RANGE
    if isinstance(exc, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, VerificationFailed):
        return EXIT_VERIFY
    if isinstance(exc, (ConfigError, Unsupported, ValueError)):
        return EXIT_CONFIG
    raise exc


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="tgroups", description="Prime-set series experiments.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("config", help="flat key = value file")
    ap.add_argument("--sieve-limit", type=int)
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    args = ap.parse_args(argv)
    try:
        raw = read_config_file(args.config)
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set needs key=value, got {item!r}")
            k, v = item.split("=", 1)
            raw[k.strip()] = v.strip()
        if args.sieve_limit is not None:
            raw["sieve.limit"] = str(args.sieve_limit)
        if args.workers is not None:
            raw["workers"] = str(args.workers)
        cfg = resolve(args.subcommand, raw)
        paths = run(cfg, Path(args.out_dir))
    except (ConfigError, Unsupported, ValueError, RangeExceeded, BudgetExceeded, VerificationFailed) as e:
        code = exit_code(e)
        print(f"tgroups: error: {type(e).__name__}: {e}", file=sys.stderr)
        return code
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
