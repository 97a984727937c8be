"""Batch command-line interface.

    nilvdw words --d 2 --k 2 --format json
    nilvdw class --k 2 --d 2
    nilvdw certify --baseline ap --range 9 --k 3 --r 2

Parameters may also come from an INI-style file (``--config run.ini``)
with a ``[run]`` section; flags override file values.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import random
import sys
from pathlib import Path

from .nilgroup import (
    GroupConfig,
    GroupElement,
    generators,
    identity,
    inverse,
    left_normed,
    nilpotency_class,
    product_of,
    verify_class_at_most,
)
from .nilprogression import (
    ProgressionSpec,
    build,
    find_in,
    is_nondegenerate,
    progression_report,
    standard_gen_pool,
)
from .ramsey import (
    GroundSet,
    InvariantViolation,
    ap_patterns,
    certify_restricted,
    certify_restricted_ap,
    checked_certify,
    nilprogression_patterns,
    search_restricted_witness_ap,
    search_restricted_witness_nil,
)
from .words import (
    CANONICAL,
    EQUIVALENCES,
    RAW,
    Word,
    WordConvention,
    count_words,
    enumerate_words,
    evaluate_word,
    injectivity_report,
)

log = logging.getLogger("nilvdw")

COMMANDS = (
    "words",
    "eval",
    "class",
    "nilprog-check",
    "nilprog-find",
    "certify",
    "certify-restricted",
    "search-witness",
)

EXIT_CONFIG = 2
EXIT_INVARIANT = 3


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"invalid config key '{key}': {message}")
        self.key = key


def _positive(key, value):
    try:
        v = int(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected an integer, got {value!r}") from None
    if v < 1:
        raise ConfigError(key, f"must be positive, got {v}")
    return v


def _nonnegative(key, value):
    try:
        v = int(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected an integer, got {value!r}") from None
    if v < 0:
        raise ConfigError(key, f"must be nonnegative, got {v}")
    return v


def _integer(key, value):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected an integer, got {value!r}") from None


def _boolean(key, value):
    if isinstance(value, bool):
        return value
    s = str(value).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {value!r}")


def _choice(*options):
    def conv(key, value):
        if value not in options:
            raise ConfigError(key, f"expected one of {', '.join(options)}, got {value!r}")
        return value

    return conv


def _string(key, value):
    return str(value)


def _word_list(key, value):
    if isinstance(value, list):
        return [str(v) for v in value]
    return str(value).split()


CONVERTERS = {
    "k": _positive,
    "d": _positive,
    "r": _positive,
    "c": _positive,
    "length": _positive,
    "limit": _positive,
    "range": _positive,
    "range_bound": _positive,
    "workers": _positive,
    "size_bound": _nonnegative,
    "samples": _nonnegative,
    "seed": _integer,
    "include_empty": _boolean,
    "require_absence": _boolean,
    "equivalence": _choice(*EQUIVALENCES),
    "format": _choice("text", "json"),
    "baseline": _choice("ap", "nilprogression"),
    "generators": _choice("standard", "identity"),
    "base_pool": _choice("ground", "identity", "standard"),
    "word": _word_list,
    "base": _string,
    "ground": _string,
    "set": _string,
}

COMMON = {"k", "d", "format", "seed", "workers", "include_empty", "equivalence"}
_CERTIFY_KEYS = COMMON | {"baseline", "r", "range", "set", "length", "ground", "base_pool"}
ALLOWED = {
    "words": COMMON,
    "eval": COMMON | {"word"},
    "class": COMMON | {"c", "samples"},
    "nilprog-check": COMMON | {"length", "generators", "base"},
    "nilprog-find": COMMON | {"length", "ground", "base_pool", "limit"},
    "certify": _CERTIFY_KEYS,
    "certify-restricted": _CERTIFY_KEYS,
    "search-witness": COMMON
    | {"baseline", "r", "size_bound", "range_bound", "require_absence", "length", "base_pool"},
}

DEFAULTS = {
    "format": "text",
    "seed": 0,
    "workers": 1,
    "include_empty": True,
    "equivalence": CANONICAL,
    "samples": 200,
    "generators": "standard",
    "baseline": "ap",
    "require_absence": True,
}

# execution parameters that must not change a report
_NOT_REPORTED = {"workers", "format"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nilvdw",
        description="Nilpotent shift groups, nilprogressions and restricted van der Waerden certification.",
        argument_default=argparse.SUPPRESS,
    )
    p.add_argument("command", nargs="?", default=None, help=" | ".join(COMMANDS))
    p.add_argument("--config", help="INI file with a [run] section")
    p.add_argument("--k", type=str, help="nilpotency parameter / AP length")
    p.add_argument("--d", type=str, help="rank (number of letters)")
    p.add_argument("--r", type=str, help="number of colors")
    p.add_argument("--c", type=str, help="class bound to check")
    p.add_argument("--length", type=str, help="progression length (default k)")
    p.add_argument("--include-empty", dest="include_empty", action=argparse.BooleanOptionalAction)
    p.add_argument("--equivalence", type=str, help=f"one of {', '.join(EQUIVALENCES)}")
    p.add_argument("--format", type=str, help="text or json")
    p.add_argument("--seed", type=str)
    p.add_argument("--workers", type=str)
    p.add_argument("--samples", type=str, help="random elements for the class cross-check")
    p.add_argument("--word", action="append", help="word such as '*1*2' or 'e'; repeatable")
    p.add_argument("--generators", type=str, help="standard or identity")
    p.add_argument("--base", type=str, help="base element as JSON")
    p.add_argument("--ground", type=str, help="'progression[:L]' or a JSON file of elements")
    p.add_argument("--base-pool", dest="base_pool", type=str, help="ground, identity or standard")
    p.add_argument("--limit", type=str)
    p.add_argument("--baseline", type=str, help="ap or nilprogression")
    p.add_argument("--range", type=str, help="AP ground set 1..N")
    p.add_argument("--set", type=str, help="AP ground set as comma-separated integers")
    p.add_argument("--size-bound", dest="size_bound", type=str)
    p.add_argument("--range-bound", dest="range_bound", type=str)
    p.add_argument("--require-absence", dest="require_absence", action=argparse.BooleanOptionalAction)
    return p


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError("config", str(exc)) from None
    if "run" not in parser:
        raise ConfigError("config", f"{path} has no [run] section")
    return {key.replace("-", "_"): value for key, value in parser["run"].items()}


def resolve_config(argv: list[str] | None = None) -> dict:
    ns = vars(build_parser().parse_args(argv))
    raw = {}
    if "config" in ns:
        raw.update(read_config_file(ns.pop("config")))
    if ns.get("command") is None:
        ns.pop("command", None)
    raw.update(ns)
    command = raw.pop("command", None)
    if command is None:
        raise ConfigError("command", "no command given")
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    allowed = ALLOWED[command]
    cfg = {}
    for key, value in raw.items():
        if key not in CONVERTERS:
            raise ConfigError(key, "unknown key")
        if key not in allowed:
            raise ConfigError(key, f"not used by command '{command}'")
        cfg[key] = CONVERTERS[key](key, value)
    for key, value in DEFAULTS.items():
        if key in allowed:
            cfg.setdefault(key, value)
    cfg["command"] = command
    return cfg


def _require(cfg: dict, *keys: str) -> None:
    for key in keys:
        if key not in cfg:
            raise ConfigError(key, f"required by command '{cfg['command']}'")


def _group(cfg: dict) -> GroupConfig:
    _require(cfg, "k", "d")
    if cfg["d"] < 2:
        raise ConfigError("d", "rank must be at least 2")
    return GroupConfig(cfg["k"], cfg["d"])


def _conv(cfg: dict) -> WordConvention:
    return WordConvention(cfg["include_empty"], cfg["equivalence"])


def _element(key: str, text: str) -> GroupElement:
    try:
        return GroupElement.from_json(json.loads(text))
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(key, f"bad group element: {exc}") from None


def _nil_ground(cfg: dict, group: GroupConfig) -> GroundSet:
    ground = cfg.get("ground", "progression")
    if ground.startswith("progression"):
        _, _, length = ground.partition(":")
        length = _positive("ground", length) if length else cfg.get("length", group.k)
        spec = ProgressionSpec(group.k, length, group.d)
        np = build(spec, generators(group), identity(group.m), _conv(cfg), cfg["workers"])
        return GroundSet.of_elements(np.elements)
    try:
        data = json.loads(Path(ground).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("ground", f"cannot load {ground}: {exc}") from None
    if isinstance(data, dict):
        data = data.get("elements", data.get("ground_set"))
    if not isinstance(data, list):
        raise ConfigError("ground", "expected a list of group elements")
    try:
        elements = [GroupElement.from_json(e) for e in data]
    except ValueError as exc:
        raise ConfigError("ground", str(exc)) from None
    if any(e.arity != group.m for e in elements):
        raise ConfigError("ground", f"elements must have {group.m} coordinates")
    return GroundSet.of_elements(elements)


def _base_pool(cfg: dict, group: GroupConfig, V: GroundSet | None, default: str = "ground"):
    choice = cfg.get("base_pool", default)
    if choice == "identity":
        return [identity(group.m)]
    if choice == "standard":
        return standard_gen_pool(group)
    return None if V is None else list(V.items)


def _ap_ground(cfg: dict) -> GroundSet:
    if "set" in cfg:
        try:
            values = [int(v) for v in cfg["set"].replace(" ", "").split(",") if v]
        except ValueError:
            raise ConfigError("set", f"expected comma-separated integers, got {cfg['set']!r}") from None
        return GroundSet.of_integers(values)
    _require(cfg, "range")
    return GroundSet.of_integers(range(1, cfg["range"] + 1))


def cmd_words(cfg: dict) -> dict:
    _require(cfg, "k", "d")
    conv = _conv(cfg)
    words = enumerate_words(cfg["d"], cfg["k"], conv)
    return {
        "count": count_words(cfg["d"], cfg["k"], conv),
        "raw_count": count_words(cfg["d"], cfg["k"], WordConvention(conv.include_empty, RAW)),
        "canonical_count": count_words(cfg["d"], cfg["k"], WordConvention(conv.include_empty, CANONICAL)),
        "enumerated": len(words),
        "words": [str(w) for w in words],
    }


def cmd_eval(cfg: dict) -> dict:
    group = _group(cfg)
    if "word" in cfg:
        out = []
        for text in cfg["word"]:
            try:
                w = Word.parse(text, group.d, group.k)
            except ValueError as exc:
                raise ConfigError("word", str(exc)) from None
            out.append({"word": str(w), "element": evaluate_word(w, group).to_json()})
        return {"evaluations": out}
    report = injectivity_report(group, _conv(cfg), cfg["workers"])
    report["image_size"] = report["distinct_elements"]
    return report


def _random_element(group: GroupConfig, rng: random.Random) -> GroupElement:
    pool = generators(group)
    pool = pool + [inverse(g) for g in pool]
    return product_of((rng.choice(pool) for _ in range(rng.randint(0, 6))), group.m)


def cmd_class(cfg: dict) -> dict:
    group = _group(cfg)
    cls, failing = nilpotency_class(group)
    out = {
        "class": cls,
        "verified_at_most": verify_class_at_most(group, cls).holds,
    }
    if failing is not None:
        out["witness"] = {
            "weight": failing.c + 1,
            "letters": list(failing.witness_letters),
            "element": failing.witness.to_json(),
        }
    if "c" in cfg:
        check = verify_class_at_most(group, cfg["c"])
        out["check"] = {"c": cfg["c"], "holds": check.holds}
        if not check.holds:
            out["check"]["witness_letters"] = list(check.witness_letters)
            out["check"]["witness"] = check.witness.to_json()
    rng = random.Random(cfg["seed"])
    samples = cfg["samples"]
    for _ in range(samples):
        entries = [_random_element(group, rng) for _ in range(cls + 1)]
        if not left_normed(entries).is_identity():
            raise InvariantViolation(
                f"random weight-{cls + 1} commutator is nontrivial; class computation is wrong"
            )
    out["random_check"] = {"samples": samples, "weight": cls + 1, "all_trivial": True}
    out["label_k"] = group.k
    out["label_matches_class"] = cls == group.k
    if cls != group.k:
        out["note"] = (
            f"the construction is described as {group.k}-step nilpotent, but the lower "
            f"central series gives class {cls}; reported as computed, not reinterpreted"
        )
    return out


def cmd_nilprog_check(cfg: dict) -> dict:
    group = _group(cfg)
    length = cfg.get("length", group.k)
    spec = ProgressionSpec(group.k, length, group.d)
    if cfg["generators"] == "identity":
        gens = [identity(group.m)] * group.d
    else:
        gens = generators(group)
    base = _element("base", cfg["base"]) if "base" in cfg else identity(group.m)
    if base.arity != group.m:
        raise ConfigError("base", f"element must have {group.m} coordinates")
    conv = _conv(cfg)
    np = build(spec, gens, base, conv, cfg["workers"])
    other_eq = RAW if conv.equivalence == CANONICAL else CANONICAL
    other = build(spec, gens, base, WordConvention(conv.include_empty, other_eq), cfg["workers"])
    out = progression_report(np)
    out["by_convention"] = {
        c.conv.equivalence: {"word_count": c.word_count, "nondegenerate": is_nondegenerate(c)}
        for c in sorted((np, other), key=lambda c: c.conv.equivalence)
    }
    return out


def cmd_nilprog_find(cfg: dict) -> dict:
    group = _group(cfg)
    spec = ProgressionSpec(group.k, cfg.get("length", group.k), group.d)
    V = _nil_ground(cfg, group)
    gen_pool = standard_gen_pool(group)
    base_pool = _base_pool(cfg, group, V)
    found = find_in(V.items, spec, gen_pool, base_pool, _conv(cfg), cfg.get("limit"), cfg["workers"])
    return {
        "ground_size": len(V),
        "found": len(found),
        "progressions": [progression_report(np) for np in found],
        "scope": {
            "gen_pool": "standard generators, their inverses, identity",
            "base_pool": cfg.get("base_pool", "ground"),
        },
    }


def cmd_certify(cfg: dict) -> dict:
    _require(cfg, "k", "r")
    if cfg["baseline"] == "ap":
        V = _ap_ground(cfg)
        if cfg["k"] < 3:
            raise ConfigError("k", "AP length must be at least 3")
        fam = ap_patterns(V, cfg["k"])
        scope = {"ground_set": list(V.items), "pattern": f"{cfg['k']}-term arithmetic progressions"}
    else:
        group = _group(cfg)
        spec = ProgressionSpec(group.k, cfg.get("length", group.k), group.d)
        V = _nil_ground(cfg, group)
        fam = nilprogression_patterns(
            V, spec, standard_gen_pool(group), _base_pool(cfg, group, V), _conv(cfg), cfg["workers"]
        )
        scope = {
            "ground_size": len(V),
            "pattern": "non-degenerate nilprogressions",
            "gen_pool": "standard generators, their inverses, identity",
            "base_pool": cfg.get("base_pool", "ground"),
        }
    cert = checked_certify(V, fam, cfg["r"], cfg["workers"])
    out = cert.to_json()
    out["edges"] = len(fam)
    out["scope"] = scope
    return out


def cmd_certify_restricted(cfg: dict) -> dict:
    _require(cfg, "k", "r")
    if cfg["baseline"] == "ap":
        if cfg["k"] < 3:
            raise ConfigError("k", "AP length must be at least 3")
        V = _ap_ground(cfg)
        report = certify_restricted_ap(V, cfg["k"], cfg["r"], cfg["workers"])
    else:
        group = _group(cfg)
        spec = ProgressionSpec(group.k, cfg.get("length", group.k), group.d)
        V = _nil_ground(cfg, group)
        report = certify_restricted(
            V,
            spec,
            cfg["r"],
            standard_gen_pool(group),
            _base_pool(cfg, group, V),
            _conv(cfg),
            cfg["workers"],
        )
    out = report.to_json()
    out["ground_size"] = len(V)
    return out


def cmd_search_witness(cfg: dict) -> dict:
    _require(cfg, "k", "r", "size_bound")
    if cfg["baseline"] == "ap":
        _require(cfg, "range_bound")
        if cfg["k"] < 3:
            raise ConfigError("k", "AP length must be at least 3")
        res = search_restricted_witness_ap(
            cfg["k"], cfg["r"], cfg["size_bound"], cfg["range_bound"], cfg["require_absence"], cfg["workers"]
        )
    else:
        group = _group(cfg)
        spec = ProgressionSpec(group.k, cfg.get("length", group.k), group.d)
        base_pool = _base_pool(cfg, group, None, default="standard")
        if base_pool is None:
            raise ConfigError("base_pool", "search-witness needs 'identity' or 'standard'")
        res = search_restricted_witness_nil(
            spec,
            cfg["r"],
            cfg["size_bound"],
            standard_gen_pool(group),
            base_pool,
            _conv(cfg),
            cfg["require_absence"],
            cfg["workers"],
        )
    return res.to_json()


HANDLERS = {
    "words": cmd_words,
    "eval": cmd_eval,
    "class": cmd_class,
    "nilprog-check": cmd_nilprog_check,
    "nilprog-find": cmd_nilprog_find,
    "certify": cmd_certify,
    "certify-restricted": cmd_certify_restricted,
    "search-witness": cmd_search_witness,
}


def run(cfg: dict) -> dict:
    result = HANDLERS[cfg["command"]](cfg)
    effective = {k: v for k, v in sorted(cfg.items()) if k not in _NOT_REPORTED}
    return {"command": cfg["command"], "config": effective, "result": result}


def _render_text(report: dict) -> str:
    lines = [f"{report['command']}: " + ", ".join(f"{k}={v}" for k, v in report["config"].items() if k != "command")]

    def walk(obj, prefix):
        for key, value in obj.items():
            name = f"{prefix}{key}"
            if isinstance(value, dict):
                if "coords" in value:
                    lines.append(f"{name}: {GroupElement.from_json(value)}")
                else:
                    walk(value, name + ".")
            elif isinstance(value, list):
                if len(value) <= 12 and all(not isinstance(v, (dict, list)) for v in value):
                    lines.append(f"{name}: {' '.join(map(str, value))}")
                else:
                    lines.append(f"{name}: [{len(value)} entries]")
            else:
                lines.append(f"{name}: {value}")

    walk(report["result"], "")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(name)s: %(message)s")
    try:
        cfg = resolve_config(argv)
        report = run(cfg)
    except ConfigError as exc:
        print(f"nilvdw: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"nilvdw: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"nilvdw: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if cfg["format"] == "json":
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write(_render_text(report) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
