"""Config grammar for the command-line front end.

Line-oriented key = value pairs grouped into [sections]; `#` starts a
comment.  A line may also carry several whitespace-separated key=value
tokens (handy one-liners).  Sections: [run] (default), [family],
[ordering], [gw].  Unknown keys are rejected with their line number.

Value forms: integers (scientific mantissa-free forms like 1e6 allowed),
rationals p/q, comma-separated lists, bare strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .families import (
    FULL,
    UNRAMIFIED,
    ZERO,
    ConditionFamily,
    FamilyError,
    FrobenianRule,
    box_family,
    example_d1mod4_family,
    full_family,
    unramified_family,
)
from .localfields import OO
from .orderings import CUSTOM, DISC, RADICAL, OrderingSpec, custom_ordering, disc_ordering, radical_ordering

COMMANDS = ("count", "poisson-check", "gw-check", "invariants", "example-d1mod4", "fit")

RUN_KEYS = {
    "command", "n", "x", "x_max", "truncation", "grid_min", "grid_points",
    "seed", "prime_cutoff", "random_boxes",
    "max_truncation", "max_x", "max_primes",
}
FAMILY_KEYS_FIXED = {"name", "modulus", "generic"}
ORDERING_KEYS_FIXED = {"kind", "modulus", "rule", "fallback"}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass
class RunConfig:
    command: str
    n: int
    family: ConditionFamily
    ordering: OrderingSpec
    truncation: int = 1000
    x_max: int = 10**6
    grid_min: int = 100
    grid_points: int = 16
    seed: int = 1
    prime_cutoff: int = 10**5
    random_boxes: int = 0
    gw_box: dict = field(default_factory=dict)
    max_truncation: int = 100_000
    max_x: int = 2 * 10**8
    max_primes: int = 5 * 10**6
    threads: int = 1  # set from the command line, not the config file


def _parse_int(text: str, line: int) -> int:
    text = text.strip()
    try:
        if "e" in text.lower():
            mant, exp = text.lower().split("e", 1)
            mant_f = float(mant)
            value = mant_f * 10 ** int(exp)
            if abs(value - round(value)) > 1e-9:
                raise ValueError
            return int(round(value))
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", line) from None


def _tokenize(text: str):
    """Yield (lineno, section, key, value)."""
    section = "run"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", lineno)
            section = line[1:-1].strip().lower()
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        # allow several k=v tokens on one line when none of the values
        # contain spaces
        tokens = line.split()
        if all("=" in t for t in tokens) and len(tokens) > 1:
            pairs = [t.split("=", 1) for t in tokens]
        else:
            pairs = [line.split("=", 1)]
        for key, value in pairs:
            yield lineno, section, key.strip().lower(), value.strip()


def _parse_place(token: str, line: int):
    if token in ("inf", "oo", "infinity"):
        return OO
    return _parse_int(token, line)


def _parse_local_subset(value: str, line: int):
    v = value.strip().lower()
    if v in (FULL, UNRAMIFIED, ZERO):
        return v
    triples = []
    for part in value.split(","):
        comps = part.strip().split(":")
        try:
            triples.append(tuple(int(c) for c in comps))
        except ValueError:
            raise ConfigError(f"bad local subset entry {part!r}", line) from None
    return tuple(triples)


def _build_family(n: int, items: list, line_of: dict) -> ConditionFamily:
    table = {k: v for k, v, _ in items}
    name = table.get("name", "")
    if name:
        if name == "full":
            return full_family(n)
        if name in ("unramified", "unramified-everywhere"):
            return unramified_family(n)
        if name in ("example-d1mod4", "d1mod4"):
            if n != 2:
                raise ConfigError("example-d1mod4 requires n = 2", line_of.get("name"))
            return example_d1mod4_family()
        raise ConfigError(f"unknown family name {name!r}", line_of.get("name"))
    # custom family: either a box over a named generic, or explicit classes
    modulus = None
    class_sets = {}
    exceptional = {}
    generic = table.get("generic", "")
    for key, value, lineno in items:
        if key in ("name", "generic"):
            continue
        if key == "modulus":
            modulus = _parse_int(value, lineno)
        elif key.startswith("class_"):
            c = _parse_int(key[len("class_"):], lineno)
            pairs = []
            for part in value.split(","):
                bits = part.strip().split(":")
                if len(bits) != 2:
                    raise ConfigError(f"bad (fr:t) pair {part!r}", lineno)
                pairs.append((int(bits[0]), int(bits[1])))
            class_sets[c] = frozenset(pairs)
        elif key.startswith("at_"):
            place = _parse_place(key[3:], lineno)
            exceptional[place] = _parse_local_subset(value, lineno)
        else:
            raise ConfigError(f"unknown family key {key!r}", lineno)
    if class_sets:
        if modulus is None:
            raise ConfigError("custom family needs a modulus")
        try:
            rule = FrobenianRule(n, modulus, tuple(sorted(class_sets.items())))
            base = {2: UNRAMIFIED, OO: FULL}
            import sympy

            for p in sympy.primefactors(n):
                base[int(p)] = UNRAMIFIED
            base.update(exceptional)
            from .localfields import place_key

            fam = ConditionFamily(
                n, rule, tuple(sorted(base.items(), key=lambda kv: place_key(kv[0]))),
                name="custom",
            )
        except FamilyError as exc:
            raise ConfigError(str(exc)) from None
    else:
        gen = generic or UNRAMIFIED
        if gen not in (FULL, UNRAMIFIED):
            raise ConfigError(f"generic must be full or unramified, got {gen!r}")
        try:
            fam = box_family(n, exceptional, generic=gen, name="custom-box")
        except FamilyError as exc:
            raise ConfigError(str(exc)) from None
    if not fam.contains_zero_everywhere():
        raise ConfigError("family must contain the identity class at every place")
    return fam


def _build_ordering(n: int, items: list) -> OrderingSpec:
    table = {k: v for k, v, _ in items}
    kind = table.get("kind", DISC)
    if kind in ("disc", "disc-regular"):
        return disc_ordering()
    if kind == RADICAL:
        return radical_ordering()
    if kind != CUSTOM:
        raise ConfigError(f"unknown ordering kind {kind!r}")
    modulus = None
    rule = {}
    fallback = DISC
    for key, value, lineno in items:
        if key == "kind":
            continue
        if key == "modulus":
            modulus = _parse_int(value, lineno)
        elif key == "fallback":
            fallback = value
        elif key == "rule":
            for part in value.split(";"):
                bits = part.strip().split(":")
                if len(bits) != 4:
                    raise ConfigError(f"rule entries are c:t:w:e, got {part!r}", lineno)
                c, t, w, e = (int(b) for b in bits)
                rule[(c, t, w)] = e
        else:
            raise ConfigError(f"unknown ordering key {key!r}", lineno)
    if modulus is None:
        raise ConfigError("custom ordering needs a modulus")
    try:
        return custom_ordering(n, modulus, rule, wild_fallback=fallback)
    except ValueError as exc:
        raise ConfigError(f"ordering not admissible: {exc}") from None


def render_config(cfg: RunConfig) -> str:
    """Canonical text form; parse(render(cfg)) reproduces cfg exactly."""
    from .localfields import place_key

    lines = [
        "[run]",
        f"command = {cfg.command}",
        f"n = {cfg.n}",
        f"truncation = {cfg.truncation}",
        f"x_max = {cfg.x_max}",
        f"grid_min = {cfg.grid_min}",
        f"grid_points = {cfg.grid_points}",
        f"seed = {cfg.seed}",
        f"prime_cutoff = {cfg.prime_cutoff}",
        f"random_boxes = {cfg.random_boxes}",
        f"max_truncation = {cfg.max_truncation}",
        f"max_x = {cfg.max_x}",
        f"max_primes = {cfg.max_primes}",
        "",
        "[family]",
        f"modulus = {cfg.family.generic.modulus}",
    ]
    for c, pairs in sorted(cfg.family.generic.class_sets):
        body = ", ".join(f"{fr}:{t}" for fr, t in sorted(pairs))
        lines.append(f"class_{c} = {body}")
    for v, spec in sorted(cfg.family.exceptional, key=lambda kv: place_key(kv[0])):
        key = "inf" if v == OO else str(v)
        if isinstance(spec, str):
            lines.append(f"at_{key} = {spec}")
        else:
            body = ", ".join(":".join(str(c) for c in x) for x in sorted(spec))
            lines.append(f"at_{key} = {body}")
    lines += ["", "[ordering]", f"kind = {cfg.ordering.kind}"]
    if cfg.ordering.kind == CUSTOM:
        lines.append(f"modulus = {cfg.ordering.modulus}")
        entries = "; ".join(
            f"{c}:{t}:{w}:{e}" for (c, t, w), e in sorted(cfg.ordering.table)
        )
        if entries:
            lines.append(f"rule = {entries}")
        lines.append(f"fallback = {cfg.ordering.wild_fallback}")
    if cfg.gw_box:
        lines += ["", "[gw]"]
        for v, spec in sorted(cfg.gw_box.items(), key=lambda kv: place_key(kv[0])):
            key = "inf" if v == OO else str(v)
            if isinstance(spec, str):
                lines.append(f"at_{key} = {spec}")
            else:
                body = ", ".join(":".join(str(c) for c in x) for x in sorted(spec))
                lines.append(f"at_{key} = {body}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ConfigError naming the offending line."""
    sections: dict[str, list] = {"run": [], "family": [], "ordering": [], "gw": []}
    line_of: dict[str, int] = {}
    for lineno, section, key, value in _tokenize(text):
        if section == "run" and key in ("family", "ordering"):
            # one-liner shorthands: family=full, ordering=disc
            target = "family" if key == "family" else "ordering"
            short = "name" if key == "family" else "kind"
            sections[target].append((short, value, lineno))
            line_of[short] = lineno
            continue
        if section not in sections:
            raise ConfigError(f"unknown section [{section}]", lineno)
        if section == "run" and key not in RUN_KEYS:
            raise ConfigError(f"unknown key {key!r} in [run]", lineno)
        sections[section].append((key, value, lineno))
        line_of[key] = lineno

    run = {k: (v, lineno) for k, v, lineno in sections["run"]}

    def run_int(key: str, default: int) -> int:
        if key not in run:
            return default
        return _parse_int(run[key][0], run[key][1])

    n = run_int("n", 0)
    if n < 2:
        raise ConfigError("n must be at least 2", run.get("n", (None, None))[1])
    command = run.get("command", ("", None))[0]
    if command not in COMMANDS:
        raise ConfigError(
            f"command must be one of {', '.join(COMMANDS)}; got {command!r}",
            run.get("command", (None, None))[1],
        )

    family = _build_family(n, sections["family"], line_of)
    ordering = _build_ordering(n, sections["ordering"])

    gw_box = {}
    for key, value, lineno in sections["gw"]:
        if not key.startswith("at_"):
            raise ConfigError(f"unknown key {key!r} in [gw]", lineno)
        place = _parse_place(key[3:], lineno)
        spec = value.strip().lower()
        if spec in (FULL, UNRAMIFIED, ZERO):
            gw_box[place] = spec
        else:
            gens = []
            for part in value.split(","):
                gens.append(tuple(int(c) for c in part.strip().split(":")))
            gw_box[place] = tuple(gens)

    cfg = RunConfig(
        command=command,
        n=n,
        family=family,
        ordering=ordering,
        truncation=run_int("truncation", 1000),
        x_max=run_int("x_max", run_int("x", 10**6)),
        grid_min=run_int("grid_min", 100),
        grid_points=run_int("grid_points", 16),
        seed=run_int("seed", 1),
        prime_cutoff=run_int("prime_cutoff", 10**5),
        random_boxes=run_int("random_boxes", 0),
        gw_box=gw_box,
        max_truncation=run_int("max_truncation", 100_000),
        max_x=run_int("max_x", 2 * 10**8),
        max_primes=run_int("max_primes", 5 * 10**6),
    )
    if cfg.x_max < 2:
        raise ConfigError("X must be at least 2")
    if cfg.prime_cutoff > cfg.max_primes:
        raise ConfigError(
            f"prime_cutoff {cfg.prime_cutoff} exceeds max_primes {cfg.max_primes}"
        )
    return cfg
