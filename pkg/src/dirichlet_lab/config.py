"""Run configuration: a small sectioned key=value text format.

One section, ``[run]``.  Comments start with ``#``.  Values are the text
after the first ``=``; list-valued keys split that text on whitespace.
Repeatable keys (``trajectory``, and experiment options like ``Y`` and
``t``) appear once per line in file order.  Declaration strings for
measures, maps, and trajectory families are stored verbatim so a parsed
config serializes back to the same declarations; dedicated parsers below
turn them into library objects on demand.

Measure/map/trajectory declaration grammars:

    measure    = lebesgue d=<dim> box=<lo,hi[,lo,hi...]>
               | ifs ratios=<r1,...> trans=<b1,...> [probs=<p1,...>]
    map        = veronese n=<deg>
               | poly d=<dim> n=<coords> f1=<poly> ... f<coords>=<poly>
    trajectory = ray central t=<start>:<step>:<count>
               | ray r=<r1,...> s=<s1,...> t=<start>:<step>:<count>
               | explicit <t1> <t2> ... <tk>        (repeatable)

Polynomials are '+'-joined terms; a term is an optional rational
coefficient and '*'-joined factors ``x<i>`` or ``x<i>^<e>``, e.g.
``f2=x1^2-2*x1+1`` or ``f1=1/3*x2``.  No spaces inside a declaration
token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParameterError
from .flows import (
    CentralRay,
    ExplicitList,
    LinearFormSystem,
    TrajectoryFamily,
    WeightedRay,
    WeightVector,
)
from .measures import LebesgueBox, MapSpec, MeasureSpec, SelfSimilarIFS

# keys with a single scalar value
_SCALAR_KEYS = ("experiment", "seed", "output", "samples", "margin",
                "measure", "map")
# keys whose value is a whitespace list parsed later
_LIST_KEYS = ("eps",)
# repeatable keys, kept one line per occurrence
_REPEAT_KEYS = ("trajectory",)
# per-experiment knobs, stored verbatim as (key, value) pairs in order
OPTION_KEYS = (
    "m", "n", "Y", "t", "r", "s", "u", "y0", "flow_time", "interval",
    "ball_center", "ball_radius", "alpha", "coord", "depth", "q_max",
    "systems", "ball_count", "center_fraction", "radius_range",
    "horizon", "weak_q", "max_n",
)
_REPEAT_OPTIONS = ("Y", "t")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, round-trippable through to_text/parse."""

    experiment: str
    seed: int = 0
    output: str | None = None
    eps: tuple[float, ...] = ()
    samples: int | None = None
    margin: float | None = None
    measure: str | None = None
    map: str | None = None
    trajectory: tuple[str, ...] = ()
    options: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.experiment:
            raise ParameterError("experiment name must be nonempty")
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "trajectory", tuple(self.trajectory))
        object.__setattr__(self, "options", tuple(
            (str(k), str(v)) for k, v in self.options
        ))
        for key, _ in self.options:
            if key not in OPTION_KEYS:
                raise ParameterError("unknown option key %r" % key)
        seen = set()
        for key, _ in self.options:
            if key in seen and key not in _REPEAT_OPTIONS:
                raise ParameterError("option %r given more than once" % key)
            seen.add(key)

    # -- access helpers ---------------------------------------------------

    def option(self, key: str, default: str | None = None) -> str | None:
        if key not in OPTION_KEYS:
            raise ParameterError("unknown option key %r" % key)
        for k, v in self.options:
            if k == key:
                return v
        return default

    def option_list(self, key: str) -> tuple[str, ...]:
        return tuple(v for k, v in self.options if k == key)

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = ["[run]", "experiment = %s" % self.experiment,
                 "seed = %d" % self.seed]
        if self.output is not None:
            lines.append("output = %s" % self.output)
        if self.eps:
            lines.append("eps = %s" % " ".join(repr(e) for e in self.eps))
        if self.samples is not None:
            lines.append("samples = %d" % self.samples)
        if self.margin is not None:
            lines.append("margin = %r" % self.margin)
        if self.measure is not None:
            lines.append("measure = %s" % self.measure)
        if self.map is not None:
            lines.append("map = %s" % self.map)
        for record in self.trajectory:
            lines.append("trajectory = %s" % record)
        for key, value in self.options:
            lines.append("%s = %s" % (key, value))
        return "\n".join(lines) + "\n"


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_config(text: str) -> RunConfig:
    """Parse the sectioned key=value format; unknown keys are errors."""
    scalars: dict = {}
    repeats: dict = {"trajectory": []}
    options: list = []
    in_run = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name != "run":
                raise ParameterError("line %d: unknown section [%s]" % (lineno, name))
            in_run = True
            continue
        if "=" not in line:
            raise ParameterError("line %d: expected key = value" % lineno)
        if not in_run:
            raise ParameterError("line %d: key before [run] section" % lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _REPEAT_KEYS:
            repeats[key].append(value)
        elif key in _SCALAR_KEYS or key in _LIST_KEYS:
            if key in scalars:
                raise ParameterError("line %d: duplicate key %r" % (lineno, key))
            scalars[key] = value
        elif key in OPTION_KEYS:
            if key not in _REPEAT_OPTIONS and any(k == key for k, _ in options):
                raise ParameterError("line %d: duplicate key %r" % (lineno, key))
            options.append((key, value))
        else:
            raise ParameterError("line %d: unknown config key %r" % (lineno, key))
    if "experiment" not in scalars:
        raise ParameterError("config is missing the experiment key")
    try:
        seed = int(scalars.get("seed", "0"))
    except ValueError:
        raise ParameterError("seed must be an integer, got %r" % scalars["seed"])
    eps: tuple = ()
    if "eps" in scalars:
        try:
            eps = tuple(float(tok) for tok in scalars["eps"].split())
        except ValueError:
            raise ParameterError("eps must be numbers, got %r" % scalars["eps"])
    samples = None
    if "samples" in scalars:
        try:
            samples = int(scalars["samples"])
        except ValueError:
            raise ParameterError("samples must be an integer, got %r" % scalars["samples"])
    margin = None
    if "margin" in scalars:
        try:
            margin = float(scalars["margin"])
        except ValueError:
            raise ParameterError("margin must be a number, got %r" % scalars["margin"])
    return RunConfig(
        experiment=scalars["experiment"],
        seed=seed,
        output=scalars.get("output"),
        eps=eps,
        samples=samples,
        margin=margin,
        measure=scalars.get("measure"),
        map=scalars.get("map"),
        trajectory=tuple(repeats["trajectory"]),
        options=tuple(options),
    )


# ---------------------------------------------------------------------------
# declaration parsers
# ---------------------------------------------------------------------------


def _kv_tokens(tokens, context: str) -> dict:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParameterError("%s: expected key=value, got %r" % (context, tok))
        key, _, value = tok.partition("=")
        if key in out:
            raise ParameterError("%s: duplicate %r" % (context, key))
        out[key] = value
    return out


def _num_list(text: str, context: str) -> tuple:
    try:
        return tuple(float(Fraction(tok)) for tok in text.split(",") if tok != "")
    except (ValueError, ZeroDivisionError):
        raise ParameterError("%s: bad number list %r" % (context, text))


def parse_measure(decl: str) -> MeasureSpec:
    tokens = decl.split()
    if not tokens:
        raise ParameterError("empty measure declaration")
    kind, rest = tokens[0], tokens[1:]
    if kind == "lebesgue":
        kv = _kv_tokens(rest, "measure lebesgue")
        if set(kv) != {"d", "box"}:
            raise ParameterError("measure lebesgue takes exactly d= and box=")
        try:
            d = int(kv["d"])
        except ValueError:
            raise ParameterError("measure lebesgue: d must be an integer")
        nums = _num_list(kv["box"], "measure lebesgue")
        if len(nums) != 2 * d:
            raise ParameterError(
                "measure lebesgue: box needs %d numbers (lo,hi per axis), got %d"
                % (2 * d, len(nums)))
        return LebesgueBox(nums[0::2], nums[1::2])
    if kind == "ifs":
        kv = _kv_tokens(rest, "measure ifs")
        if not {"ratios", "trans"} <= set(kv) or not set(kv) <= {"ratios", "trans", "probs"}:
            raise ParameterError("measure ifs takes ratios=, trans= and optional probs=")
        ratios = _num_list(kv["ratios"], "measure ifs")
        trans = _num_list(kv["trans"], "measure ifs")
        if "probs" in kv:
            probs = _num_list(kv["probs"], "measure ifs")
        else:
            probs = tuple(1.0 / len(ratios) for _ in ratios) if ratios else ()
        return SelfSimilarIFS(ratios, trans, probs)
    raise ParameterError("unknown measure kind %r" % kind)


_FACTOR_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def _parse_poly(text: str, dim: int, context: str) -> tuple:
    """'+'-joined terms -> ((coeff, exponents), ...) for MapSpec."""
    terms = []
    # '-' starts a new negative term unless an explicit '+' already does
    normalized = re.sub(r"(?<=[^+])-", "+-", text)
    for pos, chunk in enumerate(normalized.split("+")):
        if chunk == "":
            if pos == 0:
                continue  # leading sign leaves an empty first chunk
            raise ParameterError("%s: dangling '+' in %r" % (context, text))
        negative = chunk.startswith("-")
        if negative:
            chunk = chunk[1:]
        if chunk == "":
            raise ParameterError("%s: dangling sign in %r" % (context, text))
        coeff = Fraction(-1 if negative else 1)
        exponents = [0] * dim
        for factor in chunk.split("*"):
            match = _FACTOR_RE.match(factor)
            if match:
                i = int(match.group(1))
                if not 1 <= i <= dim:
                    raise ParameterError(
                        "%s: variable x%d out of range for d=%d" % (context, i, dim))
                exponents[i - 1] += int(match.group(2) or 1)
            else:
                try:
                    coeff *= Fraction(factor)
                except (ValueError, ZeroDivisionError):
                    raise ParameterError("%s: bad factor %r" % (context, factor))
        terms.append((coeff, tuple(exponents)))
    if not terms:
        raise ParameterError("%s: empty polynomial" % context)
    return tuple(terms)


def parse_map(decl: str) -> MapSpec:
    tokens = decl.split()
    if not tokens:
        raise ParameterError("empty map declaration")
    kind, rest = tokens[0], tokens[1:]
    kv = _kv_tokens(rest, "map %s" % kind)
    if kind == "veronese":
        if set(kv) != {"n"}:
            raise ParameterError("map veronese takes exactly n=")
        try:
            return MapSpec.veronese(int(kv["n"]))
        except ValueError:
            raise ParameterError("map veronese: n must be an integer")
    if kind == "poly":
        if not {"d", "n"} <= set(kv):
            raise ParameterError("map poly needs d= and n=")
        try:
            d, n = int(kv["d"]), int(kv["n"])
        except ValueError:
            raise ParameterError("map poly: d and n must be integers")
        expected = {"d", "n"} | {"f%d" % (i + 1) for i in range(n)}
        if set(kv) != expected:
            raise ParameterError(
                "map poly d=%d n=%d takes exactly keys %s" % (d, n, sorted(expected)))
        coords = tuple(
            _parse_poly(kv["f%d" % (i + 1)], d, "map poly f%d" % (i + 1))
            for i in range(n)
        )
        return MapSpec(d, n, coords)
    raise ParameterError("unknown map kind %r" % kind)


_RAY_T_RE = re.compile(r"^([^:]+):([^:]+):([^:]+)$")


def _ray_schedule(text: str) -> tuple:
    match = _RAY_T_RE.match(text)
    if not match:
        raise ParameterError("ray schedule must be t=<start>:<step>:<count>, got %r" % text)
    try:
        start = float(match.group(1))
        step = float(match.group(2))
        count = int(match.group(3))
    except ValueError:
        raise ParameterError("bad ray schedule %r" % text)
    return start, step, count


def parse_trajectory(records, m: int, n: int) -> TrajectoryFamily:
    """Records (one per line) -> a single family.

    Either exactly one ray record, or any number of explicit records
    forming one explicit list; mixing the two is an error.
    """
    records = [r.strip() for r in records if r.strip()]
    if not records:
        raise ParameterError("no trajectory records given")
    kinds = [r.split()[0] for r in records]
    if kinds.count("ray") > 1 or ("ray" in kinds and "explicit" in kinds):
        raise ParameterError("trajectory takes one ray or a list of explicit records")
    if kinds[0] == "ray":
        tokens = records[0].split()[1:]
        if tokens and tokens[0] == "central":
            kv = _kv_tokens(tokens[1:], "ray central")
            if set(kv) != {"t"}:
                raise ParameterError("ray central takes exactly t=start:step:count")
            start, step, count = _ray_schedule(kv["t"])
            return CentralRay(step=step, count=count, start=start)
        kv = _kv_tokens(tokens, "ray")
        if set(kv) != {"r", "s", "t"}:
            raise ParameterError("weighted ray takes exactly r=, s=, t=")
        start, step, count = _ray_schedule(kv["t"])
        return WeightedRay(r=_num_list(kv["r"], "ray r"),
                           s=_num_list(kv["s"], "ray s"),
                           step=step, count=count, start=start)
    items = []
    for rec in records:
        tokens = rec.split()
        if tokens[0] != "explicit":
            raise ParameterError("unknown trajectory record %r" % rec)
        try:
            values = tuple(float(tok) for tok in tokens[1:])
        except ValueError:
            raise ParameterError("explicit record needs numbers, got %r" % rec)
        if len(values) != m + n:
            raise ParameterError(
                "explicit record needs %d weights for m=%d n=%d, got %d"
                % (m + n, m, n, len(values)))
        items.append(WeightVector(m, n, values))
    return ExplicitList(tuple(items))


def parse_forms(text: str, m: int, n: int) -> LinearFormSystem:
    """Rows ';'-separated, entries ','-separated, rationals allowed."""
    rows = []
    for chunk in text.split(";"):
        try:
            rows.append(tuple(Fraction(tok) for tok in chunk.split(",") if tok != ""))
        except (ValueError, ZeroDivisionError):
            raise ParameterError("bad Y row %r" % chunk)
    if len(rows) != m or any(len(r) != n for r in rows):
        raise ParameterError("Y must be %d row(s) of %d entrie(s)" % (m, n))
    return LinearFormSystem.from_exact(rows)


def parse_weight_vector(text: str, m: int, n: int) -> WeightVector:
    """Comma or whitespace separated m+n weights."""
    toks = text.replace(",", " ").split()
    try:
        values = tuple(float(tok) for tok in toks)
    except ValueError:
        raise ParameterError("bad weight vector %r" % text)
    if len(values) != m + n:
        raise ParameterError("weight vector needs %d entries, got %d"
                             % (m + n, len(values)))
    return WeightVector(m, n, values)
