"""Line-oriented run configuration: parse, validate, emit.

Format: "[section]" headers, "key = value" lines, '#' comments, UTF-8.
Sections are [problem], [weight1], [weight2], [nonlinearity], [numerics],
[output] and [sweep].  ``parse_config`` fills defaults and validates, so a
``RunConfig`` is always complete; ``emit_config`` writes the normalized
form back out and ``parse_config(emit_config(cfg)) == cfg``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ParseError, ValidationError
from .grids import DEFAULT_GRID_POINTS, Geometric, RadialGrid, make_grid
from .model import (
    Constant,
    NonlinearityPair,
    Power,
    PowerDecay,
    ProblemSpec,
    power_pair,
)
from .transforms import TailPolicy

__all__ = [
    "WeightConfig",
    "NonlinearityConfig",
    "RunConfig",
    "parse_config",
    "emit_config",
]

_SECTIONS = (
    "problem",
    "weight1",
    "weight2",
    "nonlinearity",
    "numerics",
    "output",
    "sweep",
)
_SWEEPABLE = ("problem", "weight1", "weight2", "nonlinearity", "numerics")


@dataclass(frozen=True)
class WeightConfig:
    """One weight block: a family name plus its parameters.

    Only closed-form families are reachable from a config file; tabulated
    weights are a library-level construction.
    """

    family: str
    c: float = 1.0
    sigma: float = 0.0
    k: float = 0.0

    def build(self):
        if self.family == "constant":
            return Constant(self.c)
        if self.family == "power_decay":
            return PowerDecay(self.c, self.sigma)
        if self.family == "power":
            return Power(self.c, self.k)
        raise ValidationError("family", f"unknown weight family {self.family!r}")


@dataclass(frozen=True)
class NonlinearityConfig:
    family: str
    alpha: float
    beta: float
    cbar1: float = 1.0
    cbar2: float = 1.0

    def build(self) -> NonlinearityPair:
        if self.family != "power_pair":
            raise ValidationError(
                "nonlinearity.family", f"unknown family {self.family!r}"
            )
        pair = power_pair(self.alpha, self.beta)
        if self.cbar1 != 1.0 or self.cbar2 != 1.0:
            pair = dataclasses.replace(pair, cbar1=self.cbar1, cbar2=self.cbar2)
        return pair


@dataclass(frozen=True)
class RunConfig:
    # problem
    n_dim: int
    a1: float
    a2: float
    eps: float
    m1: float
    m2: float
    weight1: WeightConfig
    weight2: WeightConfig
    nonlinearity: NonlinearityConfig
    # numerics
    r_max: float
    grid_points: int
    grading: str
    ratio: float
    tol: float
    max_iter: int
    tail_radius_start: float
    tail_doublings: int
    # output
    csv_path: str
    report_path: str
    figures: bool
    # sweep: ((section.key, (token, ...)), ...) in listed order
    sweep: tuple = field(default=())

    def problem_spec(self) -> ProblemSpec:
        return ProblemSpec(
            n_dim=self.n_dim,
            a1=self.a1,
            a2=self.a2,
            weights=(self.weight1.build(), self.weight2.build()),
            nonlin=self.nonlinearity.build(),
            eps=self.eps,
            m1=self.m1,
            m2=self.m2,
        )

    def build_grid(self) -> RadialGrid:
        grading = Geometric(self.ratio) if self.grading == "geometric" else None
        return make_grid(self.r_max, self.grid_points, grading)

    def tail_policy(self) -> TailPolicy:
        return TailPolicy(r0=self.tail_radius_start, doublings=self.tail_doublings)


# --------------------------------------------------------------------------
# raw text -> section/key/value map


def _parse_raw(text: str) -> dict:
    raw: dict[str, dict[str, str]] = {}
    section: Optional[str] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ParseError(lineno, "unterminated section header")
            name = body[1:-1].strip()
            if name not in _SECTIONS:
                raise ParseError(lineno, f"unknown section [{name}]")
            if name in raw:
                raise ParseError(lineno, f"duplicate section [{name}]")
            raw[name] = {}
            section = name
            continue
        if "=" not in body:
            raise ParseError(lineno, f"expected 'key = value', got {body!r}")
        if section is None:
            raise ParseError(lineno, "key/value line before any [section] header")
        key, value = body.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise ParseError(lineno, "empty key")
        if key in raw[section]:
            raise ParseError(lineno, f"duplicate key {key!r} in [{section}]")
        raw[section][key] = value
    return raw


def _apply_overrides(raw: dict, overrides: Sequence[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ValidationError("--set", f"{item!r} is not section.key=value")
        target, value = item.split("=", 1)
        if "." not in target:
            raise ValidationError("--set", f"{target!r} lacks a section prefix")
        section, key = target.split(".", 1)
        section, key = section.strip(), key.strip()
        if section not in _SECTIONS:
            raise ValidationError("--set", f"unknown section {section!r}")
        raw.setdefault(section, {})[key] = value.strip()
    return raw


# --------------------------------------------------------------------------
# typed extraction


class _Block:
    """One section's keys with typed, validated take() helpers."""

    def __init__(self, name: str, data: dict):
        self.name = name
        self.data = dict(data)

    def _field(self, key: str) -> str:
        return f"{self.name}.{key}"

    def take_str(self, key: str, default: Optional[str] = None) -> str:
        if key not in self.data:
            if default is None:
                raise ValidationError(self._field(key), "required key is missing")
            return default
        return self.data.pop(key)

    def take_float(
        self,
        key: str,
        default: Optional[float] = None,
        *,
        positive: bool = False,
        nonnegative: bool = False,
        at_least: Optional[float] = None,
    ) -> float:
        if key not in self.data:
            if default is None:
                raise ValidationError(self._field(key), "required key is missing")
            value = default
        else:
            token = self.data.pop(key)
            try:
                value = float(token)
            except ValueError:
                raise ValidationError(
                    self._field(key), f"not a number: {token!r}"
                ) from None
        if value != value or value in (float("inf"), float("-inf")):
            raise ValidationError(self._field(key), "must be finite")
        if positive and not value > 0:
            raise ValidationError(self._field(key), f"must be > 0, got {value}")
        if nonnegative and value < 0:
            raise ValidationError(self._field(key), f"must be >= 0, got {value}")
        if at_least is not None and value < at_least:
            raise ValidationError(
                self._field(key), f"must be >= {at_least:g}, got {value}"
            )
        return value

    def take_int(
        self, key: str, default: Optional[int] = None, *, at_least: int = 1
    ) -> int:
        if key not in self.data:
            if default is None:
                raise ValidationError(self._field(key), "required key is missing")
            return default
        token = self.data.pop(key)
        try:
            value = int(token)
        except ValueError:
            raise ValidationError(
                self._field(key), f"not an integer: {token!r}"
            ) from None
        if value < at_least:
            raise ValidationError(
                self._field(key), f"must be >= {at_least}, got {value}"
            )
        return value

    def take_bool(self, key: str, default: bool) -> bool:
        if key not in self.data:
            return default
        token = self.data.pop(key).lower()
        if token in ("on", "true", "yes", "1"):
            return True
        if token in ("off", "false", "no", "0"):
            return False
        raise ValidationError(self._field(key), f"expected on/off, got {token!r}")

    def take_choice(
        self, key: str, choices: tuple, default: Optional[str] = None
    ) -> str:
        value = self.take_str(key, default)
        if value not in choices:
            raise ValidationError(
                self._field(key), f"expected one of {choices}, got {value!r}"
            )
        return value

    def reject_leftovers(self):
        for key in self.data:
            raise ValidationError(self._field(key), "unknown key")


def _weight_block(block: _Block) -> WeightConfig:
    family = block.take_choice("family", ("constant", "power_decay", "power"))
    c = block.take_float("c", 1.0, nonnegative=True)
    sigma = 0.0
    k = 0.0
    if family == "power_decay":
        sigma = block.take_float("sigma", nonnegative=True)
    elif family == "power":
        k = block.take_float("k", nonnegative=True)
    block.reject_leftovers()
    return WeightConfig(family=family, c=c, sigma=sigma, k=k)


def _sweep_block(block: _Block) -> tuple:
    entries = []
    for target, value in block.data.items():
        if "." not in target:
            raise ValidationError(
                f"sweep.{target}", "sweep keys must look like section.key"
            )
        section = target.split(".", 1)[0]
        if section not in _SWEEPABLE:
            raise ValidationError(
                f"sweep.{target}", f"section {section!r} cannot be swept"
            )
        tokens = tuple(t.strip() for t in value.split(",") if t.strip())
        if not tokens:
            raise ValidationError(f"sweep.{target}", "empty value list")
        entries.append((target, tokens))
    return tuple(entries)


def parse_config(text: str, overrides: Sequence[str] = ()) -> RunConfig:
    """Parse and validate; --set style ``overrides`` win over file keys."""
    raw = _apply_overrides(_parse_raw(text), overrides)
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        # _parse_raw already refuses unknown sections; overrides cannot add
        # them either, so this is purely defensive.
        raise ValidationError(sorted(unknown)[0], "unknown section")

    problem = _Block("problem", raw.get("problem", {}))
    n_dim = problem.take_int("n_dim", at_least=3)
    a1 = problem.take_float("a1", positive=True)
    a2 = problem.take_float("a2", positive=True)
    eps = problem.take_float("eps", 0.5, positive=True)
    m1 = problem.take_float("m1", max(1.0, 1.0 / a1), at_least=max(1.0, 1.0 / a1))
    m2 = problem.take_float("m2", max(1.0, 1.0 / a2), at_least=max(1.0, 1.0 / a2))
    problem.reject_leftovers()

    weight1 = _weight_block(_Block("weight1", raw.get("weight1", {})))
    weight2 = _weight_block(_Block("weight2", raw.get("weight2", {})))

    nl = _Block("nonlinearity", raw.get("nonlinearity", {}))
    nl_family = nl.take_choice("family", ("power_pair",))
    alpha = nl.take_float("alpha", positive=True)
    beta = nl.take_float("beta", positive=True)
    cbar1 = nl.take_float("cbar1", 1.0, at_least=1.0)
    cbar2 = nl.take_float("cbar2", 1.0, at_least=1.0)
    nl.reject_leftovers()

    num = _Block("numerics", raw.get("numerics", {}))
    r_max = num.take_float("r_max", positive=True)
    grid_points = num.take_int("grid_points", DEFAULT_GRID_POINTS, at_least=16)
    grading = num.take_choice("grading", ("uniform", "geometric"), "uniform")
    ratio = num.take_float("ratio", 1.05)
    if not (1.0 < ratio <= 1.2):
        raise ValidationError("numerics.ratio", f"must be in (1, 1.2], got {ratio}")
    tol = num.take_float("tol", 1e-10, positive=True)
    max_iter = num.take_int("max_iter", 200, at_least=1)
    tail_radius_start = num.take_float(
        "tail_radius_start", max(r_max, 1.0), positive=True
    )
    tail_doublings = num.take_int("tail_doublings", 24, at_least=2)
    num.reject_leftovers()

    out = _Block("output", raw.get("output", {}))
    csv_path = out.take_str("csv_path", "solution.csv")
    report_path = out.take_str("report_path", "report.txt")
    figures = out.take_bool("figures", True)
    out.reject_leftovers()

    sweep = _sweep_block(_Block("sweep", raw.get("sweep", {})))

    cfg = RunConfig(
        n_dim=n_dim,
        a1=a1,
        a2=a2,
        eps=eps,
        m1=m1,
        m2=m2,
        weight1=weight1,
        weight2=weight2,
        nonlinearity=NonlinearityConfig(nl_family, alpha, beta, cbar1, cbar2),
        r_max=r_max,
        grid_points=grid_points,
        grading=grading,
        ratio=ratio,
        tol=tol,
        max_iter=max_iter,
        tail_radius_start=tail_radius_start,
        tail_doublings=tail_doublings,
        csv_path=csv_path,
        report_path=report_path,
        figures=figures,
        sweep=sweep,
    )
    # construct the model objects once so family/parameter mistakes surface
    # at parse time, not mid-pipeline
    try:
        cfg.problem_spec()
    except ValidationError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise ValidationError("problem", str(exc)) from exc
    return cfg


# --------------------------------------------------------------------------
# emission


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "on" if x else "off"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_config(cfg: RunConfig) -> str:
    """Normalized text form; parse_config(emit_config(cfg)) == cfg."""
    lines = []

    def sec(name: str, pairs):
        lines.append(f"[{name}]")
        for key, value in pairs:
            lines.append(f"{key} = {_fmt(value)}")
        lines.append("")

    sec(
        "problem",
        [
            ("n_dim", cfg.n_dim),
            ("a1", cfg.a1),
            ("a2", cfg.a2),
            ("eps", cfg.eps),
            ("m1", cfg.m1),
            ("m2", cfg.m2),
        ],
    )
    for name, w in (("weight1", cfg.weight1), ("weight2", cfg.weight2)):
        pairs = [("family", w.family), ("c", w.c)]
        if w.family == "power_decay":
            pairs.append(("sigma", w.sigma))
        elif w.family == "power":
            pairs.append(("k", w.k))
        sec(name, pairs)
    sec(
        "nonlinearity",
        [
            ("family", cfg.nonlinearity.family),
            ("alpha", cfg.nonlinearity.alpha),
            ("beta", cfg.nonlinearity.beta),
            ("cbar1", cfg.nonlinearity.cbar1),
            ("cbar2", cfg.nonlinearity.cbar2),
        ],
    )
    sec(
        "numerics",
        [
            ("r_max", cfg.r_max),
            ("grid_points", cfg.grid_points),
            ("grading", cfg.grading),
            ("ratio", cfg.ratio),
            ("tol", cfg.tol),
            ("max_iter", cfg.max_iter),
            ("tail_radius_start", cfg.tail_radius_start),
            ("tail_doublings", cfg.tail_doublings),
        ],
    )
    sec(
        "output",
        [
            ("csv_path", cfg.csv_path),
            ("report_path", cfg.report_path),
            ("figures", cfg.figures),
        ],
    )
    if cfg.sweep:
        sec("sweep", [(target, ", ".join(tokens)) for target, tokens in cfg.sweep])
    return "\n".join(lines)
