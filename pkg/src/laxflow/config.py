"""Run configuration: a JSON document plus command-line overrides.

Schema (every section optional, shown with defaults):

    {
      "model":     {"n": 2, "g2": 1.0, "g1sq": 0.0, "g2sq_single": 0.0,
                    "epsilon": 0, "omega": 1.0},
      "initial":   {"q": [...], "p": [...], "t": 0.0}
                   or {"generator": {"seed": null, "min_gap": 0.1,
                                     "momentum_scale": 1.0}},
      "run":       {"t_end": null, "dt": 0.001, "scheme": "yoshida4",
                    "record_every": 10, "kmax": null, "seed": 0},
      "output":    {"dir": ".", "format": "both"}
    }

A null t_end means one trap period (2 pi / omega) when omega > 0 and
10.0 otherwise; a null kmax means the particle count n.  The generator
seed defaults to the run seed, and the same seed always reproduces the
same initial state bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .dynamics import SCHEMES
from .errors import ConfigError, DimensionMismatch, NonFinite
from .model import ModelParams, PhaseState, random_state

__all__ = ["GeneratorSpec", "RunSettings", "OutputSettings", "RunConfig", "load_config"]

FORMATS = ("csv", "json", "both")


@dataclass
class GeneratorSpec:
    seed: int | None = None
    min_gap: float = 0.1
    momentum_scale: float = 1.0


@dataclass
class RunSettings:
    t_end: float | None = None
    dt: float = 1e-3
    scheme: str = "yoshida4"
    record_every: int = 10
    kmax: int | None = None
    seed: int = 0


@dataclass
class OutputSettings:
    dir: str = "."
    format: str = "both"


@dataclass
class RunConfig:
    model: ModelParams
    initial: PhaseState | None = None
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    run: RunSettings = field(default_factory=RunSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def resolve_t_end(self) -> float:
        if self.run.t_end is not None:
            return self.run.t_end
        if self.model.omega > 0.0:
            return 2.0 * math.pi / self.model.omega
        return 10.0

    def resolve_kmax(self) -> int:
        return self.run.kmax if self.run.kmax is not None else self.model.n

    def resolve_initial(self) -> PhaseState:
        if self.initial is not None:
            return self.initial
        seed = self.generator.seed if self.generator.seed is not None else self.run.seed
        return random_state(self.model, seed, min_gap=self.generator.min_gap,
                            momentum_scale=self.generator.momentum_scale)


def _section(doc: dict, name: str) -> dict:
    part = doc.get(name, {})
    if not isinstance(part, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    return dict(part)


def _build(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(doc) - {"model", "initial", "run", "output"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    model_doc = {"n": 2, "g2": 1.0, "omega": 1.0}
    model_doc.update(_section(doc, "model"))
    try:
        model = ModelParams.from_json(model_doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"bad model section: {exc}") from exc

    initial = None
    generator = GeneratorSpec()
    init_doc = _section(doc, "initial")
    if "generator" in init_doc:
        gen = init_doc["generator"] or {}
        try:
            generator = GeneratorSpec(
                seed=None if gen.get("seed") is None else int(gen["seed"]),
                min_gap=float(gen.get("min_gap", 0.1)),
                momentum_scale=float(gen.get("momentum_scale", 1.0)))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad generator spec: {exc}") from exc
    elif init_doc:
        try:
            initial = PhaseState.from_json(init_doc)
        except (KeyError, ValueError, TypeError, DimensionMismatch, NonFinite) as exc:
            raise ConfigError(f"bad initial state: {exc}") from exc
        if initial.n != model.n:
            raise ConfigError(f"initial state has {initial.n} particles, model has {model.n}")

    run_doc = _section(doc, "run")
    try:
        run = RunSettings(
            t_end=None if run_doc.get("t_end") is None else float(run_doc["t_end"]),
            dt=float(run_doc.get("dt", 1e-3)),
            scheme=str(run_doc.get("scheme", "yoshida4")),
            record_every=int(run_doc.get("record_every", 10)),
            kmax=None if run_doc.get("kmax") is None else int(run_doc["kmax"]),
            seed=int(run_doc.get("seed", 0)))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad run section: {exc}") from exc
    if run.scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {run.scheme!r}; expected one of {SCHEMES}")
    if run.dt <= 0.0:
        raise ConfigError("run.dt must be positive")
    if run.t_end is not None and run.t_end <= 0.0:
        raise ConfigError("run.t_end must be positive")
    if run.record_every < 1:
        raise ConfigError("run.record_every must be >= 1")

    out_doc = _section(doc, "output")
    output = OutputSettings(dir=str(out_doc.get("dir", ".")),
                            format=str(out_doc.get("format", "both")))
    if output.format not in FORMATS:
        raise ConfigError(f"unknown format {output.format!r}; expected one of {FORMATS}")

    return RunConfig(model=model, initial=initial, generator=generator,
                     run=run, output=output)


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Read a JSON config file and apply flat command-line overrides.

    Override keys: n, g2, omega (model), t_end, dt, scheme, kmax, seed
    (run), out (output dir), format.  Raises :class:`ConfigError` on any
    malformed input.
    """
    doc: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path!r}: {exc}") from exc
    if overrides:
        doc = json.loads(json.dumps(doc))  # deep copy, keeps plain types
        model = doc.setdefault("model", {})
        run = doc.setdefault("run", {})
        output = doc.setdefault("output", {})
        for key, target, name in (("n", model, "n"), ("g2", model, "g2"),
                                  ("omega", model, "omega"),
                                  ("t_end", run, "t_end"), ("dt", run, "dt"),
                                  ("scheme", run, "scheme"), ("kmax", run, "kmax"),
                                  ("seed", run, "seed"),
                                  ("out", output, "dir"), ("format", output, "format")):
            if overrides.get(key) is not None:
                target[name] = overrides[key]
    return _build(doc)


def config_from_document(doc: dict) -> RunConfig:
    """Build a RunConfig from an already-parsed document."""
    return _build(doc)
