"""Experiment configuration: key=value text format, validation, round-trip."""

from __future__ import annotations

from dataclasses import dataclass, fields

from meiodrive.lattice import FROZEN, TORUS, Lattice
from meiodrive.model import Genotype, RateSet


class ConfigError(Exception):
    """Invalid configuration; message carries the line number when known."""


COMMANDS = ("simulate", "meanfield", "phase-sweep", "coupled", "walk",
            "verify")
INIT_KINDS = ("all", "bernoulli_genes", "half_line_aa", "cube_aa", "single")
GENOTYPE_NAMES = {"aa": Genotype.AA, "ab": Genotype.AB, "bb": Genotype.BB}


@dataclass
class ExperimentConfig:
    """Full description of one experiment run.

    Only the fields relevant to the chosen command are consumed, but every
    present key is validated.  Round-trips losslessly through the text form.
    """

    command: str = "simulate"
    # birth rates
    phi_aa: float = 1.0
    phi_ab: float = 1.0
    phi_ba: float = 1.0
    phi_bb: float = 1.0
    # lattice
    d: int = 1
    sides: tuple = (100,)
    boundary: str = TORUS
    exterior: str = "aa"            # used only with the frozen boundary
    # initial condition
    init: str = "all"
    init_genotype: str = "aa"
    init_p: float = 0.5
    init_halfwidth: int = 0
    init_fill: str = "bb"
    # schedule
    t_end: float = 10.0
    sample_interval: float = 1.0
    replicates: int = 1
    seed: int = 0
    out: str = "."
    snapshots: bool = False
    # mean-field start and integrator step
    u_aa: float = 0.25
    u_ab: float = 0.5
    u_bb: float = 0.25
    step: float = 1e-3
    # phase sweep grid (phi_aa and phi_bb axes; phi_ab/phi_ba held fixed)
    grid_min: float = 0.1
    grid_max: float = 3.0
    grid_steps: int = 50
    # invasion walk
    walk_k: int = 5
    walk_n: int = 1000000

    def rates(self) -> RateSet:
        return RateSet(self.phi_aa, self.phi_ab, self.phi_ba, self.phi_bb)

    def lattice(self) -> Lattice:
        if self.boundary == FROZEN:
            return Lattice(self.sides, FROZEN,
                           GENOTYPE_NAMES[self.exterior])
        return Lattice(self.sides, TORUS)

    def validate(self) -> None:
        def bad(msg):
            raise ConfigError(msg)

        if self.command not in COMMANDS:
            bad(f"unknown command {self.command!r}")
        for key in ("phi_aa", "phi_ab", "phi_ba", "phi_bb", "init_p",
                    "t_end", "sample_interval", "step", "u_aa", "u_ab",
                    "u_bb", "grid_min", "grid_max"):
            if getattr(self, key) < 0:
                bad(f"{key} must be non-negative")
        for key in ("replicates", "grid_steps", "walk_k", "walk_n"):
            if getattr(self, key) < 0:
                bad(f"{key} must be non-negative")
        if self.replicates < 1:
            bad("replicates must be >= 1")
        if self.sample_interval <= 0:
            bad("sample_interval must be positive")
        if self.step <= 0:
            bad("step must be positive")
        if self.d < 1:
            bad("d must be >= 1")
        if len(self.sides) != self.d:
            bad(f"sides has {len(self.sides)} entries but d = {self.d}")
        if any(s < 1 for s in self.sides):
            bad("sides must be positive")
        if self.boundary not in (TORUS, FROZEN):
            bad(f"unknown boundary {self.boundary!r}")
        if self.init not in INIT_KINDS:
            bad(f"unknown initial condition {self.init!r}")
        for key in ("init_genotype", "init_fill", "exterior"):
            if getattr(self, key) not in GENOTYPE_NAMES:
                bad(f"{key} must be one of aa, ab, bb")
        if self.seed < 0 or self.seed >= 1 << 64:
            bad("seed must fit in 64 bits")


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str):
    if key == "sides":
        try:
            return tuple(int(p) for p in raw.split(","))
        except ValueError:
            raise ConfigError(f"malformed sides list {raw!r}")
    ftype = _FIELD_TYPES[key]
    if ftype == "bool":
        low = raw.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ConfigError(f"malformed boolean {raw!r} for {key}")
    if ftype == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"malformed integer {raw!r} for {key}")
    if ftype == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"malformed number {raw!r} for {key}")
    return raw


def parse_config(text: str) -> ExperimentConfig:
    """Parse key=value lines with # comments into a validated config.

    Unknown keys are hard errors so misspellings never fall back to
    defaults silently.  Error messages carry the offending line number.
    """
    cfg = ExperimentConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key=value, got "
                              f"{body!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _parse_value(key, raw))
        except ConfigError as e:
            raise ConfigError(f"line {lineno}: {e}") from None
    try:
        cfg.validate()
    except ConfigError as e:
        raise ConfigError(str(e)) from None
    return cfg


def emit_config(cfg: ExperimentConfig) -> str:
    """Serialize a config so that parse_config(emit_config(c)) == c."""
    lines = []
    for f in fields(ExperimentConfig):
        v = getattr(cfg, f.name)
        if f.name == "sides":
            lines.append(f"sides = {','.join(str(s) for s in v)}")
        elif isinstance(v, bool):
            lines.append(f"{f.name} = {'true' if v else 'false'}")
        elif isinstance(v, float):
            lines.append(f"{f.name} = {v!r}")
        else:
            lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
