"""Run configuration: flat ``key = value`` files plus overrides."""

from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import ValidationError
from .kinetics import TstNormalization
from .model import Convention, NoiseKind, make_noise_model
from .moments import InitialState
from .resolvent import BarrierSpec
from .sim import TimeGrid

__all__ = ["RunConfig", "parse_config_text", "load_config"]


@dataclass(frozen=True)
class RunConfig:
    # defaults reproduce the figure parameters: m = kT = Gamma = eta = omega_b = 1, Omega^2 = 2
    kind: str = "HN"
    gamma_big: float = 1.0
    omega2: float = 2.0
    eta: float = 1.0
    mass: float = 1.0
    kT: float = 1.0
    gamma_ohmic: float = 0.0
    omega_b: float = 1.0
    x0: float = 0.0
    v0: float = 2.0
    t_max: float = 30.0
    dt: float = 0.01
    kernel_convention: str = "fdt-kernel"
    region_convention: str = "symmetric"
    n_traj: int = 10000
    seed: int = 20121
    workers: int = 1
    partition_Q: Optional[float] = None
    planck_h: Optional[float] = None
    barrier_height_VB: Optional[float] = None
    output: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind.parse(self.kind).value)
        if self.n_traj < 2:
            raise ValidationError("n_traj", "must be at least 2")
        if self.workers < 1:
            raise ValidationError("workers", "must be at least 1")
        tst = (self.partition_Q, self.planck_h, self.barrier_height_VB)
        if any(v is not None for v in tst) and any(v is None for v in tst):
            raise ValidationError("partition_Q", "requires planck_h and barrier_height_VB as well")
        # building the derived objects runs their validation
        for name in ("model", "barrier", "grid", "convention", "tst"):
            getattr(self, name)

    @property
    def model(self):
        return make_noise_model(self.kind, self.gamma_big, self.omega2, self.eta, self.mass,
                                self.kT, self.gamma_ohmic)

    @property
    def barrier(self):
        return BarrierSpec(self.omega_b)

    @property
    def state(self):
        return InitialState(self.x0, self.v0)

    @property
    def grid(self):
        return TimeGrid(self.t_max, self.dt)

    @property
    def convention(self):
        return Convention(self.kernel_convention, self.region_convention)

    @property
    def tst(self):
        if self.partition_Q is None:
            return None
        return TstNormalization(self.partition_Q, self.planck_h, self.barrier_height_VB, self.kT)

    def items(self):
        return [(k, v) for k, v in asdict(self).items() if k != "output"]

    def update(self, **changes):
        return replace(self, **coerce(changes))


_FIELDS = {f.name: f for f in fields(RunConfig)}
_INT = {"n_traj", "seed", "workers"}
_STR = {"kind", "kernel_convention", "region_convention", "output"}


def coerce(values):
    """Convert raw strings to field types; reject unknown or empty keys."""
    out = {}
    for key, raw in values.items():
        if key not in _FIELDS:
            raise ValidationError(key, "is not a recognised configuration key")
        if raw is None or (isinstance(raw, str) and raw.strip() == ""):
            raise ValidationError(key, "is missing a value")
        if key in _STR:
            out[key] = str(raw).strip()
            continue
        try:
            out[key] = int(raw) if key in _INT else float(raw)
        except (TypeError, ValueError):
            raise ValidationError(key, f"has an invalid value {raw!r}") from None
    return out


def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}", "is not of the form 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return coerce(values)


def load_config(path=None, overrides=None):
    base = {}
    if path is not None:
        with open(path) as fh:
            base = parse_config_text(fh.read())
    base.update(coerce(overrides or {}))
    return RunConfig(**base)
