"""Line-oriented ``key = value`` run configuration.

Physical quantities carry their unit in the key name (``tau_sp_s``,
``omega_over_q_per_s``). Unknown keys are rejected. Keys whose default is
``auto`` are derived from the others when the configuration is resolved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .dynamics import LaserParams, NoiseParams
from .experiments import SWEEP_AXES, ExperimentSpec
from .files import parse_problem_file
from .ising import IsingProblem
from .locking import LockingParams
from .standing_wave import CavityGeometry, resonant_length


class ConfigError(ValueError):
    pass


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _choice(*options: str) -> Callable[[str], str]:
    def parse(s: str) -> str:
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return s
    return parse


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(","))


def _str(s: str) -> str:
    return s


# key -> (default, parser); "auto" defaults are resolved from other keys
DEFAULTS: dict[str, tuple[str, Callable]] = {
    # slave laser and coupling
    "omega_over_q_per_s": ("1e12", float),
    "external_decay_per_s": ("auto", float),
    "tau_sp_s": ("1e-9", float),
    "beta": ("1e-4", float),
    "zeta": ("0.005", float),
    "eta": ("0.04", float),
    "alpha": ("0", float),
    "pump_rate_per_s": ("auto", float),
    "master_photon_number": ("auto", float),
    "self_detuning_rad_per_s": ("0", _floats),
    # Langevin forces
    "noise_mode": ("langevin", _choice("langevin", "kick", "off")),
    "noise_amplitude_scale": ("1", float),
    "noise_phase_scale": ("1", float),
    "noise_carrier_scale": ("1", float),
    "kick_sigma_rad": ("1e-3", float),
    # integration and ensembles
    "duration_s": ("2e-8", float),
    "dt_s": ("1e-13", float),
    "sample_interval_s": ("1e-11", float),
    "trials": ("100", int),
    "seed": ("0", int),
    "readout_threshold": ("0.5", float),
    "workers": ("1", int),
    "score": ("true", _bool),
    "problem_file": ("", _str),
    "coupling_j01": ("1", float),
    # sweeps (start/stop units follow the axis: none, none, rad, m)
    "sweep_axis": ("none", _choice(*SWEEP_AXES)),
    "sweep_start": ("0", float),
    "sweep_stop": ("0", float),
    "sweep_steps": ("0", int),
    # standing wave
    "path_length_m": ("1.55", float),
    "wavelength_m": ("1.5775e-6", float),
    "pull_factor": ("1", float),
    "mirror_double_pass": ("false", _bool),
    "sw_start_m": ("auto", float),
    "sw_stop_m": ("auto", float),
    "sw_periods": ("2", float),
    "sw_steps": ("100003", int),
    # locking curve
    "lock_bandwidth_hz": ("1.3e9", float),
    "lock_excursion_hz": ("4.5e9", float),
    "lock_points": ("901", int),
    "lock_visibility": ("1", float),
}


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    return str(v)


@dataclass
class RunConfig:
    """Raw string values plus the directory relative paths resolve against."""

    values: dict[str, str] = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def parse(cls, text: str, base_dir: Path | None = None,
              source: str = "<config>") -> "RunConfig":
        cfg = cls(base_dir=base_dir or Path.cwd())
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key in cfg.values:
                raise ConfigError(f"{source}:{lineno}: key {key!r} given twice")
            cfg.set(key, value, where=f"{source}:{lineno}")
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.parse(text, path.parent, str(path))

    def set(self, key: str, value: str, where: str = "--set") -> None:
        if key not in DEFAULTS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if value != "auto" or DEFAULTS[key][0] != "auto":
            try:
                DEFAULTS[key][1](value)
            except ValueError as exc:
                raise ConfigError(f"{where}: bad value for {key}: {exc}") from None
        self.values[key] = value

    def get(self, key: str):
        raw = self.values.get(key, DEFAULTS[key][0])
        if raw == "auto":
            return None
        return DEFAULTS[key][1](raw)

    # -- builders -----------------------------------------------------------

    def laser_params(self) -> LaserParams:
        det = self.get("self_detuning_rad_per_s")
        return LaserParams(
            photon_decay_rate=self.get("omega_over_q_per_s"),
            tau_sp=self.get("tau_sp_s"),
            beta=self.get("beta"),
            zeta=self.get("zeta"),
            eta=self.get("eta"),
            linewidth_factor=self.get("alpha"),
            pump_rate=self.get("pump_rate_per_s"),
            master_photon_number=self.get("master_photon_number"),
            external_decay_rate=self.get("external_decay_per_s"),
            self_detuning=det[0] if len(det) == 1 else det,
        )

    def noise_params(self, seed: int | None = None) -> NoiseParams:
        mode = self.get("noise_mode")
        return NoiseParams(
            enabled=mode != "off",
            mode="langevin" if mode == "off" else mode,
            amplitude_scale=self.get("noise_amplitude_scale"),
            phase_scale=self.get("noise_phase_scale"),
            carrier_scale=self.get("noise_carrier_scale"),
            kick_sigma=self.get("kick_sigma_rad"),
            seed=self.get("seed") if seed is None else seed,
        )

    def problem(self) -> IsingProblem:
        path = self.get("problem_file")
        if path:
            p = Path(path)
            return parse_problem_file(p if p.is_absolute() else self.base_dir / p)
        return IsingProblem(2, {(0, 1): self.get("coupling_j01")})

    def experiment_spec(self) -> ExperimentSpec:
        return ExperimentSpec(
            problem=self.problem(),
            params=self.laser_params(),
            noise=self.noise_params(),
            duration=self.get("duration_s"),
            dt=self.get("dt_s"),
            sample_interval=self.get("sample_interval_s"),
            trials=self.get("trials"),
            readout_threshold=self.get("readout_threshold"),
            master_seed=self.get("seed"),
            score=self.get("score"),
            sweep_axis=self.get("sweep_axis"),
            sweep_start=self.get("sweep_start"),
            sweep_stop=self.get("sweep_stop"),
            sweep_steps=self.get("sweep_steps"),
        )

    def geometry(self) -> CavityGeometry:
        return CavityGeometry(self.get("path_length_m"), self.get("wavelength_m"),
                              self.get("pull_factor"))

    def standing_wave_range(self) -> tuple[float, float, int, bool]:
        """``(start, stop, steps, mirror_double_pass)`` with auto bounds filled in.

        The auto range starts on an even-parity resonance (or zero mirror
        displacement) and spans ``sw_periods`` sawtooth periods.
        """
        g = self.geometry()
        mirror = self.get("mirror_double_pass")
        period = g.wavelength / 4 if mirror else g.period
        start = self.get("sw_start_m")
        if start is None:
            start = 0.0 if mirror else resonant_length(g.path_length, g, parity=0)
        stop = self.get("sw_stop_m")
        if stop is None:
            stop = start + self.get("sw_periods") * period
        return start, stop, self.get("sw_steps"), mirror

    def locking_params(self) -> LockingParams:
        return LockingParams.for_bandwidth(self.get("lock_bandwidth_hz"),
                                           self.get("omega_over_q_per_s"), self.get("alpha"))

    def resolved(self) -> dict[str, str]:
        """Every key with defaults applied and ``auto`` values replaced."""
        out = {k: _fmt_value(self.get(k)) if self.get(k) is not None else "auto"
               for k in DEFAULTS}
        p = self.laser_params()
        out["pump_rate_per_s"] = _fmt_value(p.pump_rate)
        out["master_photon_number"] = _fmt_value(p.master_photon_number)
        out["external_decay_per_s"] = _fmt_value(p.external_decay_rate)
        start, stop, _, _ = self.standing_wave_range()
        out["sw_start_m"] = _fmt_value(start)
        out["sw_stop_m"] = _fmt_value(stop)
        if out["problem_file"]:
            path = Path(out["problem_file"])
            out["problem_file"] = str(path if path.is_absolute() else
                                      (self.base_dir / path).resolve())
        return out

    def dump(self) -> str:
        lines = ["# fully resolved configuration"]
        lines += [f"{k} = {v}" for k, v in self.resolved().items()]
        return "\n".join(lines) + "\n"
