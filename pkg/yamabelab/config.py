"""
Run configuration: INI files read with configparser, environment defaults from
a ``.env`` file, and a ``RunConfig`` dataclass that round-trips through both.
"""

import ast
import configparser
import io
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

from dotenv import load_dotenv

from yamabelab.errors import ConfigError

logger = logging.getLogger(__name__)

# Constants
DEFAULT_CONFIG = os.path.join(os.path.dirname(__file__), "config.ini")
DEFAULT_ENV_FILE = ".env"
ENV_OUTPUT_DIR = "YAMABELAB_OUTPUT_DIR"
ENV_WORKERS = "YAMABELAB_WORKERS"
ENV_CONFIG = "YAMABELAB_CONFIG"

GAMMA_MODES = ("calibrated", "closed_form", "explicit")

# section -> ordered (key, attribute, parser) triples
SCHEMA = {
    "problem": [
        ("n", "n", int),
        ("s", "s", float),
        ("gamma_mode", "gamma_mode", str),
        ("gamma_value", "gamma_value", float),
    ],
    "grid": [
        ("h", "h", float),
        ("m_list", "m_list", "list"),
        ("morse_m_list", "morse_m_list", "list"),
        ("nodes_per_window", "nodes_per_window", int),
    ],
    "solver": [
        ("l_start_factor", "l_start_factor", float),
        ("l_end_factor", "l_end_factor", float),
        ("n_modes", "n_modes", int),
        ("steps", "steps", int),
        ("seed_amplitude", "seed_amplitude", float),
    ],
    "verify": [
        ("m", "family_size", int),
        ("horizon_periods", "horizon_periods", int),
        ("h_per_period", "h_per_period", int),
    ],
    "tolerances": [
        ("newton_tol", "newton_tol", float),
        ("quad_epsrel", "quad_epsrel", float),
    ],
    "output": [
        ("directory", "output_dir", str),
        ("profile_samples_per_period", "profile_samples_per_period", int),
    ],
}


def load_environment(env_file: str = DEFAULT_ENV_FILE) -> None:
    """Load ``.env`` from the working directory if present; existing variables win."""
    if os.path.exists(env_file):
        load_dotenv(env_file, override=False)


def get_output_dir_default() -> Optional[str]:
    return os.getenv(ENV_OUTPUT_DIR)


def get_workers_default() -> int:
    value = os.getenv(ENV_WORKERS, "1")
    try:
        return max(1, int(value))
    except ValueError:
        raise ConfigError(f"{ENV_WORKERS} must be an integer, got {value!r}")


def get_config_default() -> Optional[str]:
    return os.getenv(ENV_CONFIG)


@dataclass
class RunConfig:
    """
    Fully resolved configuration of one CLI run.

    Attributes:
        n (int): Ambient dimension.
        s (float): Fractional order in (0, 1).
        gamma_mode (str): One of ``calibrated``, ``closed_form`` or ``explicit``.
        gamma_value (float): Kernel normalization used when gamma_mode is ``explicit``.
        h (float): Grid step of Morse-count windows.
        m_list (list): Half-widths M of the λ₁ sweep.
        morse_m_list (list): Nested half-widths M of the Morse-count sweep.
        nodes_per_window (int): Node count of each λ₁ window (h scales with M).
        l_start_factor, l_end_factor (float): Branch range as multiples of L*.
        n_modes (int): Fourier modes of periodic solutions.
        steps (int): Branch points along the continuation.
        seed_amplitude (float): Cosine seed amplitude of the first branch point.
        family_size (int): Translated-family size m for the Morse lower bound.
        horizon_periods (int): Oscillation search horizon in periods.
        h_per_period (int): Grid nodes per period for verification forms.
        newton_tol (float): Residual target of Newton iterations.
        quad_epsrel (float): Relative tolerance of adaptive quadratures.
        output_dir (str): Output directory.
        profile_samples_per_period (int): Sampling rate of exported profiles.
    """

    n: int = 3
    s: float = 0.5
    gamma_mode: str = "calibrated"
    gamma_value: float = 0.0
    h: float = 0.03125
    m_list: List[float] = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0, 16.0])
    morse_m_list: List[float] = field(default_factory=lambda: [5.0, 10.0, 20.0, 40.0])
    nodes_per_window: int = 1024
    l_start_factor: float = 1.05
    l_end_factor: float = 1.5
    n_modes: int = 64
    steps: int = 5
    seed_amplitude: float = 0.05
    family_size: int = 5
    horizon_periods: int = 3
    h_per_period: int = 128
    newton_tol: float = 1e-8
    quad_epsrel: float = 1e-9
    output_dir: str = "output"
    profile_samples_per_period: int = 256

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.gamma_mode not in GAMMA_MODES:
            raise ConfigError(f"gamma_mode must be one of {', '.join(GAMMA_MODES)}, got {self.gamma_mode!r}")
        if self.gamma_mode == "explicit" and not self.gamma_value > 0:
            raise ConfigError(f"gamma_value must be positive in explicit mode, got {self.gamma_value}")
        if not 0 < self.s < 1:
            raise ConfigError(f"s must lie in (0, 1), got {self.s}")
        if self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n}")
        if self.h <= 0 or self.nodes_per_window < 16:
            raise ConfigError(f"grid needs h > 0 and nodes_per_window >= 16, got h={self.h}, nodes={self.nodes_per_window}")
        if any(m <= 0 for m in self.m_list + self.morse_m_list):
            raise ConfigError("every M in m_list and morse_m_list must be positive")
        if self.steps < 1 or self.n_modes < 1:
            raise ConfigError(f"steps and n_modes must be positive, got {self.steps}, {self.n_modes}")

    @classmethod
    def from_ini(cls, path: Optional[str] = None, base: Optional["RunConfig"] = None) -> "RunConfig":
        """
        Read a configuration file on top of ``base`` (packaged defaults and environment when omitted).

        Raises:
            ConfigError: Unknown section or key, unparsable value, or INI syntax error; the
                message carries the file path and line number.
        """
        if base is None:
            base = cls.defaults()
        if path is None:
            return base
        if not os.path.exists(path):
            raise ConfigError("configuration file not found", path=path)
        with open(path, "r", encoding="utf-8") as reader:
            text = reader.read()

        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text, source=path)
        except configparser.ParsingError as exc:
            lineno = exc.errors[0][0] if exc.errors else None
            raise ConfigError(f"cannot parse line: {exc.errors[0][1] if exc.errors else ''}", path, lineno)
        except configparser.Error as exc:
            raise ConfigError(str(exc).splitlines()[0], path, getattr(exc, "lineno", None))

        values = asdict(base)
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", path, _find_line(text, None, section))
            known = {key: (attr, kind) for key, attr, kind in SCHEMA[section]}
            for key, raw in parser.items(section):
                if key not in known:
                    raise ConfigError(f"unknown key '{key}' in [{section}]", path, _find_line(text, section, key))
                attr, kind = known[key]
                try:
                    values[attr] = _parse_value(raw, kind)
                except (ValueError, SyntaxError) as exc:
                    raise ConfigError(f"bad value for '{key}': {raw!r} ({exc})", path, _find_line(text, section, key))
        try:
            config = cls(**values)
        except ConfigError as exc:
            raise ConfigError(str(exc), path)
        logger.info(f"Configuration loaded from {path}")
        return config

    @classmethod
    def defaults(cls) -> "RunConfig":
        """Packaged ``config.ini`` with environment overrides applied."""
        load_environment()
        config = cls.from_ini(DEFAULT_CONFIG, base=cls())
        output_dir = get_output_dir_default()
        if output_dir:
            config.output_dir = output_dir
        return config

    def to_ini(self, path: Optional[str] = None) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        values = asdict(self)
        for section, entries in SCHEMA.items():
            parser[section] = {key: _format_value(values[attr]) for key, attr, _ in entries}
        buffer = io.StringIO()
        parser.write(buffer)
        text = buffer.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as writer:
                writer.write(text)
        return text

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _parse_value(raw: str, kind):
    if kind == "list":
        value = ast.literal_eval(raw)
        if not isinstance(value, (list, tuple)):
            raise ValueError("expected a list")
        return [float(v) for v in value]
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw.strip()


def _format_value(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(repr(float(v)) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _find_line(text: str, section: Optional[str], key: str) -> Optional[int]:
    """1-based line of ``key`` inside ``section`` (or of the section header when section is None)."""
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if section is None and current == key:
                return lineno
            continue
        if section is not None and current == section:
            name = stripped.split("=", 1)[0].split(":", 1)[0].strip().lower()
            if name == key:
                return lineno
    return None
