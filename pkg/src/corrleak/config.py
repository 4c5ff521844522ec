"""Flat ``key = value`` run configuration.

Keys carry a dotted section prefix (``channel.att_db``, ``security.eps_tot``,
``sweep.xi_list``). ``#`` starts a comment. Every key except
``protocol.n_total`` has a default matching the reference simulation setup.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .channel import ChannelParams
from .optimizer import Dimension, SearchSpace
from .security import SecurityBudget


class ConfigError(ValueError):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(v) for v in text.split(","))


def _opt_float(text: str) -> float | None:
    text = text.strip()
    return None if text.lower() in ("", "none") else float(text)


def _count(text: str) -> float:
    v = float(text)
    if v != int(v):
        raise ValueError("round count must be an integer")
    return v


# key -> (field name, parser)
_KEYS = {
    "channel.att_db": ("att_db", float),
    "channel.att_a_db": ("att_a_db", _opt_float),
    "channel.att_b_db": ("att_b_db", _opt_float),
    "channel.dark_rate": ("dark_rate", float),
    "channel.misalignment": ("misalignment", float),
    "channel.extinction": ("extinction", float),
    "protocol.n_total": ("n_total", _count),
    "protocol.xi": ("xi", int),
    "protocol.p_pe": ("p_pe", float),
    "protocol.ec_efficiency": ("ec_efficiency", float),
    "source.p_send": ("p_send", float),
    "source.mu_max": ("mu_max", float),
    "security.eps_tot": ("eps_tot", float),
    "security.eps": ("eps", _opt_float),
    "security.eps_bar": ("eps_bar", _opt_float),
    "security.eps_cor": ("eps_cor", _opt_float),
    "security.eps0": ("eps0", _opt_float),
    "security.eps2": ("eps2", _opt_float),
    "security.eps3": ("eps3", _opt_float),
    "security.definetti_x": ("definetti_x", int),
    "sweep.att_start": ("att_start", float),
    "sweep.att_stop": ("att_stop", float),
    "sweep.att_step": ("att_step", float),
    "sweep.xi_list": ("xi_list", _int_list),
    "optimizer.points": ("points", int),
    "optimizer.depth": ("depth", int),
    "optimizer.shrink": ("shrink", float),
    "optimizer.p_send_min": ("p_send_min", float),
    "optimizer.p_send_max": ("p_send_max", float),
    "optimizer.mu_max_min": ("mu_max_min", float),
    "optimizer.mu_max_max": ("mu_max_max", float),
    "optimizer.p_pe_min": ("p_pe_min", float),
    "optimizer.p_pe_max": ("p_pe_max", float),
    "optimizer.fixed_p_pe": ("fixed_p_pe", _opt_float),
    "output.path": ("output_path", str),
}
_FIELD_TO_KEY = {f: k for k, (f, _) in _KEYS.items()}


@dataclass(frozen=True)
class RunConfig:
    n_total: float
    att_db: float = 0.0
    att_a_db: float | None = None
    att_b_db: float | None = None
    dark_rate: float = 1e-9
    misalignment: float = 0.01
    extinction: float = 1e-3
    xi: int = 0
    p_pe: float = 0.1
    ec_efficiency: float = 1.16
    p_send: float = 0.3
    mu_max: float = 0.01
    eps_tot: float = 1e-10
    eps: float | None = None
    eps_bar: float | None = None
    eps_cor: float | None = None
    eps0: float | None = None
    eps2: float | None = None
    eps3: float | None = None
    definetti_x: int = 256
    att_start: float = 0.0
    att_stop: float = 60.0
    att_step: float = 2.0
    xi_list: tuple[int, ...] = (0, 1, 5)
    points: int = 16
    depth: int = 3
    shrink: float = 4.0
    p_send_min: float = 1e-3
    p_send_max: float = 0.5
    mu_max_min: float = 1e-6
    mu_max_max: float = 0.5
    p_pe_min: float = 0.01
    p_pe_max: float = 0.9
    fixed_p_pe: float | None = None
    output_path: str = ""

    def channel(self, att_db: float | None = None) -> ChannelParams:
        if att_db is not None:
            a = b = att_db
        else:
            a = self.att_db if self.att_a_db is None else self.att_a_db
            b = self.att_db if self.att_b_db is None else self.att_b_db
        return ChannelParams(a, b, self.dark_rate, self.misalignment, self.extinction)

    def budget(self) -> SecurityBudget:
        return SecurityBudget.default(
            self.eps_tot,
            definetti_x=self.definetti_x,
            eps=self.eps,
            eps_bar=self.eps_bar,
            eps_cor=self.eps_cor,
            eps0=self.eps0,
            eps2=self.eps2,
            eps3=self.eps3,
        )

    def search_space(self) -> SearchSpace:
        if self.fixed_p_pe is not None:
            p_pe = Dimension(self.fixed_p_pe, self.fixed_p_pe, 1)
        else:
            p_pe = Dimension(self.p_pe_min, self.p_pe_max, self.points, log=True)
        return SearchSpace(
            p_send=Dimension(self.p_send_min, self.p_send_max, self.points, log=True),
            mu_max=Dimension(self.mu_max_min, self.mu_max_max, self.points, log=True),
            p_pe=p_pe,
            depth=self.depth,
            shrink=self.shrink,
        )

    def attenuations(self) -> list[float]:
        if self.att_step <= 0:
            raise ConfigError("sweep.att_step: must be positive")
        if self.att_stop < self.att_start:
            return []
        n = int((self.att_stop - self.att_start) / self.att_step + 1e-9) + 1
        return [float(f"{self.att_start + i * self.att_step:.12g}") for i in range(n)]

    def _check_ranges(self):
        open_unit = {"source.p_send": self.p_send, "protocol.p_pe": self.p_pe}
        for key, v in open_unit.items():
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{key}: must lie strictly inside (0, 1), got {v!r}")
        if not 0.0 <= self.misalignment <= 0.5:
            raise ConfigError(f"channel.misalignment: must lie in [0, 0.5], got {self.misalignment!r}")
        for key, v in (("channel.dark_rate", self.dark_rate), ("channel.extinction", self.extinction)):
            if not 0.0 <= v < 1.0:
                raise ConfigError(f"{key}: must lie in [0, 1), got {v!r}")
        for key, v in (("channel.att_db", self.att_db), ("channel.att_a_db", self.att_a_db),
                       ("channel.att_b_db", self.att_b_db), ("source.mu_max", self.mu_max)):
            if v is not None and not v >= 0.0:
                raise ConfigError(f"{key}: must be >= 0, got {v!r}")

    def validate(self) -> RunConfig:
        """Build every derived object once so bad values fail early with their key."""
        self._check_ranges()
        checks = {
            "channel.att_db": self.channel,
            "security.eps_tot": self.budget,
            "optimizer.points": self.search_space,
            "sweep.att_step": self.attenuations,
        }
        for key, build in checks.items():
            try:
                build()
            except ConfigError:
                raise
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{key}: {exc}") from None
        if self.n_total < 1:
            raise ConfigError("protocol.n_total: must be >= 1")
        if self.xi < 0 or any(x < 0 for x in self.xi_list):
            raise ConfigError("protocol.xi: correlation range must be >= 0")
        if self.ec_efficiency < 1:
            raise ConfigError("protocol.ec_efficiency: must be >= 1")
        return self


def parse_lines(lines, values: dict | None = None, origin: str = "config") -> dict:
    values = {} if values is None else values
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"{key}: unknown configuration key")
        name, conv = _KEYS[key]
        try:
            values[name] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {val!r} ({exc})") from None
    return values


def load_config(path: str | Path | None = None, overrides=()) -> RunConfig:
    values: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        parse_lines(text.splitlines(), values, str(path))
    parse_lines(overrides, values, "--set")
    if "n_total" not in values:
        raise ConfigError("protocol.n_total: required key is missing")
    return RunConfig(**values).validate()


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(cfg: RunConfig) -> str:
    """Effective configuration in the same ``key = value`` format."""
    lines = [f"{_FIELD_TO_KEY[f.name]} = {_fmt(getattr(cfg, f.name))}" for f in dataclasses.fields(cfg)]
    return "\n".join(lines) + "\n"
