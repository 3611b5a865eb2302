"""Experiment configuration files.

INI syntax (``key = value``), one experiment per file::

    [experiment]
    tag = thm1
    radii = 200, 400, 800

    [sequence]
    kind = polynomial-phase
    q2 = sqrt(2)

    [acceptance]
    max_rel_deviation = 0.2

Presets that compare several sequences read sections ``[sequence.NAME]``.
Errors carry the offending key and the line it sits on.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..reals import Real
from ..sequences import ConfigKeyError, MultiplierSequence, sequence_from_config
from ..spectra import Arc, SpectralMeasure, SpectrumSet

TAGS = (
    "thm1", "thm2", "thm3", "thm4", "thm5", "thm6",
    "lemma3", "lemma5", "saddle", "witness", "zeros-histogram", "l1loc",
    "closed-forms", "parseval", "bessel", "weyl", "control",
)

_MISSING = object()


class ConfigError(ValueError):
    def __init__(self, key: str, message: str, line: int | None = None, path: str | None = None):
        where = f"{path}:{line}: " if path and line else (f"line {line}: " if line else "")
        super().__init__(f"{where}[{key}] {message}")
        self.key = key
        self.line = line


@dataclass
class ExperimentConfig:
    tag: str
    sections: dict[str, dict[str, str]]
    path: str | None = None
    lines: dict[tuple[str, str], int] = field(default_factory=dict)

    # -- lookups -------------------------------------------------------------

    def line_of(self, section: str, key: str | None = None) -> int | None:
        return self.lines.get((section, (key or "").lower()))

    def error(self, section: str, key: str, message: str) -> ConfigError:
        line = self.line_of(section, key) or self.line_of(section)
        return ConfigError(key if section == "experiment" else f"{section}.{key}", message, line, self.path)

    def has(self, section: str, key: str) -> bool:
        key = key.lower()  # configparser folds key case
        return key in self.sections.get(section, {})

    def get(self, section: str, key: str, kind=str, default=_MISSING):
        key = key.lower()
        sec = self.sections.get(section, {})
        if key not in sec:
            if default is _MISSING:
                raise self.error(section, key, "required key is missing")
            return default
        raw = sec[key]
        try:
            return _convert(raw, kind)
        except (ValueError, SyntaxError, ZeroDivisionError, TypeError) as exc:
            raise self.error(section, key, f"cannot read {raw!r}: {exc}") from exc

    def get_list(self, section: str, key: str, kind=float, default=_MISSING):
        key = key.lower()
        sec = self.sections.get(section, {})
        if key not in sec:
            if default is _MISSING:
                raise self.error(section, key, "required key is missing")
            return list(default)
        raw = sec[key]
        try:
            return [_convert(v, kind) for v in _items(raw)]
        except (ValueError, SyntaxError, ZeroDivisionError, TypeError) as exc:
            raise self.error(section, key, f"cannot read {raw!r}: {exc}") from exc

    def increasing(self, section: str, key: str, kind=float, default=_MISSING, positive: bool = True):
        vals = self.get_list(section, key, kind, default)
        if positive and any(v <= 0 for v in vals):
            raise self.error(section, key, "values must be positive")
        if any(b <= a for a, b in zip(vals[:-1], vals[1:])):
            raise self.error(section, key, "values must be strictly increasing")
        return vals

    def threshold(self, key: str, default):
        """Pass threshold from ``[acceptance]``, falling back to the documented default."""
        return self.get("acceptance", key, type(default), default)

    # -- structured sections ---------------------------------------------------

    def sequence(self, section: str = "sequence") -> MultiplierSequence:
        if section not in self.sections:
            raise self.error(section, "kind", "sequence section is missing")
        try:
            return sequence_from_config(self.sections[section])
        except ConfigKeyError as exc:
            # unparsable values are reported under the sequence kind
            key = "kind" if exc.key == self.sections[section].get("kind", "").strip() else exc.key
            raise self.error(section, key, str(exc)) from exc

    def sequences(self) -> list[tuple[str, MultiplierSequence]]:
        names = [s for s in self.sections if s == "sequence" or s.startswith("sequence.")]
        if not names:
            raise self.error("sequence", "kind", "no [sequence] section")
        return [(s.partition(".")[2] or s, self.sequence(s)) for s in names]

    def spectrum(self, section: str = "spectrum") -> SpectrumSet:
        """``points = 0, pi`` and/or ``arcs = start:length, ...``; ``full = true`` for the circle."""
        if self.get(section, "full", _bool, False):
            return SpectrumSet.full()
        pts = self.get_list(section, "points", float, [])
        arcs = []
        for raw in self.get_list(section, "arcs", str, []):
            try:
                a, ln = (float(Real(x)) for x in raw.split(":"))
            except ValueError as exc:
                raise self.error(section, "arcs", f"expected start:length, got {raw!r}") from exc
            arcs.append(Arc(a, ln))
        if not pts and not arcs:
            raise self.error(section, "points", "spectrum needs points, arcs or full = true")
        return SpectrumSet(arcs=arcs, points=pts)

    def measure(self, section: str = "sequence") -> SpectralMeasure:
        return self.sequence(section).rho


def _bool(raw: str) -> bool:
    v = raw.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true or false")


def _convert(raw: str, kind):
    raw = raw.strip()
    if kind is bool:
        return _bool(raw)
    if kind is int:
        return int(raw)
    if kind is float:
        return float(Real(raw))
    return kind(raw)


def _items(raw: str) -> list[str]:
    return [v.strip() for v in raw.split(",") if v.strip()]


_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


def _line_table(text: str) -> dict[tuple[str, str], int]:
    table: dict[tuple[str, str], int] = {}
    section = None
    for i, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            table.setdefault((section, ""), i)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None and not line[:1].isspace():
            table.setdefault((section, m.group(1).strip().lower()), i)
    return table


def parse_config(text: str, path: str | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError("syntax", str(exc).splitlines()[0], line, path) from exc
    lines = _line_table(text)
    sections = {name: dict(parser[name]) for name in parser.sections()}
    cfg = ExperimentConfig("", sections, path, lines)
    tag = cfg.get("experiment", "tag").strip()
    if tag not in TAGS:
        raise cfg.error("experiment", "tag", f"unknown experiment tag {tag!r}; known: {', '.join(TAGS)}")
    cfg.tag = tag
    return cfg


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {p}: {exc.strerror}") from exc
    return parse_config(text, str(p))
