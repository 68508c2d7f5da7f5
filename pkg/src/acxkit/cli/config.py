"""Config documents: TOML or JSON text to a validated ``Config``.

``parse_config`` is total: malformed input yields a list of ``line N: ...``
messages instead of an exception.
"""
import json
import re
from dataclasses import dataclass, field

import numpy as np
import tomli

from ..core.defining import PolynomialDefiningFunction
from ..core.polynomial import ComplexPolynomial
from ..core.regions import Ball, Polydisc
from ..core.structures import DeformationData
from ..errors import AcxError, ConfigError

RESERVED = ("J_st",)
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# scalar -> (type, lower, upper); bounds are inclusive
SCALARS = {
    "seed": (int, 0, 2 ** 32 - 1),
    "resolution": (int, 2, 512),
    "nu_max": (int, 0, 30),
    "tol": (float, 1e-15, 0.5),
    "out": (str, None, None),
}

SECTIONS = {
    "region": {"kind": str, "center": "point", "radius": float, "radii": list},
    "validate": {"structure": str, "region": dict, "grid_n": int},
    "levi": {"function": str, "structure": str, "point": "point", "vector": "point", "method": str},
    "psh": {"function": str, "structure": str, "region": dict, "grid_n": int},
    "disc": {"structure": str, "p": "point", "v": "point", "N": int, "max_iter": int},
    "kobayashi": {"structure": str, "domain": dict, "p": "point", "v": "point", "q": "point",
                  "lattice_n": int, "seed_degree": int},
    "scale": {"function": str, "structure": str, "base": "point", "rate": float,
              "perturbation": float, "grid_n": int},
    "scenario": {"kind": str, "rate": float, "eps": float, "theta": float, "grid_n": int},
}

RANGES = {
    "grid_n": (2, 33), "N": (8, 512), "max_iter": (1, 10000), "lattice_n": (1, 256),
    "seed_degree": (1, 12), "rate": (1.0 + 1e-9, 1e6), "perturbation": (0.0, 0.4),
    "eps": (-0.2499, 0.2499), "theta": (-1e3, 1e3), "radius": (1e-12, 1e6),
}


def parse_point(value):
    """``[z1, z2]`` with entries a real number or ``[re, im]``; or four reals."""
    if not isinstance(value, (list, tuple)):
        raise ValueError(f"expected a point, got {value!r}")
    if len(value) == 4 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return np.array([complex(value[0], value[1]), complex(value[2], value[3])])
    if len(value) != 2:
        raise ValueError(f"a point has two complex coordinates, got {len(value)} entries")
    out = []
    for v in value:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(float(v)))
        else:
            raise ValueError(f"bad coordinate {v!r}")
    z = np.array(out)
    if not np.all(np.isfinite(z)):
        raise ValueError("point coordinates must be finite")
    return z


def point_to_list(z):
    return [[float(c.real), float(c.imag)] for c in z]


def parse_region(spec):
    if not isinstance(spec, dict):
        raise ValueError("region must be a table")
    kind = spec.get("kind", "ball")
    center = parse_point(spec.get("center", [0, 0]))
    unknown = set(spec) - {"kind", "center", "radius", "radii"}
    if unknown:
        raise ValueError(f"unknown region key {sorted(unknown)[0]!r}")
    if kind == "ball":
        return Ball(center, float(spec.get("radius", 1.0)))
    if kind == "polydisc":
        radii = spec.get("radii", [1.0, 1.0])
        if not (isinstance(radii, list) and len(radii) == 2):
            raise ValueError("polydisc radii must be a list of two numbers")
        return Polydisc(center, [float(r) for r in radii])
    raise ValueError(f"unknown region kind {kind!r} (ball or polydisc)")


@dataclass
class Config:
    scalars: dict = field(default_factory=dict)
    structures: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.scalars.get(key, default)

    def section(self, name):
        return dict(self.sections.get(name, {}))

    def structure(self, name):
        """``None`` for ``J_st`` (and for a missing name), else the DeformationData."""
        if name in (None, "J_st"):
            return None
        return self.structures[name]

    def function(self, name):
        return self.functions[name]

    def to_dict(self):
        secs = {}
        for name, sec in self.sections.items():
            secs[name] = {k: (point_to_list(v) if isinstance(v, np.ndarray) else v)
                          for k, v in sec.items()}
        return {**self.scalars,
                "structures": {k: d.to_dict() for k, d in sorted(self.structures.items())},
                "functions": {k: {"terms": f.to_table()} for k, f in sorted(self.functions.items())},
                **secs}


@dataclass
class ParseResult:
    config: object
    errors: list

    @property
    def ok(self):
        return self.config is not None and not self.errors


def _locate(text, path):
    """Line (1-based) of the last component of ``path``, searched in order; 0 if not found."""
    pos, line = 0, 0
    for key in path:
        # dotted headers such as [structures.J1] continue right after the previous key
        m = re.compile(r"\.[\"']?" + re.escape(str(key)) + r"[\"']?(?![\w])").match(text, pos)
        if m is None:
            m = re.compile(r"(?<![\w.])[\"']?" + re.escape(str(key)) + r"[\"']?(?![\w])").search(text, pos)
        if m is None:
            break
        pos = m.end()
        line = text.count("\n", 0, m.start()) + 1
    return line


def _dup_hook(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ValueError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def _load(text):
    """Raw mapping and a list of syntax errors."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return json.loads(text, object_pairs_hook=_dup_hook), []
        except json.JSONDecodeError as exc:
            return None, [f"line {exc.lineno}: JSON syntax error: {exc.msg}"]
        except ValueError as exc:
            key = str(exc).split("'")[1] if "'" in str(exc) else ""
            return None, [f"line {_locate(text, [key]) if key else 0}: {exc}"]
    try:
        return tomli.loads(text), []
    except tomli.TOMLDecodeError as exc:
        msg = str(exc)
        m = re.search(r"\(at line (\d+), column \d+\)", msg)
        line = int(m.group(1)) if m else 0
        msg = re.sub(r"\s*\(at line \d+, column \d+\)", "", msg)
        if m is None and "end of document" in msg:
            line = text.count("\n") + 1
        return None, [f"line {line}: TOML error: {msg}"]


def _check_scalar(name, value, errors, text, path):
    typ, lo, hi = SCALARS[name]
    where = f"line {_locate(text, path)}"
    if typ is int and (isinstance(value, bool) or not isinstance(value, int)):
        errors.append(f"{where}: {name} must be an integer, got {value!r}")
        return None
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{where}: {name} must be a number, got {value!r}")
            return None
        value = float(value)
    if typ is str:
        if not isinstance(value, str):
            errors.append(f"{where}: {name} must be a string")
            return None
        return value
    if not (lo <= value <= hi):
        errors.append(f"{where}: {name} = {value!r} out of range [{lo}, {hi}]")
        return None
    return value


def _check_section(name, sec, errors, text):
    schema = SECTIONS[name]
    out = {}
    if not isinstance(sec, dict):
        errors.append(f"line {_locate(text, [name])}: [{name}] must be a table")
        return out
    for key, value in sec.items():
        where = f"line {_locate(text, [name, key])}"
        kind = schema.get(key)
        if kind is None:
            errors.append(f"{where}: unknown key {name}.{key}")
            continue
        try:
            if kind == "point":
                value = parse_point(value)
            elif kind is dict:
                parse_region(value)
            elif kind is int:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ValueError(f"{name}.{key} must be an integer")
            elif kind is float:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValueError(f"{name}.{key} must be a number")
                value = float(value)
            elif kind is str and not isinstance(value, str):
                raise ValueError(f"{name}.{key} must be a string")
            if key in RANGES and kind in (int, float):
                lo, hi = RANGES[key]
                if not lo <= value <= hi:
                    raise ValueError(f"{name}.{key} = {value!r} out of range [{lo}, {hi}]")
            if key == "N" and value % 2:
                raise ValueError(f"{name}.N must be even, got {value}")
        except (ValueError, TypeError, AcxError) as exc:
            errors.append(f"{where}: {exc}")
            continue
        out[key] = value
    return out


def _table(value, what):
    if not isinstance(value, dict):
        raise ValueError(f"{what} must be a table of monomial = coefficient")
    return value


def parse_config(text):
    """Validate a config document; never raises on malformed input."""
    try:
        return _parse(text)
    except Exception as exc:  # totality: any surprise becomes a reported error
        return ParseResult(None, [f"line 0: unreadable config: {type(exc).__name__}: {exc}"])


def _parse(text):
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            return ParseResult(None, [f"line 0: config is not UTF-8 ({exc.reason})"])
    raw, errors = _load(text)
    if errors:
        return ParseResult(None, errors)
    if not isinstance(raw, dict):
        return ParseResult(None, ["line 1: config must be a table at the top level"])
    cfg = Config()
    known = set(SCALARS) | set(SECTIONS) | {"structures", "functions"}
    for key, value in raw.items():
        if key not in known:
            errors.append(f"line {_locate(text, [key])}: unknown top-level key {key!r}")
        elif key in SCALARS:
            v = _check_scalar(key, value, errors, text, [key])
            if v is not None:
                cfg.scalars[key] = v
    for group in ("structures", "functions"):
        block = raw.get(group, {})
        if not isinstance(block, dict):
            errors.append(f"line {_locate(text, [group])}: {group} must be a table of named entries")
            continue
        for name, spec in block.items():
            where = f"line {_locate(text, [group, name])}"
            if not _NAME.match(name) or name in RESERVED:
                errors.append(f"{where}: invalid {group[:-1]} name {name!r}")
                continue
            if name in cfg.structures or name in cfg.functions:
                errors.append(f"{where}: duplicate name {name!r} across structures and functions")
                continue
            try:
                if not isinstance(spec, dict):
                    raise ValueError(f"{group}.{name} must be a table")
                if group == "structures":
                    extra = set(spec) - {"A1", "A2", "radius", "kappa"}
                    if extra:
                        raise ValueError(f"unknown key {group}.{name}.{sorted(extra)[0]}")
                    A = []
                    for j in ("A1", "A2"):
                        try:
                            A.append(ComplexPolynomial.from_table(_table(spec.get(j, {}), j)))
                        except ValueError as exc:
                            where = f"line {_locate(text, [group, name, j])}"
                            raise ValueError(f"{group}.{name}.{j}: {exc}") from None
                    kw = {k: float(spec[k]) for k in ("radius", "kappa") if k in spec}
                    cfg.structures[name] = DeformationData(*A, **kw)
                else:
                    extra = set(spec) - {"terms"}
                    if extra or "terms" not in spec:
                        raise ValueError(f"{group}.{name} needs exactly one key 'terms'")
                    poly = ComplexPolynomial.from_table(_table(spec["terms"], "terms"))
                    cfg.functions[name] = PolynomialDefiningFunction(poly)
            except (ValueError, TypeError, AcxError) as exc:
                errors.append(f"{where}: {exc}")
    for name in SECTIONS:
        if name in raw:
            cfg.sections[name] = _check_section(name, raw[name], errors, text)
    # referenced names must resolve
    for sec_name, sec in cfg.sections.items():
        for key, pool in (("structure", cfg.structures), ("function", cfg.functions)):
            ref = sec.get(key)
            if ref is not None and ref not in pool and not (key == "structure" and ref in RESERVED):
                errors.append(f"line {_locate(text, [sec_name, key])}: {sec_name}.{key} refers to "
                              f"unknown {key} {ref!r}")
    if errors:
        return ParseResult(None, errors)
    return ParseResult(cfg, [])


def serialize(cfg):
    """Canonical JSON text; ``parse_config(serialize(c))`` rebuilds an equivalent config."""
    return json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n"


def load_config(path):
    """Read and validate a config file; raises ``ConfigError`` with every message."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read config {path!r}: {exc.strerror}"]) from None
    res = parse_config(data)
    if not res.ok:
        raise ConfigError([f"{path}: {e}" for e in res.errors])
    return res.config
