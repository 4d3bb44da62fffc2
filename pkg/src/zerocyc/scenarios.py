"""Scenario configuration: which model to build and what to run on it.

Configs are TOML::

    name = "elliptic-f5"

    [model]
    kind = "elliptic"      # or "mock"
    p = 5
    a = 1
    b = 1
    N = 6

    [run]
    r_max = 3
    n = 3
    seed = 12648430
    cap = 1048576
    suites = ["roundtrip", "filtration"]

A mock model replaces p/a/b with ``moduli`` and ``frob`` (a square matrix,
rows indexed by target coordinates).
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .points import DEFAULT_SEED, POINT_CAP, PointModel, build_elliptic, build_mock
from .tower import CapExceeded, FieldTower

SUITES = ("roundtrip", "filtration", "f2r2", "projection", "albanese", "injectivity", "cohomology", "kummer")
MAX_N_UNIVERSE = 6


class ConfigError(ValueError):
    """Malformed or inconsistent scenario config."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    N: int
    p: int = 0
    a: int = 0
    b: int = 0
    base_degree: int = 1
    moduli: tuple = ()
    frob: tuple = ()

    def describe(self) -> str:
        if self.kind == "elliptic":
            q = f"F_{self.p}" if self.base_degree == 1 else f"F_{self.p}^{self.base_degree}"
            return f"y^2 = x^3 + {self.a}x + {self.b} over {q}, N = {self.N}"
        return f"mock Z-module {list(self.moduli)} with frob {[list(r) for r in self.frob]}, N = {self.N}"


@dataclass(frozen=True)
class Scenario:
    name: str
    model: ModelSpec
    r_max: int = 3
    n: int = 2
    seed: int = DEFAULT_SEED
    cap: int = POINT_CAP
    suites: tuple = SUITES

    def echo(self) -> dict:
        m = self.model
        if m.kind == "elliptic":
            model = {"kind": m.kind, "N": m.N, "p": m.p, "a": m.a, "b": m.b, "base_degree": m.base_degree}
        else:
            model = {"kind": m.kind, "N": m.N, "moduli": list(m.moduli), "frob": [list(r) for r in m.frob]}
        return {
            "name": self.name,
            "model": model,
            "r_max": self.r_max,
            "n": self.n,
            "seed": self.seed,
            "cap": self.cap,
            "suites": list(self.suites),
        }

    def replace(self, **kw) -> "Scenario":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update({k: v for k, v in kw.items() if v is not None})
        return Scenario(**d)


def build_model(spec: ModelSpec, cap: int = POINT_CAP, seed: int = DEFAULT_SEED) -> PointModel:
    if spec.kind == "elliptic":
        tower = FieldTower(spec.p, spec.base_degree, spec.N, cap=max(cap, 2))
        return build_elliptic(tower, spec.a, spec.b, seed=seed, cap=cap)
    size = 1
    for d in spec.moduli:
        size *= d
    if size > cap:
        raise CapExceeded(f"mock group has {size} elements, cap is {cap}")
    return build_mock(list(spec.moduli), [list(r) for r in spec.frob], spec.N)


# -- bundled scenarios ------------------------------------------------------------

ELLIPTIC_F5 = ModelSpec("elliptic", 6, p=5, a=1, b=1)
MOCK_SWAP = ModelSpec("mock", 2, moduli=(3, 3), frob=((0, 1), (1, 0)))
MOCK_Z9 = ModelSpec("mock", 3, moduli=(9,), frob=((4,),))
MOCK_TRIVIAL = ModelSpec("mock", 1, moduli=(), frob=())
MOCK_WEDGE9 = ModelSpec("mock", 3, moduli=(9, 9), frob=((0, 8), (1, 8)))

BUNDLED = {
    "default": Scenario("default", ELLIPTIC_F5, r_max=3, n=3),
    "elliptic": Scenario("elliptic", ELLIPTIC_F5, r_max=3, n=2),
    "swap": Scenario("swap", MOCK_SWAP, r_max=3, n=3),
    "z9": Scenario("z9", MOCK_Z9, r_max=3, n=3),
    "trivial": Scenario("trivial", MOCK_TRIVIAL, r_max=3, n=2),
    "wedge9": Scenario("wedge9", MOCK_WEDGE9, r_max=3, n=3),
}


# -- TOML loading -------------------------------------------------------------------

_POS = re.compile(r"\(at line (\d+), column (\d+)\)")


def _int(d: dict, key: str, default=None, minimum: int | None = None) -> int:
    v = d.get(key, default)
    if v is None:
        raise ConfigError(f"missing required key {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key!r} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{key!r} must be at least {minimum}, got {v}")
    return v


def _matrix(v, key: str) -> tuple:
    if not isinstance(v, list) or not all(isinstance(r, list) and all(isinstance(x, int) for x in r) for r in v):
        raise ConfigError(f"{key!r} must be a list of integer lists")
    return tuple(tuple(r) for r in v)


def parse_model(d: dict) -> ModelSpec:
    if not isinstance(d, dict):
        raise ConfigError("[model] must be a table")
    kind = d.get("kind")
    if kind not in ("elliptic", "mock"):
        raise ConfigError(f"'kind' must be 'elliptic' or 'mock', got {kind!r}")
    N = _int(d, "N", minimum=1)
    if N > MAX_N_UNIVERSE:
        raise ConfigError(f"'N' = {N} exceeds the supported maximum {MAX_N_UNIVERSE}")
    if kind == "elliptic":
        unknown = set(d) - {"kind", "N", "p", "a", "b", "base_degree"}
        if unknown:
            raise ConfigError(f"unknown model keys {sorted(unknown)}")
        return ModelSpec("elliptic", N, p=_int(d, "p", minimum=2), a=_int(d, "a"), b=_int(d, "b"), base_degree=_int(d, "base_degree", 1, minimum=1))
    unknown = set(d) - {"kind", "N", "moduli", "frob"}
    if unknown:
        raise ConfigError(f"unknown model keys {sorted(unknown)}")
    moduli = d.get("moduli", [])
    if not isinstance(moduli, list) or not all(isinstance(x, int) and x >= 1 for x in moduli):
        raise ConfigError("'moduli' must be a list of positive integers (finite mock groups only)")
    frob = _matrix(d.get("frob", []), "frob")
    if len(frob) != len(moduli) or any(len(r) != len(moduli) for r in frob):
        raise ConfigError(f"'frob' must be a {len(moduli)}x{len(moduli)} matrix")
    return ModelSpec("mock", N, moduli=tuple(moduli), frob=frob)


def scenario_from_dict(d: dict, name: str = "scenario") -> Scenario:
    unknown = set(d) - {"name", "model", "run"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    if "model" not in d:
        raise ConfigError("missing [model] table")
    model = parse_model(d["model"])
    run = d.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("[run] must be a table")
    unknown = set(run) - {"r_max", "n", "seed", "cap", "suites"}
    if unknown:
        raise ConfigError(f"unknown run keys {sorted(unknown)}")
    suites = run.get("suites", list(SUITES))
    if not isinstance(suites, list) or any(s not in SUITES for s in suites):
        raise ConfigError(f"'suites' must be a list drawn from {list(SUITES)}")
    r_max = _int(run, "r_max", 3, minimum=1)
    if r_max > 3:
        raise ConfigError("'r_max' above 3 is not supported")
    return Scenario(
        name=str(d.get("name", name)),
        model=model,
        r_max=r_max,
        n=_int(run, "n", 2, minimum=1),
        seed=_int(run, "seed", DEFAULT_SEED, minimum=0),
        cap=_int(run, "cap", POINT_CAP, minimum=1),
        suites=tuple(suites),
    )


def loads(text: str, name: str = "scenario") -> Scenario:
    try:
        d = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _POS.search(str(exc))
        if m:
            line, col = int(m.group(1)), int(m.group(2))
        else:
            # tomli reports unterminated constructs "at end of document"
            lines = text.splitlines() or [""]
            line, col = len(lines), len(lines[-1]) + 1
        msg = _POS.sub("", str(exc)).replace("(at end of document)", "").strip()
        raise ConfigError(msg, line, col) from None
    try:
        return scenario_from_dict(d, name)
    except ConfigError as exc:
        if exc.line is not None:
            raise
        line, col = _locate(text, str(exc))
        raise ConfigError(str(exc), line, col) from None


def _locate(text: str, message: str) -> tuple[int, int]:
    """Best-effort position of the key a semantic error talks about."""
    m = re.search(r"'(\w+)'", message)
    if m:
        pat = re.compile(r"^(\s*)" + re.escape(m.group(1)) + r"\s*=")
        for i, line in enumerate(text.splitlines(), 1):
            hit = pat.match(line)
            if hit:
                return i, len(hit.group(1)) + 1
    return 1, 1


def load(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, path.stem)
