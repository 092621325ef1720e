"""Problem configuration: line-oriented ``section.key = value`` files.

The format is deliberately trivial: one assignment per line, full-line
``#`` comments, keys with dotted section prefixes.  Parsing is typed
against the schema below; unknown keys and malformed values fail with the
offending key named.  A parsed configuration re-serializes to an equivalent
file (exact round trip).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .extensions import BoundaryData
from .finsler import FinslerStructure, two_media_scale
from .grid import GridDomain
from .metric import MetricGraph, build_graph
from .solver import SolverConfig

_INT, _FLOAT, _STR = "int", "float", "str"

# key -> (type, default, allowed values or None)
SCHEMA: dict[str, tuple] = {
    "domain.nx": (_INT, 33, None),
    "domain.ny": (_INT, 33, None),
    "domain.h": (_FLOAT, 0.0625, None),
    "domain.origin_x": (_FLOAT, 0.0, None),
    "domain.origin_y": (_FLOAT, 0.0, None),
    "domain.margin": (_INT, 0, None),
    "domain.shape": (_STR, "rectangle", ("rectangle",)),
    "domain.stencil": (_STR, "8-neighbor", ("8-neighbor", "16-neighbor")),
    "structure.family": (
        _STR, "euclidean-scaled",
        ("euclidean-scaled", "riemannian", "p-norm",
         "piecewise-constant-norm", "custom-table"),
    ),
    "structure.scale": (_FLOAT, 1.0, None),
    "structure.scale_csv": (_STR, "", None),
    "structure.p": (_FLOAT, 2.0, None),
    "structure.matrix": (_STR, "1,0,1", None),
    "structure.matrix_csv": (_STR, "", None),
    "structure.media": (_STR, "", None),
    "structure.medium_csv": (_STR, "", None),
    "structure.table_csv": (_STR, "", None),
    "structure.split_axis": (_STR, "", ("", "x", "y")),
    "structure.split_at": (_FLOAT, 0.0, None),
    "structure.split_low": (_FLOAT, 1.0, None),
    "structure.split_high": (_FLOAT, 2.0, None),
    "boundary.kind": (_STR, "constant",
                      ("constant", "linear", "aronsson", "cone", "csv")),
    "boundary.value": (_FLOAT, 0.0, None),
    "boundary.ax": (_FLOAT, 1.0, None),
    "boundary.ay": (_FLOAT, 0.0, None),
    "boundary.c": (_FLOAT, 0.0, None),
    "boundary.cone_a": (_FLOAT, 1.0, None),
    "boundary.cone_x0": (_STR, "0,0", None),
    "boundary.csv": (_STR, "", None),
    "solver.radii": (_STR, "8h,4h,2h", None),
    "solver.tol": (_FLOAT, 0.0, None),  # 0 -> 1e-8 * oscillation
    "solver.max_iter": (_INT, 200000, None),
    "solver.sweep": (_STR, "gauss-seidel", ("gauss-seidel", "jacobi")),
    "verify.checks": (
        _STR,
        "cone-comparison,best-extension,gradient-slope,comparison-principle,minimality",
        None,
    ),
    "verify.samples": (_INT, 200, None),
    "verify.subdomains": (_INT, 100, None),
    "verify.seed": (_INT, 0, None),
    "verify.slope_scale": (_STR, "2h", None),
    "verify.mollify_epsilons": (_STR, "8h,4h,2h", None),
    "verify.probe_pairs": (_INT, 8, None),
    "output.dir": (_STR, "out", None),
    "output.fields": (_STR, "u", None),
    "output.timing": (_STR, "none", ("none", "measured")),
}

KNOWN_CHECKS = (
    "cone-comparison",
    "best-extension",
    "gradient-slope",
    "comparison-principle",
    "minimality",
    "mollification",
)


@dataclass(frozen=True)
class ProblemConfig:
    """Typed view of one configuration file."""

    values: tuple

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ProblemConfig":
        vals = {}
        for key, raw in mapping.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
            vals[key] = _coerce(key, raw)
        for key, (_, default, _allowed) in SCHEMA.items():
            vals.setdefault(key, default)
        return cls(values=tuple(sorted(vals.items())))

    @classmethod
    def parse(cls, text: str) -> "ProblemConfig":
        mapping = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in SCHEMA:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            mapping[key] = raw.strip()
        return cls.from_mapping(mapping)

    @classmethod
    def load(cls, path) -> "ProblemConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return cls.parse(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def get(self, key: str):
        return dict(self.values)[key]

    def to_text(self) -> str:
        lines = []
        for key, value in self.values:
            if isinstance(value, float):
                lines.append(f"{key} = {value!r}")
            else:
                lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def _coerce(key: str, raw):
    kind, _default, allowed = SCHEMA[key]
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        if kind == _INT:
            value = int(raw)
        elif kind == _FLOAT:
            value = float(raw)
        else:
            value = str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None
    if allowed is not None and value not in allowed:
        raise ConfigError(
            f"bad value for {key!r}: {value!r} (allowed: {', '.join(allowed)})"
        )
    return value


def parse_lengths(spec: str, h: float, key: str) -> tuple[float, ...]:
    """Parse a comma list of lengths; a trailing ``h`` means grid units."""
    out = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            if token.endswith("h"):
                out.append(float(token[:-1] or "1") * h)
            else:
                out.append(float(token))
        except ValueError:
            raise ConfigError(f"bad length {token!r} in {key!r}") from None
    if not out:
        raise ConfigError(f"{key!r} is empty")
    return tuple(out)


# -- builders -------------------------------------------------------------------


def build_domain(cfg: ProblemConfig) -> GridDomain:
    try:
        return GridDomain.rectangle(
            cfg.get("domain.nx"), cfg.get("domain.ny"), cfg.get("domain.h"),
            origin=(cfg.get("domain.origin_x"), cfg.get("domain.origin_y")),
            margin=cfg.get("domain.margin"),
        )
    except Exception as exc:
        raise ConfigError(f"domain block: {exc}") from exc


def _csv_rows(path, key):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return [row for row in csv.reader(fh) if row and row[0].strip()
                    and not row[0].lstrip().startswith("#")]
    except OSError as exc:
        raise ConfigError(f"{key}: cannot read {path}: {exc}") from exc


def _cell_csv(path, domain, n_cols, fill, key):
    """Per-cell CSV 'i,j,v...' into full arrays (missing cells get fill)."""
    fields = [np.full(domain.n_nodes, f) for f in fill]
    for row in _csv_rows(path, key):
        if row[0].strip().lower() in ("i", "x_index"):
            continue
        if len(row) != 2 + n_cols:
            raise ConfigError(f"{key}: expected i,j plus {n_cols} values")
        i, j = int(row[0]), int(row[1])
        if not (0 <= i < domain.nx and 0 <= j < domain.ny):
            raise ConfigError(f"{key}: cell ({i},{j}) outside the lattice")
        node = int(domain.node_id(i, j))
        for c in range(n_cols):
            fields[c][node] = float(row[2 + c])
    return fields


def build_structure(cfg: ProblemConfig, domain: GridDomain) -> FinslerStructure:
    family = cfg.get("structure.family")
    try:
        if family == "euclidean-scaled":
            scale = _scale_field(cfg, domain)
            return FinslerStructure.euclidean_scaled(domain, scale)
        if family == "p-norm":
            scale = _scale_field(cfg, domain)
            return FinslerStructure.p_norm(domain, cfg.get("structure.p"), scale)
        if family == "riemannian":
            path = cfg.get("structure.matrix_csv")
            if path:
                a11, a12, a22 = _cell_csv(path, domain, 3, (1.0, 0.0, 1.0),
                                          "structure.matrix_csv")
            else:
                parts = [float(t) for t in cfg.get("structure.matrix").split(",")]
                if len(parts) != 3:
                    raise ConfigError("structure.matrix must be 'a11,a12,a22'")
                a11, a12, a22 = parts
            return FinslerStructure.riemannian(domain, a11, a12, a22)
        if family == "piecewise-constant-norm":
            media = []
            for chunk in cfg.get("structure.media").split("|"):
                if not chunk.strip():
                    continue
                spec = dict(item.split("=") for item in chunk.split(","))
                media.append((float(spec.get("p", 2)), float(spec.get("s", 1))))
            if not media:
                raise ConfigError("structure.media is required for this family")
            path = cfg.get("structure.medium_csv")
            if path:
                (medium,) = _cell_csv(path, domain, 1, (0.0,),
                                      "structure.medium_csv")
            else:
                medium = np.zeros(domain.n_nodes)
            return FinslerStructure.piecewise_constant_norm(
                domain, media, medium.astype(int)
            )
        path = cfg.get("structure.table_csv")
        if not path:
            raise ConfigError("structure.table_csv is required for custom-table")
        rows = _csv_rows(path, "structure.table_csv")
        angles, values = [], []
        for row in rows:
            if row[0].strip().lower() == "angle":
                continue
            angles.append(float(row[0]))
            values.append(float(row[1]))
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        return FinslerStructure.custom_table(domain, dirs, np.asarray(values))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"structure block ({family}): {exc}") from exc


def _scale_field(cfg: ProblemConfig, domain: GridDomain):
    path = cfg.get("structure.scale_csv")
    if path:
        (scale,) = _cell_csv(path, domain, 1, (cfg.get("structure.scale"),),
                             "structure.scale_csv")
        return scale
    axis = cfg.get("structure.split_axis")
    if axis:
        return two_media_scale(
            domain, cfg.get("structure.split_low"), cfg.get("structure.split_high"),
            split=cfg.get("structure.split_at"), axis=axis,
        )
    return cfg.get("structure.scale")


def build_metric_graph(cfg: ProblemConfig, domain: GridDomain,
                       structure: FinslerStructure) -> MetricGraph:
    return build_graph(domain, structure, stencil_order=cfg.get("domain.stencil"))


def parse_node(spec: str, domain: GridDomain, key: str) -> int:
    try:
        i_str, j_str = spec.split(",")
        i, j = int(i_str), int(j_str)
    except ValueError:
        raise ConfigError(f"{key}: expected 'i,j', got {spec!r}") from None
    if not (0 <= i < domain.nx and 0 <= j < domain.ny):
        raise ConfigError(f"{key}: node ({i},{j}) outside the lattice")
    return int(domain.node_id(i, j))


def build_boundary(cfg: ProblemConfig, domain: GridDomain,
                   graph: MetricGraph) -> BoundaryData:
    kind = cfg.get("boundary.kind")
    nodes = domain.boundary_nodes()
    coords = domain.coords(nodes)
    if kind == "constant":
        values = np.full(nodes.size, cfg.get("boundary.value"))
    elif kind == "linear":
        values = (cfg.get("boundary.ax") * coords[:, 0]
                  + cfg.get("boundary.ay") * coords[:, 1]
                  + cfg.get("boundary.c"))
    elif kind == "aronsson":
        values = (np.abs(coords[:, 1]) ** (4.0 / 3.0)
                  - np.abs(coords[:, 0]) ** (4.0 / 3.0))
    elif kind == "cone":
        x0 = parse_node(cfg.get("boundary.cone_x0"), domain, "boundary.cone_x0")
        values = cfg.get("boundary.cone_a") * graph.distance(x0).values[nodes]
    else:
        path = cfg.get("boundary.csv")
        if not path:
            raise ConfigError("boundary.csv is required for kind=csv")
        full = np.full(domain.n_nodes, np.nan)
        for row in _csv_rows(path, "boundary.csv"):
            if row[0].strip().lower() in ("i", "x_index"):
                continue
            node = int(domain.node_id(int(row[0]), int(row[1])))
            full[node] = float(row[2])
        values = full[nodes]
        if not np.isfinite(values).all():
            raise ConfigError("boundary.csv does not cover every boundary node")
    return BoundaryData.from_values(graph, values, nodes=nodes)


def build_solver_config(cfg: ProblemConfig, domain: GridDomain) -> SolverConfig:
    radii = parse_lengths(cfg.get("solver.radii"), domain.h, "solver.radii")
    tol = cfg.get("solver.tol")
    try:
        return SolverConfig(
            r_schedule=radii,
            tol=None if tol == 0.0 else tol,
            max_iter=cfg.get("solver.max_iter"),
            sweep=cfg.get("solver.sweep"),
        )
    except Exception as exc:
        raise ConfigError(f"solver block: {exc}") from exc


def parse_checks(cfg: ProblemConfig) -> tuple[str, ...]:
    checks = tuple(
        t.strip() for t in cfg.get("verify.checks").split(",") if t.strip()
    )
    for c in checks:
        if c not in KNOWN_CHECKS:
            raise ConfigError(
                f"verify.checks: unknown check {c!r} "
                f"(known: {', '.join(KNOWN_CHECKS)})"
            )
    return checks
