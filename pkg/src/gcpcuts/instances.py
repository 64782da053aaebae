"""Instance families and file formats.

Everything is in the standard form ``min c.x, Ax = rhs, x >= 0`` with an
integrality mask. Random dense instances follow the uniform ``[-10, 10]``
scheme; graph instances encode stable set / vertex cover on ``G(n, p)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InputError, ParseError, UnsupportedFeature
from .simplex import OPTIMAL, StandardFormLp, solve

MAX_REGEN = 10_000


@dataclass(eq=False)
class MipInstance:
    name: str
    A: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray
    integer_mask: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.rhs = np.asarray(self.rhs, dtype=float).ravel()
        self.cost = np.asarray(self.cost, dtype=float).ravel()
        self.integer_mask = np.asarray(self.integer_mask, dtype=bool).ravel()
        k, d = self.A.shape
        if self.rhs.size != k or self.cost.size != d or self.integer_mask.size != d:
            raise DimensionMismatch(
                f"{self.name}: A is {self.A.shape}, rhs {self.rhs.size}, "
                f"cost {self.cost.size}, mask {self.integer_mask.size}"
            )

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def to_lp(self) -> StandardFormLp:
        return StandardFormLp(self.A, self.rhs, self.cost)


def _rng(seed, *keys):
    return np.random.default_rng([int(seed), *map(int, keys)])


def _uniform(rng, data, shape):
    if data == "integer":
        return rng.integers(-10, 11, size=shape).astype(float)
    if data == "rational":
        return np.round(rng.uniform(-10.0, 10.0, size=shape), 8)
    raise InputError(f"data must be 'integer' or 'rational', got {data!r}")


def gen_random_dense(i_scale: int, data: str = "integer", mix: str = "mixed", seed: int = 0,
                     index: int = 0) -> MipInstance:
    """Random dense MIP of size ``(10 i, 25 i)``.

    Draws whose LP relaxation is infeasible or unbounded are discarded and
    redrawn from the next sub-seed.
    """
    if not 1 <= i_scale <= 10:
        raise InputError(f"scale must be in 1..10, got {i_scale}")
    if mix not in ("pure", "mixed"):
        raise InputError(f"mix must be 'pure' or 'mixed', got {mix!r}")
    k, d = 10 * i_scale, 25 * i_scale
    for attempt in range(MAX_REGEN):
        rng = _rng(seed, index, attempt)
        A = _uniform(rng, data, (k, d))
        rhs = _uniform(rng, data, k)
        cost = _uniform(rng, data, d)
        if mix == "pure":
            mask = np.ones(d, dtype=bool)
        else:
            mask = rng.random(d) < 0.5
        if solve(StandardFormLp(A, rhs, cost)).status == OPTIMAL:
            name = f"dense_s{i_scale}_{data[:3]}_{mix}_{seed}_{index:04d}"
            meta = {"family": "dense", "scale": i_scale, "data": data, "mix": mix,
                    "seed": seed, "index": index, "attempt": attempt}
            return MipInstance(name, A, rhs, cost, mask, meta)
    raise InputError(f"no LP-optimal draw after {MAX_REGEN} attempts")


def gnp_edges(nv, p, rng):
    return [(u, v) for u, v in itertools.combinations(range(nv), 2) if rng.random() < p]


def gen_graph_instance(nv: int, p: float, mode: str = "stable_set", seed: int = 0,
                       index: int = 0, edges=None) -> MipInstance:
    """Stable set (``x_u + x_v + s_e = 1``) or vertex cover (``x_u + x_v - s_e = 1``)
    on a ``G(nv, p)`` graph, with explicit ``x_v + t_v = 1`` bound rows.

    Variables are ``x`` (nv), edge slacks (|E|), bound slacks (nv); all are
    integer since every row has integer data.
    """
    if mode not in ("stable_set", "vertex_cover"):
        raise InputError(f"mode must be 'stable_set' or 'vertex_cover', got {mode!r}")
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must be in [0, 1], got {p}")
    rng = _rng(seed, index)
    if edges is None:
        edges = gnp_edges(nv, p, rng)
    m = len(edges)
    d = nv + m + nv
    A = np.zeros((m + nv, d))
    slack_sign = 1.0 if mode == "stable_set" else -1.0
    for e, (u, v) in enumerate(edges):
        A[e, u] = A[e, v] = 1.0
        A[e, nv + e] = slack_sign
    for v in range(nv):
        A[m + v, v] = 1.0
        A[m + v, nv + m + v] = 1.0
    rhs = np.ones(m + nv)
    cost = np.zeros(d)
    cost[:nv] = -1.0 if mode == "stable_set" else 1.0
    name = f"{mode}_n{nv}_p{p:g}_{seed}_{index:04d}"
    meta = {"family": "gnp", "mode": mode, "nv": nv, "p": p, "seed": seed, "index": index,
            "edges": [list(e) for e in edges]}
    return MipInstance(name, A, rhs, cost, np.ones(d, dtype=bool), meta)


# --- serialization -------------------------------------------------------

def _num(x) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise InputError("cannot serialize non-finite number")
    s = format(x, ".17g")
    return "0" if s == "-0" else s


def write_instance(inst: MipInstance, fmt: str = "json") -> str:
    if fmt == "json":
        return _write_json(inst)
    if fmt == "free_mps":
        return _write_mps(inst)
    raise InputError(f"unknown format {fmt!r}")


def _write_json(inst):
    def arr(xs):
        return "[" + ",".join(_num(x) for x in xs) + "]"

    parts = [
        f'"name":{json.dumps(inst.name)}',
        f'"k":{inst.k}',
        f'"d":{inst.d}',
        f'"A":{arr(inst.A.ravel())}',
        f'"rhs":{arr(inst.rhs)}',
        f'"cost":{arr(inst.cost)}',
        '"integer_mask":[' + ",".join("true" if b else "false" for b in inst.integer_mask) + "]",
        f'"metadata":{json.dumps(inst.metadata, sort_keys=True, separators=(",", ":"))}',
    ]
    return "{" + ",".join(parts) + "}\n"


def _write_mps(inst):
    lines = [f"NAME {inst.name}", "ROWS", " N obj"]
    lines += [f" E r{i}" for i in range(inst.k)]
    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for j in range(inst.d):
        if inst.integer_mask[j] != in_int:
            kind = "'INTORG'" if inst.integer_mask[j] else "'INTEND'"
            lines.append(f" M{marker} 'MARKER' {kind}")
            marker += 1
            in_int = bool(inst.integer_mask[j])
        entries = [("obj", inst.cost[j])] + [(f"r{i}", inst.A[i, j]) for i in range(inst.k)]
        for row, val in entries:
            if val != 0.0:
                lines.append(f" x{j} {row} {_num(val)}")
        if all(val == 0.0 for _, val in entries):
            lines.append(f" x{j} obj 0")
    if in_int:
        lines.append(f" M{marker} 'MARKER' 'INTEND'")
    lines.append("RHS")
    for i in range(inst.k):
        if inst.rhs[i] != 0.0:
            lines.append(f" rhs r{i} {_num(inst.rhs[i])}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def parse_instance(text: str, fmt: str = "json", name: str = "instance") -> MipInstance:
    if fmt == "json":
        return _parse_json(text)
    if fmt == "free_mps":
        return _parse_mps(text, name)
    raise InputError(f"unknown format {fmt!r}")


def _parse_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc
    try:
        k, d = int(obj["k"]), int(obj["d"])
        A = np.asarray(obj["A"], dtype=float)
        if A.ndim == 2:
            A = A.ravel()
        if A.size != k * d:
            raise ParseError(f"A has {A.size} entries, expected k*d = {k * d}")
        return MipInstance(
            name=str(obj.get("name", "instance")),
            A=A.reshape(k, d),
            rhs=obj["rhs"],
            cost=obj["cost"],
            integer_mask=[bool(b) for b in obj["integer_mask"]],
            metadata=dict(obj.get("metadata", {})),
        )
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise ParseError(str(exc)) from exc


_SECTIONS = {"NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA", "OBJSENSE", "SOS"}


def _parse_mps(text, default_name):
    name = default_name
    section = None
    row_type = {}
    row_order = []
    obj_row = None
    cols = {}
    col_order = []
    integer = {}
    in_int = False
    rhs = {}
    obj_offset = 0.0
    lower, upper = {}, {}

    def col(cname, lineno):
        if cname not in cols:
            if section != "COLUMNS":
                raise ParseError(f"unknown column {cname!r}", lineno)
            cols[cname] = {}
            col_order.append(cname)
            integer[cname] = in_int
        return cols[cname]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("*"):
            continue
        tok = line.split()
        head = tok[0].upper()
        if not raw[0].isspace() and head in _SECTIONS:
            section = head
            if head == "NAME" and len(tok) > 1:
                name = tok[1]
            elif head == "RANGES":
                raise UnsupportedFeature(f"line {lineno}: RANGES section is not supported")
            elif head == "SOS":
                raise UnsupportedFeature(f"line {lineno}: SOS section is not supported")
            elif head == "OBJSENSE" and len(tok) > 1 and tok[1].upper().startswith("MAX"):
                raise UnsupportedFeature(f"line {lineno}: maximization is not supported")
            elif head == "ENDATA":
                break
            continue
        if section == "OBJSENSE":
            if head.startswith("MAX"):
                raise UnsupportedFeature(f"line {lineno}: maximization is not supported")
            continue
        if section == "ROWS":
            if len(tok) != 2 or head not in ("N", "E", "L", "G"):
                raise ParseError(f"bad ROWS entry {line!r}", lineno)
            if head == "N":
                if obj_row is None:
                    obj_row = tok[1]
                row_type[tok[1]] = "N"
                continue
            row_type[tok[1]] = head
            row_order.append(tok[1])
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1].strip("'").upper() == "MARKER":
                kind = tok[2].strip("'").upper()
                if kind == "INTORG":
                    in_int = True
                elif kind == "INTEND":
                    in_int = False
                else:
                    raise ParseError(f"unknown marker {tok[2]!r}", lineno)
                continue
            if len(tok) not in (3, 5):
                raise ParseError(f"bad COLUMNS entry {line!r}", lineno)
            entry = col(tok[0], lineno)
            for rname, val in zip(tok[1::2], tok[2::2]):
                if rname not in row_type:
                    raise ParseError(f"unknown row {rname!r}", lineno)
                entry[rname] = _float(val, lineno)
        elif section == "RHS":
            if len(tok) not in (3, 5):
                raise ParseError(f"bad RHS entry {line!r}", lineno)
            for rname, val in zip(tok[1::2], tok[2::2]):
                if rname not in row_type:
                    raise ParseError(f"unknown row {rname!r}", lineno)
                if row_type[rname] == "N":
                    obj_offset = -_float(val, lineno)
                else:
                    rhs[rname] = _float(val, lineno)
        elif section == "BOUNDS":
            if len(tok) < 3:
                raise ParseError(f"bad BOUNDS entry {line!r}", lineno)
            btype, cname = head, tok[2]
            if cname not in cols:
                raise ParseError(f"unknown column {cname!r}", lineno)
            val = _float(tok[3], lineno) if len(tok) > 3 else None
            if btype in ("UP", "UI"):
                upper[cname] = val
                if val < 0:
                    raise UnsupportedFeature(f"line {lineno}: negative upper bound")
            elif btype in ("LO", "LI"):
                lower[cname] = val
            elif btype == "FX":
                lower[cname] = upper[cname] = val
            elif btype == "BV":
                lower[cname], upper[cname] = 0.0, 1.0
            elif btype in ("MI", "FR"):
                raise UnsupportedFeature(f"line {lineno}: free variable {cname!r}")
            elif btype == "PL":
                pass
            else:
                raise ParseError(f"unknown bound type {btype!r}", lineno)
            if btype in ("UI", "LI", "BV"):
                integer[cname] = True
        elif section is None:
            raise ParseError(f"data before any section: {line!r}", lineno)
        else:
            raise ParseError(f"unexpected line in {section}: {line!r}", lineno)

    if obj_row is None:
        raise ParseError("no objective (N) row")
    for cname, lo in lower.items():
        if lo < 0:
            raise UnsupportedFeature(f"negative lower bound on {cname!r}")

    rows_A = []
    rows_b = []
    extra = []  # (row index, sign) for slack/surplus columns
    for rname in row_order:
        coeffs = [cols[c].get(rname, 0.0) for c in col_order]
        rows_A.append(coeffs)
        rows_b.append(rhs.get(rname, 0.0))
        t = row_type[rname]
        if t == "L":
            extra.append((len(rows_A) - 1, 1.0))
        elif t == "G":
            extra.append((len(rows_A) - 1, -1.0))
    for ci, cname in enumerate(col_order):
        lo, up = lower.get(cname, 0.0), upper.get(cname)
        if up is not None and lo == up:
            rows_A.append([1.0 if j == ci else 0.0 for j in range(len(col_order))])
            rows_b.append(up)
            continue
        if up is not None:
            rows_A.append([1.0 if j == ci else 0.0 for j in range(len(col_order))])
            rows_b.append(up)
            extra.append((len(rows_A) - 1, 1.0))
        if lo > 0:
            rows_A.append([1.0 if j == ci else 0.0 for j in range(len(col_order))])
            rows_b.append(lo)
            extra.append((len(rows_A) - 1, -1.0))

    k = len(rows_A)
    d0 = len(col_order)
    A = np.zeros((k, d0 + len(extra)))
    if k:
        A[:, :d0] = np.asarray(rows_A, dtype=float).reshape(k, d0)
    for s, (r, sgn) in enumerate(extra):
        A[r, d0 + s] = sgn
    cost = np.zeros(d0 + len(extra))
    cost[:d0] = [cols[c].get(obj_row, 0.0) for c in col_order]
    mask = np.zeros(d0 + len(extra), dtype=bool)
    mask[:d0] = [integer[c] for c in col_order]
    meta = {"family": "mps", "columns": col_order, "rows": row_order, "obj_offset": obj_offset}
    return MipInstance(name, A, np.asarray(rows_b, dtype=float), cost, mask, meta)


def _float(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"bad number {tok!r}", lineno) from None
