"""Declarative construction pipelines and their reports.

A pipeline is a JSON document ``{"steps": [...]}``; each step is an object
with an ``"op"`` discriminator (``block``, ``blow_up``, ``resolve``,
``fibre_sum`` or ``assert``). See ``docs/pipeline_format.md`` for the
schema and an annotated example of every step kind.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Optional, Sequence, Union

from .fibresum import (
    FibreSumResult,
    GluingSide,
    GluingSpec,
    canonical_p_parts,
    fibre_sum,
)
from .intalg import IntMatrix
from .lattice import pair, parity, signature
from .manifold import (
    BLOCKS,
    HOMOLOGY_ONLY_NOTE,
    CheckResult,
    Manifold4,
    blow_up,
    homology_model,
    symplectic_resolve,
)

SCENARIOS = ("YK", "Q", "U", "XK", "R", "V", "Y", "X")


class PipelineError(Exception):
    """Structural problem with a pipeline document (exit code 2)."""


class PipelineSyntaxError(PipelineError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class StepError(PipelineError):
    def __init__(self, index: int, op: str, message: str):
        super().__init__(f"step {index} ({op}): {message}")
        self.index = index
        self.op = op


# ---------------------------------------------------------------------------
# Steps


@dataclass(frozen=True)
class SideRef:
    target: str
    surface: str
    dual: Optional[str] = None
    h1_map: Optional[tuple[str, ...]] = None
    h1_labels: Optional[tuple[str, ...]] = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"target": self.target, "surface": self.surface}
        if self.dual is not None:
            out["dual"] = self.dual
        if self.h1_map is not None:
            out["h1_map"] = list(self.h1_map)
        if self.h1_labels is not None:
            out["h1_labels"] = list(self.h1_labels)
        return out


@dataclass(frozen=True)
class BlockStep:
    kind: str
    name: str
    h1_labels: Optional[tuple[str, ...]] = None
    op = "block"

    def to_json(self) -> dict:
        out = {"op": self.op, "kind": self.kind, "name": self.name}
        if self.h1_labels is not None:
            out["h1_labels"] = list(self.h1_labels)
        return out


@dataclass(frozen=True)
class BlowUpStep:
    target: str
    count: int
    name: str
    on_surface: Optional[str] = None
    h1_labels: Optional[tuple[str, ...]] = None
    op = "blow_up"

    def to_json(self) -> dict:
        out = {"op": self.op, "target": self.target, "count": self.count, "name": self.name}
        if self.on_surface is not None:
            out["on_surface"] = self.on_surface
        if self.h1_labels is not None:
            out["h1_labels"] = list(self.h1_labels)
        return out


@dataclass(frozen=True)
class ResolveStep:
    target: str
    surfaces: tuple[str, str]
    new_label: str
    name: str
    op = "resolve"

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "target": self.target,
            "surfaces": list(self.surfaces),
            "new_label": self.new_label,
            "name": self.name,
        }


@dataclass(frozen=True)
class FibreSumStep:
    left: SideRef
    right: SideRef
    name: str
    sigma_label: Optional[str] = None
    b_label: Optional[str] = None
    h1_labels: Optional[tuple[str, ...]] = None
    op = "fibre_sum"

    def to_json(self) -> dict:
        out = {
            "op": self.op,
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "name": self.name,
        }
        for key in ("sigma_label", "b_label"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.h1_labels is not None:
            out["h1_labels"] = list(self.h1_labels)
        return out


@dataclass(frozen=True)
class AssertStep:
    target: str
    check: str
    expected: Any
    op = "assert"

    def to_json(self) -> dict:
        return {"op": self.op, "target": self.target, "check": self.check, "expected": self.expected}


Step = Union[BlockStep, BlowUpStep, ResolveStep, FibreSumStep, AssertStep]


@dataclass(frozen=True)
class Pipeline:
    steps: tuple[Step, ...]
    name: str = ""
    description: str = ""
    report: tuple[str, ...] = ()

    @property
    def construction_steps(self) -> tuple[Step, ...]:
        return tuple(s for s in self.steps if not isinstance(s, AssertStep))

    @property
    def assertions(self) -> tuple[AssertStep, ...]:
        return tuple(s for s in self.steps if isinstance(s, AssertStep))

    def produced_names(self) -> list[str]:
        out = []
        for s in self.construction_steps:
            if s.name not in out:
                out.append(s.name)
        return out

    def to_json(self) -> dict:
        out: dict[str, Any] = {"steps": [s.to_json() for s in self.steps]}
        if self.name:
            out["name"] = self.name
        if self.description:
            out["description"] = self.description
        if self.report:
            out["report"] = list(self.report)
        return out

    def to_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Parsing


def _require(obj: dict, key: str, typ, where: str):
    if key not in obj:
        raise PipelineError(f"{where}: missing field {key!r}")
    value = obj[key]
    if typ is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, typ)
    if not ok:
        raise PipelineError(f"{where}: field {key!r} must be {typ.__name__}")
    return value


def _optional_strings(obj: dict, key: str, where: str) -> Optional[tuple[str, ...]]:
    if key not in obj:
        return None
    value = obj[key]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise PipelineError(f"{where}: field {key!r} must be a list of strings")
    return tuple(value)


def _optional_str(obj: dict, key: str, where: str) -> Optional[str]:
    if key not in obj or obj[key] is None:
        return None
    if not isinstance(obj[key], str):
        raise PipelineError(f"{where}: field {key!r} must be a string")
    return obj[key]


_STEP_KEYS = {
    "block": {"op", "kind", "name", "h1_labels"},
    "blow_up": {"op", "target", "count", "on_surface", "name", "h1_labels"},
    "resolve": {"op", "target", "surfaces", "new_label", "name"},
    "fibre_sum": {"op", "left", "right", "name", "sigma_label", "b_label", "h1_labels"},
    "assert": {"op", "target", "check", "expected"},
}
_SIDE_KEYS = {"target", "surface", "dual", "h1_map", "h1_labels"}


def _parse_side(obj, where: str) -> SideRef:
    if not isinstance(obj, dict):
        raise PipelineError(f"{where}: must be an object")
    extra = set(obj) - _SIDE_KEYS
    if extra:
        raise PipelineError(f"{where}: unknown field(s) {sorted(extra)}")
    return SideRef(
        _require(obj, "target", str, where),
        _require(obj, "surface", str, where),
        _optional_str(obj, "dual", where),
        _optional_strings(obj, "h1_map", where),
        _optional_strings(obj, "h1_labels", where),
    )


def _parse_step(obj, index: int) -> Step:
    where = f"step {index}"
    if not isinstance(obj, dict):
        raise PipelineError(f"{where}: must be an object")
    op = obj.get("op")
    if op not in _STEP_KEYS:
        raise PipelineError(f"{where}: unknown op {op!r}")
    where = f"step {index} ({op})"
    extra = set(obj) - _STEP_KEYS[op]
    if extra:
        raise PipelineError(f"{where}: unknown field(s) {sorted(extra)}")
    if op == "block":
        kind = _require(obj, "kind", str, where)
        if kind not in BLOCKS:
            raise PipelineError(f"{where}: unknown block kind {kind!r} (known: {sorted(BLOCKS)})")
        return BlockStep(kind, _require(obj, "name", str, where), _optional_strings(obj, "h1_labels", where))
    if op == "blow_up":
        target = _require(obj, "target", str, where)
        count = _require(obj, "count", int, where)
        if count < 0:
            raise PipelineError(f"{where}: count must be nonnegative")
        return BlowUpStep(
            target,
            count,
            _optional_str(obj, "name", where) or target,
            _optional_str(obj, "on_surface", where),
            _optional_strings(obj, "h1_labels", where),
        )
    if op == "resolve":
        target = _require(obj, "target", str, where)
        surfaces = _optional_strings(obj, "surfaces", where)
        if surfaces is None or len(surfaces) != 2:
            raise PipelineError(f"{where}: 'surfaces' must name exactly two surfaces")
        return ResolveStep(
            target, surfaces, _require(obj, "new_label", str, where),
            _optional_str(obj, "name", where) or target,
        )
    if op == "fibre_sum":
        return FibreSumStep(
            _parse_side(obj.get("left"), f"{where} left"),
            _parse_side(obj.get("right"), f"{where} right"),
            _require(obj, "name", str, where),
            _optional_str(obj, "sigma_label", where),
            _optional_str(obj, "b_label", where),
            _optional_strings(obj, "h1_labels", where),
        )
    if "expected" not in obj:
        raise PipelineError(f"{where}: missing field 'expected'")
    return AssertStep(_require(obj, "target", str, where), _require(obj, "check", str, where), obj["expected"])


def _step_refs(step: Step) -> list[str]:
    if isinstance(step, BlockStep):
        return []
    if isinstance(step, FibreSumStep):
        return [step.left.target, step.right.target]
    return [step.target]


def pipeline_from_json(doc) -> Pipeline:
    if not isinstance(doc, dict):
        raise PipelineError("pipeline document must be a JSON object")
    extra = set(doc) - {"steps", "name", "description", "report"}
    if extra:
        raise PipelineError(f"unknown top-level field(s) {sorted(extra)}")
    raw = doc.get("steps")
    if not isinstance(raw, list):
        raise PipelineError("pipeline needs a 'steps' list")
    steps = tuple(_parse_step(s, i) for i, s in enumerate(raw))
    defined: set[str] = set()
    for i, step in enumerate(steps):
        for ref in _step_refs(step):
            if ref not in defined:
                raise StepError(i, step.op, f"reference to undefined name {ref!r}")
        if not isinstance(step, AssertStep):
            defined.add(step.name)
    report = doc.get("report", [])
    if not isinstance(report, list) or not all(isinstance(r, str) for r in report):
        raise PipelineError("'report' must be a list of names")
    for r in report:
        if r not in defined:
            raise PipelineError(f"report names undefined manifold {r!r}")
    return Pipeline(steps, doc.get("name", ""), doc.get("description", ""), tuple(report))


def parse_pipeline(text: str) -> Pipeline:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PipelineSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return pipeline_from_json(doc)


def builtin_scenario(name: str) -> Pipeline:
    if name not in SCENARIOS:
        raise PipelineError(f"unknown scenario {name!r} (known: {', '.join(SCENARIOS)})")
    text = resources.files("gfsum.scenarios").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return parse_pipeline(text)


# ---------------------------------------------------------------------------
# H1 map expressions

_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*([A-Za-z_][\w']*)?\s*")


def parse_h1_expression(expr: str, labels: Sequence[str]) -> tuple[int, ...]:
    """Coordinates of an expression such as ``"-a1"``, ``"2x - b"`` or ``"0"``."""
    coords = [0] * len(labels)
    pos = 0
    text = expr.strip()
    if not text:
        raise ValueError("empty H1 expression")
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        sign, num, name = m.group(1), m.group(2), m.group(3)
        if m.end() == pos or (num is None and name is None) or (sign is None and not first):
            raise ValueError(f"cannot parse H1 expression {expr!r} at position {pos}")
        c = int(num) if num is not None else 1
        if sign == "-":
            c = -c
        if name is None:
            if c != 0:
                raise ValueError(f"bare nonzero integer in H1 expression {expr!r}")
        else:
            if name not in labels:
                raise ValueError(f"unknown H1 generator {name!r} (have {list(labels)})")
            coords[list(labels).index(name)] += c
        pos = m.end()
        first = False
    return tuple(coords)


def h1_map_from_expressions(exprs: Sequence[str], labels: Sequence[str]) -> IntMatrix:
    return IntMatrix.from_columns([parse_h1_expression(e, labels) for e in exprs], rows=len(labels))


# ---------------------------------------------------------------------------
# Reports


@dataclass
class Report:
    manifold: Manifold4
    result: Optional[FibreSumResult] = None
    checks: list[CheckResult] = field(default_factory=list)
    asserts: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks) and all(
            a["status"] == "pass" for a in self.asserts
        )

    def to_dict(self) -> dict:
        M = self.manifold
        sig = signature(M.h2)
        K = M.canonical
        if K is not None:
            canonical: Optional[dict] = {"coordinates": K.as_dict()}
            if self.result is not None:
                sp = self.result.splitting
                canonical["sigma"] = K.coords[M.h2.index(sp.sigma)]
                canonical["b"] = K.coords[M.h2.index(sp.b)]
                canonical["p_parts"] = {k: v.as_dict() for k, v in canonical_p_parts(self.result).items()}
            status = "present"
        else:
            canonical = None
            if self.result is not None and self.result.canonical_note:
                status = self.result.canonical_note
            else:
                status = "absent: not recorded for this block"
        out = {
            "label": M.label,
            "euler": M.euler,
            "signature": M.signature,
            "b1": M.b1,
            "b2": M.b2,
            "b2_plus": sig.b_plus,
            "b2_minus": sig.b_minus,
            "h1": {**M.h1.to_dict(), "generators": list(M.h1_labels)},
            "parity": parity(M.h2),
            "homology_model": homology_model(M),
            "homology_note": HOMOLOGY_ONLY_NOTE,
            "symplectic": M.symplectic,
            "gram": {"basis": list(M.h2.basis_labels), "matrix": M.h2.gram.to_rows()},
            "canonical": canonical,
            "canonical_status": status,
            "K_squared": None if K is None else pair(K, K),
            "surfaces": {
                name: {
                    "genus": s.genus,
                    "self_intersection": s.self_intersection,
                    "class": s.h2_class.as_dict(),
                    "h1_map": s.h1_map.to_rows(),
                    "symplectic": s.symplectic,
                }
                for name, s in M.surfaces.items()
            },
            "checks": {c.name: {"status": c.status, "detail": c.detail} for c in self.checks},
            "asserts": list(self.asserts),
        }
        if self.result is not None:
            r = self.result
            out["rim_tori"] = r.rim_tori.to_dict()
            out["rim_tori_rank"] = r.rim_tori.free_rank
            out["vanishing_rank"] = r.vanishing.free_rank
            out["splitting_ranks"] = r.splitting.ranks()
            out["summands"] = [r.spec.left.manifold.label, r.spec.right.manifold.label]
        else:
            out["rim_tori"] = None
            out["rim_tori_rank"] = None
            out["vanishing_rank"] = None
            out["splitting_ranks"] = None
            out["summands"] = None
        out["status"] = "pass" if self.passed else "fail"
        return out


def lookup(data, path: str):
    """Resolve a dotted path; keys that themselves contain dots are matched first."""
    if not isinstance(data, dict):
        raise KeyError(path)
    if path in data:
        return data[path]
    for i in range(len(path) - 1, 0, -1):
        if path[i] == "." and path[:i] in data:
            return lookup(data[path[:i]], path[i + 1:])
    raise KeyError(path)


def _normalize(value):
    """JSON round trip so tuples and lists compare equal."""
    return json.loads(json.dumps(value, sort_keys=True))


def _side(step_side: SideRef, env: dict[str, Manifold4]) -> GluingSide:
    M = env[step_side.target]
    if step_side.h1_labels is not None:
        M = M.relabel(h1_labels=step_side.h1_labels)
    emb = None
    if step_side.h1_map is not None:
        emb = h1_map_from_expressions(step_side.h1_map, M.h1_labels)
    return GluingSide(M, step_side.surface, step_side.dual, emb)


def run_pipeline(
    p: Pipeline,
    on_step: Optional[Callable[[int, Step, Report], None]] = None,
) -> list[Report]:
    """Execute the steps in order and return reports for the requested manifolds.

    Reported are the names in ``p.report`` (default: the last manifold
    produced) plus every assert target. Structural failures raise
    :class:`StepError` annotated with the step index.
    """
    env: dict[str, Manifold4] = {}
    results: dict[str, Optional[FibreSumResult]] = {}
    assert_log: dict[str, list[dict]] = {}

    for i, step in enumerate(p.steps):
        try:
            if isinstance(step, AssertStep):
                report = _make_report(env[step.target], results.get(step.target))
                try:
                    computed = lookup(report.to_dict(), step.check)
                except KeyError:
                    raise StepError(i, step.op, f"unknown check {step.check!r}") from None
                ok = _normalize(computed) == _normalize(step.expected)
                assert_log.setdefault(step.target, []).append(
                    {
                        "step": i,
                        "check": step.check,
                        "expected": step.expected,
                        "computed": computed,
                        "status": "pass" if ok else "fail",
                    }
                )
                continue
            if isinstance(step, BlockStep):
                M = BLOCKS[step.kind](step.name, step.h1_labels)
                res = None
            elif isinstance(step, BlowUpStep):
                M = blow_up(env[step.target], step.count, step.on_surface)
                M = M.relabel(step.name, step.h1_labels)
                res = None
            elif isinstance(step, ResolveStep):
                M = symplectic_resolve(env[step.target], *step.surfaces, step.new_label)
                M = M.relabel(step.name)
                res = None
            else:
                spec = GluingSpec(_side(step.left, env), _side(step.right, env))
                res = fibre_sum(spec, step.name, step.sigma_label, step.b_label, step.h1_labels)
                M = res.manifold
        except StepError:
            raise
        except (ValueError, KeyError) as exc:
            raise StepError(i, step.op, str(exc)) from exc
        env[step.name] = M
        results[step.name] = res
        if on_step is not None:
            on_step(i, step, _make_report(M, res))

    names = list(p.report) or p.produced_names()[-1:]
    for target in assert_log:
        if target not in names:
            names.append(target)
    reports = []
    for name in names:
        r = _make_report(env[name], results.get(name))
        r.asserts = assert_log.get(name, [])
        reports.append(r)
    return reports


def _make_report(M: Manifold4, res: Optional[FibreSumResult]) -> Report:
    checks = list(res.checks) if res is not None else M.consistency_checks()
    return Report(M, res, checks)


# ---------------------------------------------------------------------------
# Emission


def _vector_text(terms: dict[str, int]) -> str:
    if not terms:
        return "0"
    parts = []
    for lab, c in terms.items():
        coef = "" if abs(c) == 1 else f"{abs(c)} "
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {coef}{lab}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def report_text(d: dict) -> str:
    lines = [f"== {d['label']} =="]
    if d["summands"]:
        lines.append(f"fibre sum of {d['summands'][0]} and {d['summands'][1]}")
    h1 = d["h1"]
    h1_str = "0" if not h1["free_rank"] and not h1["torsion"] else " + ".join(
        ([f"Z^{h1['free_rank']}"] if h1["free_rank"] else []) + [f"Z/{t}" for t in h1["torsion"]]
    )
    lines += [
        f"euler: {d['euler']}",
        f"signature: {d['signature']}",
        f"b1: {d['b1']}",
        f"b2: {d['b2']} (b2+ = {d['b2_plus']}, b2- = {d['b2_minus']})",
        f"H1: {h1_str}",
        f"parity: {d['parity']}",
        f"homology model: {d['homology_model']} [{d['homology_note']}]",
    ]
    if d["rim_tori_rank"] is not None:
        lines.append(f"rim tori rank: {d['rim_tori_rank']}")
        lines.append("splitting ranks: " + ", ".join(f"{k}={v}" for k, v in d["splitting_ranks"].items()))
    if d["canonical"] is None:
        reason = d["canonical_status"]
        if reason.startswith("absent: "):
            reason = reason[len("absent: "):]
        lines.append(f"canonical class: absent ({reason})")
    else:
        lines.append(f"canonical class: {_vector_text(d['canonical']['coordinates'])}")
        for side, terms in d["canonical"].get("p_parts", {}).items():
            lines.append(f"  complement part ({side}): {_vector_text(terms)}")
        lines.append(f"K^2: {d['K_squared']}")
    for name, c in d["checks"].items():
        detail = f" ({c['detail']})" if c["detail"] else ""
        lines.append(f"check {name}: {c['status']}{detail}")
    for a in d["asserts"]:
        lines.append(
            f"assert {a['check']}: {a['status']} (expected {json.dumps(a['expected'], ensure_ascii=False)}, "
            f"computed {json.dumps(a['computed'], ensure_ascii=False)})"
        )
    return "\n".join(lines) + "\n"


def emit_report(reports: Sequence[Report], format: str = "text") -> str:
    dicts = [r.to_dict() for r in reports]
    if format == "json":
        return json.dumps(dicts, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if format == "text":
        return "\n".join(report_text(d) for d in dicts)
    raise ValueError(f"unknown format {format!r}")
