"""Experiment configs, verification suites and deterministic reports."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from . import budget, headtail, oracles, rectangles
from .ccls import write_ccls
from .concepts import ConceptClass
from .errors import PreconditionError
from .greedy import TIE_BREAK, greedy_teach, write_trace
from .schedules import AnalyticCounts, jsonable

CONSTRUCTIONS = ("rectangles", "headtail")
SUITES = ("domination", "fand", "realizable", "disjoint", "prefix", "dynamics", "crosscheck", "vc-sample")


@dataclass(frozen=True)
class ExperimentConfig:
    construction: str = "rectangles"
    levels: int = 2
    k: int = 2
    widths: tuple[int, ...] | None = None
    schedule: str = "custom"
    force: bool = False
    greedy_k: int | None = None
    suites: tuple[str, ...] = ()
    budget: int | None = None
    seed: int = 0
    trials: int = 100
    vc_size: int | None = None
    vc_samples: int = 1000
    class_out: str | None = None
    trace_out: str | None = None
    report_out: str | None = None

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise PreconditionError(f"construction must be one of {CONSTRUCTIONS}")
        if self.schedule not in ("custom", "paper"):
            raise PreconditionError("schedule must be 'custom' or 'paper'")
        if self.widths is not None:
            object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        object.__setattr__(self, "suites", tuple(self.suites))
        unknown = set(self.suites) - set(SUITES)
        if unknown:
            raise PreconditionError(f"unknown suites {sorted(unknown)}; have {list(SUITES)}")
        if self.widths is None and self.schedule == "custom":
            object.__setattr__(self, "schedule", "paper")
        if self.widths is not None and self.schedule == "paper":
            raise PreconditionError("give either widths or the default schedule, not both")

    @classmethod
    def from_json(cls, source) -> "ExperimentConfig":
        data = json.loads(Path(source).read_text()) if not isinstance(source, dict) else dict(source)
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise PreconditionError(f"unknown config keys {sorted(extra)}")
        return cls(**data)

    def override(self, **flags) -> "ExperimentConfig":
        """Flags win over file values; ``None`` means the flag was not given."""
        given = {k: v for k, v in flags.items() if v is not None and v != ()}
        if "widths" in given and "schedule" not in given:
            given["schedule"] = "custom"
        return replace(self, **given)

    @property
    def teach_k(self) -> int:
        if self.greedy_k is not None:
            return self.greedy_k
        return 1 if self.construction == "rectangles" else self.k

    def resolved_widths(self) -> tuple[int, ...]:
        if self.widths is not None:
            return self.widths
        if self.construction == "rectangles":
            return rectangles.default_rect_widths(self.levels)
        return headtail.default_ht_widths(self.levels, self.k)

    def to_json(self) -> dict:
        return jsonable(asdict(self))


def analytic(cfg: ExperimentConfig) -> AnalyticCounts:
    if cfg.construction == "rectangles":
        return rectangles.rect_analytic_sizes(cfg.levels, cfg.resolved_widths())
    return headtail.ht_analytic_sizes(headtail.HTParams(cfg.levels, cfg.k, cfg.resolved_widths()))


def build(cfg: ExperimentConfig) -> ConceptClass:
    if cfg.construction == "rectangles":
        return rectangles.build_rectangles(cfg.levels, cfg.resolved_widths(), force=cfg.force)
    return headtail.build_headtail(headtail.HTParams(cfg.levels, cfg.k, cfg.resolved_widths()), force=cfg.force)


def validate_schedule(C: ConceptClass):
    kind = C.domain.construction
    if kind == rectangles.CONSTRUCTION:
        return rectangles.validate_rect_widths(rectangles.rect_widths_from_domain(C.domain))
    if kind == headtail.CONSTRUCTION:
        p = headtail.params_from_domain(C.domain)
        return headtail.validate_ht_widths(p.levels, p.k, p.widths)
    raise PreconditionError("class carries no construction meta")


# -- suites --------------------------------------------------------------------


def _suite_realizable(C: ConceptClass, **_):
    if C.domain.construction != rectangles.CONSTRUCTION:
        raise PreconditionError("suite 'realizable' needs a rectangles class")
    for i in range(len(C)):
        box = rectangles.realize_rectangle(C.concept(i), C.domain)
        if not box:
            return False, dict(concept=i, tags=list(C.origins(i)), box=asdict(box.box), inside_negative=box.point)
    return True, dict(checked=len(C))


def _headtail_only(name, check):
    def run(C: ConceptClass, **_):
        if C.domain.construction != headtail.CONSTRUCTION:
            raise PreconditionError(f"suite {name!r} needs a headtail class")
        report = check(C)
        return report.ok, dict(checked=report.checked, counterexample=report.counterexample)

    return run


def _suite_domination(C: ConceptClass, **_):
    report = validate_schedule(C)
    return report.ok, asdict(report)


def _suite_dynamics(C: ConceptClass, k=None, **_):
    report = oracles.verify_greedy_dynamics(C, k)
    return report.ok, asdict(report)


def _suite_crosscheck(C: ConceptClass, k=None, seed=0, trials=100, **_):
    k = k or (1 if C.domain.construction == rectangles.CONSTRUCTION else 2)
    report = oracles.crosscheck(C, k, trials, seed)
    return report.ok, asdict(report)


def _suite_vc_sample(C: ConceptClass, seed=0, vc_size=None, vc_samples=1000, **_):
    kind = C.domain.construction
    if vc_size is None:
        if kind == rectangles.CONSTRUCTION:
            vc_size = 5
        elif kind == headtail.CONSTRUCTION:
            vc_size = 4 * headtail.params_from_domain(C.domain).k + 2
        else:
            raise PreconditionError("suite 'vc-sample' needs --vc-size for a plain class")
    report = oracles.vc_dimension(C, "sample", min(vc_size, C.n_points), vc_samples, seed)
    return report.sample["shattered"] == 0, report.sample


_SUITES = {
    "domination": _suite_domination,
    "fand": _headtail_only("fand", headtail.check_f_and),
    "realizable": _suite_realizable,
    "disjoint": _headtail_only("disjoint", headtail.check_disjoint),
    "prefix": _headtail_only("prefix", headtail.check_prefix_rows),
    "dynamics": _suite_dynamics,
    "crosscheck": _suite_crosscheck,
    "vc-sample": _suite_vc_sample,
}


def run_suites(C: ConceptClass, names, **options) -> dict:
    """Run named suites in the given order; each gives {"ok": bool, "detail": ...}."""
    out = {}
    for name in names:
        if name not in _SUITES:
            raise PreconditionError(f"unknown suite {name!r}; have {list(SUITES)}")
        ok, detail = _SUITES[name](C, **options)
        out[name] = dict(ok=bool(ok), detail=jsonable(detail))
    return out


# -- full runs -------------------------------------------------------------------


def dump_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def run_experiment(cfg: ExperimentConfig, timings: bool = False) -> dict:
    """Build, teach greedily, run suites and write the configured outputs.

    The report holds no wall-clock data unless ``timings`` is set, so that
    equal configs give byte-identical reports.
    """
    clock = {}
    t0 = time.perf_counter()
    counts = analytic(cfg)
    C = build(cfg)
    clock["build"] = time.perf_counter() - t0
    if cfg.class_out:
        write_ccls(C, cfg.class_out)
    t0 = time.perf_counter()
    budget.require_within(budget.scan_cost(C.n_points, len(C), cfg.teach_k), "greedy scan", cfg.budget)
    cert, trace = greedy_teach(C, cfg.teach_k)
    clock["greedy"] = time.perf_counter() - t0
    if cfg.trace_out:
        with open(cfg.trace_out, "w", newline="") as fh:
            write_trace(trace, fh, C.concept(cert.concept_index).to_hex())
    t0 = time.perf_counter()
    suites = run_suites(
        C, cfg.suites, k=cfg.teach_k, seed=cfg.seed, trials=cfg.trials, vc_size=cfg.vc_size, vc_samples=cfg.vc_samples
    )
    clock["suites"] = time.perf_counter() - t0
    report = dict(
        config=cfg.to_json(),
        tie_break=TIE_BREAK,
        analytic=counts.to_json(),
        materialized=dict(points=C.n_points, concepts=len(C)),
        greedy=dict(
            k=cfg.teach_k,
            size=trace.size,
            iterations=len(trace.steps),
            concept_index=cert.concept_index,
            concept_tags=list(C.origins(cert.concept_index)),
            teaching_set=list(cert.teaching_set),
        ),
        suites=suites,
        ok=all(s["ok"] for s in suites.values()),
    )
    if timings:
        report["wall_seconds"] = {k: round(v, 6) for k, v in clock.items()}
    if cfg.report_out:
        Path(cfg.report_out).write_text(dump_json(report))
    return report
