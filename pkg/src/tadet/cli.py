"""Command-line pipeline driver.

Reads a model (JSON, or UPPAAL XML by extension), unfolds it to the
requested depth, removes silent transitions, determinizes with the chosen
variant and emits the result as JSON, DOT or SMT-LIB together with a JSON
report of per-stage sizes and timings.

Exit codes: 0 ok, 1 usage, 2 parse, 3 precondition, 4 resource limit,
5 equivalence failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import (
    ResourceLimitError,
    StructuralError,
    TimedAutomaton,
    UnsupportedInputError,
    disj,
    guard_clocks,
)
from .determinize import (
    DeterminizeConfig,
    determinize_guard_oriented,
    determinize_standard,
    pipeline_on_the_fly,
)
from .equivalence import language_equal, path_constraints
from .modelio import ParseError, UnsupportedXmlError, export_dot, parse_model, \
    import_uppaal_xml, serialize_model
from .silent import remove_all_silent
from .solver import to_smtlib
from .unfold import Tree, rename_clocks, unfold

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_RESOURCE = 4
EXIT_NOT_EQUIVALENT = 5

VARIANTS = ("std", "new", "otf")


@dataclass
class StageReport:
    name: str
    locations: int
    transitions: int
    millis: float


@dataclass
class PipelineReport:
    variant: str
    depth: int
    stages: list[StageReport] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "depth": self.depth,
            "stages": [
                {
                    "name": s.name,
                    "locations": s.locations,
                    "transitions": s.transitions,
                    "millis": round(s.millis, 3),
                }
                for s in self.stages
            ],
        }


@dataclass
class PipelineResult:
    final: Tree
    report: PipelineReport
    counterexample: Optional[dict] = None


def _load(path: str) -> TimedAutomaton:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".xml"):
        return import_uppaal_xml(text)
    return parse_model(text)


def run_pipeline(
    a: TimedAutomaton,
    depth: int,
    variant: str = "new",
    prune_leaves: bool = False,
    check_equiv: bool = False,
) -> PipelineResult:
    """Unfold, rename, remove silent steps and determinize; timed stages."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant: {variant}")
    report = PipelineReport(variant=variant, depth=depth)

    def staged(name: str, f, *args):
        t0 = time.perf_counter()
        out = f(*args)
        report.stages.append(StageReport(
            name, out.location_count(), out.transition_count(),
            (time.perf_counter() - t0) * 1000,
        ))
        return out

    if variant == "otf":
        final = staged("on-the-fly", pipeline_on_the_fly, a, depth)
    else:
        tree = staged("unfold", unfold, a, depth, prune_leaves)
        tree = rename_clocks(tree)
        removed = staged("remove-silent", remove_all_silent, tree)
        if variant == "new":
            final = staged("determinize-new", determinize_guard_oriented, removed)
        else:
            final = staged("determinize-std", determinize_standard, removed)

    counterexample = None
    if check_equiv:
        reference = rename_clocks(unfold(a, depth, prune_leaves))
        verdict = language_equal(reference, final)
        if not verdict.equal:
            counterexample = {
                "word": list(verdict.word),
                "times": [str(t) for t in verdict.times],
                "direction": verdict.direction,
            }
    return PipelineResult(final, report, counterexample)


def _emit(tree: Tree, kind: str) -> str:
    out = tree.to_automaton()
    if kind == "json":
        return serialize_model(out)
    if kind == "dot":
        return export_dot(out)
    constraints = path_constraints(tree)
    language = disj(*(constraints[w] for w in sorted(constraints)))
    return to_smtlib(language, guard_clocks(language))


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": {"code": kind, "message": message}}), file=sys.stderr)
    return code


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tadet",
        description="Determinize bounded timed automata with silent transitions.",
    )
    parser.add_argument("--input", required=True, help="model file (.json or .xml)")
    parser.add_argument("--depth", type=int, required=True, help="unfolding depth k >= 1")
    parser.add_argument("--variant", choices=VARIANTS, default="new")
    parser.add_argument("--prune-leaves", action="store_true",
                        help="drop non-accepting unfolding leaves")
    parser.add_argument("--emit", choices=("json", "dot", "smt2"),
                        help="write the determinized automaton to stdout")
    parser.add_argument("--check-equiv", action="store_true",
                        help="verify input/output language equality")
    parser.add_argument("--report", metavar="FILE",
                        help="write the JSON pipeline report here")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.depth < 1:
        return _fail(EXIT_USAGE, "usage", "--depth must be at least 1")

    try:
        model = _load(args.input)
    except FileNotFoundError as e:
        return _fail(EXIT_USAGE, "usage", str(e))
    except (ParseError, UnsupportedXmlError) as e:
        return _fail(EXIT_PARSE, "parse", str(e))

    try:
        result = run_pipeline(
            model, args.depth, args.variant, args.prune_leaves, args.check_equiv
        )
    except (StructuralError, UnsupportedInputError) as e:
        return _fail(EXIT_PRECONDITION, "precondition", str(e))
    except ResourceLimitError as e:
        return _fail(EXIT_RESOURCE, "resource-limit", str(e))

    if args.report:
        Path(args.report).write_text(
            json.dumps(result.report.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    if args.emit:
        sys.stdout.write(_emit(result.final, args.emit))
    if result.counterexample is not None:
        return _fail(
            EXIT_NOT_EQUIVALENT, "not-equivalent", json.dumps(result.counterexample)
        )
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
