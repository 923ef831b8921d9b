"""Command-line driver: ``dop-walk run``.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or walk
(unital condition, unitarity, malformed state), 3 an invariant check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import __version__
from .blocks import BlockOperator
from .density import DensityOperator, check_state, pure_density, purity, step, trace
from .errors import ConfigParseError, UnitalConditionViolated, ValidationError, WalkError
from .graph import DirectedGraph, line_window
from .line_walk import paper_coin_family, paper_initial_state, required_radius
from .measurement import collapse, effect_probabilities, sample_outcome, vertex_distribution
from .operators import (
    CoinFamily,
    WalkOperator,
    build_walk_unitary,
    projection_residual,
    reflection_residual,
    unitarity_residual,
    validate_coin_family,
)
from .serialize import (
    distribution_record,
    distributions_to_csv,
    dump_blocks,
    load_blocks,
    state_record,
    to_json,
)

PRESETS = ("paper-line",)
OPERATORS = ("pi", "swap", "u")

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_INVARIANT = 0, 1, 2, 3


@dataclass
class WalkConfig:
    graph: DirectedGraph | None = None
    preset: str | None = None
    margin: int = 1
    coins: CoinFamily | None = None
    initial: Mapping[str, Any] | None = None
    steps: int = 0
    output: str | None = None
    format: str = "json"
    dump_states: bool = False
    dump_operator: str | None = None
    check_invariants: bool = False
    collapse_each_step: bool = False
    tolerance: float = 1e-10
    seed: int = 0

    def validate(self) -> None:
        if (self.graph is None) == (self.preset is None):
            raise ConfigParseError("give exactly one of a graph or a preset")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigParseError(f"unknown preset {self.preset!r}; available: {', '.join(PRESETS)}")
        if self.graph is not None and self.coins is None:
            raise ConfigParseError("a custom graph needs a coin family")
        if self.graph is not None and self.initial is None:
            raise ConfigParseError("a custom graph needs an initial state")
        if self.steps < 0 or self.margin < 0:
            raise ConfigParseError("steps and margin must be nonnegative")
        if self.format not in ("json", "csv"):
            raise ConfigParseError(f"unknown output format {self.format!r}")
        if self.dump_operator is not None and self.dump_operator not in OPERATORS:
            raise ConfigParseError(f"unknown operator {self.dump_operator!r}")
        if not self.tolerance > 0:
            raise ConfigParseError("tolerance must be positive")

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> WalkConfig:
        if not isinstance(data, Mapping):
            raise ConfigParseError("configuration must be a JSON object")
        try:
            graph = DirectedGraph.from_json(data["graph"]) if "graph" in data else None
            coins = CoinFamily.from_json(data["coins"]) if "coins" in data else None
            output = data.get("output") or {}
            checks = set(data.get("checks", ()))
            return cls(
                graph=graph,
                preset=data.get("preset"),
                margin=int(data.get("margin", 1)),
                coins=coins,
                initial=data.get("initial"),
                steps=int(data.get("steps", 0)),
                output=output.get("path"),
                format=output.get("format", "json"),
                dump_states=bool(data.get("dump_states", "states" in checks)),
                dump_operator=data.get("dump_operator"),
                check_invariants=bool(data.get("check_invariants", "invariants" in checks)),
                collapse_each_step=bool(data.get("collapse_each_step", False)),
                tolerance=float(data.get("tolerance", 1e-10)),
                seed=int(data.get("seed", 0)),
            )
        except ValidationError as exc:
            raise ConfigParseError(str(exc)) from exc
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ConfigParseError(f"malformed configuration: {exc!r}") from exc


@dataclass
class Instance:
    graph: DirectedGraph
    family: CoinFamily
    walk: WalkOperator
    rho0: DensityOperator


@dataclass
class CheckReport:
    tol: float
    rows: list[tuple[str, float, bool]] = field(default_factory=list)

    def add(self, name: str, residual: float, ok: bool | None = None) -> None:
        self.rows.append((name, float(residual), residual <= self.tol if ok is None else ok))

    @property
    def ok(self) -> bool:
        return all(ok for _, _, ok in self.rows)

    def lines(self) -> list[str]:
        return [f"{'ok  ' if ok else 'FAIL'} {name}: {res:.3e}" for name, res, ok in self.rows]


def _initial_state(spec: Mapping[str, Any], instance_basis, coin_dim: int, tol: float) -> DensityOperator:
    try:
        if "blocks" in spec:
            return load_blocks(spec["blocks"], instance_basis, coin_dim)
        coin = spec["coin"]
        re = np.asarray(coin["re"], dtype=float)
        im = np.asarray(coin.get("im", np.zeros_like(re)), dtype=float)
        pair = spec["pair"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParseError(f"malformed initial state: {exc!r}") from exc
    return pure_density(re + 1j * im, pair, instance_basis, tol)


def build_instance(config: WalkConfig) -> Instance:
    """Graph, coin family, walk operator and initial state for ``config``."""
    config.validate()
    if config.preset == "paper-line":
        g = line_window(required_radius(config.steps, config.margin))
        f = paper_coin_family(g)
    else:
        g, f = config.graph, config.coins
    validate_coin_family(g, f, config.tolerance).raise_if_invalid()
    walk = build_walk_unitary(g, f, tol=config.tolerance, unitarity_tol=config.tolerance)
    if config.initial is not None:
        rho0 = _initial_state(config.initial, walk.basis, f.coin_dim, config.tolerance)
    else:
        rho0 = paper_initial_state(walk.basis)
    return Instance(g, f, walk, rho0)


def operator_by_name(walk: WalkOperator, which: str) -> BlockOperator:
    return {"pi": walk.projector, "swap": walk.swap, "u": walk.u}[which]


def _operator_checks(walk: WalkOperator, report: CheckReport) -> None:
    report.add("projector idempotent and Hermitian", projection_residual(walk.projector))
    report.add("reflection squares to identity", reflection_residual(walk.reflection))
    swap = walk.swap
    sq = swap @ swap - BlockOperator.identity(swap.basis, swap.coin_dim)
    report.add("swap squares to identity", sq.max_abs(), sq.max_abs() == 0.0)
    report.add("walk operator unitary", unitarity_residual(walk.u))


def simulate(config: WalkConfig, instance: Instance):
    """Run the walk; returns ``(distribution records, states, check report)``."""
    walk = instance.walk
    u_dagger = walk.u.dagger()
    rng = np.random.default_rng(config.seed)
    report = CheckReport(config.tolerance)
    if config.check_invariants:
        _operator_checks(walk, report)

    rho = instance.rho0
    tr0, pur0 = trace(rho), purity(rho)
    records, states = [], []
    worst = {"trace": 0.0, "purity": 0.0, "hermiticity": 0.0, "completeness": 0.0}
    for t in range(config.steps + 1):
        if t > 0:
            rho = step(walk, rho, u_dagger)
        states.append(rho)
        dist = vertex_distribution(rho)
        if config.check_invariants:
            diag = check_state(rho) if t == config.steps else None
            herm = _hermiticity(rho)
            worst["hermiticity"] = max(worst["hermiticity"], herm)
            worst["trace"] = max(worst["trace"], abs(trace(rho) - tr0))
            if not config.collapse_each_step:
                worst["purity"] = max(worst["purity"], abs(purity(rho) - pur0))
            total = sum(effect_probabilities(rho).values())
            worst["completeness"] = max(worst["completeness"], abs(total - trace(rho)))
            if diag is not None:
                report.add("final state positive semidefinite", max(-diag.min_eigenvalue, 0.0),
                           diag.min_eigenvalue >= -1e-8)
        outcome = None
        if config.collapse_each_step and t < config.steps:
            outcome = sample_outcome(rho, rng)
            rho = collapse(rho, outcome)
            tr0 = trace(rho)
        records.append(distribution_record(t, dist, outcome))
    if config.check_invariants:
        report.add("trace preserved", worst["trace"])
        if not config.collapse_each_step:
            report.add("purity preserved", worst["purity"])
        report.add("hermiticity", worst["hermiticity"])
        report.add("effect probabilities sum to trace", worst["completeness"])
    return records, states, report


def _hermiticity(rho: BlockOperator) -> float:
    return (rho - rho.dagger()).max_abs()


def _prefix(config: WalkConfig) -> Path:
    if config.output:
        out = Path(config.output)
        return out.with_name(out.stem)
    return Path("dop-walk")


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def run(config: WalkConfig) -> int:
    """Execute ``config``; returns the process exit code."""
    try:
        instance = build_instance(config)
    except UnitalConditionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        for j, r in exc.residuals.items():
            print(f"residual vertex={j} value={r:+.6e}", file=sys.stderr)
        return EXIT_INVALID
    except (ValidationError, ConfigParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        records, states, report = simulate(config, instance)
    except WalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    prefix = _prefix(config)
    try:
        if config.format == "csv":
            text = distributions_to_csv(records)
        else:
            text = to_json(records)
        _write(Path(config.output) if config.output else None, text)
        if config.dump_states:
            dump = [state_record(t, s) for t, s in enumerate(states)]
            Path(f"{prefix}.states.json").write_text(to_json(dump))
        if config.dump_operator:
            op = operator_by_name(instance.walk, config.dump_operator)
            Path(f"{prefix}.{config.dump_operator}.json").write_text(to_json(dump_blocks(op)))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    if config.check_invariants:
        for line in report.lines():
            print(line, file=sys.stderr)
        if not report.ok:
            return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dop-walk", description="Quantum walks on directed graphs in the density operator picture."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evolve a walk and write its position distributions")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="walk configuration (JSON)")
    src.add_argument("--preset", choices=PRESETS)
    p.add_argument("--steps", type=int)
    p.add_argument("--margin", type=int, help="window radius beyond the light cone (preset only)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--output", help="distribution file; stdout if omitted")
    p.add_argument("--dump-states", action="store_true", default=None,
                   help="write every state to PREFIX.states.json")
    p.add_argument("--dump-operator", choices=OPERATORS,
                   help="write the chosen operator to PREFIX.<name>.json")
    p.add_argument("--check-invariants", action="store_true", default=None)
    p.add_argument("--collapse-each-step", action="store_true", default=None,
                   help="measure the position after every step and continue from the collapsed state")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--seed", type=int, help="RNG seed for --collapse-each-step")
    return parser


def config_from_args(args: argparse.Namespace) -> WalkConfig:
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"{args.config}: {exc}") from exc
        config = WalkConfig.from_json(data)
    else:
        config = WalkConfig(preset=args.preset)
    overrides = {
        name: getattr(args, name)
        for name in ("steps", "margin", "format", "output", "dump_states", "dump_operator",
                     "check_invariants", "collapse_each_step", "tolerance", "seed")
        if getattr(args, name) is not None
    }
    return replace(config, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
