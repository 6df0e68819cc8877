"""
sparse-evolve command line.

    sparse-evolve grow --alpha 3/4 --seed 1 --T 100 --out g.json
    sparse-evolve count --graph g.json --extension ext.json --roots 3
    sparse-evolve expect --extension ext.json --alpha 3/4 --tau0 1 --T 3 --mode oracle
    sparse-evolve experiment --spec slope.json --threads 4 --out runs/slope
    sparse-evolve classify --extension ext.json --alpha 3/4
    sparse-evolve serve

Exit codes: 0 success, 2 argument error, 3 degeneracy, 4 infeasible oracle.
"""
import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError
from sqlalchemy.exc import SQLAlchemyError

from sparse_evolve.core.config import settings
from sparse_evolve.core.database import create_tables, make_engine, make_sessionmaker
from sparse_evolve.core.exceptions import InvalidArgumentError, LabError
from sparse_evolve.crud.experiment_run import experiment_run as crud_experiment_run
from sparse_evolve.engine.calculus import describe
from sparse_evolve.engine.census import count_embeddings
from sparse_evolve.engine.evolve import EvolvingGraph, ProcessConfig, run_to
from sparse_evolve.engine.expectation import (
    asymptotic_exponent,
    exact_expectation_oracle,
    expected_count_closed,
)
from sparse_evolve.engine.experiments import run_experiment, write_csv, write_report, write_rows
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.experiment import ExperimentReport, ExperimentSpec
from sparse_evolve.schemas.extension import RootedExtension
from sparse_evolve.schemas.graph import GraphFile

logger = logging.getLogger("sparse_evolve")

M = TypeVar("M", bound=BaseModel)


def describe_validation_error(exc: ValidationError) -> str:
    first = exc.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"invalid value for '{key}': {first['msg']}"


def load_model(path: Path, model: Type[M]) -> M:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidArgumentError(f"cannot read {path}: {e.strerror}")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(
            f"{path}:{e.lineno}:{e.colno}: {e.msg}", context={"line": e.lineno, "column": e.colno}
        )
    try:
        return model.model_validate(payload)
    except ValidationError as e:
        raise InvalidArgumentError(f"{path}: {describe_validation_error(e)}")


def parse_alpha(text: str) -> Alpha:
    try:
        return Alpha.parse(text)
    except ValidationError as e:
        raise InvalidArgumentError(f"--alpha: {describe_validation_error(e)}")


def parse_ids(text: Optional[str]) -> List[int]:
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InvalidArgumentError(f"expected comma-separated vertex ids, got {text!r}")


def emit(payload: Any, out: Optional[Path]) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        logger.info(f"wrote {out}")


def cmd_grow(args: argparse.Namespace) -> int:
    initial = None
    if args.initial:
        initial = EvolvingGraph.from_file(load_model(args.initial, GraphFile))
    if args.T < 1:
        raise InvalidArgumentError("--T must be at least 1")
    config = ProcessConfig(alpha=parse_alpha(args.alpha), seed=args.seed, initial_graph=initial)
    graph = run_to(config, args.T)
    emit(graph.to_file().model_dump(mode="json"), args.out)
    return 0


def cmd_count(args: argparse.Namespace) -> int:
    graph = EvolvingGraph.from_file(load_model(args.graph, GraphFile))
    ext = load_model(args.extension, RootedExtension)
    roots = parse_ids(args.roots)
    forbidden = set(parse_ids(args.forbidden))
    if args.new_since is not None:
        forbidden |= set(range(1, args.new_since + 1)) - set(roots)
    result = count_embeddings(graph, ext, roots, forbidden)
    emit(result.to_record(), args.out)
    return 0


def cmd_expect(args: argparse.Namespace) -> int:
    ext = load_model(args.extension, RootedExtension)
    alpha = parse_alpha(args.alpha)
    payload = {"alpha": str(alpha), "tau0": args.tau0, "T": args.T}
    payload["asymptotic"] = asymptotic_exponent(ext, alpha).model_dump(mode="json")
    closed = oracle = None
    if args.mode in ("closed", "both"):
        closed = expected_count_closed(ext, alpha, args.tau0, args.T)
        payload["closed"] = closed.model_dump(mode="json")
    if args.mode in ("oracle", "both"):
        oracle = exact_expectation_oracle(ext, alpha, args.tau0, args.T)
        payload["oracle"] = oracle
    if closed is not None and oracle is not None and closed.value != 0:
        payload["ratio"] = oracle / closed.value
    emit(payload, args.out)
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    ext = load_model(args.extension, RootedExtension)
    emit(describe(ext, parse_alpha(args.alpha)).model_dump(mode="json"), args.out)
    return 0


async def record_run(report: ExperimentReport) -> str:
    engine = make_engine(settings.DATABASE_URL)
    try:
        await create_tables(engine)
        async with make_sessionmaker(engine)() as db:
            run = await crud_experiment_run.record_report(db, report=report)
            return run.id
    finally:
        await engine.dispose()


def cmd_experiment(args: argparse.Namespace) -> int:
    spec = load_model(args.spec, ExperimentSpec)
    if args.allow_large:
        spec = spec.model_copy(update={"allow_large": True})
    if args.threads < 1:
        raise InvalidArgumentError("--threads must be at least 1")
    result = run_experiment(spec, threads=args.threads)

    if args.out is not None:
        write_csv(result, args.out.with_suffix(".csv"))
        write_report(result.report, args.out.with_suffix(".json"))
    if args.format == "csv":
        write_rows(result, sys.stdout)
    else:
        sys.stdout.write(result.report.model_dump_json(indent=2) + "\n")

    if settings.RECORD_RUNS and not args.no_record:
        try:
            run_id = asyncio.run(record_run(result.report))
            logger.info(f"recorded run {run_id}")
        except SQLAlchemyError as e:
            logger.error(f"could not record run: {e}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("sparse_evolve.main:app", host=args.host, port=args.port, log_level=settings.LOG_LEVEL.lower())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparse-evolve", description="Evolving sparse random graph lab.")
    sub = parser.add_subparsers(dest="command", required=True)

    grow = sub.add_parser("grow", help="grow G(T) and write the canonical graph file")
    grow.add_argument("--alpha", required=True)
    grow.add_argument("--seed", type=int, default=0)
    grow.add_argument("--T", type=int, required=True)
    grow.add_argument("--initial", type=Path, help="graph file replacing the single starting vertex")
    grow.add_argument("--out", type=Path)
    grow.set_defaults(handler=cmd_grow)

    count = sub.add_parser("count", help="count induced rooted embeddings")
    count.add_argument("--graph", type=Path, required=True)
    count.add_argument("--extension", type=Path, required=True)
    count.add_argument("--roots", default="", help="comma-separated vertex ids")
    count.add_argument("--forbidden", default="", help="comma-separated vertex ids")
    count.add_argument("--new-since", type=int, dest="new_since", help="forbid G(tau0) apart from the roots")
    count.add_argument("--out", type=Path)
    count.set_defaults(handler=cmd_count)

    expect = sub.add_parser("expect", help="closed-form and exact expected counts")
    expect.add_argument("--extension", type=Path, required=True)
    expect.add_argument("--alpha", required=True)
    expect.add_argument("--tau0", type=int, required=True)
    expect.add_argument("--T", type=int, required=True)
    expect.add_argument("--mode", choices=["closed", "oracle", "both"], default="both")
    expect.add_argument("--out", type=Path)
    expect.set_defaults(handler=cmd_expect)

    experiment = sub.add_parser("experiment", help="run a seeded Monte Carlo experiment")
    experiment.add_argument("--spec", type=Path, required=True)
    experiment.add_argument("--threads", type=int, default=settings.SPARSE_EVOLVE_THREADS)
    experiment.add_argument("--out", type=Path, help="prefix for the .csv and .json outputs")
    experiment.add_argument("--format", choices=["csv", "json"], default="json")
    experiment.add_argument("--no-record", action="store_true", dest="no_record")
    experiment.add_argument("--allow-large", action="store_true", dest="allow_large")
    experiment.set_defaults(handler=cmd_experiment)

    classify = sub.add_parser("classify", help="predimension calculus for one extension")
    classify.add_argument("--extension", type=Path, required=True)
    classify.add_argument("--alpha", required=True)
    classify.add_argument("--out", type=Path)
    classify.set_defaults(handler=cmd_classify)

    serve = sub.add_parser("serve", help="start the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except LabError as e:
        logger.error(e.detail)
        sys.stderr.write(json.dumps(e.to_dict()) + "\n")
        return e.exit_code
    except ValidationError as e:
        sys.stderr.write(json.dumps({"error": "InvalidArgumentError", "detail": describe_validation_error(e)}) + "\n")
        return InvalidArgumentError.exit_code


if __name__ == "__main__":
    sys.exit(main())
