"""Command-line benchmark harness."""

import argparse
import concurrent.futures
import csv
import dataclasses
import json
import logging
import pathlib as pl
import sys
import typing as tp

from geom_bp import consts
from geom_bp import exceptions
from geom_bp import heuristics
from geom_bp import instance_tools
from geom_bp import solver_klass
from geom_bp import structs
from geom_bp import types as itp

LOGGER = logging.getLogger(__name__)

INSTANCE_COLUMNS = (
    "instance",
    "class",
    "n_col_root",
    "n_exact_root",
    "n_total_node",
    "n_poll_node",
    "optimum",
    "lower_bound",
    "proved",
    "time",
    "trivial",
    "error",
)
CLASS_COLUMNS = (
    "class",
    "instances",
    "solved",
    "failed",
    "trivial",
    "avg_time",
    "avg_n_col_root",
    "avg_n_exact_root",
    "avg_n_total_node",
    "avg_n_poll_node",
)


def is_trivial(inst: structs.Instance) -> bool:
    """Check whether the combinatorial lower bound meets the Best Fit Decreasing count."""
    return heuristics.lower_bound(inst) == heuristics.best_fit_decreasing(inst).objective


def filter_trivial(
    instances: tp.Iterable[structs.Instance], exclude: bool = False
) -> tp.List[tp.Tuple[structs.Instance, bool]]:
    """Label instances whose lower bound equals the BFD bin count as trivial.

    Args:
        instances: Canonical instances.
        exclude: Drop trivial instances instead of labeling them (optional).

    Returns:
        List[Tuple[structs.Instance, bool]]: Instances with their trivial flag.
    """
    labeled = [(inst, is_trivial(inst)) for inst in instances]
    if exclude:
        return [(inst, trivial) for inst, trivial in labeled if not trivial]
    return labeled


def collect_instance_files(paths: itp.FileTypeList) -> tp.List[pl.Path]:
    """Expand directories into their files, sorted, skipping hidden files."""
    files: tp.List[pl.Path] = []
    for path in paths:
        path = pl.Path(path).expanduser()
        if path.is_dir():
            files.extend(
                sorted(
                    p
                    for p in path.rglob("*")
                    if p.is_file()
                    and not any(part.startswith(".") for part in p.relative_to(path).parts)
                )
            )
        else:
            files.append(path)
    return files


def solve_file(
    instance_file: itp.FileType,
    config: structs.SolverConfig,
    fmt: consts.InstanceFormat = consts.InstanceFormat.AUTO,
    class_label: str = "",
    exclude_trivial: bool = False,
) -> tp.Optional[structs.RunRecord]:
    """Solve one instance file, turning read and parse errors into a failed record.

    Returns:
        Optional[structs.RunRecord]: A record, None for an excluded trivial instance.
    """
    instance_path = pl.Path(instance_file)
    label = class_label or instance_path.parent.name
    try:
        inst = instance_tools.read_instance_file(instance_path, fmt=fmt)
    except (OSError, UnicodeDecodeError, exceptions.GeomBPError) as exc:
        LOGGER.error(f"Failed to read `{instance_path}`: {exc}")  # noqa: TRY400
        return structs.RunRecord(
            instance_name=instance_path.stem, class_label=label, error=str(exc) or repr(exc)
        )

    trivial = is_trivial(inst)
    if trivial and exclude_trivial:
        LOGGER.info(f"Excluding the trivial instance `{inst.name}`")
        return None

    try:
        report = solver_klass.GeomBP(config=config).solve(inst)
    except exceptions.GeomBPError as exc:
        LOGGER.error(f"Failed to solve `{inst.name}`: {exc}")  # noqa: TRY400
        return structs.RunRecord(
            instance_name=inst.name, class_label=label, trivial=trivial, error=str(exc)
        )

    return structs.RunRecord(
        instance_name=inst.name,
        class_label=label,
        optimum=report.optimum,
        lower_bound=report.lower_bound,
        proved=report.proved_optimal,
        wall_time=report.wall_time,
        n_col_root=report.n_col_root,
        n_exact_root=report.n_exact_root,
        n_total_node=report.n_total_node,
        n_poll_node=report.n_poll_node,
        trivial=trivial,
    )


def _record_row(record: structs.RunRecord, omit_timings: bool) -> tp.Dict[str, tp.Any]:
    return {
        "instance": record.instance_name,
        "class": record.class_label,
        "n_col_root": record.n_col_root,
        "n_exact_root": record.n_exact_root,
        "n_total_node": record.n_total_node,
        "n_poll_node": record.n_poll_node,
        "optimum": record.optimum,
        "lower_bound": record.lower_bound,
        "proved": record.proved,
        "time": 0.0 if omit_timings else round(record.wall_time, 6),
        "trivial": record.trivial,
        "error": record.error,
    }


def aggregate(
    records: tp.Sequence[structs.RunRecord], omit_timings: bool = False
) -> tp.List[tp.Dict[str, tp.Any]]:
    """Compute per-class rows: counts, average time and average counters of solved runs."""
    rows = []
    for label in sorted({r.class_label for r in records}):
        members = [r for r in records if r.class_label == label]
        ran = [r for r in members if not r.failed]

        def _avg(values: tp.List[float], ran: tp.List[structs.RunRecord] = ran) -> float:
            return round(sum(values) / len(ran), 6) if ran else 0.0

        rows.append(
            {
                "class": label,
                "instances": len(members),
                "solved": sum(1 for r in ran if r.proved),
                "failed": len(members) - len(ran),
                "trivial": sum(1 for r in members if r.trivial),
                "avg_time": 0.0 if omit_timings else _avg([r.wall_time for r in ran]),
                "avg_n_col_root": _avg([r.n_col_root for r in ran]),
                "avg_n_exact_root": _avg([r.n_exact_root for r in ran]),
                "avg_n_total_node": _avg([r.n_total_node for r in ran]),
                "avg_n_poll_node": _avg([r.n_poll_node for r in ran]),
            }
        )
    return rows


def _config_to_dict(config: structs.SolverConfig) -> tp.Dict[str, tp.Any]:
    return {
        k: v.value if isinstance(v, (consts.Criterion, consts.BatchMode)) else v
        for k, v in dataclasses.asdict(config).items()
    }


def write_reports(
    records: tp.Sequence[structs.RunRecord],
    out_dir: itp.FileType,
    config: structs.SolverConfig,
    omit_timings: bool = False,
) -> tp.List[pl.Path]:
    """Write per-instance and per-class CSV reports and a JSON report with both.

    Returns:
        List[Path]: Paths of the written files.
    """
    out_dir = pl.Path(out_dir).expanduser()
    out_dir.mkdir(parents=True, exist_ok=True)
    instance_rows = [_record_row(r, omit_timings=omit_timings) for r in records]
    class_rows = aggregate(records, omit_timings=omit_timings)

    instances_csv = out_dir / "instances.csv"
    with open(instances_csv, "w", encoding="utf-8", newline="") as out_fp:
        writer = csv.DictWriter(out_fp, fieldnames=INSTANCE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(instance_rows)

    classes_csv = out_dir / "classes.csv"
    with open(classes_csv, "w", encoding="utf-8", newline="") as out_fp:
        writer = csv.DictWriter(out_fp, fieldnames=CLASS_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(class_rows)

    report_json = out_dir / "report.json"
    with open(report_json, "w", encoding="utf-8") as out_fp:
        json.dump(
            {
                "format_version": consts.FORMAT_VERSION,
                "config": _config_to_dict(config),
                "instances": instance_rows,
                "classes": class_rows,
            },
            out_fp,
            indent=2,
        )
        out_fp.write("\n")

    LOGGER.info(f"Reports for {len(records)} instances written to `{out_dir}`")
    return [instances_csv, classes_csv, report_json]


def run_benchmark(
    paths: itp.FileTypeList,
    config: structs.SolverConfig,
    out_dir: itp.FileType,
    fmt: consts.InstanceFormat = consts.InstanceFormat.AUTO,
    jobs: int = 1,
    class_label: str = "",
    exclude_trivial: bool = False,
    omit_timings: bool = False,
) -> tp.List[structs.RunRecord]:
    """Solve every instance found under `paths` and write the reports to `out_dir`.

    Args:
        paths: Instance files and directories.
        config: Solver configuration.
        out_dir: A directory for the reports.
        fmt: An instance format (optional, auto-detected by default).
        jobs: A number of worker processes (optional).
        class_label: A class label for all instances (optional, parent directory name
            by default).
        exclude_trivial: Skip instances whose lower bound equals the BFD count (optional).
        omit_timings: Write timing columns as 0 (optional).

    Returns:
        List[structs.RunRecord]: Records in file order.
    """
    files = collect_instance_files(paths)
    LOGGER.info(f"Running {len(files)} instance files with {jobs} job(s)")

    def _solve_args(instance_file: pl.Path) -> tp.Dict[str, tp.Any]:
        return {
            "instance_file": instance_file,
            "config": config,
            "fmt": fmt,
            "class_label": class_label,
            "exclude_trivial": exclude_trivial,
        }

    results: tp.List[tp.Optional[structs.RunRecord]]
    if jobs > 1 and len(files) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(solve_file, **_solve_args(f)) for f in files]
            results = [f.result() for f in futures]
    else:
        results = [solve_file(**_solve_args(f)) for f in files]

    records = [r for r in results if r is not None]
    write_reports(records, out_dir=out_dir, config=config, omit_timings=omit_timings)
    return records


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geom-bp",
        description="Solve bin packing / cutting stock instances to proven optimality.",
    )
    parser.add_argument("paths", nargs="*", type=pl.Path, help="instance files or directories")
    parser.add_argument(
        "--format",
        choices=[f.value for f in consts.InstanceFormat],
        default=consts.InstanceFormat.AUTO.value,
        help="instance file format",
    )
    parser.add_argument(
        "--criterion",
        choices=[c.value for c in consts.Criterion],
        default=consts.Criterion.L2.value,
        help="diving criterion",
    )
    parser.add_argument(
        "--time-limit",
        type=float,
        default=consts.DEFAULT_TIME_LIMIT,
        help=f"time limit per instance in seconds (default {consts.DEFAULT_TIME_LIMIT:g}, "
        f"{consts.EXTENDED_TIME_LIMIT:g} for hard classes)",
    )
    parser.add_argument(
        "--delta0", type=float, default=consts.DELTA0, help="initial decrement value"
    )
    parser.add_argument(
        "--batch-stride",
        type=int,
        default=consts.DEFAULT_BATCH_STRIDE,
        help="run batch diving at depths divisible by the stride, 0 disables it",
    )
    parser.add_argument(
        "--batch-mode",
        choices=[m.value for m in consts.BatchMode],
        default=consts.BatchMode.INEQUALITY.value,
        help="demand rows of the batch selection",
    )
    parser.add_argument(
        "--sectional", choices=["on", "off"], default="on", help="binary sectional pricing"
    )
    parser.add_argument("--jobs", type=int, default=1, help="number of worker processes")
    parser.add_argument(
        "--out", type=pl.Path, default=pl.Path("geom_bp_report"), help="report directory"
    )
    parser.add_argument(
        "--exclude-trivial",
        action="store_true",
        help="skip instances whose lower bound equals the BFD bin count",
    )
    parser.add_argument(
        "--strict", action="store_true", help="exit with code 2 when any instance is unproved"
    )
    parser.add_argument("--class-label", default="", help="class label for all instances")
    parser.add_argument("--omit-timings", action="store_true", help="write timing columns as 0")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="increase logging verbosity"
    )
    return parser


def config_from_args(args: argparse.Namespace) -> structs.SolverConfig:
    return structs.SolverConfig(
        criterion=consts.Criterion(args.criterion),
        delta0=args.delta0,
        time_limit=args.time_limit,
        batch_stride=args.batch_stride,
        batch_mode=consts.BatchMode(args.batch_mode),
        sectional=args.sectional == "on",
    )


def main(argv: tp.Optional[tp.List[str]] = None) -> int:
    args = get_parser().parse_args(argv)
    log_level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(format="%(asctime)s %(levelname)s %(name)s: %(message)s", level=log_level)

    if args.jobs < 1 or args.batch_stride < 0 or args.time_limit <= 0 or args.delta0 <= 0:
        LOGGER.error(
            "`--jobs` must be positive, `--batch-stride` non-negative, "
            "`--time-limit` and `--delta0` positive"
        )
        return 1

    records = run_benchmark(
        paths=args.paths,
        config=config_from_args(args),
        out_dir=args.out,
        fmt=consts.InstanceFormat(args.format),
        jobs=args.jobs,
        class_label=args.class_label,
        exclude_trivial=args.exclude_trivial,
        omit_timings=args.omit_timings,
    )

    unproved = [r.instance_name for r in records if not r.proved]
    if unproved:
        LOGGER.warning(f"Unproved instances: {', '.join(unproved)}")
    if args.strict and unproved:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
