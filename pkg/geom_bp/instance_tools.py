"""Tools for building, reading, writing and verifying bin packing instances."""

import logging
import pathlib as pl
import typing as tp

from packaging import version

from geom_bp import consts
from geom_bp import exceptions
from geom_bp import structs
from geom_bp import types as itp

LOGGER = logging.getLogger(__name__)


def _check_positive_int(value: tp.Any, what: str, where: str, line: tp.Optional[int]) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        msg = f"The {what} `{value}` on {where} is not an integer."
        raise exceptions.InstanceError(msg, line=line)
    if value <= 0:
        msg = f"The {what} `{value}` on {where} must be positive."
        raise exceptions.InstanceError(msg, line=line)
    return value


def canonicalize(
    capacity: int,
    weights: tp.Iterable[int],
    demands: tp.Optional[tp.Iterable[int]] = None,
    lines: tp.Optional[tp.Sequence[int]] = None,
    name: str = "",
) -> structs.Instance:
    """Merge equal weights and sort items by decreasing weight.

    Args:
        capacity: A bin capacity.
        weights: Item weights, duplicates allowed.
        demands: Demands matching `weights` (optional, one unit per weight by default).
        lines: Source line numbers matching `weights`, used in error messages (optional).
        name: An instance name (optional).

    Returns:
        structs.Instance: A canonical instance.
    """
    weights_l = list(weights)
    demands_l = [1] * len(weights_l) if demands is None else list(demands)
    if len(demands_l) != len(weights_l):
        msg = f"Got {len(weights_l)} weights but {len(demands_l)} demands."
        raise exceptions.InstanceError(msg)
    if not weights_l:
        msg = "An instance needs at least one item."
        raise exceptions.InstanceError(msg)

    # the capacity is always the second line of both text formats
    cap_line = 2 if lines else None
    cap_where = "line 2" if lines else "the instance"
    _check_positive_int(capacity, what="capacity", where=cap_where, line=cap_line)

    merged: tp.Dict[int, int] = {}
    for idx, (weight, demand) in enumerate(zip(weights_l, demands_l)):
        line = lines[idx] if lines else None
        where = f"line {line}" if line is not None else f"item #{idx + 1}"
        _check_positive_int(weight, what="weight", where=where, line=line)
        _check_positive_int(demand, what="demand", where=where, line=line)
        if weight > capacity:
            msg = f"The weight {weight} on {where} exceeds the capacity {capacity}."
            raise exceptions.InstanceError(msg, line=line)
        merged[weight] = merged.get(weight, 0) + demand

    ordered = sorted(merged, reverse=True)
    return structs.Instance(
        capacity=capacity,
        weights=tuple(ordered),
        demands=tuple(merged[w] for w in ordered),
        name=name,
    )


def _parse_int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        msg = f"Non-integer {what} `{token}` on line {line}."
        raise exceptions.InstanceError(msg, line=line) from None


def _single_token(row: tp.Tuple[int, tp.List[str]], what: str) -> int:
    line, tokens = row
    if len(tokens) != 1:
        msg = f"Expected a single {what} on line {line}, got {len(tokens)} tokens."
        raise exceptions.InstanceError(msg, line=line)
    return _parse_int(tokens[0], what=what, line=line)


def parse_instance(
    text: tp.Union[bytes, str],
    fmt: consts.InstanceFormat = consts.InstanceFormat.AUTO,
    name: str = "",
) -> structs.Instance:
    """Parse a BPPLIB instance in the BPP or CSP text format.

    BPP: item line count, capacity, then one weight per line. CSP: distinct item
    count, capacity, then "weight demand" per line. In auto mode the CSP format is
    detected by two tokens on the first item line.

    Args:
        text: Instance contents.
        fmt: An instance format (optional, auto-detected by default).
        name: An instance name (optional).

    Returns:
        structs.Instance: A canonical instance.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8-sig")

    rows = [
        (lineno, line.split())
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]
    if len(rows) < 2:
        msg = "Expected an item count line and a capacity line."
        raise exceptions.InstanceError(msg, line=len(rows) + 1)

    declared = _single_token(rows[0], what="item count")
    if declared < 1:
        msg = f"The item count on line {rows[0][0]} must be positive."
        raise exceptions.InstanceError(msg, line=rows[0][0])
    capacity = _single_token(rows[1], what="capacity")

    item_rows = rows[2:]
    if len(item_rows) < declared:
        last_line = item_rows[-1][0] if item_rows else rows[1][0]
        msg = (
            f"{declared} items declared, {len(item_rows)} provided "
            f"(input ends at line {last_line})."
        )
        raise exceptions.InstanceError(msg, line=last_line)
    if len(item_rows) > declared:
        extra_line = item_rows[declared][0]
        msg = f"Unexpected data on line {extra_line}: only {declared} items declared."
        raise exceptions.InstanceError(msg, line=extra_line)

    if fmt == consts.InstanceFormat.AUTO:
        fmt = consts.InstanceFormat.CSP if len(item_rows[0][1]) == 2 else consts.InstanceFormat.BPP
    tokens_per_line = 2 if fmt == consts.InstanceFormat.CSP else 1

    weights = []
    demands = []
    lines = []
    for line, tokens in item_rows:
        if len(tokens) != tokens_per_line:
            msg = (
                f"Expected {tokens_per_line} token(s) on line {line} ({fmt.value} format), "
                f"got {len(tokens)}."
            )
            raise exceptions.InstanceError(msg, line=line)
        weights.append(_parse_int(tokens[0], what="weight", line=line))
        demands.append(_parse_int(tokens[1], what="demand", line=line) if len(tokens) == 2 else 1)
        lines.append(line)

    return canonicalize(capacity=capacity, weights=weights, demands=demands, lines=lines, name=name)


def read_instance_file(
    instance_file: itp.FileType, fmt: consts.InstanceFormat = consts.InstanceFormat.AUTO
) -> structs.Instance:
    """Read an instance file, naming the instance after the file stem."""
    instance_path = pl.Path(instance_file).expanduser()
    LOGGER.debug(f"Reading instance `{instance_path}`")
    return parse_instance(instance_path.read_bytes(), fmt=fmt, name=instance_path.stem)


def serialize_instance(
    inst: structs.Instance, fmt: consts.InstanceFormat = consts.InstanceFormat.CSP
) -> str:
    """Write an instance in the BPP or CSP text format (CSP for auto)."""
    if fmt == consts.InstanceFormat.BPP:
        lines = [str(inst.total_units), str(inst.capacity)]
        for weight, demand in zip(inst.weights, inst.demands):
            lines.extend([str(weight)] * demand)
    else:
        lines = [str(inst.n), str(inst.capacity)]
        lines.extend(f"{w} {d}" for w, d in zip(inst.weights, inst.demands))
    return "\n".join(lines) + "\n"


def verify_solution(inst: structs.Instance, sol: structs.Solution) -> structs.Verification:
    """Check that a solution packs every demand exactly, using feasible bins only.

    Args:
        inst: A canonical instance.
        sol: A solution to check.

    Returns:
        structs.Verification: Falsy on failure, with the list of reasons.
    """
    reasons = []
    for idx, sol_bin in enumerate(sol.bins):
        counts = sol_bin.pattern.counts
        if len(counts) != inst.n:
            reasons.append(f"bin #{idx}: {len(counts)} counts for {inst.n} items")
            continue
        if any(x < 0 for x in counts):
            reasons.append(f"bin #{idx}: negative count")
        load = sol_bin.pattern.weight(inst.weights)
        if load > inst.capacity:
            reasons.append(f"bin #{idx}: weight {load} exceeds capacity {inst.capacity}")
        if sol_bin.load < 0:
            reasons.append(f"bin #{idx}: negative load {sol_bin.load}")

    if not reasons:
        covered = sol.coverage(inst.n)
        for i, (got, demand) in enumerate(zip(covered, inst.demands)):
            if got < demand:
                reasons.append(f"item #{i} (weight {inst.weights[i]}): {got} of {demand} packed")
            elif got > demand:
                reasons.append(
                    f"item #{i} (weight {inst.weights[i]}): {got} packed, demand is {demand}"
                )

    return structs.Verification(ok=not reasons, reasons=tuple(reasons))


def _check_format_version(doc: tp.Dict[str, tp.Any]) -> None:
    doc_version_str = str(doc.get("format_version", consts.FORMAT_VERSION))
    try:
        doc_version = version.parse(doc_version_str)
    except version.InvalidVersion:
        msg = f"Invalid format version `{doc_version_str}`."
        raise exceptions.FormatVersionError(msg) from None

    supported = version.parse(consts.FORMAT_VERSION)
    if doc_version.major > supported.major:
        msg = (
            f"The document format version {doc_version} is newer than the supported "
            f"version {supported}."
        )
        raise exceptions.FormatVersionError(msg)


def instance_to_dict(inst: structs.Instance) -> tp.Dict[str, tp.Any]:
    return {
        "format_version": consts.FORMAT_VERSION,
        "name": inst.name,
        "capacity": inst.capacity,
        "items": [{"weight": w, "demand": d} for w, d in zip(inst.weights, inst.demands)],
    }


def instance_from_dict(doc: tp.Dict[str, tp.Any]) -> structs.Instance:
    _check_format_version(doc)
    items = doc.get("items") or []
    return canonicalize(
        capacity=doc.get("capacity"),  # type: ignore[arg-type]
        weights=[rec.get("weight") for rec in items],
        demands=[rec.get("demand") for rec in items],
        name=str(doc.get("name") or ""),
    )


def solution_to_dict(sol: structs.Solution) -> tp.Dict[str, tp.Any]:
    return {
        "format_version": consts.FORMAT_VERSION,
        "objective": sol.objective,
        "bins": [{"counts": list(b.pattern.counts), "load": b.load} for b in sol.bins],
    }


def solution_from_dict(doc: tp.Dict[str, tp.Any]) -> structs.Solution:
    _check_format_version(doc)
    bins = tuple(
        structs.Bin(
            pattern=structs.Pattern(counts=tuple(int(x) for x in rec["counts"])),
            load=int(rec["load"]),
        )
        for rec in doc.get("bins") or []
    )
    return structs.Solution(bins=bins)


def group_bins(patterns: tp.Iterable[structs.Pattern]) -> structs.Solution:
    """Build a solution from single bins, merging identical patterns into loads.

    Bins keep the order in which their pattern first appears.
    """
    loads: tp.Dict[structs.Pattern, int] = {}
    for pattern in patterns:
        if pattern.is_zero:
            continue
        loads[pattern] = loads.get(pattern, 0) + 1
    return structs.Solution(bins=tuple(structs.Bin(pattern=p, load=k) for p, k in loads.items()))


def merge_solutions(*bin_lists: tp.Iterable[structs.Bin]) -> structs.Solution:
    """Concatenate bins, merging identical patterns into loads."""
    loads: tp.Dict[structs.Pattern, int] = {}
    for bins in bin_lists:
        for sol_bin in bins:
            if sol_bin.load <= 0 or sol_bin.pattern.is_zero:
                continue
            loads[sol_bin.pattern] = loads.get(sol_bin.pattern, 0) + sol_bin.load
    return structs.Solution(bins=tuple(structs.Bin(pattern=p, load=k) for p, k in loads.items()))
