"""Command-line interface.

``neighbortrace trace | orbits | neighbors | satake | reproduce``.  Every number
written to standard output is an exact integer or an exact ``ScaledTrace``;
progress goes to standard error.  Exit codes: 0 success, 1 a failed integrity
check (certification, cache, oracle or fixture mismatch), 2 usage errors.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import click

from .cache import CacheIntegrityError, resolve_cache_dir
from .hecke_trace import LATTICE_FOR_N, GroupDescriptor, TraceRequest, naive_trace, traces_for_weights
from .lattice_core import standard_lattice
from .neighbors import IsotropicLine, prime_power, q_neighbor
from .orbits import brute_force_orbits, quadric_size, two_adic_orbits, wplus_orbits
from .reference_values import CHARPOLY_P2, ENDOSCOPIC_LIFTS, PAIR_POLY_P2, TRACE_SUMS_ODD
from .satake import cusp_form_coefficient, hecke_to_satake, infinitesimal_weights

EXIT_INTEGRITY = 1
EXIT_USAGE = 2

TRACE_COLUMNS = ("n", "lambda", "weights", "A", "scaled_trace")
ORBIT_COLUMNS = ("L", "A", "index", "representative", "cardinality", "group")
SATAKE_COLUMNS = ("n", "lambda", "weights", "p", "i", "entry")
REPRODUCE_COLUMNS = ("table", "weights", "p", "quantity", "expected", "computed", "status")


class IntegrityFailure(click.ClickException):
    exit_code = EXIT_INTEGRITY


@dataclass(frozen=True)
class JobSpec:
    """A validated command invocation."""

    command: str
    n: int | None = None
    weights: tuple[tuple[int, ...], ...] = ()
    groups: tuple[GroupDescriptor, ...] = ()
    primes: tuple[int, ...] = ()
    output_format: str = "csv"
    cache_dir: Path | None = None
    threads: int = 1
    oracle: bool = False
    progress: bool = False
    extra: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n is not None and self.n not in LATTICE_FOR_N:
            raise click.UsageError("--n must be 7, 8 or 9")
        if self.output_format not in ("csv", "json"):
            raise click.UsageError("--format must be csv or json")
        if self.threads < 1:
            raise click.UsageError("--threads must be positive")
        for g in self.groups:
            _check_supported(self.n, g)


def _check_supported(n: int | None, group: GroupDescriptor) -> None:
    if n is None or group.kind == "trivial":
        return
    kind = LATTICE_FOR_N[n]
    if group.prime != 2:
        return
    supported = {
        "E7": ("p:2", "z4", "2k:2", "2k:3"),
        "E8": ("p:2", "z4", "2k:2", "2k:3", "2k:4"),
        "E8+A1": ("p:2",),
    }[kind]
    if str(group) not in supported:
        raise click.UsageError(f"T_A with A = {group} is not available for n = {n}")


# ---------------------------------------------------------------------------
# parsing and output


def _parse_weight(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise click.UsageError(f"malformed weight {text!r}") from None


def _parse_group(text: str) -> GroupDescriptor:
    try:
        return GroupDescriptor.parse(text)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def _parse_primes(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        primes = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise click.UsageError(f"malformed prime list {text!r}") from None
    for p in primes:
        try:
            _, k = prime_power(p)
        except ValueError:
            k = 0
        if k != 1:
            raise click.UsageError(f"{p} is not a prime")
    return primes


def _cell(value: Any) -> Any:
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        raise TypeError("floating-point values are never emitted")
    return value if isinstance(value, (int, str)) else str(value)


def render(rows: Sequence[dict], columns: Sequence[str], output_format: str) -> str:
    """CSV with one header row, or a JSON array of objects with the same keys."""
    if output_format == "json":
        return json.dumps([{c: _cell(r[c]) for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _weights_label(n: int, weight: Sequence[int]) -> tuple[int, ...]:
    return infinitesimal_weights(n, weight)[1]


# ---------------------------------------------------------------------------
# trace jobs


def _stderr(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _trace_group(args: tuple[int, tuple[tuple[int, ...], ...], str, str | None, bool]) -> dict[tuple[int, ...], int]:
    n, weights, group, cache_dir, progress = args
    report = (lambda msg: _stderr(f"[{group}] {msg}")) if progress else None
    return traces_for_weights(n, list(weights), GroupDescriptor.parse(group), cache_dir=cache_dir, progress=report)


def compute_traces(
    n: int,
    weights: Sequence[tuple[int, ...]],
    groups: Sequence[GroupDescriptor],
    cache_dir: Path | None,
    threads: int = 1,
    progress: bool = False,
) -> dict[tuple[str, tuple[int, ...]], int]:
    """Scaled traces for every (group, weight) pair; one worker per group when ``threads > 1``."""
    jobs = [(n, tuple(weights), str(g), str(cache_dir) if cache_dir else None, progress) for g in groups]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            results = list(pool.map(_trace_group, jobs))
    else:
        results = [_trace_group(j) for j in jobs]
    return {(str(g), w): v for g, res in zip(groups, results) for w, v in res.items()}


def _guarded(fn: Callable[[], Any]) -> Any:
    try:
        return fn()
    except (ArithmeticError, CacheIntegrityError) as exc:
        raise IntegrityFailure(str(exc)) from None
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def cmd_trace(job: JobSpec) -> list[dict]:
    values = compute_traces(job.n, job.weights, job.groups, job.cache_dir, job.threads, job.progress)
    rows = []
    for g in job.groups:
        for w in job.weights:
            value = values[(str(g), w)]
            if job.oracle:
                if job.n != 7:
                    raise click.UsageError("--oracle cross-checks traces for n = 7")
                check = naive_trace(TraceRequest.make(job.n, w, g))
                if check != value:
                    raise IntegrityFailure(f"oracle mismatch for lambda={w}, A={g}: {value} vs {check}")
            rows.append({"n": job.n, "lambda": w, "weights": _weights_label(job.n, w), "A": str(g), "scaled_trace": value})
    return rows


# ---------------------------------------------------------------------------
# orbits and neighbors


def cmd_orbits(job: JobSpec) -> list[dict]:
    kind = job.extra["L"]
    group = job.extra["group"]
    if group.kind == "trivial":
        raise click.UsageError("orbits need a nontrivial A (or --q)")
    if group.prime == 2:
        orbits = two_adic_orbits(kind, "z4" if str(group) == "z4" else f"2k:{max(group.rank, 1)}")
    else:
        orbits = wplus_orbits(kind, group.modulus)
        if job.oracle:
            total = sum(o.cardinality for o in orbits)
            if total != quadric_size(kind, group.modulus):
                raise IntegrityFailure("orbit sizes do not sum to the quadric size")
            brute = sorted(o.cardinality for o in brute_force_orbits(kind, group.modulus, "W+"))
            if brute != sorted(o.cardinality for o in orbits):
                raise IntegrityFailure("brute-force orbit sizes differ")
    rows = []
    for i, o in enumerate(orbits):
        rep = o.representative
        text = rep.generator if isinstance(rep, IsotropicLine) else ";".join(",".join(map(str, v)) for v in rep.vectors)
        rows.append(
            {"L": kind, "A": str(group), "index": i, "representative": text, "cardinality": o.cardinality, "group": o.group_tag}
        )
    return rows


def cmd_neighbors(job: JobSpec) -> dict:
    kind = job.extra["L"]
    q = job.extra["q"]
    lat = standard_lattice(kind)
    coords = job.extra["line"]
    if len(coords) != lat.rank:
        raise click.UsageError(f"--line needs {lat.rank} basis coordinates")
    nb = q_neighbor(lat, IsotropicLine(q, tuple(c % q for c in coords))).lattice
    if not nb.is_even() or nb.det != lat.det:
        raise IntegrityFailure("constructed neighbor is not in the genus")
    basis = [[str(x) for x in v] for v in nb.basis_vectors()]
    return {"L": kind, "q": q, "line": list(coords), "basis": basis, "gram": nb.int_gram(), "det": str(nb.det)}


# ---------------------------------------------------------------------------
# Satake extraction


def cmd_satake(job: JobSpec) -> list[dict]:
    depth = job.extra["depth"]
    rows = []
    for p in job.primes:
        if p != 2 and depth > 1:
            raise click.UsageError("(Z/p)^j traces for j > 1 are only available at p = 2")
        groups = [GroupDescriptor("trivial"), GroupDescriptor("cyclic", p)]
        groups += [GroupDescriptor("elementary", 2, j) for j in range(2, depth + 1)]
        for g in groups:
            _check_supported(job.n, g)
        values = compute_traces(job.n, job.weights, groups, job.cache_dir, job.threads, job.progress)
        for w in job.weights:
            hecke = {j: values[(str(g), w)] for j, g in enumerate(groups)}
            vector = hecke_to_satake(job.n, w, p, hecke, depth=depth)
            for i, entry in enumerate(vector.entries, start=1):
                rows.append({"n": job.n, "lambda": w, "weights": _weights_label(job.n, w), "p": p, "i": i, "entry": str(entry)})
    return rows


# ---------------------------------------------------------------------------
# reproduction tables

TABLES = ("SO7-p2", "SO7-odd")


def _lambda_of(weights: tuple[int, int, int]) -> tuple[int, int, int]:
    w1, w2, w3 = weights
    return ((w1 - 5) // 2, (w2 - 3) // 2, (w3 - 1) // 2)


def _lift_value(weight: tuple[int, int, int], p: int) -> int:
    k, multiplier, additive = ENDOSCOPIC_LIFTS[weight]
    poly = lambda coeffs: sum(c * p**i for i, c in enumerate(coeffs))  # noqa: E731
    return cusp_form_coefficient(k, p) * poly(multiplier) + poly(additive)


def _row(table: str, weights, p: int, quantity: str, expected: int | None, computed: int | None, status=None) -> dict:
    if status is None:
        status = "match" if expected == computed else "mismatch"
    return {
        "table": table,
        "weights": weights,
        "p": p,
        "quantity": quantity,
        "expected": "" if expected is None else expected,
        "computed": "" if computed is None else computed,
        "status": status,
    }


def _reproduce_p2(cache_dir: Path | None, threads: int, progress: bool) -> list[dict]:
    """``p = 2``: lift formulas, ``det(2^(w_1/2) X - c_2)`` coefficients and root sums of the pair polynomials."""
    table = "SO7-p2"
    lifts = sorted(ENDOSCOPIC_LIFTS)
    singles = sorted(CHARPOLY_P2)
    pairs = sorted(PAIR_POLY_P2)
    lams = sorted({*lifts, *(_lambda_of(w) for w in singles + pairs)})
    groups = [GroupDescriptor("trivial"), GroupDescriptor("cyclic", 2)]
    groups += [GroupDescriptor("elementary", 2, j) for j in (2, 3)]
    values = compute_traces(7, lams, groups, cache_dir, threads, progress)
    rows = [_row(table, _weights_label(7, lam), 2, "T_2", _lift_value(lam, 2), values[("p:2", lam)]) for lam in lifts]
    for w in singles:
        lam = _lambda_of(w)
        dim = values[("trivial", lam)]
        if dim != 1:
            rows.append(_row(table, w, 2, "charpoly", None, None, f"skipped: dimension {dim}, endoscopic members"))
            continue
        hecke = {j: values[(str(g), lam)] for j, g in enumerate(groups)}
        entries = hecke_to_satake(7, lam, 2, hecke).traces()
        for i, expected in enumerate(CHARPOLY_P2[w], start=1):
            # coefficient of X^i is (-1)^i 2^(i w_1/2) e_i, with e_{6-i} = e_i
            value = entries[i - 1] * entries[i - 1].power(2, i * w[0]) * (-1) ** i
            computed = int(value.mantissa) if value.is_rational() and value.mantissa.denominator == 1 else None
            rows.append(_row(table, w, 2, f"X^{i}", expected, computed))
    for w in pairs:
        lam = _lambda_of(w)
        dim = values[("trivial", lam)]
        if dim != 2:
            rows.append(_row(table, w, 2, "root sum", None, None, f"skipped: dimension {dim}, endoscopic members"))
            continue
        rows.append(_row(table, w, 2, "root sum", -PAIR_POLY_P2[w][0], values[("p:2", lam)]))
    return rows


def _reproduce_odd(primes: Sequence[int], cache_dir: Path | None, threads: int, progress: bool) -> list[dict]:
    """Odd ``p``: the cuspidal trace sums, compared wherever the space has no endoscopic member."""
    table = "SO7-odd"
    rows = []
    lifts = sorted(ENDOSCOPIC_LIFTS)
    sums = sorted(TRACE_SUMS_ODD)
    lams = sorted({*lifts, *(_lambda_of(w) for w in sums)})
    members = {w: 2 if w in PAIR_POLY_P2 else 1 for w in sums}
    for p in primes:
        if p == 2:
            raise click.UsageError("the odd table takes odd primes")
        two = [GroupDescriptor("trivial"), GroupDescriptor("cyclic", p)]
        values = compute_traces(7, lams, two, cache_dir, threads, progress)
        rows += [_row(table, _weights_label(7, lam), p, f"T_{p}", _lift_value(lam, p), values[(f"p:{p}", lam)]) for lam in lifts]
        for w in sums:
            lam = _lambda_of(w)
            dim = values[("trivial", lam)]
            if p not in TRACE_SUMS_ODD[w]:
                rows.append(_row(table, w, p, f"T_{p}", None, None, "skipped: no reference value"))
            elif dim != members[w]:
                rows.append(_row(table, w, p, f"T_{p}", None, None, f"skipped: dimension {dim}, endoscopic members"))
            else:
                rows.append(_row(table, w, p, f"T_{p}", TRACE_SUMS_ODD[w][p], values[(f"p:{p}", lam)]))
    return rows


def cmd_reproduce(job: JobSpec) -> list[dict]:
    table = job.extra["table"]
    if table == "SO7-p2":
        return _reproduce_p2(job.cache_dir, job.threads, job.progress)
    return _reproduce_odd(job.primes or (3,), job.cache_dir, job.threads, job.progress)


# ---------------------------------------------------------------------------
# click wiring


def _common(fn):
    fn = click.option("--format", "output_format", default="csv", show_default=True, help="csv or json")(fn)
    fn = click.option(
        "--cache-dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="census cache directory (default: $NEIGHBORTRACE_CACHE_DIR, then a local directory)",
    )(fn)
    fn = click.option("--threads", type=int, default=None, help="worker processes (default: available parallelism)")(fn)
    fn = click.option("--progress/--quiet", default=False, help="progress messages on standard error")(fn)
    return fn


def _threads(value: int | None) -> int:
    return value if value is not None else max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else 1)


def _emit(text: str) -> None:
    click.echo(text, nl=False)


@click.group()
def main() -> None:
    """Exact Hecke traces on algebraic automorphic forms of SO_7, SO_8 and SO_9."""


@main.command()
@click.option("--n", "n", type=int, required=True, help="7, 8 or 9")
@click.option("--lambda", "weights", multiple=True, required=True, help="dominant weight, e.g. 4,4,4 (repeatable)")
@click.option("--A", "groups", multiple=True, default=("trivial",), help="trivial | p:<q> | 2k:<i> | z4 (repeatable)")
@click.option("--primes", default=None, help="comma-separated primes, adds p:<q> for each")
@click.option("--oracle", is_flag=True, help="cross-check with the element-by-element evaluation (n = 7)")
@_common
def trace(n, weights, groups, primes, oracle, output_format, cache_dir, threads, progress):
    """Scaled traces |A|^(m_1) tr(T_A | M_{V_lambda}(SO_n))."""
    gs = [_parse_group(g) for g in groups]
    gs += [GroupDescriptor("cyclic", p) for p in _parse_primes(primes)]
    if primes and groups == ("trivial",):
        gs = gs[1:]
    job = JobSpec(
        "trace",
        n,
        tuple(_parse_weight(w) for w in weights),
        tuple(dict.fromkeys(gs)),
        output_format=output_format,
        cache_dir=resolve_cache_dir(cache_dir),
        threads=_threads(threads),
        oracle=oracle,
        progress=progress,
    )
    _emit(render(_guarded(lambda: cmd_trace(job)), TRACE_COLUMNS, job.output_format))


@main.command()
@click.option("--L", "lattice", required=True, type=click.Choice(["E7", "E8", "E8+A1"]))
@click.option("--q", "q", type=int, default=None, help="odd prime power q (q-neighbors)")
@click.option("--A", "group", default=None, help="2-adic group: p:2 | z4 | 2k:<i>")
@click.option("--oracle", is_flag=True, help="compare with the quadric count and brute-force orbits")
@_common
def orbits(lattice, q, group, oracle, output_format, cache_dir, threads, progress):
    """SO(L)-orbit representatives and cardinalities of A-neighbors."""
    if (q is None) == (group is None):
        raise click.UsageError("give exactly one of --q and --A")
    g = _parse_group(group) if group else _parse_group(f"p:{q}")
    job = JobSpec("orbits", output_format=output_format, oracle=oracle, extra={"L": lattice, "group": g})
    _emit(render(_guarded(lambda: cmd_orbits(job)), ORBIT_COLUMNS, job.output_format))


@main.command()
@click.option("--L", "lattice", required=True, type=click.Choice(["E7", "E8", "E8+A1"]))
@click.option("--q", "q", type=int, required=True, help="prime power q")
@click.option("--line", "line", required=True, help="basis coordinates of an isotropic vector, comma separated")
@click.option("--format", "output_format", default="json", show_default=True, help="json (csv is not meaningful here)")
def neighbors(lattice, q, line, output_format):
    """Basis and Gram matrix of the q-neighbor attached to an isotropic line."""
    if output_format != "json":
        raise click.UsageError("neighbors emits json")
    job = JobSpec("neighbors", extra={"L": lattice, "q": q, "line": _parse_weight(line)})
    _emit(json.dumps(_guarded(lambda: cmd_neighbors(job)), indent=2) + "\n")


@main.command()
@click.option("--n", "n", type=int, required=True, help="7, 8 or 9")
@click.option("--lambda", "weights", multiple=True, required=True, help="dominant weight (repeatable)")
@click.option("--primes", default="2", show_default=True, help="comma-separated primes")
@click.option("--depth", type=int, default=1, show_default=True, help="number of exterior powers")
@_common
def satake(n, weights, primes, depth, output_format, cache_dir, threads, progress):
    """p^(w_1/2) * sum over the packet of Trace(c_p | Lambda^i St)."""
    job = JobSpec(
        "satake",
        n,
        tuple(_parse_weight(w) for w in weights),
        primes=_parse_primes(primes),
        output_format=output_format,
        cache_dir=resolve_cache_dir(cache_dir),
        threads=_threads(threads),
        progress=progress,
        extra={"depth": depth},
    )
    if depth < 1:
        raise click.UsageError("--depth must be positive")
    _emit(render(_guarded(lambda: cmd_satake(job)), SATAKE_COLUMNS, job.output_format))


@main.command()
@click.option("--table", "table", required=True, type=click.Choice(TABLES))
@click.option("--primes", default=None, help="odd primes for SO7-odd (default 3)")
@_common
def reproduce(table, primes, output_format, cache_dir, threads, progress):
    """Recompute a reference table and report match or mismatch per cell."""
    job = JobSpec(
        "reproduce",
        primes=_parse_primes(primes),
        output_format=output_format,
        cache_dir=resolve_cache_dir(cache_dir),
        threads=_threads(threads),
        progress=progress,
        extra={"table": table},
    )
    rows = _guarded(lambda: cmd_reproduce(job))
    _emit(render(rows, REPRODUCE_COLUMNS, job.output_format))
    bad = [r for r in rows if r["status"] == "mismatch"]
    if bad:
        raise IntegrityFailure(f"{len(bad)} mismatching cells")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
