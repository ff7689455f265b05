"""``sim`` batch front-end.

    sim <command> --config FILE [--set key=value ...] --out PATH
        [--format csv|csv+svg] [--workers N] [--seed S]

Exit status: 0 success, 2 configuration error, 3 partial sweep failure,
4 integration abort in ``evolve``.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from nhgauss import measures as ms
from nhgauss.config import COMMANDS, ConfigError, Measure, RunConfig, load_config
from nhgauss.csvio import Table, render
from nhgauss.dynamics import IntegrationAborted, evolve, initial_state, sample_indices
from nhgauss.model import SystemSpec, Topology
from nhgauss.spectral import eigenfrequencies, exceptional_point

log = logging.getLogger("nhgauss")

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL, EXIT_ABORT = 0, 2, 3, 4

AXIS_COLUMNS = {"J": "J_over_Gamma", "t": "Gamma_t", "n_th": "n_th"}


def _measure_fn(m: Measure):
    if m.kind == "EN":
        return ms.log_negativity
    if m.kind == "EN_prime":
        return lambda V: ms.one_vs_rest_negativity(V, m.mode)
    return lambda V: ms.inseparability_S(V, m.coeffs)


def evaluate_measures(covs: np.ndarray, measures: Sequence[Measure]) -> dict[str, np.ndarray]:
    """Measure columns for a stack of covariances; unphysical or overflowed records give NaN."""
    out = {}
    with np.errstate(all="ignore"):
        for m in measures:
            fn = _measure_fn(m)
            try:
                values = np.atleast_1d(fn(covs)).astype(float)
            except ms.PhysicalityError:
                values = np.empty(len(covs))
                for k, V in enumerate(covs):
                    try:
                        values[k] = fn(V)
                    except ms.PhysicalityError:
                        values[k] = np.nan
            out[m.column] = values
    return out


def _initial(cfg: RunConfig, spec: SystemSpec) -> np.ndarray:
    return initial_state(spec, cfg.squeezed_modes, cfg.squeeze_sign)


# ---------------------------------------------------------------------------
# commands

def cmd_ep(cfg: RunConfig) -> Table:
    j_star = exceptional_point(cfg.topology, cfg.K)
    return Table(["topology", "K_over_Gamma", "J_star_over_Gamma"],
                 [(cfg.topology.value, cfg.K, j_star)])


def cmd_spectrum(cfg: RunConfig) -> Table:
    ternary = cfg.topology is Topology.TERNARY
    header = ["J_over_Gamma", "Re_omega_plus", "Im_omega_plus", "Re_omega_minus", "Im_omega_minus"]
    if ternary:
        header += ["Re_omega_0", "Im_omega_0"]
    rows = []
    for J in cfg.axis1.values():
        freqs = eigenfrequencies(SystemSpec(cfg.topology, J=J, K=cfg.K))
        if ternary:
            minus, zero, plus = freqs
            rows.append((J, plus.real, plus.imag, minus.real, minus.imag, zero.real, zero.imag))
        else:
            plus, minus = freqs
            rows.append((J, plus.real, plus.imag, minus.real, minus.imag))
    return Table(header, rows)


def cmd_evolve(cfg: RunConfig) -> Table:
    spec = cfg.spec
    status, comments = EXIT_OK, []
    try:
        record = evolve(_initial(cfg, spec), spec, cfg.t_end, cfg.dt, cfg.stride, cfg.noise)
    except IntegrationAborted as exc:
        record = exc.record
        status = EXIT_ABORT
        comments.append(f"integration aborted: {exc}")
    values = evaluate_measures(record.covariances, cfg.measures)
    header = ["Gamma_t"] + list(values)
    cov_idx = []
    if cfg.include_covariance:
        cov_idx = [(i, j) for i in range(spec.dim) for j in range(i, spec.dim)]
        header += [f"V_{i + 1}_{j + 1}" for i, j in cov_idx]
    rows = []
    for k, t in enumerate(record.times):
        row = [t] + [v[k] for v in values.values()]
        row += [record.covariances[k, i, j] for i, j in cov_idx]
        rows.append(tuple(row))
    return Table(header, rows, comments, status)


@dataclass(frozen=True)
class _SweepTask:
    spec: SystemSpec
    V0: np.ndarray
    times: tuple[float, ...]
    dt: float
    noise: bool
    measures: tuple[Measure, ...]


def _run_sweep_task(task: _SweepTask) -> dict[str, list[Optional[float]]]:
    """Measures at ``task.times``; ``None`` where the integration did not reach or failed."""
    t_end = max(task.times)
    try:
        record = evolve(task.V0, task.spec, t_end, task.dt, 1, task.noise)
    except IntegrationAborted as exc:
        log.debug("sweep point %s aborted: %s", task.spec, exc)
        record = exc.record
    idx = sample_indices(record.times, task.times)
    reached = np.abs(record.times[idx] - np.asarray(task.times)) <= task.dt
    values = evaluate_measures(record.covariances[idx], task.measures)
    return {
        name: [float(v) if ok and np.isfinite(v) else None for v, ok in zip(col, reached)]
        for name, col in values.items()
    }


def _gather(tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return list(map(_run_sweep_task, tasks))
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so output is independent of scheduling
        return list(pool.map(_run_sweep_task, tasks, chunksize=chunk))


def cmd_sweep(cfg: RunConfig, workers: int = 1) -> Table:
    axes = (cfg.axis1, cfg.axis2)
    grids = {ax.name: ax.values() for ax in axes}
    times = tuple(float(t) for t in grids.get("t", [cfg.t]))
    task_axes = [ax.name for ax in axes if ax.name != "t"]

    task_keys = list(itertools.product(*(range(len(grids[n])) for n in task_axes)))
    tasks = []
    for key in task_keys:
        params = {"J": cfg.J, "n_th": cfg.n_th}
        params.update({name: float(grids[name][i]) for name, i in zip(task_axes, key)})
        spec = SystemSpec(cfg.topology, params["J"], cfg.K, cfg.gamma, params["n_th"], cfg.r)
        tasks.append(_SweepTask(spec, _initial(cfg, spec), times, cfg.dt, cfg.noise, cfg.measures))
    results = dict(zip(task_keys, _gather(tasks, workers)))

    columns = [m.column for m in cfg.measures]
    header = [AXIS_COLUMNS[ax.name] for ax in axes] + columns
    rows, failed = [], 0
    for i, j in itertools.product(range(axes[0].count), range(axes[1].count)):
        point = {axes[0].name: i, axes[1].name: j}
        key = tuple(point[n] for n in task_axes)
        t_pos = point.get("t", 0)
        cells = [results[key][c][t_pos] for c in columns]
        failed += any(c is None for c in cells)
        rows.append((grids[axes[0].name][i], grids[axes[1].name][j], *cells))
    comments, status = [], EXIT_OK
    if failed:
        comments.append(f"failed points: {failed}")
        status = EXIT_PARTIAL
    return Table(header, rows, comments, status)


def cmd_wigner(cfg: RunConfig) -> Table:
    spec = cfg.spec
    record = evolve(_initial(cfg, spec), spec, cfg.t, cfg.dt, max(1, int(round(cfg.t / cfg.dt))), cfg.noise)
    V = record.covariances[-1]
    xs, ys = cfg.x_grid.values(), cfg.y_grid.values()
    W = ms.wigner_slice(V, cfg.plane, xs, ys)
    names = [("q", "p")[i % 2] + str(i // 2 + 1) for i in cfg.plane]
    rows = [(x, y, W[a, b]) for a, x in enumerate(xs) for b, y in enumerate(ys)]
    fixed = ", ".join(("q", "p")[i % 2] + str(i // 2 + 1) for i in range(spec.dim) if i not in cfg.plane)
    return Table(names + ["W"], rows, [f"Gamma_t={format(record.times[-1], '.12g')}; fixed at 0: {fixed}"])


def run_command(cfg: RunConfig, workers: int = 1) -> Table:
    if cfg.command == "ep":
        return cmd_ep(cfg)
    if cfg.command == "spectrum":
        return cmd_spectrum(cfg)
    if cfg.command == "evolve":
        return cmd_evolve(cfg)
    if cfg.command == "sweep":
        return cmd_sweep(cfg, workers)
    return cmd_wigner(cfg)


# ---------------------------------------------------------------------------
# entry point

def default_workers() -> int:
    env = os.environ.get("SIM_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer SIM_WORKERS=%r", env)
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="key = value run configuration")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (flags win over the file)")
    parser.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    parser.add_argument("--format", choices=("csv", "csv+svg"), default="csv")
    parser.add_argument("--workers", type=int, default=None, help="parallel sweep workers")
    parser.add_argument("--seed", type=int, default=None, help="reserved; runs are deterministic")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.command, args.config, args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    workers = args.workers if args.workers is not None else default_workers()
    if workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        table = run_command(cfg, workers)
    except IntegrationAborted as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    text = render(table)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if args.format == "csv+svg":
            from nhgauss.plotting import plot_table

            plot_table(table, cfg, Path(args.out).with_suffix(".svg"))
    for line in table.comments:
        if table.status:
            print(line, file=sys.stderr)
    return table.status


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
