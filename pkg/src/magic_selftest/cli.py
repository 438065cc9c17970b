from __future__ import annotations

import argparse
import asyncio
import contextlib
import logging
import signal
import sys
from collections.abc import Awaitable, Callable, Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

from magic_selftest.coloring import PairSchedule
from magic_selftest.config import (
    ConfigLoadError,
    OutputConfig,
    RunConfig,
    Settings,
    load_config,
    load_device_descriptor,
    merge_run_config,
)
from magic_selftest.errors import (
    ContractError,
    DimensionError,
    ProtocolViolation,
    ResourceLimitError,
    SessionAborted,
)
from magic_selftest.games import best_table_value, classical_value, load_spec
from magic_selftest.ledger import (
    BoundReport,
    bound_catalog,
    final_robustness,
    loglog_slope,
    ratio_table,
    verify_grid,
)
from magic_selftest.protocol import (
    EpsilonReport,
    RoundMix,
    Transcript,
    estimate_epsilons,
    report_from_summary,
    run_protocol,
    write_transcript,
)
from magic_selftest.protocol.inputs import ROUND_NAMES
from magic_selftest.storage import encode_record, make_header, read_line_records, write_line_records
from magic_selftest.strategies import DeviceModel, build_device
from magic_selftest.wire import (
    LocalEntanglementService,
    ProverListener,
    RemoteEntanglementService,
    StateServerConfig,
    StreamEndpoint,
    connect_with_retries,
    prover_loop,
    referee_serve,
    start_state_server,
)

LOG = logging.getLogger("magic_selftest")

DEFAULT_THETAS = (0.0, 0.05, 0.1, 0.2, 0.5)
SCALING_EPS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)
SCALING_NS = tuple(range(7, 44, 4))

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def host_port(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


def round_mix(text: str) -> dict[str, float]:
    """``game=1,local=1,pair=0`` -> weights per round type."""
    weights: dict[str, float] = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or name not in {"game", "local", "pair"}:
            raise argparse.ArgumentTypeError(f"expected game=W,local=W,pair=W, got {text!r}")
        try:
            weights[name] = float(value)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad weight in {part!r}") from exc
    return weights


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magic-selftest")

    parser.add_argument(
        "--log-level",
        default=Settings.from_env().log_level,
        choices=("critical", "error", "warning", "info", "debug"),
        help="Log level (default: env LOG_LEVEL or info)",
    )

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out-dir", type=Path, default=None)
    output.add_argument("--format", choices=("table", "json"), default="table")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--config", type=Path, default=None, help="RunConfig file (.yml/.json)")
    run.add_argument("--n", type=int, default=None)
    run.add_argument(
        "--device",
        choices=("honest", "noisy", "padded", "standard-square", "custom"),
        default=None,
    )
    run.add_argument("--theta", type=float, default=None, help="y-rotation noise angle")
    run.add_argument("--descriptor", type=Path, default=None, help="custom device file")
    run.add_argument("--seed", type=int, default=None)

    sub = parser.add_subparsers(dest="cmd", required=True)

    simulate = sub.add_parser("simulate", parents=[output, run], help="Run the protocol")
    simulate.add_argument("--rounds", type=int, default=None)
    simulate.add_argument("--mix", type=round_mix, default=None)
    simulate.add_argument("--alpha", type=float, default=None, help="1 - confidence level")
    simulate.add_argument("--workers", type=int, default=None)

    bounds = sub.add_parser("bounds", parents=[output], help="Evaluate the bound catalog")
    bounds.add_argument("--n", type=int, default=None)
    bounds.add_argument("--eps0", type=float, default=0.0)
    bounds.add_argument("--eps1", type=float, default=0.0)
    bounds.add_argument("--eps2", type=float, default=0.0)
    bounds.add_argument("--from-report", type=Path, default=None)
    bounds.add_argument("--scaling", action="store_true", help="add delta scaling checks")
    bounds.add_argument("--seed", type=int, default=None)

    verify = sub.add_parser(
        "verify-norms", parents=[output], help="Measure every bound on noisy honest devices"
    )
    verify.add_argument("--n", type=int, required=True)
    verify.add_argument("--theta", type=float, nargs="+", default=list(DEFAULT_THETAS))
    verify.add_argument("--max-instances", type=int, default=None)
    verify.add_argument("--workers", type=int, default=1)
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--inject-bug", default=None, help=argparse.SUPPRESS)

    classical = sub.add_parser("classical-value", parents=[output], help="Brute-force value")
    classical.add_argument("spec", type=Path)

    coloring = sub.add_parser("coloring", parents=[output], help="Pair schedule for odd n")
    coloring.add_argument("--n", type=int, required=True)

    referee = sub.add_parser("serve-referee", parents=[output, run], help="Referee over TCP")
    referee.add_argument("--rounds", type=int, default=None)
    referee.add_argument("--mix", type=round_mix, default=None)
    referee.add_argument("--alpha", type=float, default=None)
    referee.add_argument("--listen", type=host_port, default=None)
    referee.add_argument("--timeout", type=float, default=None)

    prover = sub.add_parser("prover", parents=[run], help="Prover process for one role")
    prover.add_argument("--role", choices=("A", "B"), required=True)
    prover.add_argument("--connect", type=host_port, default=None)
    prover.add_argument("--state", type=host_port, default=None)
    prover.add_argument("--timeout", type=float, default=None)
    prover.add_argument("--retries", type=int, default=None)
    prover.add_argument("--retry-delay", type=float, default=None)

    state = sub.add_parser("serve-state", parents=[run], help="State-owner service")
    state.add_argument("--listen", type=host_port, default=None)

    return parser


def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


async def install_shutdown_signals(stop_event: asyncio.Event) -> None:
    loop = asyncio.get_running_loop()

    def _handler() -> None:
        LOG.info("Shutdown signal received")
        stop_event.set()

    for sig in (signal.SIGINT, signal.SIGTERM):
        try:
            loop.add_signal_handler(sig, _handler)
        except NotImplementedError:
            signal.signal(sig, lambda *_: _handler())


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def run_config(ns: argparse.Namespace) -> RunConfig:
    """Flags > config file > defaults."""
    file_config = load_config(ns.config) if getattr(ns, "config", None) else None
    theta = getattr(ns, "theta", None)
    listen = getattr(ns, "listen", None) or getattr(ns, "connect", None)
    state = getattr(ns, "state", None)
    if ns.cmd == "serve-state":
        state, listen = listen, None
    mix = getattr(ns, "mix", None) or {}

    overrides: dict[str, Any] = {
        "n": getattr(ns, "n", None),
        "rounds": getattr(ns, "rounds", None),
        "device": getattr(ns, "device", None),
        "descriptor": getattr(ns, "descriptor", None),
        "seed": getattr(ns, "seed", None),
        "alpha": getattr(ns, "alpha", None),
        "workers": getattr(ns, "workers", None),
        "noise.kind": None if theta is None else "y-rotation",
        "noise.theta": theta,
        "output.out_dir": getattr(ns, "out_dir", None),
        "wire.host": None if listen is None else listen[0],
        "wire.port": None if listen is None else listen[1],
        "wire.state_host": None if state is None else state[0],
        "wire.state_port": None if state is None else state[1],
        "wire.timeout": getattr(ns, "timeout", None),
        "wire.retries": getattr(ns, "retries", None),
        "wire.retry_delay": getattr(ns, "retry_delay", None),
    }
    overrides.update({f"mix.{name}": weight for name, weight in mix.items()})
    return merge_run_config(file_config, overrides)


def device_for(config: RunConfig) -> DeviceModel:
    descriptor = None
    if config.device == "custom" and config.descriptor is not None:
        descriptor = load_device_descriptor(config.descriptor)
    return build_device(
        config.device, config.n, noise=config.noise.to_model(), descriptor=descriptor
    )


def out_dir(ns: argparse.Namespace, config: RunConfig | None = None) -> Path:
    if getattr(ns, "out_dir", None) is not None:
        return Path(ns.out_dir)
    if config is not None and config.output.out_dir is not None:
        return config.output.out_dir
    return Settings.from_env().output_dir


def emit(fmt: str, rows: Iterable[Mapping[str, Any]], lines: Iterable[str]) -> None:
    if fmt == "json":
        for row in rows:
            sys.stdout.write(encode_record(row).decode())
    else:
        for line in lines:
            print(line)


def epsilon_table(transcript: Transcript, report: EpsilonReport) -> list[str]:
    lines = [f"n={transcript.n} seed={transcript.seed} rounds={len(transcript)}"]
    lines.append(f"{'round type':<12} {'rounds':>8} {'accept rate':>12}")
    for c, (ok, total) in transcript.accept_stats().items():
        lines.append(f"{ROUND_NAMES[c]:<12} {total:>8} {ok / total:>12.6f}")
    for c, family in report.families.items():
        worst = family.worst
        lines.append(
            f"eps{c}: estimate={family.epsilon:.6g} upper={family.upper:.6g}"
            f" worst={None if worst is None else worst.label}"
        )
    if report.voided or report.malformed:
        lines.append(f"voided={report.voided} malformed={report.malformed}")
    return lines


def write_run_outputs(
    command: str, config: RunConfig, target: Path, transcript: Transcript
) -> EpsilonReport:
    report = estimate_epsilons(transcript, alpha=config.alpha)
    extra = {"device": config.device, "rounds": config.rounds, "alpha": config.alpha}
    write_transcript(target / config.output.transcript, transcript, command=command, **extra)
    header = make_header(command, seed=config.seed, n=config.n, **extra)
    write_line_records(target / config.output.report, header, report.records())
    LOG.info("Wrote %s and %s to %s", config.output.transcript, config.output.report, target)
    return report


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


async def cmd_simulate(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    config = run_config(ns)
    device = device_for(config)
    mix = RoundMix(config.mix.weights(config.n))
    transcript = run_protocol(device, config.rounds, mix, config.seed, workers=config.workers)
    report = write_run_outputs("simulate", config, out_dir(ns, config), transcript)
    emit(ns.format, report.records(), epsilon_table(transcript, report))
    return EXIT_OK


def _epsilons_from_report(path: Path) -> tuple[int, dict[int, float]]:
    header, rows = read_line_records(path)
    for row in rows:
        if row.get("kind") == "epsilon-report":
            return int(header["n"]), report_from_summary(row)
    raise ContractError(f"{path}: no epsilon-report summary record")


async def cmd_bounds(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    n, eps = ns.n, {0: ns.eps0, 1: ns.eps1, 2: ns.eps2}
    source = None
    if ns.from_report is not None:
        report_n, eps = _epsilons_from_report(ns.from_report)
        n = n or report_n
        source = str(ns.from_report)
    if n is None:
        raise ContractError("bounds needs --n or --from-report")

    report = bound_catalog(n, eps[0], eps[1], eps[2])
    rows = report.records()
    lines = report.table()
    if ns.scaling:
        rows_scaling, lines_scaling = scaling_checks()
        rows.extend(rows_scaling)
        lines.extend(lines_scaling)

    header = make_header("bounds", seed=ns.seed, n=n, source=source)
    write_line_records(out_dir(ns) / OutputConfig().bounds, header, rows)
    emit(ns.format, rows, lines)
    return EXIT_OK


def scaling_checks() -> tuple[list[dict[str, Any]], list[str]]:
    rows: list[dict[str, Any]] = []
    lines = ["scaling checks (formula level):"]
    for n in (7, 11):
        slope = loglog_slope(n, SCALING_EPS)
        rows.append({"kind": "loglog-slope", "n": n, "eps": list(SCALING_EPS), "slope": slope})
        lines.append(f"n={n}: d log(delta) / d log(eps) = {slope:.6f}")
    eps = SCALING_EPS[2]
    for n, ratio in ratio_table(SCALING_NS, eps):
        rows.append({"kind": "scaling-ratio", "n": n, "eps": eps, "ratio": ratio})
        rows.append(final_robustness(n, eps).to_dict())
        lines.append(f"n={n:>3}: delta / (n sqrt(2 eps)) = {ratio:.6f}")
    return rows, lines


async def cmd_verify_norms(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    reports: list[BoundReport] = verify_grid(
        ns.n,
        ns.theta,
        max_instances=ns.max_instances,
        inject_fault=ns.inject_bug,
        workers=ns.workers,
    )
    rows = [row for report in reports for row in report.records()]
    lines = [line for report in reports for line in (*report.table(), "")]
    header = make_header("verify-norms", seed=ns.seed, n=ns.n, thetas=list(ns.theta))
    write_line_records(out_dir(ns) / OutputConfig().ledger, header, rows)
    emit(ns.format, rows, lines)

    failed = [r.theta for r in reports if not r.passed]
    if failed:
        LOG.error("Ledger failures at theta=%s", failed)
        return EXIT_FAILED
    return EXIT_OK


async def cmd_classical_value(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    spec = load_spec(ns.spec)
    value = classical_value(spec)
    table = best_table_value(spec)
    row = {
        "kind": "classical-value",
        "m": spec.m,
        "n": spec.n,
        "value": str(value),
        "table_value": None if table is None else str(table),
    }
    lines = [str(value)]
    if table is not None:
        lines.append(f"shared-table lower bound: {table}")
    emit(ns.format, [row], lines)
    return EXIT_OK


async def cmd_coloring(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    schedule = PairSchedule.build(ns.n)
    problems = schedule.verify()
    rows = [
        {"kind": "color", "color": v, "pairs": [list(p) for p in schedule.edges_by_color[v]]}
        for v in range(1, ns.n + 1)
    ]
    emit(ns.format, rows, schedule.render())
    for problem in problems:
        LOG.error("Coloring check failed: %s", problem)
    return EXIT_FAILED if problems else EXIT_OK


async def until_stopped(
    work: Awaitable[int], stop_event: asyncio.Event, *, stopped: int
) -> int:
    """Run ``work`` until it finishes or a shutdown signal arrives."""
    job = asyncio.ensure_future(work)
    stopper = asyncio.create_task(stop_event.wait())
    done, pending = await asyncio.wait({job, stopper}, return_when=asyncio.FIRST_COMPLETED)

    stop_event.set()
    for t in pending:
        t.cancel()
    for t in pending:
        with contextlib.suppress(asyncio.CancelledError):
            await t

    if job in done:
        return job.result()
    return stopped


async def cmd_serve_referee(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    config = run_config(ns)
    mix = RoundMix(config.mix.weights(config.n))
    mix.check(config.n)
    target = out_dir(ns, config)

    async def session() -> int:
        listener = ProverListener(config.wire.host, config.wire.port)
        await listener.start()
        endpoints: list[StreamEndpoint] = []
        try:
            endpoints = await listener.accept(2)
            transcript = await referee_serve(
                config.n, mix, config.rounds, endpoints, config.seed, timeout=config.wire.timeout
            )
        finally:
            for endpoint in endpoints:
                await endpoint.close()
            await listener.aclose()
        report = write_run_outputs("serve-referee", config, target, transcript)
        emit(ns.format, report.records(), epsilon_table(transcript, report))
        return EXIT_OK

    return await until_stopped(session(), stop_event, stopped=EXIT_FAILED)


async def cmd_prover(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    config = run_config(ns)
    device = device_for(config)
    if not device.is_pauli:
        raise ContractError("wire provers send Pauli text; this device has dense observables")
    wire = config.wire

    async def session() -> int:
        service = await RemoteEntanglementService.connect(
            wire.state_host,
            wire.state_port,
            role=ns.role,
            n=device.n,
            retries=wire.retries,
            retry_delay=wire.retry_delay,
        )
        try:
            endpoint = await connect_with_retries(
                wire.host, wire.port, retries=wire.retries, retry_delay=wire.retry_delay
            )
            try:
                stats = await prover_loop(device, ns.role, endpoint, service, timeout=wire.timeout)
            finally:
                await endpoint.close()
        finally:
            await service.close()
        print(encode_record(stats.to_dict()).decode(), end="")
        return EXIT_OK if stats.completed else EXIT_FAILED

    return await until_stopped(session(), stop_event, stopped=EXIT_FAILED)


async def cmd_serve_state(ns: argparse.Namespace, stop_event: asyncio.Event) -> int:
    config = run_config(ns)
    device = device_for(config)
    service = LocalEntanglementService.for_device(device, config.seed)
    server = await start_state_server(
        service,
        config=StateServerConfig(host=config.wire.state_host, port=config.wire.state_port),
    )
    try:
        await stop_event.wait()
    finally:
        await server.aclose()
        LOG.info("State service stopped after %d joint samples", service.samples)
    return EXIT_OK


Command = Callable[[argparse.Namespace, asyncio.Event], Awaitable[int]]

COMMANDS: dict[str, Command] = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "verify-norms": cmd_verify_norms,
    "classical-value": cmd_classical_value,
    "coloring": cmd_coloring,
    "serve-referee": cmd_serve_referee,
    "prover": cmd_prover,
    "serve-state": cmd_serve_state,
}


def _fail(code: int, exc: BaseException) -> int:
    LOG.error("%s", exc)
    print(f"error: {exc}", file=sys.stderr)
    return code


async def main_async(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    setup_logging(ns.log_level)

    stop_event = asyncio.Event()
    await install_shutdown_signals(stop_event)

    try:
        return await COMMANDS[ns.cmd](ns, stop_event)
    except (ConfigLoadError, ContractError, DimensionError, ResourceLimitError) as exc:
        return _fail(EXIT_USAGE, exc)
    except (SessionAborted, ProtocolViolation, ConnectionError) as exc:
        return _fail(EXIT_FAILED, exc)
    except Exception:
        LOG.exception("Command %s failed", ns.cmd)
        return EXIT_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    return asyncio.run(main_async(argv))


if __name__ == "__main__":
    raise SystemExit(main())
