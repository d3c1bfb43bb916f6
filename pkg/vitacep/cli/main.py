"""
VITACEP - Command-Line Interface

Ingest sources, register definitions, evaluate them in batch or continuous
mode, and export the real-world query tables.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
Data goes to standard output (or --output); logs go to standard error.
"""

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from vitacep.algebra import Window
from vitacep.config.settings import AppConfig
from vitacep.core.errors import (
    ConfigurationError,
    IngestError,
    UnresolvedReferenceError,
    UsageError,
    VitacepError,
)
from vitacep.core.types import EventRecord, Interval, LocationSample, Sample, StreamKind
from vitacep.core.utils import parse_timestamp
from vitacep.dsl import compile_definition, evaluate, parse
from vitacep.ingest import create_registry as create_adapter_registry
from vitacep.ingest.stations import ingest_stations
from vitacep.physio.catalogue import CATALOGUE
from vitacep.physio.transform import enrich_events, materialize_derived
from vitacep.reports import export_polar, polar_csv, report_weekly, weekly_csv
from vitacep.store import Store

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s - %(message)s"
WATCH_SOURCE = "watch"
EVENT_MARKER = "#event"


class ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage-error code."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def setup_logging(level: str) -> None:
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr, force=True)


def _window(start: str, end: str) -> Window:
    try:
        window_start, window_end = parse_timestamp(start), parse_timestamp(end)
    except ValueError as e:
        raise UsageError(f"Invalid timestamp: {e}") from e
    if window_start >= window_end:
        raise UsageError("--from must be earlier than --to")
    return Window(window_start, window_end)


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _jsonl(events: Iterable[EventRecord]) -> str:
    return "".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in events)


def _open_store(args: argparse.Namespace, config: AppConfig) -> Store:
    return Store(args.store, config=config)


# Commands


def cmd_ingest(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    adapter = create_adapter_registry().create(args.adapter)
    result = adapter.ingest(args.input, store)
    _write("-", json.dumps(result.to_dict(), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_stations(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    table = ingest_stations(args.stations, args.readings)
    store.save_stations(table)
    summary = {"stations": len(table.stations), "readings": table.reading_count}
    _write("-", json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_define(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    try:
        with open(args.file, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise UsageError(f"Cannot read {args.file}: {e}") from e
    lines = []
    for definition in parse(text):
        plan = store.register_definition(definition)
        lines.append(f"{plan.name}\t{plan.lookback}\n")
    _write("-", "".join(lines))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    window = _window(args.start, args.end)
    entry = store.registry.definitions.get(args.name)
    if entry is None:
        raise UnresolvedReferenceError(args.name, "no registered definition")
    plan = compile_definition(parse(entry.text)[0], store.registry, config)
    _write(args.output, _jsonl(evaluate(plan, window, store, config)))
    return EXIT_OK


def parse_watch_line(line: str, store: Store, number: int) -> Tuple[str, Any]:
    """
    Parse one watch-mode record.

        <stream>,<timestamp>,<value>,<unit>[,<source>]     real-valued sample
        <stream>,<timestamp>,<lat>,<lon>[,<source>]        location sample
        #event,<type>,<name>,<start>,<end>                 event

    Returns:
        (stream id or event type, record)
    """
    cells = [c.strip() for c in line.split(",")]
    try:
        if cells[0] == EVENT_MARKER:
            if len(cells) != 5:
                raise ValueError("event line needs type, name, start and end")
            _, event_type, name, start, end = cells
            interval = Interval(parse_timestamp(start), parse_timestamp(end))
            return event_type, EventRecord(event_type, name, interval, {"source": WATCH_SOURCE})
        if len(cells) not in (4, 5):
            raise ValueError(f"expected 4 or 5 fields, got {len(cells)}")
        stream_id, ts, first, second = cells[:4]
        source = cells[4] if len(cells) == 5 and cells[4] else WATCH_SOURCE
        if store.registry.kind_of(stream_id) is StreamKind.LOCATION:
            return stream_id, LocationSample(
                parse_timestamp(ts), float(first), float(second), source
            )
        return stream_id, Sample(parse_timestamp(ts), float(first), second, source)
    except (ValueError, VitacepError) as e:
        raise IngestError(str(e), "<stdin>", number) from e


def _record_time(record: Any) -> int:
    return record.start if isinstance(record, EventRecord) else record.timestamp


def cmd_watch(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    evaluator = store.continuous
    if not evaluator.plans:
        logger.warning("No definitions registered; watch only stores the input")
    if args.input != "-":
        raise UsageError("watch reads its input from standard input (--input -)")
    run_watch(sys.stdin, store, config.watch_batch_seconds, sys.stdout)
    return EXIT_OK


def run_watch(lines: TextIO, store: Store, batch_seconds: int, out: TextIO) -> int:
    """
    Feed line records to the continuous evaluator in time batches.

    Returns:
        Number of finalized events written to out
    """
    batch: Dict[str, List[Any]] = {}
    batch_start: Optional[int] = None
    latest: Optional[int] = None
    emitted = 0

    def flush() -> None:
        nonlocal emitted
        events = store.advance(batch)
        out.write(_jsonl(events))
        out.flush()
        emitted += len(events)
        batch.clear()

    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.lower().startswith("stream,"):
            continue
        key, record = parse_watch_line(line, store, number)
        ts = _record_time(record)
        if latest is not None and ts < latest:
            logger.warning(f"<stdin>:{number}: record at {ts} is older than {latest}")
        latest = ts if latest is None else max(latest, ts)
        if batch_start is None:
            batch_start = ts
        elif ts >= batch_start + batch_seconds:
            flush()
            batch_start = ts
        batch.setdefault(key, []).append(record)

    if batch:
        flush()
    logger.info(f"watch finished: {emitted} events finalized")
    return emitted


def cmd_report_weekly(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    _write(args.output, weekly_csv(report_weekly(args.event_type, args.year, store)))
    return EXIT_OK


def cmd_export_polar(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    _write(args.output, polar_csv(export_polar(args.event_type, args.year, store)))
    return EXIT_OK


def cmd_derive(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    written = materialize_derived(args.stream, _window(args.start, args.end), store, config)
    _write("-", json.dumps({"stream": args.stream, "samples": written}) + "\n")
    return EXIT_OK


def cmd_events(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    events = store.query_events(args.event_type, _window(args.start, args.end))
    if args.enrich:
        events = enrich_events(events, store)
    _write(args.output, _jsonl(events))
    return EXIT_OK


def cmd_info(args: argparse.Namespace, config: AppConfig) -> int:
    store = _open_store(args, config)
    registry = store.registry
    info = {
        "streams": {sid: registry.get(sid).to_dict() for sid in registry},
        "definitions": {
            name: {"text": d.text, "frontier": d.frontier}
            for name, d in registry.definitions.items()
        },
        "watermark": store.watermark,
        "stations": len(store.stations.stations),
    }
    _write("-", json.dumps(info, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _add_store(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", required=True, help="Store directory")


def _add_range(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--from", dest="start", required=True, help="Window start (ISO-8601)")
    parser.add_argument("--to", dest="end", required=True, help="Window end (ISO-8601)")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="vitacep",
        description="Interface-event retrieval over lifestyle and physiology streams",
    )
    parser.add_argument("--config", help="Configuration file (.yaml, .yml or .json)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("ingest", help="Ingest a source export")
    p.add_argument("--adapter", required=True, choices=create_adapter_registry().list_adapters())
    p.add_argument("--input", required=True, help="Export file")
    _add_store(p)
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("stations", help="Load PM2.5 stations and readings")
    p.add_argument("--stations", required=True)
    p.add_argument("--readings", required=True)
    _add_store(p)
    p.set_defaults(handler=cmd_stations)

    p = sub.add_parser("define", help="Parse, compile and register definitions (.evt)")
    p.add_argument("--file", required=True)
    _add_store(p)
    p.set_defaults(handler=cmd_define)

    p = sub.add_parser("eval", help="Evaluate a registered definition over a window")
    p.add_argument("--name", required=True)
    _add_range(p)
    _add_store(p)
    p.add_argument("--output", default="-", help="events.jsonl or - for stdout")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("watch", help="Continuous evaluation of line records from stdin")
    _add_store(p)
    p.add_argument("--input", default="-")
    p.set_defaults(handler=cmd_watch)

    p = sub.add_parser("report", help="Reports over the events log")
    report = p.add_subparsers(dest="report", required=True, parser_class=ArgumentParser)
    p = report.add_parser("weekly", help="Weekly event frequency and duration")
    _add_report_args(p)
    p.set_defaults(handler=cmd_report_weekly)

    p = sub.add_parser("export", help="Plot-ready exports")
    export = p.add_subparsers(dest="export", required=True, parser_class=ArgumentParser)
    p = export.add_parser("polar", help="Polar day-ring arcs")
    _add_report_args(p)
    p.set_defaults(handler=cmd_export_polar)

    p = sub.add_parser("derive", help="Materialize a derived stream")
    p.add_argument("--stream", required=True, choices=sorted(CATALOGUE))
    _add_range(p)
    _add_store(p)
    p.set_defaults(handler=cmd_derive)

    p = sub.add_parser("events", help="Query the events log")
    p.add_argument("--event-type", required=True)
    _add_range(p)
    _add_store(p)
    p.add_argument("--enrich", action="store_true", help="Add stream aggregates")
    p.add_argument("--output", default="-")
    p.set_defaults(handler=cmd_events)

    p = sub.add_parser("info", help="Show registry contents")
    _add_store(p)
    p.set_defaults(handler=cmd_info)
    return parser


def _add_report_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--event-type", required=True)
    parser.add_argument("--year", required=True, type=int)
    _add_store(parser)
    parser.add_argument("--output", default="-", help="CSV file or - for stdout")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = AppConfig.load(args.config)
    except (ConfigurationError, FileNotFoundError, OSError) as e:
        print(f"vitacep: configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(config.log_level)

    handler: Callable[[argparse.Namespace, AppConfig], int] = args.handler
    try:
        return handler(args, config)
    except (ConfigurationError, UsageError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except VitacepError as e:
        logger.error(str(e))
        return EXIT_DATA
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
