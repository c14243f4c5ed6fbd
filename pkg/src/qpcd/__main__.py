"""
CLI entry point for qpcd.

Subcommands:
    generate  write a synthetic annotated corpus and its manifest
    detect    run change detection on CSV series or a whole corpus
    eval      score saved detections against a corpus manifest
    plot      re-render the SVG plot of a saved detection

Exit codes: 0 no change detected, 2 change detected in at least one
input (``detect`` only), 1 error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .config import Config
from .corpus import MANIFEST_NAME, generate_corpus, load_manifest
from .detector import load_series_csv, save_series_csv
from .embedding import save_cloud_csv
from .evaluation import aggregate, score_series
from .exceptions import ConfigurationException, EvaluationException, QpcdException, StageException
from .exporters import DetectionRecord, JSONExporter, SeriesPlot, SVGPlotExporter, TextTableExporter
from .logging_config import setup_logging
from .parallel import ordered_map
from .pipeline import PipelineConfig, run_detection
from .signal import CsvFormat, load_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHANGE = 2

RESULT_SUFFIX = '.result.json'
SERIES_SUFFIX = '.series.csv'


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', metavar='PATH', help="YAML or JSON configuration file")
    common.add_argument('--seed', type=int, help="Master seed (overrides config 'seed')")
    common.add_argument(
        '--set', metavar='KEY=VAL', action='append', default=[], dest='overrides',
        help="Override a dotted config key, e.g. --set detector.h=64 (repeatable)"
    )
    common.add_argument('--log-level', help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument('--log-json', action='store_true', help="JSON log lines on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog='qpcd',
        description="Change point detection in quasi-periodic signals with Wasserstein "
                    "distances between delay-embedded point clouds.",
        epilog="Exit codes: 0 = no change detected, 2 = change detected, 1 = error. "
               "QPCD_THREADS caps the number of worker threads.",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', parents=[common], help="Write a synthetic annotated corpus")
    gen.add_argument('--out', metavar='DIR', required=True, help="Corpus directory")
    gen.add_argument('--count', type=int, help="Number of series (overrides corpus.count)")
    gen.add_argument(
        '--mix', metavar='KIND=FRACTION', action='append', default=[],
        help="Share of one kind ('normal' or an arrhythmia); repeat to give the full mix"
    )
    gen.set_defaults(func=cmd_generate)

    det = sub.add_parser('detect', parents=[common], help="Detect changes in CSV series")
    det.add_argument('inputs', nargs='+', metavar='INPUT', help="CSV files or corpus directories")
    det.add_argument('--out', metavar='DIR', default='results', help="Output directory (default: results)")
    det.add_argument('--svg', action='store_true', help="Also write an SVG plot per series")
    det.add_argument('--cloud-csv', action='store_true', help="Also dump the projected point cloud")
    det.add_argument('--exact-ot', action='store_true', help="Force the exact transport solver")
    det.add_argument('--sample-rate', type=float, help="Sample rate in Hz when no sidecar JSON exists")
    det.set_defaults(func=cmd_detect)

    ev = sub.add_parser('eval', parents=[common], help="Score saved detections against a corpus")
    ev.add_argument('corpus', help="Corpus directory containing manifest.json")
    ev.add_argument('results', nargs='+', help="Results directory; several directories are scored as runs")
    ev.add_argument('--out', metavar='DIR', help="Where to write eval.json and eval.txt (default: first results dir)")
    ev.set_defaults(func=cmd_eval)

    plot = sub.add_parser('plot', parents=[common], help="Render the SVG of a saved detection")
    plot.add_argument('result', help=f"A '<name>{RESULT_SUFFIX}' file written by detect")
    plot.add_argument('--series-csv', metavar='PATH', help=f"Series CSV (default: sibling '<name>{SERIES_SUFFIX}')")
    plot.add_argument('--out', metavar='PATH', help="SVG path (default: next to the result)")
    plot.set_defaults(func=cmd_plot)

    return parser


def load_config(args: argparse.Namespace) -> Config:
    """Defaults, then --config file, then environment, then --set, then dedicated flags."""
    config = Config.load(args.config)
    config.apply_overrides(args.overrides)
    if args.seed is not None:
        config.set('seed', args.seed)
    if getattr(args, 'exact_ot', False):
        config.set('detector.use_exact', True)
    if args.log_level:
        config.set('logging.level', args.log_level)
    if args.log_json:
        config.set('logging.json_format', True)
    config.validate()
    return config


def _configure_logging(config: Config) -> None:
    setup_logging(
        level=config.get('logging.level'),
        log_file=config.get('logging.file'),
        json_format=config.get('logging.json_format'),
        max_bytes=config.get('logging.max_bytes'),
        backup_count=config.get('logging.backup_count'),
    )


def _parse_mix(items: Sequence[str]) -> Optional[Dict[str, float]]:
    if not items:
        return None
    mix: Dict[str, float] = {}
    for item in items:
        kind, sep, value = item.partition('=')
        if not sep:
            raise ConfigurationException("--mix must look like KIND=FRACTION", {'mix': item})
        try:
            mix[kind.strip()] = float(value)
        except ValueError:
            raise ConfigurationException("Mix fraction is not a number", {'mix': item})
    return mix


def cmd_generate(args: argparse.Namespace, config: Config) -> int:
    pcfg = PipelineConfig.from_config(config)
    manifest = generate_corpus(
        args.out, pcfg, count=args.count, mix=_parse_mix(args.mix), n_jobs=pcfg.threads
    )
    print(f"Generated {len(manifest['series'])} series in {args.out}")
    return EXIT_OK


def _expand_inputs(inputs: Sequence[str]) -> List[Path]:
    """CSV files as given; a directory contributes its manifest entries in manifest order."""
    paths: List[Path] = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            if (path / MANIFEST_NAME).exists():
                paths.extend(path / entry['file'] for entry in load_manifest(path)['series'])
            else:
                paths.extend(sorted(path.glob('*.csv')))
        else:
            paths.append(path)
    return paths


def cmd_detect(args: argparse.Namespace, config: Config) -> int:
    pcfg = PipelineConfig.from_config(config)
    out = Path(args.out)
    fmt = CsvFormat(sample_rate=args.sample_rate)
    paths = _expand_inputs(args.inputs)
    if not paths:
        raise ConfigurationException("No input series found", {'inputs': list(args.inputs)})

    # one series: parallelise inside it; several: one series per worker
    outer_jobs = pcfg.threads if len(paths) > 1 else 1
    inner_jobs = 1 if len(paths) > 1 else pcfg.threads
    json_exporter = JSONExporter()
    svg_exporter = SVGPlotExporter() if args.svg else None

    def process(path: Path) -> bool:
        try:
            series = load_csv(path, fmt)
        except QpcdException as e:
            raise StageException('signal', e) from e
        report = run_detection(series, pcfg, n_jobs=inner_jobs)

        result = json_exporter.export(report.to_dict(), out / f"{report.name}{RESULT_SUFFIX}")
        if not result.success:
            raise QpcdException("Could not write detection result", {'path': str(result.output_path), 'error': result.error})
        save_series_csv(report.series, out / f"{report.name}{SERIES_SUFFIX}")
        if args.cloud_csv:
            save_cloud_csv(report.cloud, out / f"{report.name}.cloud.csv")
        if svg_exporter is not None:
            svg = svg_exporter.export(
                SeriesPlot(report.name, report.series, report.threshold, report.flagged),
                out / f"{report.name}.svg",
            )
            if not svg.success:
                raise QpcdException("Could not write SVG", {'path': str(svg.output_path), 'error': svg.error})

        print(
            f"{report.name}\tchange_detected={str(report.change_detected).lower()}"
            f"\tstatistic={report.statistic.value:.6g}\tthreshold={report.threshold:.6g}"
            f"\tflagged={len(report.flagged)}",
            flush=True,
        )
        return report.change_detected

    out.mkdir(parents=True, exist_ok=True)
    detected = ordered_map(process, paths, outer_jobs)
    config.save(out / 'config.json')
    return EXIT_CHANGE if any(detected) else EXIT_OK


def cmd_eval(args: argparse.Namespace, config: Config) -> int:
    corpus = Path(args.corpus)
    manifest = load_manifest(corpus)
    truths = [load_csv(corpus / entry['file']) for entry in manifest['series']]

    runs = []
    for results_dir in map(Path, args.results):
        run = []
        for entry, truth in zip(manifest['series'], truths):
            path = results_dir / f"{entry['name']}{RESULT_SUFFIX}"
            if not path.exists():
                raise EvaluationException(
                    "Missing detection result for manifest entry",
                    {'series': entry['name'], 'path': str(path)}
                )
            detected, positive = score_series(DetectionRecord.from_json(path), truth)
            run.append((entry['name'], detected, positive))
        runs.append(run)

    report = aggregate(runs if len(runs) > 1 else runs[0])
    out = Path(args.out) if args.out else Path(args.results[0])
    JSONExporter().export(report.to_dict(), out / 'eval.json')
    TextTableExporter().export(report, out / 'eval.txt')
    print(TextTableExporter().render(report), end='')
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, config: Config) -> int:
    result_path = Path(args.result)
    record = DetectionRecord.from_json(result_path)
    stem = result_path.name[:-len(RESULT_SUFFIX)] if result_path.name.endswith(RESULT_SUFFIX) else result_path.stem
    series_path = Path(args.series_csv) if args.series_csv else result_path.with_name(f"{stem}{SERIES_SUFFIX}")
    if not series_path.exists():
        raise EvaluationException("Series CSV not found", {'path': str(series_path)})

    series = load_series_csv(series_path, window_span=record.window_span)
    out = Path(args.out) if args.out else result_path.with_name(f"{stem}.svg")
    result = SVGPlotExporter().export(SeriesPlot(record.name, series, record.threshold, record.flagged), out)
    if not result.success:
        raise QpcdException("Could not write SVG", {'path': str(out), 'error': result.error})
    print(f"Wrote {out}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI function."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
        _configure_logging(config)
        return args.func(args, config)
    except QpcdException as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
