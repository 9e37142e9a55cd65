"""
Subcommand implementations.

Every command computes all of its outputs in memory first and only then
writes them as one unit: all files are staged, then renamed into place, and a
failure at any point removes what the command created.
"""

import argparse
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from pyrope.analysis.decay import decay_curve, spatial_decay_map
from pyrope.analysis.flow import flow_by_position, info_flow, quartile_ratio
from pyrope.cli.main import resolve_config
from pyrope.core.config import RunConfig
from pyrope.maskgen.masks import build_mask
from pyrope.posindex.grid import ring_counts
from pyrope.posindex.triplet import raster_triplets, triplet_array
from pyrope.rotary.frequencies import make_allocation
from pyrope.toynet.model import ToyDecoder
from pyrope.toynet.sequence import TokenSequence
from pyrope.utils.io import atomic_write_all
from pyrope.visualization.charts import PGMHeatmap, SVGHeatmap, decay_chart
from pyrope.visualization.exporters import CSVExporter, header_line

logger = logging.getLogger(__name__)

Output = Tuple[Path, Union[str, bytes]]


def _emit(outputs: List[Output]) -> None:
    payloads = [
        (path, data.encode("utf-8") if isinstance(data, str) else data) for path, data in outputs
    ]
    for path in atomic_write_all(payloads):
        print(path)


def _svg(render: Callable[[], bytes]) -> Optional[bytes]:
    try:
        return render()
    except ImportError as e:
        logger.warning("skipping SVG output: %s", e)
        return None


def _heatmaps(out: Path, stem: str, values: np.ndarray, header: str, title: str) -> List[Output]:
    outputs: List[Output] = [(out / f"{stem}.pgm", PGMHeatmap().render(values, header))]
    svg = _svg(lambda: SVGHeatmap(title=title).render(values, header))
    if svg is not None:
        outputs.append((out / f"{stem}.svg", svg))
    return outputs


def _sequence(cfg: RunConfig) -> TokenSequence:
    layout = cfg.layout()
    model_dim = cfg.heads * cfg.head_dim
    seq = TokenSequence.synthetic(layout, model_dim, cfg.vocab, cfg.seed)
    if cfg.embeddings:
        seq = TokenSequence.from_csv(cfg.embeddings, layout, model_dim, seq.text_ids)
    return seq


def cmd_indices(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    layout = cfg.layout()
    if args.scheme == "raster":
        triplets = raster_triplets(layout)
    else:
        triplets = triplet_array(layout)
    if layout.views:
        logger.info("ring counts per view: %s", ring_counts(layout.grid))
    header = header_line(cfg.seed, args.scheme, "-")
    _emit([(Path(cfg.output_dir) / "indices.csv", CSVExporter.indices(layout, header, triplets))])
    return 0


def cmd_freq(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    alloc = make_allocation(cfg.encoding, cfg.head_dim, base=cfg.rope_base)
    header = header_line(cfg.seed, alloc.variant, "-")
    name = f"freq_{alloc.variant}_d{alloc.head_dim}.csv"
    _emit([(Path(cfg.output_dir) / name, CSVExporter.allocation(alloc, header))])
    return 0


def cmd_mask(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    mask = build_mask(cfg.layout(), cfg.mask)
    header = header_line(cfg.seed, mask.kind, "-")
    out = Path(cfg.output_dir)
    outputs: List[Output] = [
        (out / f"mask_{mask.kind}.csv", CSVExporter.mask(mask, header)),
        (out / f"mask_{mask.kind}.pgm", PGMHeatmap().render(mask.visible.astype(np.float64), header)),
    ]
    logger.info("%s mask: %d visible of %d", mask.kind, mask.count(), mask.n * mask.n)
    _emit(outputs)
    return 0


def cmd_decay(args: argparse.Namespace) -> int:
    if args.variants:
        args.encoding = args.variants[0]
    cfg = resolve_config(args)
    variants = args.variants or [cfg.encoding]
    allocations = [make_allocation(v, cfg.head_dim, base=cfg.rope_base) for v in variants]

    out = Path(cfg.output_dir)
    outputs: List[Output] = []
    curves = []
    for alloc in allocations:
        series = decay_curve(
            alloc,
            cfg.max_delta,
            cfg.samples,
            cfg.seed,
            component=args.component,
            alignment=args.alignment,
            shards=args.shards,
        )
        curves.append(series)
        header = header_line(cfg.seed, alloc.variant, "none")
        outputs.append((out / f"decay_{alloc.variant}_{args.component}.csv", CSVExporter.decay(series, header)))

    header = header_line(cfg.seed, "+".join(variants), "none")
    svg = _svg(lambda: decay_chart(curves, header, log_x=args.log_x))
    if svg is not None:
        outputs.append((out / f"decay_{args.component}.svg", svg))
    _emit(outputs)
    return 0


def cmd_spatial(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    alloc = make_allocation(cfg.encoding, cfg.head_dim, base=cfg.rope_base)
    flow_map = spatial_decay_map(
        alloc, cfg.grid, cfg.samples, cfg.seed, alignment=args.alignment, shards=args.shards
    )
    header = header_line(cfg.seed, alloc.variant, flow_map.normalization)
    out = Path(cfg.output_dir)
    stem = f"spatial_{alloc.variant}"
    outputs: List[Output] = [
        (out / f"{stem}.csv", CSVExporter.flow_map(flow_map, header)),
        (out / f"{stem}_stderr.csv", CSVExporter.matrix(flow_map.stderr, header)),
    ]
    outputs += _heatmaps(out, stem, flow_map.values, header, f"{alloc.variant} spatial decay")
    for flag in flow_map.flags:
        print(f"warning: {flag}")
    _emit(outputs)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    model_cfg = cfg.model_config()
    seq = _sequence(cfg)
    decoder = ToyDecoder(model_cfg)
    result = decoder.forward(seq)
    generation = decoder.generate(seq, cfg.steps)

    header = header_line(cfg.seed, cfg.encoding, "-")
    out = Path(cfg.output_dir)
    outputs: List[Output] = [
        (out / "run_config.json", json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"),
        (out / "logits.csv", CSVExporter.matrix(result.logits, header)),
        (out / "generated.csv", CSVExporter.tokens(generation.tokens, header)),
    ]
    if args.dump_trace:
        trace_dir = Path(args.dump_trace)
        for layer, head, weights in result.trace.items():
            name = f"trace_l{layer + 1}_h{head + 1}.csv"
            outputs.append((trace_dir / name, CSVExporter.matrix(weights, header)))
    print("generated:", " ".join(str(t) for t in generation.tokens))
    _emit(outputs)
    return 0


def cmd_flow(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    layout = cfg.layout()
    decoder = ToyDecoder(cfg.model_config())
    seq = _sequence(cfg)
    flow_map = info_flow(decoder.forward(seq).trace, layout, cfg.normalization)
    series = flow_by_position(decoder.generate(seq, cfg.steps).traces, layout)

    header = header_line(cfg.seed, cfg.encoding, cfg.normalization)
    out = Path(cfg.output_dir)
    outputs: List[Output] = [
        (out / "flow_map.csv", CSVExporter.flow_map(flow_map, header)),
        (out / "flow_series.csv", CSVExporter.flow_series(series, header)),
    ]
    outputs += _heatmaps(out, "flow_map", flow_map.values, header, f"{cfg.encoding} / {cfg.mask}")
    print(f"quartile_ratio {quartile_ratio(flow_map)!r}")
    _emit(outputs)
    return 0


def compare_metrics(cfg: RunConfig, against: str) -> List[Tuple[str, float]]:
    """
    Run ``cfg.encoding`` and ``against`` over the same sequence and weights.

    Returns ``(metric, value)`` pairs: maximum absolute logit difference, mean
    absolute attention difference per layer, greedy token agreement and, when
    the layout has image and text tokens, each encoding's flow quartile ratio.
    """
    first_cfg = cfg.model_config()
    second_cfg = replace(first_cfg, encoding=against)
    seq = _sequence(cfg)
    layout = cfg.layout()

    first, second = ToyDecoder(first_cfg), ToyDecoder(second_cfg)
    a, b = first.forward(seq), second.forward(seq)
    tokens_a = first.generate(seq, cfg.steps).tokens
    tokens_b = second.generate(seq, cfg.steps).tokens

    metrics: List[Tuple[str, float]] = [
        ("max_abs_logit_diff", float(np.max(np.abs(a.logits - b.logits))))
    ]
    attention_diff = np.abs(a.trace.weights - b.trace.weights).mean(axis=(1, 2, 3))
    for layer, value in enumerate(attention_diff, start=1):
        metrics.append((f"mean_abs_attention_diff_layer{layer}", float(value)))
    metrics.append(("token_agreement", float(np.mean(np.equal(tokens_a, tokens_b)))))
    if layout.views and layout.text_len:
        metrics.append((f"quartile_ratio_{first_cfg.encoding}", quartile_ratio(info_flow(a.trace, layout))))
        metrics.append((f"quartile_ratio_{against}", quartile_ratio(info_flow(b.trace, layout))))
    return metrics


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    metrics = compare_metrics(cfg, args.against)
    header = header_line(cfg.seed, f"{cfg.encoding}+{args.against}", "-")
    for name, value in metrics:
        print(f"{name} {value!r}")
    _emit([(Path(cfg.output_dir) / "compare.csv", CSVExporter.summary(metrics, header))])
    return 0
