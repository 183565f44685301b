"""Command-line entry point.

Every subcommand is a thin adapter over one library operation. Directory
inputs are processed in lexicographic order and all reductions preserve
that order, so reruns with identical flags, seeds, and any thread count
produce byte-identical outputs. Numeric output uses >= 6 significant
digits. Exit code 2 signals a usage or precondition error, reported as a
single line on stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import fd_metric, freq_stats, scaling, upsample
from .colorspace import assemble_rgb, subsample_rgb
from .diffuse import perturb
from .image_io import GrayImage, RgbImage, read_image, write_image
from .schedule import NoiseSchedule, snr_factor_for_resolution
from .tokenizer import (
    TokenConfig,
    dct_coefficient_matrices,
    detokenize,
    read_dctk,
    tokenize,
    write_dctk,
)

__all__ = ["main"]


def _fmt(x: float) -> str:
    return f"{x:#.6g}"


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        n = int(os.environ.get("DCTK_THREADS", "1"))
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    return n


def _pmap(fn, items, threads: int):
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _image_paths(directory) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise ValueError(f"not a directory: {root}")
    paths = sorted(p for p in root.iterdir() if p.suffix in (".ppm", ".pgm"))
    if not paths:
        raise ValueError(f"no .ppm/.pgm files in {root}")
    return paths


def _read_rgb(path) -> RgbImage:
    img = read_image(path)
    if not isinstance(img, RgbImage):
        raise ValueError(f"{path}: expected a P6 color image")
    return img


def _parse_grid(text: str, block_size: int) -> tuple[int, ...]:
    if text == "full":
        return tuple(range(block_size**2))
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(v) for v in text.split(","))


def _schedule_from(args, resolution: int | None = None) -> NoiseSchedule:
    c = args.c
    if c is None:
        c = snr_factor_for_resolution(resolution) if resolution else 1.0
    return NoiseSchedule(a=args.a, b=args.b, c=c)


def _add_schedule_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=float, default=0.1, help="beta intercept")
    p.add_argument("--b", type=float, default=19.9, help="beta slope")
    p.add_argument("--c", type=float, default=None,
                   help="SNR scale factor (default keyed to resolution)")


def _cmd_encode(args) -> int:
    img = _read_rgb(args.input)
    if args.eta is not None:
        eta = args.eta
    elif args.bounds is not None:
        b = scaling.load_bounds(args.bounds)
        if b.mode != "ecs":
            raise ValueError("encode needs an ecs bounds file (one global eta)")
        if b.block_size != args.block_size:
            raise ValueError(
                f"bounds were estimated for B={b.block_size}, not B={args.block_size}"
            )
        eta = b.eta
    else:
        raise ValueError("encode needs --bounds or --eta")
    s = subsample_rgb(img)
    cfg = TokenConfig(
        block_size=args.block_size, drop_count=args.drop, eta=eta,
        height=s.height, width=s.width,
    )
    write_dctk(args.out, tokenize(s, cfg))
    return 0


def _cmd_decode(args) -> int:
    write_image(args.out, assemble_rgb(detokenize(read_dctk(args.input))))
    return 0


def _cmd_ratio(args) -> int:
    print(_fmt(fd_metric.compression_ratio(args.block_size, args.drop)))
    return 0


def _collect_samples(args):
    threads = _threads(args)

    def per_image(path):
        return dct_coefficient_matrices(subsample_rgb(_read_rgb(path)), args.block_size)

    triples = _pmap(per_image, _image_paths(args.input), threads)
    return tuple(np.concatenate([t[i] for t in triples]) for i in range(3))


def _cmd_bounds(args) -> int:
    y, cb, cr = _collect_samples(args)
    if args.mode == "ecs":
        dc = scaling.reservoir_sample(y[:, 0], args.max_samples)
        bounds = scaling.ScalingBounds(
            mode="ecs", tau=args.tau, block_size=args.block_size,
            eta=scaling.estimate_ecs_bound(dc, args.tau),
        )
    else:
        mats = tuple(
            np.stack(
                [scaling.reservoir_sample(m[:, r], args.max_samples, seed=r)
                 for r in range(m.shape[1])],
                axis=1,
            )
            for m in (y, cb, cr)
        )
        bounds = scaling.ScalingBounds(
            mode="naive", tau=args.tau, block_size=args.block_size,
            naive_bounds=tuple(scaling.estimate_naive_bounds(mats, args.tau)),
        )
    scaling.save_bounds(args.out, bounds)
    return 0


def _cmd_weights(args) -> int:
    kept = args.block_size**2 - args.drop
    mats = tuple(m[:, :kept] for m in _collect_samples(args))
    w = freq_stats.entropy_weights(mats, args.block_size, args.drop, bins=args.bins)
    freq_stats.save_weights(args.out, w)
    return 0


def _cmd_scan_m(args) -> int:
    threads = _threads(args)
    images = _pmap(_read_rgb, _image_paths(args.input), threads)
    mode = {"pixels8": "downsampled_pixels", "dctstats": "dct_block_stats"}[args.features]
    cfg = fd_metric.ScanConfig(
        gamma=args.gamma,
        m_grid=_parse_grid(args.grid, args.block_size),
        feature_mode=mode,
    )
    result = fd_metric.scan_mstar(
        images, args.block_size, cfg,
        map_fn=lambda fn, it: _pmap(fn, it, threads),
    )
    if args.report:
        lines = ["m,distance"] + [f"{m},{_fmt(d)}" for m, d in result.curve]
        Path(args.report).write_text("\n".join(lines) + "\n")
    print(result.m_star)
    if result.saturated:
        print("no drop count satisfied the threshold; reporting m*=0", file=sys.stderr)
    return 0


def _cmd_diffuse(args) -> int:
    tokens = read_dctk(args.input)
    sched = _schedule_from(args, max(tokens.config.height, tokens.config.width))
    write_dctk(args.out, perturb(tokens, args.t, sched, args.seed))
    return 0


def _cmd_apsd(args) -> int:
    threads = _threads(args)
    t_grid = [float(v) for v in args.t_list.split(",")]
    channel_idx = {"y": 0, "cb": 1, "cr": 2}[args.channel]
    b = args.block_size

    def blocks_of(path):
        img = read_image(path)
        if isinstance(img, GrayImage):
            plane = img.pixels.astype(np.float64)
        else:
            s = subsample_rgb(img)
            plane = (s.y, s.cb, s.cr)[channel_idx]
        plane = plane - 128.0
        h, w = plane.shape
        if h % b or w % b:
            raise ValueError(f"{path}: plane {w}x{h} not divisible by B={b}")
        return plane.reshape(h // b, b, w // b, b).swapaxes(1, 2).reshape(-1, b, b)

    blocks = np.concatenate(_pmap(blocks_of, _image_paths(args.input), threads))
    sched = _schedule_from(args)
    profiles = freq_stats.apsd(
        blocks, sched, t_grid, seed=args.seed, mode=args.mode, channel=args.channel
    )
    lines = ["t,rank,power"]
    for prof in profiles:
        lines.extend(
            f"{_fmt(prof.time)},{r},{_fmt(p)}" for r, p in enumerate(prof.powers)
        )
    Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_upsample(args) -> int:
    img = read_image(args.input)
    cfg = upsample.UpsampleConfig(method=args.method, block_size=args.block_size)
    if isinstance(img, RgbImage):
        write_image(args.output, upsample.upsample_rgb(img, cfg))
    else:
        write_image(args.output, upsample.upsample_gray(img, cfg))
    return 0


def _cmd_fd(args) -> int:
    threads = _threads(args)
    mode = {"pixels8": "downsampled_pixels", "dctstats": "dct_block_stats"}[args.features]
    extract = fd_metric.make_feature_extractor(mode, args.block_size)

    def stats_of(directory):
        feats = _pmap(lambda p: extract(_read_rgb(p)), _image_paths(directory), threads)
        return fd_metric.gaussian_stats(np.stack(feats))

    print(_fmt(fd_metric.frechet_distance(stats_of(args.dir_a), stats_of(args.dir_b))))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dctpipe", description="DCT-space image pipeline tools"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: DCTK_THREADS or 1)")
        return p

    p = add("encode", _cmd_encode, "image -> DCTK token file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--drop", type=int, default=0)
    p.add_argument("--bounds", default=None, help="ecs bounds JSON supplying eta")
    p.add_argument("--eta", type=float, default=None, help="explicit scale bound")

    p = add("decode", _cmd_decode, "DCTK token file -> image")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)

    p = add("ratio", _cmd_ratio, "print the compression ratio for (B, m)")
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--drop", type=int, required=True)

    p = add("bounds", _cmd_bounds, "estimate scaling bounds over an image directory")
    p.add_argument("--input", required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--mode", choices=("ecs", "naive"), default="ecs")
    p.add_argument("--tau", type=float, default=scaling.DEFAULT_TAU)
    p.add_argument("--max-samples", type=int, default=scaling.MAX_SAMPLES_PER_RANK)
    p.add_argument("--out", required=True)

    p = add("weights", _cmd_weights, "estimate entropy weights over an image directory")
    p.add_argument("--input", required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--drop", type=int, default=0)
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--out", required=True)

    p = add("scan-m", _cmd_scan_m, "scan drop counts for the largest m under gamma")
    p.add_argument("--input", required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--grid", default="full", help="e.g. 0..15 or 0,4,8 (default: full)")
    p.add_argument("--features", choices=("pixels8", "dctstats"), required=True)
    p.add_argument("--report", default=None, help="CSV path for the (m, distance) curve")

    p = add("diffuse", _cmd_diffuse, "forward-perturb a DCTK token file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_schedule_flags(p)

    p = add("apsd", _cmd_apsd, "averaged power spectral density over a directory")
    p.add_argument("--input", required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--t-list", required=True, help="comma-separated times, e.g. 0,0.1,0.5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("vp", "ve"), default="vp")
    p.add_argument("--channel", choices=("y", "cb", "cr"), default="y")
    p.add_argument("--out", required=True)
    _add_schedule_flags(p)

    p = add("upsample", _cmd_upsample, "2x upsample an image (dct or bilinear)")
    p.add_argument("--method", choices=upsample.METHODS, required=True)
    p.add_argument("--block-size", type=int, default=4)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = add("fd", _cmd_fd, "Frechet distance between two image directories")
    p.add_argument("--dir-a", required=True)
    p.add_argument("--dir-b", required=True)
    p.add_argument("--features", choices=("pixels8", "dctstats"), required=True)
    p.add_argument("--block-size", type=int, default=None)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"dctpipe {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
