"""Command-line pipeline driver.

Commands: synth, train-skin, features, segment, eval, sweep. Every command
is deterministic given its inputs and configuration; outputs embed a short
configuration hash for provenance. Exit codes: 0 success, 1 input error,
2 configuration error.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import ConfigError, load_config
from .cut_detector import ActionSegment, assemble_segments
from .entropy_filters import load_skin_model, save_skin_model, train_skin_model
from .evaluation import cut_flags, metrics, score_video, sweep
from .frame_io import (
    InputError,
    load_gaze_track,
    load_ground_truth,
    load_pixel_samples,
    load_segments,
    load_sequence,
    write_feature_trace,
    write_segments,
)
from .pipeline import apply_cuts, compute_frame_features
from .synthetic import ScenarioConfig, default_scenario, write_scenario

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONFIG = 2


def _config_from_args(args):
    overrides = {}
    for name in ("t_a", "t_b", "t_c", "t_d", "min_run", "flow_mode", "skin_model"):
        if hasattr(args, name):
            overrides[name] = getattr(args, name)
    return load_config(getattr(args, "config", None), overrides)


def _resolve_skin_model(cfg, input_dir):
    if cfg.skin_model is not None:
        return load_skin_model(cfg.skin_model)
    default = Path(input_dir) / "skin_model.json"
    if default.is_file():
        return load_skin_model(default)
    raise InputError(
        f"no skin model: set 'skin_model' in the config or provide {default}"
    )


def _load_video(input_dir):
    base = Path(input_dir)
    frames = load_sequence(base / "manifest.json")
    gaze = load_gaze_track(base / "gaze.csv")
    return frames, gaze


def cmd_synth(args):
    if args.scenario is not None:
        path = Path(args.scenario)
        if not path.is_file():
            raise InputError(f"scenario file not found: {path}")
        try:
            raw = json.loads(path.read_text())
            raw["action_intervals"] = tuple(
                tuple(iv) for iv in raw.get("action_intervals", ())
            )
            if "frame_size" in raw:
                raw["frame_size"] = tuple(raw["frame_size"])
            if "skin_color" in raw:
                raw["skin_color"] = tuple(raw["skin_color"])
            scenario = ScenarioConfig(**raw)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: invalid scenario ({exc})") from exc
    else:
        scenario = default_scenario(args.seed, num_frames=args.frames,
                                    num_actions=args.actions)
    write_scenario(scenario, args.out)
    print(f"wrote scenario (seed {scenario.seed}, {scenario.num_frames} frames) "
          f"to {args.out}")
    return EXIT_OK


def cmd_train_skin(args):
    skin = load_pixel_samples(args.skin)
    nonskin = load_pixel_samples(args.nonskin)
    try:
        model = train_skin_model(skin, nonskin, bins_per_axis=args.bins,
                                 prior_skin=args.prior)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    save_skin_model(args.out, model)
    print(f"trained skin model ({len(skin)} skin / {len(nonskin)} nonskin samples) "
          f"to {args.out}")
    return EXIT_OK


def cmd_features(args):
    cfg = _config_from_args(args)
    frames, gaze = _load_video(args.input_dir)
    model = _resolve_skin_model(cfg, args.input_dir)
    features, hists = compute_frame_features(
        frames, gaze, model, cfg, flow_dump_dir=args.dump_flow
    )
    apply_cuts(features, cfg.thresholds())
    write_feature_trace(args.out, features, config_hash=cfg.config_hash(),
                        histograms=hists if args.debug_hist else None)
    print(f"wrote {len(features)} feature rows to {args.out}")
    return EXIT_OK


def cmd_segment(args):
    cfg = _config_from_args(args)
    frames, gaze = _load_video(args.input_dir)
    model = _resolve_skin_model(cfg, args.input_dir)
    features, _ = compute_frame_features(frames, gaze, model, cfg)
    apply_cuts(features, cfg.thresholds())
    segments = assemble_segments([f.cut_flag for f in features], min_run=cfg.min_run)
    write_segments(args.out, segments, config_hash=cfg.config_hash())
    print(f"wrote {len(segments)} segments to {args.out}")
    return EXIT_OK


def cmd_eval(args):
    cfg = _config_from_args(args)
    segments = [ActionSegment(s, e) for s, e in load_segments(args.segments)]
    gts = load_ground_truth(args.ground_truth)
    try:
        counts, outcomes = score_video(segments, gts, detailed=True)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    recall, precision, f_measure = metrics(counts)
    report = {
        "config_hash": cfg.config_hash(),
        "counts": {"tp": counts.tp, "fp": counts.fp, "fn": counts.fn},
        "metrics": {"recall": recall, "precision": precision,
                    "f_measure": f_measure},
        "ground_truths": [
            {
                "label": o.gt.label,
                "start": o.gt.start,
                "end": o.gt.end,
                "outcome": o.outcome,
                "align_score": o.align_score,
                "segments": [[s.start, s.end] for s in o.aligned],
            }
            for o in outcomes
        ],
    }
    Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True))
    print(f"recall={recall:.4f} precision={precision:.4f} f_measure={f_measure:.4f} "
          f"-> {args.out}")
    return EXIT_OK


def _sweep_video(input_dir, cfg):
    frames, gaze = _load_video(input_dir)
    model = _resolve_skin_model(cfg, input_dir)
    gts = load_ground_truth(Path(input_dir) / "ground_truth.csv")
    features, _ = compute_frame_features(frames, gaze, model, cfg)
    return features, gts


def cmd_sweep(args):
    cfg = _config_from_args(args)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        loaded = list(pool.map(lambda d: _sweep_video(d, cfg), args.input_dirs))
    per_video_features = [f for f, _ in loaded]
    per_video_gts = [g for _, g in loaded]
    results = sweep(per_video_features, per_video_gts, fixed_phi=cfg.t_c,
                    min_run=cfg.min_run)
    with open(args.out, "w", newline="") as f:
        f.write(f"# config={cfg.config_hash()}\n")
        f.write("t_a,t_b,t_c,t_d,tp,fp,fn,recall,precision,f_measure\n")
        for r in results:
            t = r.thresholds
            f.write(f"{t.t_a!r},{t.t_b!r},{t.t_c!r},{t.t_d!r},"
                    f"{r.counts.tp},{r.counts.fp},{r.counts.fn},"
                    f"{r.recall!r},{r.precision!r},{r.f_measure!r}\n")
    best = max(results, key=lambda r: r.f_measure)
    print(f"swept {len(results)} combinations over {len(args.input_dirs)} videos; "
          f"best F={best.f_measure:.4f} at t_a={best.thresholds.t_a} "
          f"t_b={best.thresholds.t_b} t_d={best.thresholds.t_d} -> {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gazecut",
        description="Unsupervised temporal segmentation of egocentric video "
                    "from gaze-region motion statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON run-configuration file")
        p.add_argument("--out", required=True, help="output path")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel videos (where applicable)")

    p = sub.add_parser("synth", help="generate a synthetic input directory")
    add_common(p)
    p.add_argument("--scenario", help="scenario JSON (overrides --seed/--frames)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--frames", type=int, default=300)
    p.add_argument("--actions", type=int, default=3)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train-skin", help="train a skin model from chroma CSVs")
    add_common(p)
    p.add_argument("--skin", required=True, help="skin pixel CSV (u,v rows)")
    p.add_argument("--nonskin", required=True, help="nonskin pixel CSV (u,v rows)")
    p.add_argument("--bins", type=int, default=32)
    p.add_argument("--prior", type=float, default=0.5)
    p.set_defaults(func=cmd_train_skin)

    p = sub.add_parser("features", help="write the per-frame feature trace")
    add_common(p)
    p.add_argument("input_dir")
    p.add_argument("--skin-model", dest="skin_model")
    p.add_argument("--debug-hist", action="store_true",
                   help="append raw orientation-bin columns")
    p.add_argument("--dump-flow", metavar="DIR",
                   help="write per-frame flow planes as CSV grids")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("segment", help="discover action segments")
    add_common(p)
    p.add_argument("input_dir")
    p.add_argument("--skin-model", dest="skin_model")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="score segments against ground truth")
    add_common(p)
    p.add_argument("--segments", required=True)
    p.add_argument("--ground-truth", required=True, dest="ground_truth")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="threshold grid sweep over videos")
    add_common(p)
    p.add_argument("input_dirs", nargs="+")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
