"""Command-line entry point: generate stories, sweep alpha, evaluate metrics.

Configuration precedence is flags over config file over profile defaults.
Every run writes its manifest before any story output so a run can be
reconstructed from the output directory alone.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

from .errors import PipelineError, StormError, ValidationError
from .expansion import ConceptStore
from .metrics import evaluate_corpus
from .pipeline import PROFILES, PipelineConfig, StoryResult, run, run_chain
from .providers import (
    FixtureTables,
    ProviderEndpointConfig,
    ProviderSet,
    fixture_providers,
    http_providers,
    load_fixtures,
)

CONFIG_FLAGS = {
    "alpha": float,
    "top_k": int,
    "depth_story": int,
    "depth_goal": int,
    "provider_beam": int,
    "fanout": int,
    "template_cap": int,
    "link_threshold": float,
    "stop_threshold": float,
    "max_length": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="storm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--topk", dest="top_k", type=int, default=None)
        p.add_argument("--depth-story", dest="depth_story", type=int, default=None)
        p.add_argument("--depth-goal", dest="depth_goal", type=int, default=None)
        p.add_argument("--provider-beam", dest="provider_beam", type=int, default=None)
        p.add_argument("--fanout", type=int, default=None)
        p.add_argument("--template-cap", dest="template_cap", type=int, default=None)
        p.add_argument("--link-threshold", dest="link_threshold", type=float, default=None)
        p.add_argument("--stop-threshold", dest="stop_threshold", type=float, default=None)
        p.add_argument("--max-length", dest="max_length", type=int, default=None)
        p.add_argument("--profile", choices=sorted(PROFILES), default="roc")
        p.add_argument("--provider", choices=["fixture", "http"], default="fixture")
        p.add_argument("--endpoint", default=None, help="base URL of the model service")
        p.add_argument("--fixtures", default=None, help="fixture bundle JSON path")
        p.add_argument("--store", default=None, help="concept-triple TSV path")
        p.add_argument("--config", default=None, help="JSON config file mirroring the pipeline settings")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output directory")

    gen = sub.add_parser("generate", help="generate stories for prompt/goal pairs")
    add_common(gen)
    gen.add_argument("--prompt", default=None)
    gen.add_argument("--goal", default=None)
    gen.add_argument("--goals", default=None, help="JSON array of goals for a chained story")
    gen.add_argument("--pairs", default=None, help="JSON array of {prompt, goal} objects")
    gen.add_argument("--jobs", type=int, default=1, help="concurrent prompt/goal pairs")

    abl = sub.add_parser("ablate", help="sweep alpha over a prompt/goal dataset")
    add_common(abl)
    abl.add_argument("--dataset", required=True, help="JSON array of {prompt, goal} objects")
    abl.add_argument("--alphas", default="0.5,0.9,0.25", help="comma-separated alpha values")

    ev = sub.add_parser("eval", help="evaluate stories with automatic metrics")
    ev.add_argument("--stories", required=True, help="JSON story corpus")
    ev.add_argument("--golds", default=None, help="JSON array of gold story strings")
    ev.add_argument("--fixtures", default=None, help="fixture bundle for embedding similarity")
    ev.add_argument("--format", choices=["json", "csv"], default="json")
    ev.add_argument("--out", required=True)
    return parser


def _usage_error(message: str) -> "SystemExit":
    print(f"error: {message}", file=sys.stderr)
    return SystemExit(2)


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Merge profile defaults, the optional config file, then explicit flags."""
    settings: dict = dict(PROFILES[args.profile])
    settings["profile"] = args.profile
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise _usage_error(f"config file not found: {path}")
        file_settings = json.loads(path.read_text(encoding="utf-8"))
        unknown = set(file_settings) - set(CONFIG_FLAGS) - {"profile", "append_goal", "workers"}
        if unknown:
            raise _usage_error(f"unknown config keys: {sorted(unknown)}")
        settings.update(file_settings)
    for name in CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            settings[name] = value
    try:
        return PipelineConfig(**settings)
    except ValidationError as exc:
        raise _usage_error(str(exc)) from exc


def resolve_providers(args: argparse.Namespace) -> tuple[ProviderSet, ConceptStore, dict]:
    if args.provider == "fixture":
        tables = load_fixtures(args.fixtures) if args.fixtures else FixtureTables()
        providers = fixture_providers(tables)
        mode = {"provider": "fixture", "fixtures": args.fixtures}
    else:
        if not args.endpoint:
            raise _usage_error("--provider http requires --endpoint")
        providers = http_providers(ProviderEndpointConfig(base_url=args.endpoint, request_id_seed=args.seed))
        mode = {"provider": "http", "endpoint": args.endpoint}
    store = ConceptStore.from_tsv(args.store) if args.store else ConceptStore()
    mode["store"] = args.store
    return providers, store, mode


def _write_manifest(out_dir: Path, config: PipelineConfig, mode: dict, inputs: dict, outputs: list[str], seed: int) -> None:
    manifest = {
        "config": asdict(config),
        "provider_mode": mode,
        "inputs": inputs,
        "outputs": outputs,
        "seed": seed,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _result_payload(result: StoryResult) -> dict:
    return {
        "story": result.best_story,
        "stop_reason": result.stop_reason.value,
        "beams": [
            {"story": list(beam.story), "final_score": beam.final_score}
            for beam in result.beams
        ],
    }


def cmd_generate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    providers, store, mode = resolve_providers(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.pairs:
        pairs = json.loads(Path(args.pairs).read_text(encoding="utf-8"))
        if not isinstance(pairs, list) or not pairs:
            raise _usage_error("--pairs file must be a non-empty JSON array")
        inputs = {"pairs": pairs}
    elif args.prompt and args.goals:
        goals = json.loads(Path(args.goals).read_text(encoding="utf-8"))
        if not isinstance(goals, list) or not goals:
            raise _usage_error("--goals file must be a non-empty JSON array")
        inputs = {"prompt": args.prompt, "goals": goals}
    elif args.prompt and args.goal:
        inputs = {"pairs": [{"prompt": args.prompt, "goal": args.goal}]}
    else:
        raise _usage_error("generate needs --prompt with --goal or --goals, or --pairs")

    if "goals" in inputs:
        outputs = ["story_0.json", "trace_0.jsonl"]
        _write_manifest(out_dir, config, mode, inputs, outputs, args.seed)
        story, results = run_chain(inputs["prompt"], inputs["goals"], config, providers, store)
        payload = {
            "story": story,
            "segments": [_result_payload(r) for r in results],
        }
        (out_dir / "story_0.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        trace_lines = [line for r in results for line in r.trace_jsonl().splitlines() if line]
        (out_dir / "trace_0.jsonl").write_text("\n".join(trace_lines) + "\n", encoding="utf-8")
        return 0

    pairs = inputs["pairs"]
    outputs = [f"story_{i}.json" for i in range(len(pairs))] + [f"trace_{i}.jsonl" for i in range(len(pairs))]
    _write_manifest(out_dir, config, mode, inputs, outputs, args.seed)

    def run_pair(indexed: tuple[int, dict]) -> tuple[int, StoryResult]:
        index, pair = indexed
        return index, run(pair["prompt"], pair["goal"], config, providers, store)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_pair, enumerate(pairs)))
    else:
        results = [run_pair(item) for item in enumerate(pairs)]
    for index, result in results:
        (out_dir / f"story_{index}.json").write_text(
            json.dumps(_result_payload(result), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        (out_dir / f"trace_{index}.jsonl").write_text(result.trace_jsonl() + "\n", encoding="utf-8")
    return 0


ABLATION_LENGTH_CAP = 10


def cmd_ablate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    providers, store, mode = resolve_providers(args)
    dataset_path = Path(args.dataset)
    if not dataset_path.exists():
        raise _usage_error(f"dataset not found: {dataset_path}")
    dataset = json.loads(dataset_path.read_text(encoding="utf-8"))
    if not isinstance(dataset, list) or not dataset:
        raise _usage_error("dataset must be a non-empty JSON array of {prompt, goal}")
    try:
        alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    except ValueError:
        raise _usage_error(f"bad --alphas value: {args.alphas!r}") from None

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_manifest(out_dir, config, mode, {"dataset": str(dataset_path), "alphas": alphas},
                    ["ablation.json", "ablation.txt"], args.seed)

    rows = []
    for alpha in alphas:
        lengths = []
        for pair in dataset:
            sweep_config = PipelineConfig(**{**asdict(config), "alpha": alpha, "max_length": ABLATION_LENGTH_CAP})
            result = run(pair["prompt"], pair["goal"], sweep_config, providers, store)
            lengths.append(result.beams[0].generated)
        mean = sum(lengths) / len(lengths)
        std = math.sqrt(sum((x - mean) ** 2 for x in lengths) / len(lengths))
        rows.append({"alpha": alpha, "mean": mean, "std": std, "lengths": lengths})

    table = format_ablation_table(rows)
    (out_dir / "ablation.json").write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "ablation.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def format_ablation_table(rows: list[dict]) -> str:
    """Fixed-layout summary: one row per alpha with mean +/- std story length."""
    lines = ["Model           Avg. len"]
    for row in rows:
        lines.append(f"alpha={row['alpha']:.2f}      {row['mean']:.2f} +/- {row['std']:.2f}")
    return "\n".join(lines) + "\n"


def cmd_eval(args: argparse.Namespace) -> int:
    stories_path = Path(args.stories)
    if not stories_path.exists():
        raise _usage_error(f"stories file not found: {stories_path}")
    raw = json.loads(stories_path.read_text(encoding="utf-8"))
    stories = [entry["story"] if isinstance(entry, dict) else entry for entry in raw]

    golds = None
    if args.golds:
        golds_path = Path(args.golds)
        if not golds_path.exists():
            raise _usage_error(f"golds file not found: {golds_path}")
        golds = json.loads(golds_path.read_text(encoding="utf-8"))
        if len(golds) != len(stories):
            raise _usage_error(f"{len(stories)} stories but {len(golds)} golds")

    embed = None
    if args.fixtures:
        embed = fixture_providers(load_fixtures(args.fixtures)).similarity

    report = evaluate_corpus(stories, golds, embed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        (out_dir / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    else:
        (out_dir / "report.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "ablate":
            return cmd_ablate(args)
        return cmd_eval(args)
    except PipelineError as exc:
        print(f"pipeline failed at stage {exc.stage}: {exc}", file=sys.stderr)
        return 1
    except StormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
