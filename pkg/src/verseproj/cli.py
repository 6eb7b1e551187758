"""End-to-end pipeline driver: ingest, align, generate, report, compare.

Subcommands: generate, stats, baseline, compare-ud.  Options can come from a
plain key=value config file; the path options can also be overridden by
VERSEPROJ_* environment variables.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
from dataclasses import dataclass
from pathlib import Path

from . import align, onf, scripture, tasks, udcheck
from .scripture import VerseLabel
from .tasks import Task, TaskInstance

ENV_PATH_VARS = {
    "source_dir": "VERSEPROJ_SOURCE_DIR",
    "sidecar": "VERSEPROJ_SIDECAR",
    "target_tsv": "VERSEPROJ_TARGET_TSV",
    "out_dir": "VERSEPROJ_OUT_DIR",
}


class CoverageError(RuntimeError):
    """Target translation overlaps the source corpus on too few verses."""


@dataclass
class RunConfig:
    source_dir: Path
    target_tsv: Path
    out_dir: Path | None = None
    sidecar: Path | None = None
    use_heuristic: bool = False
    seed: int = 0
    split_ratios: tuple[float, float, float] = tasks.DEFAULT_RATIOS
    cap: int | None = None
    min_overlap: int = 500
    allow_low_overlap: bool = False
    task_list: tuple[Task, ...] = tuple(Task)
    translation_id: str = ""

    def __post_init__(self) -> None:
        if abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1: {self.split_ratios}")
        if not self.translation_id:
            self.translation_id = Path(self.target_tsv).stem


@dataclass
class _Prepared:
    """Everything the generators need, computed once per run."""

    table: align.AlignmentTable
    usable: list[VerseLabel]
    sentences_of: dict[VerseLabel, list[onf.OnfSentence]]
    texts: dict[VerseLabel, str]
    overlap: int


def _prepare(config: RunConfig) -> _Prepared:
    docs = onf.load_corpus(config.source_dir)
    sidecar = None
    if config.sidecar is not None:
        sidecar = align.read_sidecar(Path(config.sidecar).read_text("utf-8"))
    extractor = align.ExtractorConfig(sidecar=sidecar, use_heuristic=config.use_heuristic)
    svm = align.SentenceVerseMap()
    for doc in docs:
        svm.merge(align.assign_verses(doc, extractor))

    target = scripture.parse_bible_tsv(
        Path(config.target_tsv).read_text("utf-8"), config.translation_id)

    reference: set[VerseLabel] = set()
    combined_source: set[VerseLabel] = set()
    for labels in svm.entries.values():
        for label in labels:
            if label.is_combined:
                combined_source.add(label)
            for v in label.verses():
                reference.add(VerseLabel.simple(label.book, label.chapter, v))

    overlap, accepted = scripture.coverage_check(target, reference, config.min_overlap)
    if not accepted and not config.allow_low_overlap:
        raise CoverageError(
            f"target covers only {overlap} source verses "
            f"(minimum {config.min_overlap}); pass --allow-low-overlap to proceed")

    table = align.build_alignment(svm, combined_source, target)
    usable = align.usable_verses(table)

    sentences_by_id = {(doc.doc_id, s.index): s for doc in docs for s in doc.sentences}
    sentences_of = {
        verse: [sentences_by_id[sid] for sid in table.rows[verse].sentence_ids]
        for verse in usable
    }
    texts = {}
    for verse in usable:
        text = target.text_for(verse)
        assert text is not None  # usable implies a simple target verse exists
        texts[verse] = text
    return _Prepared(table, usable, sentences_of, texts, overlap)


def build_task_instances(task: Task, prepared: _Prepared, seed: int) -> list[TaskInstance]:
    """All instances for one task over the usable verses."""
    instances: list[TaskInstance] = []
    if task in (Task.SS, Task.SAC):
        corpus = {verse: tasks.sense_usages(prepared.sentences_of[verse])
                  for verse in prepared.usable}
        generator = tasks.gen_ss if task is Task.SS else tasks.gen_sac
        return generator(corpus, prepared.texts, seed)
    for verse in prepared.usable:
        sentences = prepared.sentences_of[verse]
        if task is Task.NMC:
            label = tasks.nmc_label(sentences)
        elif task is Task.PNS:
            label = tasks.pns_label(sentences[0])
        else:
            label = tasks.sm_label(sentences[0])
        if label is None:
            continue
        instances.append(TaskInstance(task, verse, prepared.texts[verse], label=label))
    return instances


def _label_histogram(instances: list[TaskInstance]) -> dict[str, int]:
    histogram: dict[str, int] = {}
    for inst in instances:
        histogram[str(inst.label)] = histogram.get(str(inst.label), 0) + 1
    return dict(sorted(histogram.items(), key=lambda kv: int(kv[0])))


def _stats(config: RunConfig, prepared: _Prepared,
           bundles: dict[Task, tasks.DatasetBundle]) -> dict:
    report = {
        "translation_id": config.translation_id,
        "seed": config.seed,
        "generator_version": tasks.GENERATOR_VERSION,
        "overlap_count": prepared.overlap,
        "verse_status_counts": prepared.table.status_counts(),
        "usable_verses": len(prepared.usable),
        "tasks": {},
    }
    for task, bundle in bundles.items():
        all_instances = bundle.all_instances()
        report["tasks"][task.value] = {
            "instances": len(all_instances),
            "splits": {name: len(bundle.splits[name]) for name in tasks.SPLIT_NAMES},
            "label_histogram": _label_histogram(all_instances),
        }
    return report


def _build_bundles(config: RunConfig, prepared: _Prepared) -> dict[Task, tasks.DatasetBundle]:
    bundles: dict[Task, tasks.DatasetBundle] = {}
    for task in config.task_list:
        instances = build_task_instances(task, prepared, config.seed)
        if not instances:
            raise RuntimeError(f"task {task.value}: no instances generated")
        bundles[task] = tasks.split_dataset(
            instances, config.split_ratios, config.seed, config.translation_id)
    return bundles


def run_stats(config: RunConfig) -> dict:
    """Dry run: alignment and generation statistics, nothing written."""
    prepared = _prepare(config)
    return _stats(config, prepared, _build_bundles(config, prepared))


def run_generate(config: RunConfig) -> dict:
    """Full pipeline: refuse on low coverage, export every requested task,
    write the stats report.  Partial output is removed on failure."""
    if config.out_dir is None:
        raise ValueError("generate requires an output directory")
    out_dir = Path(config.out_dir)
    created_dir = not out_dir.exists()
    written: list[Path] = []
    try:
        prepared = _prepare(config)
        bundles = _build_bundles(config, prepared)
        out_dir.mkdir(parents=True, exist_ok=True)
        for task, bundle in bundles.items():
            written.extend(tasks.export_bundle(bundle, out_dir, cap=config.cap))
        stats = _stats(config, prepared, bundles)
        stats_path = out_dir / "stats.json"
        stats_path.write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n", "utf-8")
        written.append(stats_path)
        return stats
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        if created_dir:
            shutil.rmtree(out_dir, ignore_errors=True)
        raise


def majority_label(instances: list[TaskInstance]) -> int:
    """Most frequent label; ties break toward the smaller label."""
    counts: dict[int, int] = {}
    for inst in instances:
        counts[inst.label] = counts.get(inst.label, 0) + 1
    return max(sorted(counts), key=lambda label: counts[label])


def run_baseline(train_path: str | Path, test_path: str | Path) -> dict:
    """Majority-class baseline: fit on train, accuracy on test."""
    train = tasks.read_instances(train_path)
    test = tasks.read_instances(test_path)
    if not train or not test:
        raise ValueError("baseline needs non-empty train and test splits")
    majority = majority_label(train)
    correct = sum(1 for inst in test if inst.label == majority)
    return {
        "task": train[0].task.value,
        "majority_label": majority,
        "accuracy": correct / len(test),
        "n_train": len(train),
        "n_test": len(test),
    }


def read_labels_file(path: str | Path, cap: int | None = None) -> dict[VerseLabel, int]:
    """Verse-keyed labels from a task JSONL file or a two-column TSV."""
    path = Path(path)
    labels: dict[VerseLabel, int] = {}
    if path.suffix == ".jsonl":
        for inst in tasks.read_instances(path):
            labels[inst.verse_1] = inst.label
    else:
        for lineno, raw in enumerate(path.read_text("utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 tab-separated fields")
            labels[VerseLabel.parse(fields[0])] = int(fields[1])
    if cap is not None:
        labels = {verse: tasks.cap_label(label, cap) for verse, label in labels.items()}
    return labels


def run_compare(primary_paths: list[str | Path], ud_paths: list[str | Path],
                task: Task, seed: int, cap: int | None = None) -> dict:
    """Agreement report: projected vs dependency-derived labels, with both
    sides also scored against one seeded random baseline."""
    primary: dict[VerseLabel, int] = {}
    for path in primary_paths:
        primary.update(read_labels_file(path, cap=cap))
    ud: dict[VerseLabel, int] = {}
    for path in ud_paths:
        ud.update(read_labels_file(path))
    if set(primary) != set(ud):
        difference = sorted(set(primary) ^ set(ud), key=VerseLabel.sort_key)
        shown = ", ".join(str(v) for v in difference[:10])
        raise ValueError(
            f"label files cover different verses ({len(difference)} mismatched): {shown}")
    verses = sorted(primary, key=VerseLabel.sort_key)
    a = [primary[v] for v in verses]
    b = [ud[v] for v in verses]
    rand_seed = tasks.substream(seed, "random-baseline").randrange(2**63)
    r = udcheck.random_annotations(task, len(verses), rand_seed)

    def row(pair: str, x: list[int], y: list[int]) -> dict:
        report = udcheck.agreement(x, y, task)
        out = {"pair": pair, "accuracy": report.accuracy}
        if report.mse is not None:
            out["mse"] = report.mse
        if report.jaccard is not None:
            out["jaccard"] = report.jaccard
        return out

    return {
        "task": task.value,
        "n": len(verses),
        "seed": seed,
        "rows": [
            row("projected-ud", a, b),
            row("projected-random", a, r),
            row("ud-random", b, r),
        ],
    }


def _read_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _parse_ratios(text: str) -> tuple[float, float, float]:
    parts = [float(part) for part in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated ratios: {text!r}")
    return parts[0], parts[1], parts[2]


def _parse_tasks(text: str) -> tuple[Task, ...]:
    return tuple(Task(part.strip().lower()) for part in text.split(",") if part.strip())


def _build_run_config(args: argparse.Namespace) -> RunConfig:
    file_values = _read_config_file(args.config) if args.config else {}

    def pick(key: str, flag_value, parse=lambda v: v):
        if flag_value is not None:
            return flag_value
        if key in ENV_PATH_VARS and os.environ.get(ENV_PATH_VARS[key]):
            return parse(os.environ[ENV_PATH_VARS[key]])
        if key in file_values:
            return parse(file_values[key])
        return None

    source_dir = pick("source_dir", args.source_dir, Path)
    target_tsv = pick("target_tsv", args.target_tsv, Path)
    if source_dir is None or target_tsv is None:
        raise ValueError("source_dir and target_tsv are required")
    heuristic = args.heuristic or file_values.get("heuristic", "") in ("1", "true", "yes")
    return RunConfig(
        source_dir=source_dir,
        target_tsv=target_tsv,
        out_dir=pick("out_dir", getattr(args, "out_dir", None), Path),
        sidecar=pick("sidecar", args.sidecar, Path),
        use_heuristic=heuristic,
        seed=pick("seed", args.seed, int) or 0,
        split_ratios=pick("split_ratios", args.split_ratios, _parse_ratios)
        or tasks.DEFAULT_RATIOS,
        cap=pick("cap", args.cap, int),
        min_overlap=(lambda v: 500 if v is None else v)(
            pick("min_overlap", args.min_overlap, int)),
        allow_low_overlap=args.allow_low_overlap
        or file_values.get("allow_low_overlap", "") in ("1", "true", "yes"),
        task_list=pick("tasks", _parse_tasks(args.tasks) if args.tasks else None,
                       _parse_tasks) or tuple(Task),
        translation_id=pick("translation_id", args.translation_id) or "",
    )


def _add_pipeline_options(parser: argparse.ArgumentParser, with_out: bool) -> None:
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--source-dir", dest="source_dir", type=Path,
                        help="directory of ONF files")
    parser.add_argument("--sidecar", type=Path,
                        help="sentence-to-verse sidecar TSV")
    parser.add_argument("--heuristic", action="store_true",
                        help="use the leading-verse-number heuristic")
    parser.add_argument("--target-tsv", dest="target_tsv", type=Path,
                        help="target translation TSV")
    if with_out:
        parser.add_argument("--out-dir", dest="out_dir", type=Path,
                            help="output directory for datasets")
    parser.add_argument("--seed", type=int, help="master random seed (default 0)")
    parser.add_argument("--split-ratios", dest="split_ratios",
                        help="train,dev,test ratios (default 0.8,0.1,0.1)")
    parser.add_argument("--cap", type=int, help="also export capped mention counts")
    parser.add_argument("--min-overlap", dest="min_overlap", type=int,
                        help="coverage threshold in verses (default 500)")
    parser.add_argument("--allow-low-overlap", action="store_true",
                        help="proceed even when coverage is below the threshold")
    parser.add_argument("--tasks", help="comma-separated task subset (default all five)")
    parser.add_argument("--translation-id", dest="translation_id",
                        help="identifier recorded in provenance (default: TSV stem)")


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", "utf-8")
    print(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="verseproj",
        description="Project source-corpus annotations onto a Bible translation "
                    "and build task datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_generate = sub.add_parser("generate", help="run the pipeline and export datasets")
    _add_pipeline_options(p_generate, with_out=True)

    p_stats = sub.add_parser("stats", help="report alignment/label statistics only")
    _add_pipeline_options(p_stats, with_out=False)
    p_stats.add_argument("--out", help="also write the report to this file")

    p_baseline = sub.add_parser("baseline", help="majority-class baseline accuracy")
    p_baseline.add_argument("--train", help="train split JSONL")
    p_baseline.add_argument("--test", help="test split JSONL")
    p_baseline.add_argument("--data-dir", dest="data_dir",
                            help="dataset directory (with --task)")
    p_baseline.add_argument("--task", help="task name when using --data-dir")
    p_baseline.add_argument("--out", help="also write the result to this file")

    p_compare = sub.add_parser("compare-ud",
                               help="agreement between projected and "
                                    "dependency-derived labels")
    p_compare.add_argument("--task", required=True, choices=["nmc", "pns"])
    p_compare.add_argument("--primary", nargs="+", required=True,
                           help="projected label files (.jsonl or .tsv)")
    p_compare.add_argument("--ud", nargs="+", required=True,
                           help="dependency-derived label files (.jsonl or .tsv)")
    p_compare.add_argument("--seed", type=int, default=0)
    p_compare.add_argument("--cap", type=int,
                           help="cap applied to the projected labels")
    p_compare.add_argument("--out", help="also write the report to this file")

    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            stats = run_generate(_build_run_config(args))
            print(json.dumps(stats, indent=2, sort_keys=True))
        elif args.command == "stats":
            _emit(run_stats(_build_run_config(args)), args.out)
        elif args.command == "baseline":
            if args.data_dir and args.task:
                train = Path(args.data_dir) / f"{args.task}.train.jsonl"
                test = Path(args.data_dir) / f"{args.task}.test.jsonl"
            elif args.train and args.test:
                train, test = Path(args.train), Path(args.test)
            else:
                parser.error("baseline needs --train/--test or --data-dir/--task")
            _emit(run_baseline(train, test), args.out)
        elif args.command == "compare-ud":
            report = run_compare(args.primary, args.ud, Task(args.task),
                                 args.seed, cap=args.cap)
            _emit(report, args.out)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
