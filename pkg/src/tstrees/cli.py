"""Command-line interface: train, predict, evaluate, compare, bench.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path
from typing import Optional, Sequence

from .baselines import DISTANCE_METRICS, FeatureMask, feature_table, nn_classify
from .core import (
    Comparator,
    ConfusionMatrix,
    DataFormatError,
    FULL_HS,
    IntervalRelation,
    LearnerConfig,
    TemporalDataset,
    WitnessPolicy,
)
from .dataio import (
    DatasetSource,
    load_dataset,
    resample_split,
    trim,
)
from .evaluation import (
    accuracy,
    class_report,
    compare_report,
    grid_report,
    metrics_lines,
    percent,
)
from .induction import classify, confusion, grow_static_tree, grow_tree, static_series_dataset
from .model import ModelBundle, load_model, save_model
from .rendering import extract_class_theory, render_tree

DEFAULT_TRIM = 150


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def _parse_alpha_spec(specs: Sequence[str]) -> tuple[float, ...]:
    values: list[float] = []
    for spec in specs:
        for chunk in spec.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" in chunk:
                parts = chunk.split(":")
                if len(parts) != 3:
                    raise UsageError(f"alpha range must be a:b:step, got {chunk!r}")
                lo, hi, step = (float(p) for p in parts)
                if step <= 0:
                    raise UsageError("alpha range step must be positive")
                k = 0
                while True:
                    v = round(lo + k * step, 10)
                    if v > hi + step / 2:
                        break
                    values.append(v)
                    k += 1
            else:
                values.append(float(chunk))
    if not values:
        raise UsageError("no alpha values given")
    return tuple(values)


_RELATION_TOKENS = {r.name.lower(): r for r in IntervalRelation}
_RELATION_TOKENS.update({r.value.lower(): r for r in IntervalRelation})
_RELATION_TOKENS["eq"] = IntervalRelation.EQ

_COMPARATOR_TOKENS = {
    "<=": Comparator.LE,
    "le": Comparator.LE,
    "=": Comparator.EQ,
    "eq": Comparator.EQ,
    ">": Comparator.GT,
    "gt": Comparator.GT,
}


def _parse_relations(spec: str) -> tuple[IntervalRelation, ...]:
    if spec.strip().lower() == "full-hs":
        return FULL_HS
    out = []
    for token in spec.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token not in _RELATION_TOKENS:
            raise UsageError(f"unknown relation {token!r}")
        rel = _RELATION_TOKENS[token]
        if rel not in out:
            out.append(rel)
    if not out:
        raise UsageError("no relations given")
    return tuple(sorted(out, key=lambda r: r.rank))


def _parse_comparators(spec: str) -> tuple[Comparator, ...]:
    out = []
    for token in spec.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token not in _COMPARATOR_TOKENS:
            raise UsageError(f"unknown comparator {token!r}")
        cmp = _COMPARATOR_TOKENS[token]
        if cmp not in out:
            out.append(cmp)
    if not out:
        raise UsageError("no comparators given")
    return tuple(sorted(out, key=lambda c: c.rank))


def _detect_format(path: Path, declared: str) -> str:
    if declared != "auto":
        return {"semicolon": "semicolon_table", "uea": "uea_sequence"}[declared]
    return "uea_sequence" if path.suffix.lower() == ".ts" else "semicolon_table"


def _load(path_text: str, fmt: str, class_column) -> TemporalDataset:
    path = Path(path_text)
    if not path.exists():
        raise DataFormatError(f"no such file: {path}")
    column = class_column
    if isinstance(column, str) and column.isdigit():
        column = int(column)
    try:
        return load_dataset(DatasetSource(_detect_format(path, fmt), path, column))
    except DataFormatError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def _config_from_args(args) -> LearnerConfig:
    return LearnerConfig(
        alpha_grid=_parse_alpha_spec(args.alpha) if args.alpha else (1.0,),
        max_derivative=args.max_z,
        relations=_parse_relations(args.relations),
        comparators=_parse_comparators(args.comparators),
        min_leaf_size=args.min_leaf,
        purity_threshold=args.purity,
        witness_policy=WitnessPolicy(args.witness_policy),
        seed=args.seed,
    )


def _default_alpha(config: LearnerConfig) -> float:
    return config.alpha_grid[0] if len(config.alpha_grid) == 1 else 1.0


def _remap_to_model(dataset: TemporalDataset, bundle: ModelBundle) -> TemporalDataset:
    if dataset.attribute_count != len(bundle.attribute_names):
        raise DataFormatError(
            f"data has {dataset.attribute_count} channels but the model expects "
            f"{len(bundle.attribute_names)}"
        )
    index = {name: i for i, name in enumerate(bundle.class_names)}
    unknown = [c for c in dataset.class_names if c not in index]
    if unknown:
        raise DataFormatError(f"data contains classes unknown to the model: {unknown}")
    instances = [
        inst.with_reference(inst.reference)
        for inst in dataset.instances
    ]
    for inst in instances:
        inst.class_index = index[dataset.class_names[inst.class_index]]
    return TemporalDataset(
        instances=instances,
        attribute_names=list(bundle.attribute_names),
        class_names=list(bundle.class_names),
        series_length=dataset.series_length,
    )


def _cmd_train(args) -> int:
    dataset = _load(args.data, args.format, args.class_column)
    config = _config_from_args(args)
    tree = grow_tree(dataset, config)
    sys.stdout.write(
        render_tree(
            tree,
            dataset.attribute_names,
            dataset.class_names,
            default_alpha=_default_alpha(config),
        )
    )
    if args.out:
        bundle = ModelBundle(
            tree=tree,
            attribute_names=list(dataset.attribute_names),
            class_names=list(dataset.class_names),
            series_length=dataset.series_length,
            config=config,
        )
        save_model(args.out, bundle)
    if args.theory_class is not None:
        if args.theory_class not in dataset.class_names:
            raise DataFormatError(f"unknown class {args.theory_class!r}")
        for formula in extract_class_theory(
            tree,
            dataset.class_names.index(args.theory_class),
            dataset.attribute_names,
            default_alpha=_default_alpha(config),
        ):
            sys.stdout.write(formula + "\n")
    return 0


def _cmd_predict(args) -> int:
    bundle = load_model(args.model)
    dataset = _load(args.data, args.format, args.class_column)
    if dataset.attribute_count != len(bundle.attribute_names):
        raise DataFormatError(
            f"data has {dataset.attribute_count} channels but the model expects "
            f"{len(bundle.attribute_names)}"
        )
    for inst in dataset.instances:
        cls, _ = classify(bundle.tree, inst, bundle.config.witness_policy)
        sys.stdout.write(bundle.class_names[cls] + "\n")
    return 0


def _cmd_evaluate(args) -> int:
    bundle = load_model(args.model)
    dataset = _remap_to_model(_load(args.data, args.format, args.class_column), bundle)
    matrix = confusion(bundle.tree, dataset, bundle.config.witness_policy)
    acc = accuracy(matrix)
    scores = []
    for inst in dataset.instances:
        _, counts = classify(bundle.tree, inst, bundle.config.witness_policy)
        total = sum(counts)
        scores.append(
            (inst.class_index, [c / total if total else 0.0 for c in counts])
        )
    report = class_report(matrix, scores)

    out = sys.stdout
    out.write(f"accuracy: {percent(acc)}\n")
    out.write("confusion matrix (rows = predicted, columns = true):\n")
    width = max(len(name) for name in dataset.class_names)
    width = max(width, 6)
    out.write(" " * (width + 2) + "".join(n.rjust(width + 2) for n in dataset.class_names) + "\n")
    for i, name in enumerate(dataset.class_names):
        out.write(
            name.rjust(width + 2)
            + "".join(str(v).rjust(width + 2) for v in matrix.counts[i])
            + "\n"
        )
    out.write("per-class metrics:\n")
    header = ["tp_rate", "fp_rate", "precision", "recall", "f_measure", "mcc", "roc_area", "prc_area"]
    out.write("  ".join(h.rjust(9) for h in header) + "  class\n")
    for c, name in enumerate(dataset.class_names):
        row = report[c]
        vals = [row.tp_rate, row.fp_rate, row.precision, row.recall, row.f_measure, row.mcc, row.roc_area, row.prc_area]
        out.write("  ".join(f"{v:9.3f}" for v in vals) + f"  {name}\n")

    if args.report:
        label = Path(args.data).stem
        records = [(label, "model", "accuracy", acc)]
        for c, name in enumerate(dataset.class_names):
            row = report[c]
            for metric in header:
                records.append((label, "model", f"{metric}[{name}]", getattr(row, metric)))
        Path(args.report).write_text(metrics_lines(records), encoding="utf-8")
    return 0


def _tj48_config(alpha_grid: tuple[float, ...], seed: int) -> LearnerConfig:
    return LearnerConfig(alpha_grid=alpha_grid, relations=FULL_HS, max_derivative=0, seed=seed)


def run_method(
    method: str, train: TemporalDataset, test: TemporalDataset, seed: int
) -> float:
    """Train one comparison method and return its test accuracy."""
    if method.startswith("tj48"):
        _, _, spec = method.partition(":")
        grid = _parse_alpha_spec([spec]) if spec else (1.0,)
        tree = grow_tree(train, _tj48_config(grid, seed))
        return accuracy(confusion(tree, test))
    if method in DISTANCE_METRICS:
        q = train.class_count
        rows = [[0] * q for _ in range(q)]
        for inst in test.instances:
            pred = nn_classify(train, inst, method)
            rows[pred][inst.class_index] += 1
        return accuracy(ConfusionMatrix.from_rows(rows))
    if method.startswith("j48"):
        _, _, bits = method.partition(":")
        mask = FeatureMask.from_bits(bits) if bits else FeatureMask(True, True, True, True)
        table, names = feature_table(train, mask)
        labels = [inst.class_index for inst in train.instances]
        tree = grow_static_tree(table, labels, LearnerConfig(seed=seed))
        test_table, _ = feature_table(test, mask)
        test_labels = [inst.class_index for inst in test.instances]
        encoded = static_series_dataset(
            test_table, test_labels, attribute_names=names, class_names=train.class_names
        )
        return accuracy(confusion(tree, encoded))
    raise UsageError(f"unknown method {method!r}")


def _parse_methods(spec: str) -> list[str]:
    methods = [token.strip() for token in spec.split(",") if token.strip()]
    if not methods:
        raise UsageError("no methods given")
    return methods


def _prepare_split(dataset, args):
    trimmed = trim(dataset, args.max_len) if args.max_len else dataset
    return resample_split(trimmed, args.train_fraction, args.seed)


def _cmd_compare(args) -> int:
    dataset = _load(args.data, args.format, args.class_column)
    train, test = _prepare_split(dataset, args)
    methods = _parse_methods(args.methods)
    rows = [(m, run_method(m, train, test, args.seed)) for m in methods]
    sys.stdout.write(compare_report(rows, title=Path(args.data).stem))
    if args.report:
        label = Path(args.data).stem
        Path(args.report).write_text(
            metrics_lines([(label, m, "accuracy", a) for m, a in rows]),
            encoding="utf-8",
        )
    return 0


def _discover_datasets(data_dir: Path) -> list[tuple[str, list[Path]]]:
    """Dataset name -> file list.  ``X_TRAIN.ts``/``X_TEST.ts`` pairs merge
    into one dataset named ``X``; other data files stand alone."""
    found: dict[str, list[Path]] = {}
    for path in sorted(data_dir.iterdir()):
        if not path.is_file():
            continue
        if path.suffix.lower() not in (".ts", ".csv"):
            continue
        stem = path.stem
        if stem.endswith("_TRAIN") or stem.endswith("_TEST"):
            found.setdefault(stem.rsplit("_", 1)[0], []).append(path)
        else:
            found.setdefault(stem, []).append(path)
    return sorted(found.items())


def _load_merged(paths: list[Path], fmt: str, class_column) -> TemporalDataset:
    parts = [_load(str(p), fmt, class_column) for p in sorted(paths)]
    base = parts[0]
    if len(parts) == 1:
        return base
    merged = list(base.instances)
    label_index = {name: i for i, name in enumerate(base.class_names)}
    class_names = list(base.class_names)
    for part in parts[1:]:
        if part.attribute_count != base.attribute_count:
            raise DataFormatError("cannot merge files with different channel counts")
        if part.series_length != base.series_length:
            raise DataFormatError("cannot merge files with different series lengths")
        for inst in part.instances:
            name = part.class_names[inst.class_index]
            if name not in label_index:
                label_index[name] = len(class_names)
                class_names.append(name)
            copy = inst.with_reference(inst.reference)
            copy.class_index = label_index[name]
            merged.append(copy)
    return TemporalDataset(
        instances=merged,
        attribute_names=list(base.attribute_names),
        class_names=class_names,
        series_length=base.series_length,
    )


def _cmd_bench(args) -> int:
    data_dir = Path(args.data_dir)
    if not data_dir.is_dir():
        raise DataFormatError(f"no such directory: {data_dir}")
    datasets = _discover_datasets(data_dir)
    if not datasets:
        raise DataFormatError(f"no data files found under {data_dir}")
    methods = _parse_methods(args.methods)
    cells: dict[tuple[str, str], float] = {}
    records = []
    for name, paths in datasets:
        dataset = _load_merged(paths, args.format, args.class_column)
        train, test = _prepare_split(dataset, args)
        for method in methods:
            acc = run_method(method, train, test, args.seed)
            cells[(method, name)] = acc
            records.append((name, method, "accuracy", acc))
    sys.stdout.write(grid_report(methods, [name for name, _ in datasets], cells))
    if args.report:
        Path(args.report).write_text(metrics_lines(records), encoding="utf-8")
    return 0


def _add_data_options(sub, with_class_column=True):
    sub.add_argument("--data", required=True, help="path to the data file")
    sub.add_argument(
        "--format",
        choices=("auto", "semicolon", "uea"),
        default="auto",
        help="input format; auto picks by extension (.ts means uea)",
    )
    if with_class_column:
        sub.add_argument(
            "--class-column",
            default=None,
            help="class column name or index for the semicolon format",
        )


def _add_split_options(sub):
    sub.add_argument("--train-fraction", type=float, default=0.8)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument(
        "--max-len",
        type=int,
        default=DEFAULT_TRIM,
        help="trim series to this many points before splitting (0 disables)",
    )
    sub.add_argument(
        "--methods",
        default="j48:1100,ed-i,dtw-i,dtw-d,tj48:0.5,tj48:0.6,tj48:0.7,tj48:0.8,tj48:0.9",
        help="comma list: tj48[:alpha], ed-i, dtw-i, dtw-d, j48[:mask]",
    )
    sub.add_argument("--report", default=None, help="write a metric-per-line report file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tstrees", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_train = subs.add_parser("train", help="learn a tree and print it")
    _add_data_options(p_train)
    p_train.add_argument("--alpha", action="append", default=None,
                         help="alpha value, comma list, or a:b:step range; repeatable")
    p_train.add_argument("--max-z", type=int, default=0, help="maximum derivative degree")
    p_train.add_argument("--relations", default="full-hs",
                         help='comma list of relations or "full-hs"')
    p_train.add_argument("--comparators", default="<=,>", help="comma list of <=, =, >")
    p_train.add_argument("--min-leaf", type=int, default=2)
    p_train.add_argument("--purity", type=float, default=0.0,
                         help="entropy at or below which a node becomes a leaf")
    p_train.add_argument("--witness-policy",
                         choices=[p.value for p in WitnessPolicy],
                         default=WitnessPolicy.LEFTMOST_SHORTEST.value)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", default=None, help="write the model file here")
    p_train.add_argument("--theory-class", default=None,
                         help="also print the extracted formulas for this class")
    p_train.set_defaults(func=_cmd_train)

    p_predict = subs.add_parser("predict", help="print one class name per instance")
    p_predict.add_argument("--model", required=True)
    _add_data_options(p_predict)
    p_predict.set_defaults(func=_cmd_predict)

    p_eval = subs.add_parser("evaluate", help="accuracy, confusion matrix, per-class metrics")
    p_eval.add_argument("--model", required=True)
    _add_data_options(p_eval)
    p_eval.add_argument("--report", default=None, help="write a metric-per-line report file")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_cmp = subs.add_parser("compare", help="resample one dataset and race the methods")
    _add_data_options(p_cmp)
    _add_split_options(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_bench = subs.add_parser("bench", help="run the comparison over a directory of datasets")
    p_bench.add_argument("--data-dir", required=True)
    p_bench.add_argument(
        "--format",
        choices=("auto", "semicolon", "uea"),
        default="auto",
    )
    p_bench.add_argument("--class-column", default=None)
    _add_split_options(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
