"""Command-line surface: reproducible batch runs of search, rate, and evaluate.

Every run builds a manifest (input checksums, config echo, tool version, RNG
seed). JSON outputs embed it; TSV outputs get a `<name>.manifest.json` sidecar
so the provenance of any file can be traced.

Exit codes are a stable scripting contract: 0 success, 1 usage error,
2 data error, 3 infeasible configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from cadict import __version__
from cadict.embeddings import load_vectors, open_store, save_cache
from cadict.errors import DataError, InfeasibleError
from cadict.lexicon import load_frequencies, load_ratings
from cadict.metrics import evaluate_ratings
from cadict.rater import build_dictionary, load_core, save_core
from cadict.search import EvaluationScope, SearchConfig, search_grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INFEASIBLE = 3

CACHE_DIR_ENV = "CADICT_CACHE_DIR"


@dataclass(frozen=True)
class RunManifest:
    """Provenance block written into every output."""

    command: str
    tool_version: str
    rng_seed: int | None
    inputs: dict[str, dict[str, str]]
    config: dict

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "tool_version": self.tool_version,
            "rng_seed": self.rng_seed,
            "inputs": self.inputs,
            "config": self.config,
        }


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _manifest(command: str, rng_seed: int | None, inputs: dict[str, str | Path],
              config: dict) -> RunManifest:
    return RunManifest(
        command=command,
        tool_version=__version__,
        rng_seed=rng_seed,
        inputs={name: {"path": str(p), "sha256": _sha256(p)} for name, p in inputs.items()},
        config=config,
    )


def _write_json(path: str | Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _write_sidecar(out_path: str | Path, manifest: RunManifest) -> None:
    _write_json(str(out_path) + ".manifest.json", manifest.to_dict())


def _parse_x_values(text: str) -> tuple[int, ...]:
    """`start:stop:step` (inclusive stop), a comma list, or a single integer."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError("range syntax is start:stop:step")
            start, stop, step = (int(p) for p in parts)
            if start < 1 or step < 1 or stop < start:
                raise ValueError("need 1 <= start <= stop and step >= 1")
            return tuple(range(start, stop + 1, step))
        if "," in text:
            values = tuple(int(p) for p in text.split(","))
        else:
            values = (int(text),)
        if any(v < 1 for v in values):
            raise ValueError("x values must be positive")
        return values
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad x specification {text!r}: {exc}") from exc


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _unsigned_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _read_word_list(path: str | Path, fold_case: bool) -> list[str]:
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            token = line.strip()
            if token:
                words.append(token.lower() if fold_case else token)
    return words


def _load_predictions(path: str | Path, fold_case: bool) -> dict[str, float]:
    """Read predicted ratings from a 2-column ratings TSV or the 4-column
    dictionary TSV. Dictionary files contribute the raw-ratio column: it keeps
    full rank fidelity, while the scaled column is quantized to 3 decimals
    (and the correlations are affine-invariant, so the choice costs nothing)."""
    path = Path(path)
    preds: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for rowno, line in enumerate(fh):
            if not line.strip():
                continue
            fields = line.rstrip("\n").rstrip("\r").split("\t")
            if len(fields) < 2:
                raise DataError(f"{path}: line {rowno + 1}: need at least 2 tab-separated columns")
            value_field = fields[1]
            try:
                value = float(value_field)
            except ValueError:
                if rowno == 0:
                    continue  # header
                raise DataError(f"{path}: line {rowno + 1}: unparseable rating {value_field!r}")
            token = fields[0].strip()
            if fold_case:
                token = token.lower()
            if token and token not in preds:
                preds[token] = value
    if not preds:
        raise DataError(f"{path}: no predictions found")
    return preds


def _cmd_search(args) -> int:
    ratings = load_ratings(args.ratings, fold_case=args.fold_case)
    freq = load_frequencies(args.freq, fold_case=args.fold_case)
    # only rated words can enter the base dictionary or the evaluation,
    # so the store never needs more than the lexicon's vocabulary
    store = open_store(args.vectors, vocab_filter=set(ratings.tokens),
                       fold_case=args.fold_case)
    cfg = SearchConfig(
        x_values=args.x,
        y_start=args.y_start,
        y_step=args.y_step,
        z_min=args.z_min,
        z_step=args.z_step,
        samples_per_cell=args.samples,
        rng_seed=args.seed,
        evaluation_scope=EvaluationScope(args.scope),
    )
    report = search_grid(ratings, freq, store, cfg, workers=args.threads)
    if not report.cells:
        reasons = "; ".join(s.reason for s in report.skipped[:3])
        raise InfeasibleError(f"zero feasible cells ({reasons})")

    manifest = _manifest(
        "search", cfg.rng_seed,
        {"ratings": args.ratings, "freq": args.freq, "vectors": args.vectors},
        cfg.to_dict(),
    )
    doc = report.to_dict()
    doc["manifest"] = manifest.to_dict()
    _write_json(args.out_report, doc)

    best = report.best_overall
    save_core(best.best_core, args.out_core, provenance={
        "x": best.x,
        "y": best.y,
        "z": best.z,
        "best_r_s": best.best_r_s,
        "config": cfg.to_dict(),
        "rng_seed": cfg.rng_seed,
        "manifest": manifest.to_dict(),
    })
    if args.out_landscape:
        with open(args.out_landscape, "w", encoding="utf-8") as fh:
            fh.write("x\ty\tz\tbest_r_s\n")
            for x, y, z, r in report.landscape_rows():
                fh.write(f"{x}\t{y}\t{z}\t{r!r}\n")
        _write_sidecar(args.out_landscape, manifest)

    print(f"cells evaluated: {len(report.cells)} (skipped: {len(report.skipped)})")
    print(f"best r_s = {best.best_r_s:.4f} at X={best.x} Y={best.y} Z={best.z}")
    print(f"wrote {args.out_report} and {args.out_core}")
    return EXIT_OK


def _cmd_rate(args) -> int:
    core, _provenance = load_core(args.core)
    words = _read_word_list(args.words, args.fold_case) if args.words else None
    vocab_filter = None
    if words is not None:
        vocab_filter = set(words) | set(core.seed_abstract) | set(core.seed_concrete)
    store = open_store(args.vectors, vocab_filter=vocab_filter, fold_case=args.fold_case)
    summary = build_dictionary(core, words, store, args.out)

    manifest = _manifest(
        "rate", None,
        {"core": args.core, "vectors": args.vectors,
         **({"words": args.words} if args.words else {})},
        {"fold_case": args.fold_case},
    )
    _write_sidecar(args.out, manifest)
    skip_path = str(args.out) + ".skipped.txt"
    with open(skip_path, "w", encoding="utf-8") as fh:
        for token in summary.skipped_tokens:
            fh.write(token + "\n")

    print(f"rated {summary.rated} word(s) -> {args.out}")
    print(f"skipped {summary.skipped} out-of-vocabulary word(s) -> {skip_path}")
    print(f"floored denominators: {summary.floored}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    gold = load_ratings(args.gold, fold_case=args.fold_case)
    preds = _load_predictions(args.pred, fold_case=args.fold_case)
    joined = [t for t in preds if t in gold]
    if len(joined) < 2:
        detail = "empty join" if not joined else f"join of only {len(joined)} token(s)"
        raise DataError(f"prediction/gold {detail}; need at least 2 shared tokens")
    report = evaluate_ratings(
        [preds[t] for t in joined],
        [gold.rating(t) for t in joined],
        threshold_gold=args.threshold_gold,
        threshold_pred=args.threshold_pred,
    )
    manifest = _manifest("evaluate", None,
                         {"pred": args.pred, "gold": args.gold},
                         {"threshold_gold": args.threshold_gold,
                          "threshold_pred": args.threshold_pred,
                          "fold_case": args.fold_case})
    doc = {"format_version": 1, "kind": "evaluation_report", **report.to_dict(),
           "manifest": manifest.to_dict()}
    if args.out:
        _write_json(args.out, doc)
        print(f"wrote {args.out}")
    print(f"n = {report.n}")
    print(f"r_s = {report.r_s:.6f}")
    print(f"rho = {report.rho:.6f}")
    print(f"accuracy = {report.accuracy:.6f} "
          f"(gold >= {report.threshold_gold}, pred >= {report.threshold_pred})")
    return EXIT_OK


def _cmd_cache_vectors(args) -> int:
    store = load_vectors(args.vectors, fold_case=args.fold_case)
    if args.out:
        out = Path(args.out)
    else:
        cache_dir = Path(os.environ.get(CACHE_DIR_ENV, "."))
        cache_dir.mkdir(parents=True, exist_ok=True)
        out = cache_dir / (Path(args.vectors).stem + ".cavs")
    save_cache(store, out)
    manifest = _manifest("cache-vectors", None, {"vectors": args.vectors},
                         {"fold_case": args.fold_case})
    _write_sidecar(out, manifest)
    report = store.load_report
    print(f"cached {len(store)} vector(s) of dimension {store.dimension} -> {out}")
    if report.zero_norm_skipped or report.duplicates_ignored:
        print(f"skipped {report.zero_norm_skipped} zero-norm record(s), "
              f"ignored {report.duplicates_ignored} duplicate(s)")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; our contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_fold_flag(parser) -> None:
    parser.add_argument("--fold-case", action=argparse.BooleanOptionalAction, default=True,
                        help="lowercase all tokens at load (default: on)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cadict",
                     description="Build and evaluate concreteness/abstractness dictionaries "
                                 "from word embeddings and a small expert-rated seed.")
    parser.add_argument("--version", action="version", version=f"cadict {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[], help="sweep (X, Y, Z) for the best core")
    p.add_argument("--ratings", required=True, help="expert ratings TSV (token TAB rating)")
    p.add_argument("--freq", required=True, help="frequency TSV (token TAB count)")
    p.add_argument("--vectors", required=True, help="word-vectors text file or binary cache")
    p.add_argument("--x", type=_parse_x_values, default=(500, 1000, 1500, 2000, 2500),
                   help="base sizes: start:stop:step, comma list, or one integer "
                        "(default 500:2500:500)")
    p.add_argument("--y-start", type=_positive_int, default=50)
    p.add_argument("--y-step", type=_positive_int, default=50)
    p.add_argument("--z-min", type=_positive_int, default=10)
    p.add_argument("--z-step", type=_positive_int, default=20)
    p.add_argument("--samples", type=_positive_int, default=100,
                   help="random cores per grid cell (default 100)")
    p.add_argument("--seed", type=_unsigned_int, default=0, help="RNG seed (default 0)")
    p.add_argument("--scope", choices=[e.value for e in EvaluationScope],
                   default=EvaluationScope.BASE_DICTIONARY.value,
                   help="what the search objective is computed on")
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="parallel cell workers; never changes results")
    p.add_argument("--out-report", default="report.json")
    p.add_argument("--out-core", default="core.json")
    p.add_argument("--out-landscape", default=None,
                   help="optional TSV of (x, y, z, best_r_s) rows")
    _add_fold_flag(p)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("rate", help="build a rating dictionary with a saved core")
    p.add_argument("--core", required=True, help="core JSON file")
    p.add_argument("--vectors", required=True)
    p.add_argument("--words", default=None,
                   help="words to rate, one per line (default: whole vector store)")
    p.add_argument("--out", default="dictionary.tsv")
    _add_fold_flag(p)
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("evaluate", help="score predicted ratings against gold ratings")
    p.add_argument("--pred", required=True,
                   help="predictions: dictionary TSV or token TAB rating TSV")
    p.add_argument("--gold", required=True, help="gold ratings TSV")
    p.add_argument("--threshold-gold", type=float, default=3.0)
    p.add_argument("--threshold-pred", type=float, default=None,
                   help="default: median of the evaluated predictions")
    p.add_argument("--out", default=None, help="optional JSON report path")
    _add_fold_flag(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("cache-vectors", help="precompile a text vector file to a binary cache")
    p.add_argument("--vectors", required=True, help="word-vectors text file")
    p.add_argument("--out", default=None,
                   help=f"cache path (default: ${CACHE_DIR_ENV} or ./<stem>.cavs)")
    _add_fold_flag(p)
    p.set_defaults(func=_cmd_cache_vectors)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
