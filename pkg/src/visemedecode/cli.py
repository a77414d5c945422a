"""Command-line surface: build artifacts, convert, segment, decode, evaluate.

Commands: ``build``, ``to-visemes``, ``chunk``, ``decode``, ``eval`` and
``scorer train``.  Option resolution order is: command-line flag, then
config file (``--config`` or the file named by ``VISEME_DECODE_CONFIG``),
then a ``VISEME_DECODE_<OPTION>`` environment variable, then the built-in
default.  ``--print-config`` dumps the resolved configuration and exits.

Exit codes: 0 success, 1 partial success (some input rows failed), 2
configuration or parse failure.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from importlib import resources

from . import metrics
from .chunker import find_possible_chunks
from .decoder import decode_scenario1, decode_scenario2
from .errors import ScorerError, VisemeDecodeError
from .external import ExternalScorer
from .lexicon import (
    InverseIndex,
    build_inverse_index,
    load_frequency_ranks,
    normalize_sentence,
    parse_pronouncing_dict,
    sentence_to_visemes,
    source_checksums,
)
from .scorer import NgramModel, NgramScorer
from .visemes import BUILTIN_MAPS, DEFAULT_MAP, load_viseme_map

CONFIG_ENV = "VISEME_DECODE_CONFIG"
ENV_PREFIX = "VISEME_DECODE_"

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2


def data_path(name: str) -> str:
    return str(resources.files(__package__) / "data" / name)


@dataclass
class RunConfig:
    dictionary: str | None = None
    ranks: str | None = None
    viseme_map: str = DEFAULT_MAP.name
    artifact: str | None = None
    scenario: int = 1
    beam: int = 50
    scorer: str = "ngram"
    model: str | None = None
    external_cmd: str | None = None
    corpus: str | None = None
    order: int = 3
    k: float = 0.01
    max_segmentations: int = 10_000
    max_sequence_length: int = 128
    jobs: int = 1
    format: str = "table"
    eager_single_word: bool = False

    def validate(self) -> None:
        if self.scenario not in (1, 2):
            raise VisemeDecodeError(f"scenario must be 1 or 2, got {self.scenario}")
        if self.beam < 1:
            raise VisemeDecodeError(f"beam width must be >= 1, got {self.beam}")
        if self.scorer not in ("ngram", "external"):
            raise VisemeDecodeError(f"scorer must be 'ngram' or 'external', got {self.scorer!r}")
        if self.scorer == "external" and not self.external_cmd:
            raise VisemeDecodeError("--scorer external requires --external-cmd")
        if self.format not in ("table", "records"):
            raise VisemeDecodeError(f"format must be 'table' or 'records', got {self.format!r}")
        for name in ("dictionary", "ranks", "artifact", "model", "corpus"):
            path = getattr(self, name)
            if path is not None and not os.path.exists(path):
                raise VisemeDecodeError(f"{name} file does not exist: {path}")


def _coerce(value: str, target_type):
    if target_type is bool:
        return value.lower() in ("1", "true", "yes", "on")
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    return value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags, config file, environment variables and defaults."""
    cfg = RunConfig()
    field_types = {f.name: type(getattr(cfg, f.name, "")) for f in fields(RunConfig)}

    for f in fields(RunConfig):
        env_value = os.environ.get(ENV_PREFIX + f.name.upper())
        if env_value is not None:
            setattr(cfg, f.name, _coerce(env_value, field_types[f.name]))

    config_path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise VisemeDecodeError(f"cannot read config file {config_path}: {exc}") from exc
        for key, value in file_cfg.items():
            if key not in field_types:
                raise VisemeDecodeError(f"unknown config key {key!r} in {config_path}")
            setattr(cfg, key, value)

    for f in fields(RunConfig):
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            setattr(cfg, f.name, flag_value)

    return cfg


def _load_map(cfg: RunConfig):
    if cfg.viseme_map in BUILTIN_MAPS:
        return BUILTIN_MAPS[cfg.viseme_map]
    with open(cfg.viseme_map, encoding="utf-8") as fh:
        return load_viseme_map(fh.read(), name=os.path.basename(cfg.viseme_map))


def build_index(cfg: RunConfig) -> InverseIndex:
    """Parse the dictionary and ranking files and build the inverse index."""
    dict_path = cfg.dictionary or data_path("cmudict.dict")
    with open(dict_path, encoding="latin-1") as fh:
        dict_text = fh.read()
    lexicon = parse_pronouncing_dict(dict_text)
    ranks_text = None
    ranks_path = cfg.ranks if cfg.ranks is not None else data_path("word_ranks.tsv")
    if os.path.exists(ranks_path):
        with open(ranks_path, encoding="utf-8") as fh:
            ranks_text = fh.read()
        load_frequency_ranks(ranks_text, lexicon)
    viseme_map = _load_map(cfg)
    checksums = source_checksums(dict_text, ranks_text, cfg.viseme_map)
    return build_inverse_index(lexicon, viseme_map, checksums=checksums)


def load_runtime(cfg: RunConfig) -> InverseIndex:
    if cfg.artifact and os.path.exists(cfg.artifact):
        return InverseIndex.load(cfg.artifact)
    return build_index(cfg)


def make_scorer(cfg: RunConfig):
    if cfg.scorer == "external":
        return ExternalScorer(shlex.split(cfg.external_cmd))
    if cfg.model:
        return NgramScorer(NgramModel.load(cfg.model))
    corpus_path = cfg.corpus or data_path("corpus_small.txt")
    with open(corpus_path, encoding="utf-8") as fh:
        text = fh.read()
    with open(data_path("ouluvs_phrases.txt"), encoding="utf-8") as fh:
        phrases = fh.read()
    return NgramScorer(NgramModel.train(text + "\n" + phrases, order=cfg.order, k=cfg.k))


def _read_lines(path: str | None):
    if path in (None, "-"):
        return sys.stdin.read().splitlines()
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _emit(line: str) -> None:
    sys.stdout.write(line + "\n")


# -- commands ---------------------------------------------------------------


def cmd_build(cfg: RunConfig, args) -> int:
    index = build_index(cfg)
    index.save(args.output)
    _emit(
        f"wrote {args.output}: {len(index.lexicon)} lexicon entries, "
        f"{len(index)} index keys, map={index.viseme_map.name}"
    )
    return EXIT_OK


def cmd_to_visemes(cfg: RunConfig, args) -> int:
    index = load_runtime(cfg)
    failures = 0
    for line_no, line in enumerate(_read_lines(args.input), start=1):
        if not line.strip():
            _emit("")
            continue
        try:
            if cfg.scenario == 1:
                clusters = sentence_to_visemes(line, index.lexicon, index.viseme_map, True)
                out = " | ".join(" ".join(c) for c in clusters)
            else:
                out = " ".join(
                    sentence_to_visemes(line, index.lexicon, index.viseme_map, False)
                )
        except VisemeDecodeError as exc:
            failures += 1
            if cfg.format == "records":
                _emit(json.dumps({"type": "error", "line": line_no, "error": str(exc)}))
            else:
                _emit(f"! {exc}")
            continue
        if cfg.format == "records":
            _emit(json.dumps({"type": "visemes", "line": line_no, "visemes": out}))
        else:
            _emit(out)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_chunk(cfg: RunConfig, args) -> int:
    index = load_runtime(cfg)
    failures = 0
    for line_no, line in enumerate(_read_lines(args.input), start=1):
        tokens = [t for t in line.split() if t != "|"]
        if not tokens:
            _emit("")
            continue
        try:
            segmentations = find_possible_chunks(
                tokens,
                index,
                max_segmentations=cfg.max_segmentations,
                max_sequence_length=cfg.max_sequence_length,
            )
        except VisemeDecodeError as exc:
            failures += 1
            if cfg.format == "records":
                _emit(json.dumps({"type": "error", "line": line_no, "error": str(exc)}))
            else:
                _emit(f"! {exc}")
            continue
        if cfg.format == "records":
            _emit(
                json.dumps(
                    {
                        "type": "segmentations",
                        "line": line_no,
                        "count": len(segmentations),
                        "segmentations": [
                            [" ".join(c) for c in seg] for seg in segmentations
                        ],
                    }
                )
            )
        else:
            for seg in segmentations:
                _emit(" | ".join(" ".join(c) for c in seg))
            _emit(f"# {len(segmentations)} segmentations")
    return EXIT_PARTIAL if failures else EXIT_OK


def _decode_line(line: str, cfg: RunConfig, index: InverseIndex, scorer):
    if cfg.scenario == 1:
        clusters = [
            tuple(part.split()) for part in line.split("|") if part.split()
        ]
        return decode_scenario1(clusters, index, scorer, index.lexicon, cfg.beam)
    stream = [t for t in line.split() if t != "|"]
    return decode_scenario2(
        stream,
        index,
        scorer,
        index.lexicon,
        beam_width=cfg.beam,
        max_segmentations=cfg.max_segmentations,
        max_sequence_length=cfg.max_sequence_length,
        eager_single_word=cfg.eager_single_word,
    )


def cmd_decode(cfg: RunConfig, args) -> int:
    index = load_runtime(cfg)
    scorer = make_scorer(cfg)
    failures = 0
    try:
        for line_no, line in enumerate(_read_lines(args.input), start=1):
            if not line.strip():
                _emit("")
                continue
            try:
                result = _decode_line(line, cfg, index, scorer)
            except ScorerError:
                raise  # transport failure aborts the run
            except VisemeDecodeError as exc:
                failures += 1
                if cfg.format == "records":
                    _emit(json.dumps({"type": "error", "line": line_no, "error": str(exc)}))
                else:
                    _emit(f"! {exc}")
                continue
            if cfg.format == "records":
                _emit(
                    json.dumps(
                        {
                            "type": "decode",
                            "line": line_no,
                            "sentence": result.text,
                            "perplexity": round(result.perplexity, 4),
                            "hypotheses_scored": result.stats.hypotheses_scored,
                        },
                        sort_keys=True,
                    )
                )
            else:
                _emit(f"{result.text}\t{result.perplexity:.4f}")
    finally:
        if isinstance(scorer, ExternalScorer):
            scorer.close()
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_eval(cfg: RunConfig, args) -> int:
    index = load_runtime(cfg)
    scorer = make_scorer(cfg)
    references = [line for line in _read_lines(args.corpus_file) if line.strip()]

    def evaluate(item):
        row_id, reference = item
        try:
            if cfg.scenario == 1:
                clusters = sentence_to_visemes(reference, index.lexicon, index.viseme_map, True)
                result = decode_scenario1(clusters, index, scorer, index.lexicon, cfg.beam)
            else:
                stream = sentence_to_visemes(reference, index.lexicon, index.viseme_map, False)
                result = decode_scenario2(
                    stream,
                    index,
                    scorer,
                    index.lexicon,
                    beam_width=cfg.beam,
                    max_segmentations=cfg.max_segmentations,
                    max_sequence_length=cfg.max_sequence_length,
                    eager_single_word=cfg.eager_single_word,
                )
        except ScorerError:
            raise
        except VisemeDecodeError as exc:
            return metrics.SentenceRow(
                id=str(row_id), reference=reference, hypothesis="",
                chars=metrics.EditCounts(), words=metrics.EditCounts(), error=str(exc),
            )
        ref_words = normalize_sentence(reference)
        return metrics.SentenceRow.evaluate(
            id=str(row_id),
            reference=reference,
            hypothesis=result.text,
            lexicon=index.lexicon,
            viseme_map=index.viseme_map,
            reference_perplexity=scorer.perplexity(ref_words) if ref_words else None,
            hypothesis_perplexity=result.perplexity,
        )

    items = list(enumerate(references, start=1))
    try:
        if cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                rows = list(pool.map(evaluate, items))
        else:
            rows = [evaluate(item) for item in items]
    finally:
        if isinstance(scorer, ExternalScorer):
            scorer.close()

    good = [r for r in rows if r.error is None]
    skipped = [r for r in rows if r.error is not None]
    if not good:
        sys.stderr.write("eval: every input row failed\n")
        return EXIT_PARTIAL
    report = metrics.aggregate(good, skipped)
    if cfg.format == "records":
        sys.stdout.write(report.to_records())
    else:
        sys.stdout.write(report.to_table())
    return EXIT_PARTIAL if skipped else EXIT_OK


def cmd_scorer_train(cfg: RunConfig, args) -> int:
    corpus_path = cfg.corpus or data_path("corpus_small.txt")
    with open(corpus_path, encoding="utf-8") as fh:
        model = NgramModel.train(fh.read(), order=cfg.order, k=cfg.k)
    model.save(args.output)
    _emit(
        f"wrote {args.output}: order={model.order} k={model.k} "
        f"vocab={len(model.vocab)} contexts={len(model.counts)}"
    )
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (or set $" + CONFIG_ENV + ")")
    parser.add_argument("--print-config", action="store_true", help="dump resolved config and exit")
    parser.add_argument("--dictionary", help="pronouncing dictionary file")
    parser.add_argument("--ranks", help="frequency ranking file (rank<TAB>WORD)")
    parser.add_argument(
        "--viseme-map", dest="viseme_map",
        help="builtin map name (%s) or an override file" % ", ".join(sorted(BUILTIN_MAPS)),
    )
    parser.add_argument("--artifact", help="serialized lexicon+index artifact")
    parser.add_argument("--scenario", type=int, choices=(1, 2), help="1=known boundaries, 2=unknown")
    parser.add_argument("--beam", type=int, help="beam width (default 50)")
    parser.add_argument("--scorer", choices=("ngram", "external"), help="perplexity backend")
    parser.add_argument("--model", help="trained n-gram model file")
    parser.add_argument("--external-cmd", dest="external_cmd", help="sidecar command line")
    parser.add_argument("--max-segmentations", dest="max_segmentations", type=int)
    parser.add_argument("--max-sequence-length", dest="max_sequence_length", type=int)
    parser.add_argument("--jobs", type=int, help="parallel corpus rows (output order preserved)")
    parser.add_argument("--format", choices=("table", "records"))
    parser.add_argument(
        "--eager-single-word", dest="eager_single_word", action="store_const", const=True,
        help="whole-stream cluster matches short-circuit scenario 2",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viseme-decode",
        description="Viseme-to-word decoding by lexicon-constrained segmentation "
        "and perplexity-minimizing beam search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and serialize the lexicon + inverse index")
    p.add_argument("--output", "-o", required=True, help="artifact file to write")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("to-visemes", help="convert text lines to viseme lines")
    p.add_argument("input", nargs="?", help="text file ('-' or absent: stdin)")
    _add_common(p)
    p.set_defaults(func=cmd_to_visemes)

    p = sub.add_parser("chunk", help="enumerate segmentations of viseme stream lines")
    p.add_argument("input", nargs="?", help="viseme stream file ('-' or absent: stdin)")
    _add_common(p)
    p.set_defaults(func=cmd_chunk)

    p = sub.add_parser("decode", help="decode viseme lines into sentences")
    p.add_argument("input", nargs="?", help="viseme lines ('-' or absent: stdin)")
    _add_common(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="decode a reference corpus and report metrics")
    p.add_argument("corpus_file", help="file of reference sentences, one per line")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p_scorer = sub.add_parser("scorer", help="scorer utilities")
    scorer_sub = p_scorer.add_subparsers(dest="scorer_command", required=True)
    p = scorer_sub.add_parser("train", help="train the built-in n-gram model")
    p.add_argument("--corpus", help="training corpus text file")
    p.add_argument("--order", type=int, help="model order (default 3)")
    p.add_argument("--k", type=float, help="add-k smoothing constant (default 0.01)")
    p.add_argument("--output", "-o", required=True, help="model file to write")
    _add_common(p)
    p.set_defaults(func=cmd_scorer_train)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if getattr(args, "print_config", False):
            _emit(json.dumps({f.name: getattr(cfg, f.name) for f in fields(RunConfig)}, indent=2, sort_keys=True))
            return EXIT_OK
        cfg.validate()
        return args.func(cfg, args)
    except VisemeDecodeError as exc:
        sys.stderr.write(f"viseme-decode: {exc}\n")
        return EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write(f"viseme-decode: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
