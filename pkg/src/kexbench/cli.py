"""Command-line benchmark harness: ingest -> stats -> extract -> evaluate.

Progress and logs go to standard error; data goes to files (and the final
report table to standard output).  Exit codes: 0 success, 1 completed with
per-document errors, 2 fatal configuration or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import evaluate, stats
from .corpus import FORMATS, Corpus, load_corpus
from .errors import InvalidParameter, KexbenchError, PathNotFound
from .extractors import (
    MODEL_CLASSES,
    MODEL_IDS,
    SharedArtifacts,
    read_results,
    run_benchmark,
    write_results,
)
from .textproc import LANGUAGES, TextPipeline, parse_stopword_file

EXIT_OK = 0
EXIT_DOC_ERRORS = 1
EXIT_FATAL = 2

_GLOBAL_KEYS = {
    "corpus": str,
    "format": str,
    "language": str,
    "stopword_file": str,
    "models": str,
    "top_k": int,
    "n_max": int,
    "df_file": str,
    "topic_model_file": str,
    "lda_k": int,
    "lda_iters": int,
    "seed": int,
    "policy": str,
    "hit_rule": str,
    "output_dir": str,
    "workers": int,
    "auto_stats": bool,
    "fixed_clock": bool,
}

_DEFAULTS = {
    "format": "tsv",
    "language": "spanish",
    "models": ",".join(MODEL_IDS),
    "top_k": 10,
    "n_max": 3,
    "lda_k": 10,
    "lda_iters": 500,
    "seed": 0,
    "policy": "normalized",
    "hit_rule": "any",
    "output_dir": ".",
    "workers": 1,
    "auto_stats": False,
    "fixed_clock": False,
}


def _coerce(value: str, kind):
    if kind is bool:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise InvalidParameter(f"expected a boolean, got {value!r}")
    return kind(value)


def parse_config_file(text: str) -> tuple[dict, dict[str, dict]]:
    """Flat ``key = value`` pairs plus ``[model.MX]`` sections for per-model
    hyperparameters.  Unknown keys are fatal."""
    global_cfg: dict = {}
    model_cfg: dict[str, dict] = {}
    section: str | None = None
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name.startswith("model.") or name[6:] not in MODEL_CLASSES:
                raise InvalidParameter(f"config line {line_no}: unknown section [{name}]")
            section = name[6:]
            model_cfg.setdefault(section, {})
            continue
        if "=" not in line:
            raise InvalidParameter(f"config line {line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if section is None:
            if key not in _GLOBAL_KEYS:
                raise InvalidParameter(f"config line {line_no}: unknown key {key!r}")
            global_cfg[key] = _coerce(value, _GLOBAL_KEYS[key])
        else:
            allowed = MODEL_CLASSES[section]().get_params()
            if key not in allowed:
                raise InvalidParameter(
                    f"config line {line_no}: unknown parameter {key!r} for model {section}"
                )
            try:
                model_cfg[section][key] = int(value)
            except ValueError:
                try:
                    model_cfg[section][key] = float(value)
                except ValueError:
                    model_cfg[section][key] = value
    return global_cfg, model_cfg


def _resolve_config(args: argparse.Namespace) -> tuple[dict, dict[str, dict]]:
    cfg = dict(_DEFAULTS)
    model_cfg: dict[str, dict] = {}
    if getattr(args, "config", None):
        if not os.path.exists(args.config):
            raise PathNotFound(args.config)
        file_cfg, model_cfg = parse_config_file(open(args.config, encoding="utf-8").read())
        cfg.update(file_cfg)
    for key in _GLOBAL_KEYS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            cfg[key] = value
    if "corpus" not in cfg:
        raise InvalidParameter("no corpus path given (flag --corpus or config key 'corpus')")
    if cfg["format"] not in FORMATS:
        raise InvalidParameter(f"unknown corpus format {cfg['format']!r}")
    if cfg["language"] not in LANGUAGES:
        raise InvalidParameter(f"unknown language {cfg['language']!r}")
    if cfg["workers"] < 1:
        raise InvalidParameter("workers must be >= 1")
    return cfg, model_cfg


def _parse_models(selection: str) -> tuple[str, ...]:
    if selection.strip().lower() == "all":
        return MODEL_IDS
    models = tuple(m.strip() for m in selection.split(",") if m.strip())
    for model in models:
        if model not in MODEL_CLASSES:
            raise InvalidParameter(f"unknown model {model!r}")
    if not models:
        raise InvalidParameter("empty model selection")
    return models


def _load(cfg: dict) -> tuple[Corpus, TextPipeline]:
    corpus = load_corpus(cfg["corpus"], cfg["format"], language=cfg["language"])
    for diag in corpus.diagnostics:
        print(f"warning: {diag}", file=sys.stderr)
    stopwords = None
    if cfg.get("stopword_file"):
        text = open(cfg["stopword_file"], encoding="utf-8").read()
        stopwords = frozenset(parse_stopword_file(text))
    pipeline = TextPipeline(language=cfg["language"], stopwords=stopwords)
    return corpus, pipeline


def _df_path(cfg: dict) -> str:
    return cfg.get("df_file") or os.path.join(cfg["output_dir"], "df.tsv")


def _topic_path(cfg: dict) -> str:
    return cfg.get("topic_model_file") or os.path.join(cfg["output_dir"], "topic_model.tsv")


def cmd_stats(cfg: dict, model_cfg: dict) -> int:
    corpus, pipeline = _load(cfg)
    os.makedirs(cfg["output_dir"], exist_ok=True)
    table = stats.build_df(corpus, pipeline, strategy="ngram", n_max=cfg["n_max"])
    stats.save_df(table, _df_path(cfg))
    print(
        f"df table: {len(table.df)} candidates over {table.n_docs} docs -> {_df_path(cfg)}",
        file=sys.stderr,
    )
    model = stats.train_lda(
        corpus, pipeline, k=cfg["lda_k"], iters=cfg["lda_iters"], seed=cfg["seed"]
    )
    stats.save_topic_model(model, _topic_path(cfg))
    print(
        f"topic model: k={model.k_topics}, vocabulary {len(model.vocab)} stems "
        f"-> {_topic_path(cfg)}",
        file=sys.stderr,
    )
    return EXIT_OK


def _shared_for_extract(
    cfg: dict, model_cfg: dict, corpus: Corpus, pipeline: TextPipeline,
    models: tuple[str, ...],
) -> SharedArtifacts:
    df_table = None
    topic_model = None
    needs_df = any(m in ("M1", "M2") for m in models)
    needs_topics = "M7" in models
    if needs_df:
        path = _df_path(cfg)
        if os.path.exists(path):
            df_table = stats.load_df_file(path)
        elif cfg["auto_stats"]:
            df_table = stats.build_df(corpus, pipeline, strategy="ngram", n_max=cfg["n_max"])
        else:
            raise PathNotFound(
                f"missing document-frequency table {path} "
                "(run 'kexbench stats' first, or pass --auto-stats)"
            )
    if needs_topics:
        path = _topic_path(cfg)
        if os.path.exists(path):
            topic_model = stats.load_topic_model_file(path)
        elif cfg["auto_stats"]:
            topic_model = stats.train_lda(
                corpus, pipeline, k=cfg["lda_k"], iters=cfg["lda_iters"], seed=cfg["seed"]
            )
        else:
            raise PathNotFound(
                f"missing topic model {path} "
                "(run 'kexbench stats' first, or pass --auto-stats)"
            )
    return SharedArtifacts(
        pipeline=pipeline, df_table=df_table, topic_model=topic_model, model_params=model_cfg
    )


def cmd_extract(cfg: dict, model_cfg: dict) -> int:
    corpus, pipeline = _load(cfg)
    models = _parse_models(cfg["models"])
    shared = _shared_for_extract(cfg, model_cfg, corpus, pipeline, models)
    os.makedirs(cfg["output_dir"], exist_ok=True)
    clock = (lambda: 0.0) if cfg["fixed_clock"] else None
    kwargs = {"clock": clock} if clock else {}
    results = run_benchmark(
        corpus,
        shared,
        models=models,
        k=cfg["top_k"],
        workers=cfg["workers"],
        progress=lambda done: print(f"processed {done} documents", file=sys.stderr),
        **kwargs,
    )
    out_path = os.path.join(cfg["output_dir"], "results.jsonl")
    write_results(results, out_path)
    n_errors = sum(1 for r in results if not r.ok)
    print(
        f"{len(results)} results ({n_errors} document errors) -> {out_path}",
        file=sys.stderr,
    )
    return EXIT_DOC_ERRORS if n_errors else EXIT_OK


def cmd_evaluate(cfg: dict, model_cfg: dict, results_path: str | None = None) -> int:
    corpus, pipeline = _load(cfg)
    path = results_path or os.path.join(cfg["output_dir"], "results.jsonl")
    if not os.path.exists(path):
        raise PathNotFound(path)
    results = read_results(path)
    if not results:
        raise InvalidParameter(f"no results in {path}")
    reports = evaluate.aggregate(
        results, corpus, policy=cfg["policy"], pipeline=pipeline, hit_rule=cfg["hit_rule"]
    )
    os.makedirs(cfg["output_dir"], exist_ok=True)
    report_path = os.path.join(cfg["output_dir"], "report.csv")
    scatter_path = os.path.join(cfg["output_dir"], "scatter.csv")
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(evaluate.report_csv(reports))
    with open(scatter_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(evaluate.scatter_csv(reports))
    print(evaluate.format_table(reports), end="")
    print(f"report -> {report_path}; scatter -> {scatter_path}", file=sys.stderr)
    return EXIT_OK


def cmd_run(cfg: dict, model_cfg: dict) -> int:
    code = cmd_stats(cfg, model_cfg)
    if code != EXIT_OK:
        return code
    code = cmd_extract(cfg, model_cfg)
    if code not in (EXIT_OK, EXIT_DOC_ERRORS):
        return code
    eval_code = cmd_evaluate(cfg, model_cfg)
    return code if eval_code == EXIT_OK else eval_code


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file with [model.MX] sections")
    parser.add_argument("--corpus", help="corpus path")
    parser.add_argument("--format", choices=FORMATS, default=None)
    parser.add_argument("--language", choices=LANGUAGES, default=None)
    parser.add_argument("--stopword-file", dest="stopword_file",
                        help="override the bundled stopword list")
    parser.add_argument("--output-dir", dest="output_dir", default=None)
    parser.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kexbench",
        description="Benchmark nine unsupervised keyphrase extraction models on a thesis corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="build and persist the df table and topic model")
    _add_common(p_stats)
    p_stats.add_argument("--n-max", dest="n_max", type=int, default=None)
    p_stats.add_argument("--lda-k", dest="lda_k", type=int, default=None)
    p_stats.add_argument("--lda-iters", dest="lda_iters", type=int, default=None)

    p_extract = sub.add_parser("extract", help="run the selected models over the corpus")
    _add_common(p_extract)
    p_extract.add_argument("--models", default=None, help="comma list of M1..M9, or 'all'")
    p_extract.add_argument("--top-k", dest="top_k", type=int, default=None)
    p_extract.add_argument("--n-max", dest="n_max", type=int, default=None)
    p_extract.add_argument("--workers", type=int, default=None)
    p_extract.add_argument("--df-file", dest="df_file", default=None)
    p_extract.add_argument("--topic-model-file", dest="topic_model_file", default=None)
    p_extract.add_argument("--lda-k", dest="lda_k", type=int, default=None)
    p_extract.add_argument("--lda-iters", dest="lda_iters", type=int, default=None)
    p_extract.add_argument("--auto-stats", dest="auto_stats", action="store_true", default=None,
                           help="build missing corpus artifacts on the fly")
    p_extract.add_argument("--fixed-clock", dest="fixed_clock", action="store_true", default=None,
                           help="report elapsed 0.0 for byte-reproducible output")

    p_eval = sub.add_parser("evaluate", help="aggregate a results file into reports")
    _add_common(p_eval)
    p_eval.add_argument("--results", default=None, help="results JSONL path")
    p_eval.add_argument("--policy", choices=evaluate.POLICIES, default=None)
    p_eval.add_argument("--hit-rule", dest="hit_rule", default=None,
                        help="any | all | topk:<n>")

    p_run = sub.add_parser("run", help="stats + extract + evaluate")
    _add_common(p_run)
    for flag_parser in (p_run,):
        flag_parser.add_argument("--models", default=None)
        flag_parser.add_argument("--top-k", dest="top_k", type=int, default=None)
        flag_parser.add_argument("--n-max", dest="n_max", type=int, default=None)
        flag_parser.add_argument("--workers", type=int, default=None)
        flag_parser.add_argument("--lda-k", dest="lda_k", type=int, default=None)
        flag_parser.add_argument("--lda-iters", dest="lda_iters", type=int, default=None)
        flag_parser.add_argument("--policy", choices=evaluate.POLICIES, default=None)
        flag_parser.add_argument("--hit-rule", dest="hit_rule", default=None)
        flag_parser.add_argument("--fixed-clock", dest="fixed_clock",
                                 action="store_true", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, model_cfg = _resolve_config(args)
        if args.command == "stats":
            return cmd_stats(cfg, model_cfg)
        if args.command == "extract":
            return cmd_extract(cfg, model_cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, model_cfg, results_path=getattr(args, "results", None))
        return cmd_run(cfg, model_cfg)
    except (KexbenchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
