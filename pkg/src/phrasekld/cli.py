"""Command-line front end: each subcommand runs one pipeline stage through files."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from phrasekld import classifier, evaluation, lexicon, pipeline, weighting
from phrasekld.embeddings import load_embeddings
from phrasekld.errors import MalformedInputError, ValidationError
from phrasekld.reformat import reformat_sentence
from phrasekld.representation import N_MT

log = logging.getLogger("phrasekld")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _require(*paths) -> None:
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise ValidationError(f"input file not found: {p}")


def _write(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def read_labels(path) -> np.ndarray:
    """0/1 labels from the first column of each line; MSRP files are read by their Quality column."""
    with open(path, encoding="utf-8-sig") as fh:
        first = fh.readline()
    if first.startswith("Quality"):
        return np.array([p.label for p in pipeline.read_msrp(path)], dtype=np.int64)
    labels = []
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            if fields[0] not in ("0", "1"):
                raise MalformedInputError(f"label must be 0 or 1, got {fields[0]!r}", path, lineno)
            labels.append(int(fields[0]))
    return np.array(labels, dtype=np.int64)


def _load_lexicon(args) -> lexicon.PhraseLexicon | None:
    if getattr(args, "profiles", None):
        _require(args.profiles)
        return lexicon.read_profiles(args.profiles)
    if getattr(args, "lexicon", None):
        _require(args.lexicon, args.corpus)
        if args.corpus is None:
            raise ValidationError("--lexicon needs --corpus to classify phrases (or pass --profiles)")
        return lexicon.count_distance_profile(lexicon.read_corpus(args.corpus), lexicon.load_lexicon(args.lexicon))
    return None


def cmd_phrase_stats(args) -> None:
    _require(args.lexicon, args.corpus)
    lex = lexicon.load_lexicon(args.lexicon)
    lex = lexicon.count_distance_profile(lexicon.read_corpus(args.corpus), lex, args.max_dist)
    lexicon.write_profiles(lex, args.out)


def cmd_classify_phrases(args) -> None:
    _require(args.profiles)
    lex = lexicon.read_profiles(args.profiles)
    lex = lexicon.with_profiles(lex, lex.profiles)
    if args.out is None or args.out == "-":
        for a, b in sorted(lex.entries):
            counts = "\t".join(str(int(c)) for c in lex.profiles[(a, b)])
            print(f"{lexicon.join_phrase(a, b)}\t{counts}\t{lex.class_of(a, b).value}")
    else:
        lexicon.write_profiles(lex, args.out)


def cmd_reformat(args) -> None:
    _require(args.corpus, args.profiles)
    lex = lexicon.read_profiles(args.profiles)
    lines = [" ".join(reformat_sentence(s, lex)) + "\n" for s in lexicon.read_corpus(args.corpus)]
    _write("".join(lines), args.out)


def cmd_fit_weights(args) -> None:
    _require(args.train, args.embeddings)
    lex = _load_lexicon(args)
    units = pipeline.to_units(pipeline.read_msrp(args.train), lex)
    model = weighting.fit_weights(units, args.scheme, alpha=args.alpha, k=args.k, unseen_policy=args.policy)
    if args.embeddings:
        table = load_embeddings(args.embeddings, header=not args.no_header)
        model = replace(model, dim=table.dim)
    weighting.save_weights(model, args.out)


def cmd_featurize(args) -> None:
    _require(args.pairs, args.weights, args.embeddings)
    model = weighting.load_weights(args.weights)
    if args.policy or args.k:
        model = model.with_policy(args.policy, args.k)
    table = load_embeddings(args.embeddings, header=not args.no_header)
    if model.dim is not None and model.dim != table.dim:
        raise MalformedInputError(
            f"embedding dim {table.dim} does not match weight model dim {model.dim}", args.embeddings
        )
    pairs = pipeline.read_msrp(args.pairs)
    lex = _load_lexicon(args)
    units = pipeline.to_units(pairs, lex)
    test_types = {u for p in units for u in (*p.u_units, *p.v_units)}
    resolver = weighting.WeightResolver(
        model, table, candidates=weighting.word_only if args.word_neighbors else None, test_units=test_types
    )
    layout = pipeline.FeatureLayout(dim=table.dim, m=N_MT, embedding=not args.no_embedding, mt=not args.no_mt)
    X = pipeline.featurize(units, pairs, resolver, table, layout, args.count_once)
    pipeline.write_features(X, [p.label for p in pairs], layout, args.out)


def cmd_train(args) -> None:
    _require(args.features)
    X, y, _ = pipeline.read_features(args.features)
    grid = args.C if args.C else list(classifier.DEFAULT_C_GRID)
    if len(grid) > 1:
        res = classifier.tune(
            y, lambda f, d, k: (X[f], X[d]), C_grid=grid, k_grid=(1,), seed=args.seed, loss=args.loss
        )
        log.info("dev accuracy %.4f at C=%g", res.accuracy, res.C)
        C = res.C
    else:
        C = grid[0]
    model = classifier.train_linear(X, y, C=C, seed=args.seed, loss=args.loss)
    classifier.save_model(model, args.out)


def cmd_predict(args) -> None:
    _require(args.model, args.features)
    model = classifier.load_model(args.model)
    X, _, _ = pipeline.read_features(args.features)
    if X.shape[1] != model.n_features:
        raise MalformedInputError(
            f"feature width {X.shape[1]} does not match model ({model.n_features})", args.features
        )
    scores = model.decision_function(X) if len(X) else np.zeros(0)
    _write("".join(f"{int(s >= 0)}\t{s!r}\n" for s in map(float, scores)), args.out)


def cmd_evaluate(args) -> None:
    _require(args.pred, args.gold)
    rep = evaluation.evaluate(read_labels(args.pred), read_labels(args.gold))
    _write(rep.as_tsv() if args.tsv else rep.as_text(), args.out)


def cmd_significance(args) -> None:
    _require(args.pred_a, args.pred_b, args.gold)
    pv = evaluation.approx_randomization(
        read_labels(args.pred_a),
        read_labels(args.pred_b),
        read_labels(args.gold),
        iterations=args.iterations,
        seed=args.seed,
    )
    if args.tsv:
        text = "".join(f"p_{m}\t{v!r}\n" for m, v in pv.items())
    else:
        text = "".join(f"p_{m:<10}{v:.4f}\n" for m, v in pv.items())
    _write(text, args.out)


def cmd_experiment(args) -> None:
    _require(args.train, args.test, args.embeddings)
    lex = _load_lexicon(args)
    if lex is None:
        raise ValidationError("experiment needs --profiles or --lexicon/--corpus")
    exp = pipeline.Experiment(
        pipeline.read_msrp(args.train),
        pipeline.read_msrp(args.test),
        lex,
        load_embeddings(args.embeddings, header=not args.no_header),
        seed=args.seed,
        C_grid=args.C_grid,
        k_grid=args.k_grid,
        alpha=args.alpha,
        subset=args.subset,
        count_once=args.count_once,
        loss=args.loss,
    )
    _write(exp.report(iterations=args.iterations), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phrasekld", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    def lexicon_args(p):
        p.add_argument("--profiles", help="classified profile TSV (a_b c1..c5 class)")
        p.add_argument("--lexicon", help="raw phrase list; classified on --corpus")
        p.add_argument("--corpus", help="tokenized corpus, one sentence per line")

    def emb_args(p, required=True):
        p.add_argument("--embeddings", required=required, help="word2vec text format vectors")
        p.add_argument("--no-header", action="store_true", help="embeddings file has no '<n> <dim>' header")

    p = add("phrase-stats", cmd_phrase_stats, "count distance profiles c1..c5 for every lexicon phrase")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--max-dist", type=int, default=lexicon.MAX_DIST)
    p.add_argument("--out", required=True)

    p = add("classify-phrases", cmd_classify_phrases, "label profiles continuous/discontinuous/unknown")
    p.add_argument("profiles")
    p.add_argument("--out")

    p = add("reformat", cmd_reformat, "rewrite a corpus so detected phrases become a_b units")
    p.add_argument("--corpus", required=True)
    p.add_argument("--profiles", required=True)
    p.add_argument("--out")

    p = add("fit-weights", cmd_fit_weights, "fit unit weights on an MSRP-format training file")
    p.add_argument("--train", required=True)
    lexicon_args(p)
    emb_args(p, required=False)
    p.add_argument("--scheme", choices=[s.value for s in weighting.Scheme], default="tfkld")
    p.add_argument("--policy", choices=[s.value for s in weighting.UnseenPolicy], default="knn")
    p.add_argument("--alpha", type=float, default=weighting.DEFAULT_ALPHA)
    p.add_argument("--k", type=int, default=weighting.DEFAULT_K)
    p.add_argument("--out", required=True)

    p = add("featurize", cmd_featurize, "build pair feature vectors [cosine, sum, |diff|, mt]")
    p.add_argument("--pairs", required=True)
    p.add_argument("--weights", required=True)
    emb_args(p)
    lexicon_args(p)
    p.add_argument("--policy", choices=[s.value for s in weighting.UnseenPolicy], help="override model policy")
    p.add_argument("--k", type=int, help="override model k")
    p.add_argument("--word-neighbors", action="store_true", help="restrict KNN neighbors to single words")
    p.add_argument("--count-once", action="store_true", help="each unit type counts once per sentence")
    p.add_argument("--no-mt", action="store_true")
    p.add_argument("--no-embedding", action="store_true")
    p.add_argument("--out", required=True)

    p = add("train", cmd_train, "train the linear classifier (C tuned on a dev split if several given)")
    p.add_argument("--features", required=True)
    p.add_argument("--C", type=_floats, help="comma-separated C value(s)")
    p.add_argument("--loss", choices=["hinge", "logistic"], default="hinge")
    p.add_argument("--seed", type=int, default=classifier.DEFAULT_SEED)
    p.add_argument("--out", required=True)

    p = add("predict", cmd_predict, "write label<TAB>score per feature row")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out")

    p = add("evaluate", cmd_evaluate, "accuracy and F1 of predictions against gold labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--tsv", action="store_true")
    p.add_argument("--out")

    p = add("significance", cmd_significance, "approximate randomization test between two systems")
    p.add_argument("--pred-a", required=True)
    p.add_argument("--pred-b", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--iterations", type=int, default=evaluation.DEFAULT_ITERATIONS)
    p.add_argument("--seed", type=int, default=classifier.DEFAULT_SEED)
    p.add_argument("--tsv", action="store_true")
    p.add_argument("--out")

    p = add("experiment", cmd_experiment, "run all method configurations and print a results table")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    lexicon_args(p)
    emb_args(p)
    p.add_argument("--seed", type=int, default=classifier.DEFAULT_SEED)
    p.add_argument("--C-grid", type=_floats, default=list(classifier.DEFAULT_C_GRID))
    p.add_argument("--k-grid", type=_ints, default=list(pipeline.DEFAULT_K_GRID))
    p.add_argument("--alpha", type=float, default=weighting.DEFAULT_ALPHA)
    p.add_argument("--subset", action="store_true", help="keep only pairs containing a detected phrase")
    p.add_argument("--count-once", action="store_true")
    p.add_argument("--loss", choices=["hinge", "logistic"], default="hinge")
    p.add_argument("--iterations", type=int, default=evaluation.DEFAULT_ITERATIONS)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except MalformedInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
