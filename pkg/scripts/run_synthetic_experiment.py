"""Write a seeded synthetic corpus to disk and run the full CLI pipeline on it.

    python scripts/run_synthetic_experiment.py --outdir runs/synth --seed 0
"""

import argparse
import sys
from pathlib import Path

from phrasekld import cli
from phrasekld.embeddings import save_embeddings
from phrasekld.pipeline import write_msrp
from phrasekld.synthetic import make_corpus


def write_inputs(outdir: Path, seed: int, dim: int) -> dict[str, Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    sc = make_corpus(seed=seed, dim=dim)
    paths = {name: outdir / name for name in ("train.tsv", "test.tsv", "lexicon.txt", "corpus.txt", "vectors.txt")}
    write_msrp(sc.train, paths["train.tsv"])
    write_msrp(sc.test, paths["test.tsv"])
    paths["lexicon.txt"].write_text("".join(f"{a} {b}\n" for a, b in sc.lexicon), encoding="utf-8")
    paths["corpus.txt"].write_text("".join(" ".join(s) + "\n" for s in sc.corpus), encoding="utf-8")
    save_embeddings(sc.table, paths["vectors.txt"])
    return paths


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--outdir", type=Path, default=Path("runs/synth"))
    ap.add_argument("--seed", type=int, default=0, help="corpus generator seed")
    ap.add_argument("--run-seed", type=int, default=1234, help="split / optimizer / randomization seed")
    ap.add_argument("--dim", type=int, default=50)
    ap.add_argument("--iterations", type=int, default=10000)
    args = ap.parse_args()

    p = write_inputs(args.outdir, args.seed, args.dim)
    profiles = args.outdir / "profiles.tsv"
    steps = [
        ["phrase-stats", "--lexicon", p["lexicon.txt"], "--corpus", p["corpus.txt"], "--out", profiles],
        [
            "experiment", "--train", p["train.tsv"], "--test", p["test.tsv"], "--profiles", profiles,
            "--embeddings", p["vectors.txt"], "--seed", args.run_seed, "--iterations", args.iterations,
            "--out", args.outdir / "report.txt",
        ],
    ]
    for step in steps:
        status = cli.main(["-v", *map(str, step)])
        if status:
            return status
    print((args.outdir / "report.txt").read_text(), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
