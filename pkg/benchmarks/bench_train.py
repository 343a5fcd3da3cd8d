#!/usr/bin/env python3
"""Benchmark the skip-gram trainer: numba kernel vs pure-numpy fallback.

Builds a synthetic corpus, trains with each backend (selected through the
same env flag the package uses), and reports tokens/second.  Run:

    python3 benchmarks/bench_train.py --tokens 40000 --dims 128
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))


def build_sentences(total_tokens, vocab_size=500, sentence_len=20):
    words = [f"w{i}" for i in range(vocab_size)]
    sentences = []
    produced = 0
    s = 0
    while produced < total_tokens:
        sent = [words[(s * 7 + j * 13) % vocab_size] for j in range(sentence_len)]
        sentences.append(sent)
        produced += sentence_len
        s += 1
    return sentences


def run_backend(disable_numba, sentences, hyper):
    from emergekg import backend
    from emergekg.embedding import train_sentences

    if disable_numba:
        os.environ["EMERGEKG_DISABLE_NUMBA"] = "1"
    else:
        os.environ.pop("EMERGEKG_DISABLE_NUMBA", None)
    name = backend.active_backend()
    # warm-up pass triggers jit compilation outside the timed region
    train_sentences(sentences[:5], hyper)
    started = time.perf_counter()
    train_sentences(sentences, hyper)
    elapsed = time.perf_counter() - started
    return name, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tokens", type=int, default=40000)
    parser.add_argument("--dims", type=int, default=128)
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--window", type=int, default=7)
    args = parser.parse_args()

    from emergekg import backend
    from emergekg.embedding import Hyperparameters

    hyper = Hyperparameters(
        dims=args.dims, epochs=args.epochs, window=args.window, workers=1, seed=1
    )
    sentences = build_sentences(args.tokens)
    total = sum(len(s) for s in sentences) * args.epochs
    print(f"corpus: {sum(len(s) for s in sentences)} tokens, {len(sentences)} sentences")
    print(f"hyper: dims={args.dims} window={args.window} epochs={args.epochs} workers=1")

    results = {}
    for disable in (True, False) if backend.numba_available() else (True,):
        name, elapsed = run_backend(disable, sentences, hyper)
        results[name] = elapsed
        print(f"{name:>6}: {elapsed:8.3f}s  ({total / elapsed:12,.0f} tokens/s)")

    if len(results) == 2:
        print(f"speedup: {results['numpy'] / results['numba']:.1f}x (numba over numpy)")
    else:
        print("numba unavailable; only the numpy path was measured")


if __name__ == "__main__":
    main()
