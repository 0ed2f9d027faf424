#!/usr/bin/env python3
"""Convert a tiktoken rank file (base64 token, rank per line) into the
byte-level `vocab.json` + `merges.txt` pair used by GPT-2 style tokenizers.

Merges are recovered by running BPE over each token's bytes with only the
lower-ranked tokens available; the last surviving pair is the merge rule.
"""
import argparse
import base64
import json


def bytes_to_unicode():
    bs = (list(range(ord("!"), ord("~") + 1)) + list(range(ord("¡"), ord("¬") + 1))
          + list(range(ord("®"), ord("ÿ") + 1)))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, map(chr, cs)))


def split_two(ranks, token, max_rank):
    parts = [bytes([b]) for b in token]
    while True:
        best = None
        for i in range(len(parts) - 1):
            r = ranks.get(parts[i] + parts[i + 1])
            if r is not None and r < max_rank and (best is None or r < best[0]):
                best = (r, i)
        if best is None:
            break
        i = best[1]
        parts = parts[:i] + [parts[i] + parts[i + 1]] + parts[i + 2:]
    assert len(parts) == 2, (token, parts)
    return parts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("ranks")
    ap.add_argument("--vocab-out", required=True)
    ap.add_argument("--merges-out", required=True)
    ap.add_argument("--special", action="append", default=["<|endoftext|>"])
    args = ap.parse_args()

    ranks = {}
    with open(args.ranks) as f:
        for line in f:
            if line.strip():
                tok, rank = line.split()
                ranks[base64.b64decode(tok)] = int(rank)

    b2u = bytes_to_unicode()
    enc = lambda bs: "".join(b2u[b] for b in bs)

    vocab = {enc(tok): rank for tok, rank in ranks.items()}
    next_id = max(ranks.values()) + 1
    for s in args.special:
        vocab[s] = next_id
        next_id += 1

    merges = []
    for tok, rank in sorted(ranks.items(), key=lambda kv: kv[1]):
        if len(tok) < 2:
            continue
        left, right = split_two(ranks, tok, rank)
        merges.append(f"{enc(left)} {enc(right)}")

    with open(args.vocab_out, "w", encoding="utf-8") as f:
        json.dump(vocab, f, ensure_ascii=False)
    with open(args.merges_out, "w", encoding="utf-8") as f:
        f.write("#version: 0.2\n")
        f.write("\n".join(merges) + "\n")


if __name__ == "__main__":
    main()
