#!/usr/bin/env python3
"""Build the Countries S1/S2/S3 link-prediction splits from world-countries data.

Usage:
    npm pack world-countries && tar xzf world-countries-*.tgz
    python3 scripts/make_countries.py package/countries.json data/countries

Entities are countries, subregions and regions (the Antarctic region is
dropped). Facts are locatedIn(country, subregion), locatedIn(country, region),
locatedIn(subregion, region) and neighborOf(country, country) in both
directions. Validation and test countries are drawn among countries that have
at least one neighbour in the training split; their locatedIn(c, region) facts
become the queries.

  S1: queries removed from train.
  S2: S1 plus locatedIn(c, subregion) removed for every query country.
  S3: S2 plus every locatedIn fact of the neighbours of query countries removed.
"""

import json
import os
import random
import sys
import unicodedata

SEED = 2015
N_TEST = 24
N_VALID = 24

RULES = {
    "s1": ["locatedIn(X,Z) :- locatedIn(X,W), locatedIn(W,Z)."],
    "s2": [
        "locatedIn(X,Z) :- locatedIn(X,W), locatedIn(W,Z).",
        "locatedIn(X,Z) :- neighborOf(X,Y), locatedIn(Y,Z).",
    ],
    "s3": [
        "locatedIn(X,Z) :- locatedIn(X,W), locatedIn(W,Z).",
        "locatedIn(X,Z) :- neighborOf(X,Y), locatedIn(Y,Z).",
        "locatedIn(X,Z) :- neighborOf(X,Y), neighborOf(Y,K), locatedIn(K,Z).",
    ],
}


def slug(name):
    ascii_name = unicodedata.normalize("NFKD", name).encode("ascii", "ignore").decode()
    out = []
    for ch in ascii_name.lower():
        out.append(ch if ch.isalnum() else "_")
    s = "".join(out)
    while "__" in s:
        s = s.replace("__", "_")
    return s.strip("_")


def main():
    src, out_dir = sys.argv[1], sys.argv[2]
    with open(src, encoding="utf-8") as f:
        raw = json.load(f)
    countries = [c for c in raw if c["region"] and c["region"] != "Antarctic"]
    name = {}
    for c in countries:
        n = slug(c["name"]["common"])
        assert n not in name.values(), n
        name[c["cca3"]] = n
    region = {c["cca3"]: slug(c["region"]) for c in countries}
    subregion = {c["cca3"]: slug(c["subregion"]) for c in countries}
    neighbours = {code: set() for code in name}
    for c in countries:
        for b in c["borders"]:
            if b in name:
                neighbours[c["cca3"]].add(b)
                neighbours[b].add(c["cca3"])

    codes = sorted(name)
    rng = random.Random(SEED)
    pool = [c for c in codes if neighbours[c]]
    rng.shuffle(pool)
    held = set()
    picked = []
    for c in pool:
        if len(picked) == N_TEST + N_VALID:
            break
        # every held-out country keeps at least one training neighbour
        if any(n not in held and n != c for n in neighbours[c]):
            trial = held | {c}
            ok = all(any(n not in trial for n in neighbours[h]) for h in trial)
            if ok:
                held.add(c)
                picked.append(c)
    test = sorted(picked[:N_TEST])
    valid = sorted(picked[N_TEST:])
    queries = set(test) | set(valid)

    base = set()
    for c in codes:
        base.add((name[c], "locatedIn", subregion[c]))
        base.add((subregion[c], "locatedIn", region[c]))
        for n in neighbours[c]:
            base.add((name[c], "neighborOf", name[n]))
    located_region = {c: (name[c], "locatedIn", region[c]) for c in codes}

    splits = {}
    s1 = set(base) | {located_region[c] for c in codes if c not in queries}
    splits["s1"] = s1
    s2 = s1 - {(name[c], "locatedIn", subregion[c]) for c in queries}
    splits["s2"] = s2
    ring = {n for q in queries for n in neighbours[q]} - queries
    s3 = s2 - {(name[n], "locatedIn", subregion[n]) for n in ring}
    s3 -= {located_region[n] for n in ring}
    splits["s3"] = s3

    for split, train in splits.items():
        d = os.path.join(out_dir, split)
        os.makedirs(d, exist_ok=True)
        for fname, triples in (
            ("train.tsv", train),
            ("valid.tsv", {located_region[c] for c in valid}),
            ("test.tsv", {located_region[c] for c in test}),
        ):
            with open(os.path.join(d, fname), "w", encoding="utf-8") as f:
                for s, r, o in sorted(triples):
                    f.write(f"{s}\t{r}\t{o}\n")
        with open(os.path.join(d, "rules.pl"), "w", encoding="utf-8") as f:
            f.write(f"% Countries {split.upper()}\n")
            for rule in RULES[split]:
                f.write(rule + "\n")
        entities = {x for s, _, o in train for x in (s, o)}
        print(split, "entities", len(entities), "facts", len(train))


if __name__ == "__main__":
    main()
