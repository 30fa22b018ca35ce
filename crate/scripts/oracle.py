#!/usr/bin/env python3
"""Naive all-pairs reference for the batch similarity job.

Written independently of the Rust implementation: per-topic brute-force
label scanning instead of a compiled dictionary, plain DFS for closures,
and an O(n*m) double loop over products. Prints one
`conference_id<TAB>product_id<TAB>score` line per persisted pair, with the
score in shortest round-trip form, sorted by (conference, -score, product).

usage: oracle.py ONTOLOGY METADATA REFERENCE_YEAR [JACCARD COSINE]
"""
import json
import math
import re
import sys
import unicodedata
from collections import defaultdict


def norm_label(s):
    s = unicodedata.normalize("NFC", s).lower()
    return " ".join(s.split())


def tokens(s):
    s = unicodedata.normalize("NFC", s).lower()
    return [t for t in re.split(r"[^0-9a-zÀ-￿]+", s) if t]


def load_ontology(path):
    labels, broader, equiv = {}, defaultdict(set), defaultdict(set)
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            r = json.loads(line)
            if r["rec"] == "topic":
                labels[r["id"]] = norm_label(r["label"])
            elif r["kind"] == "broaderGeneric":
                broader[r["src"]].add(r["dst"])
            elif r["kind"] == "narrowerGeneric":
                broader[r["dst"]].add(r["src"])
            elif r["kind"] == "relatedEquivalent":
                equiv[r["src"]].add(r["dst"])
                equiv[r["dst"]].add(r["src"])
    # equivalence classes by DFS over the undirected equivalence graph
    canon = {}
    for t in sorted(labels):
        if t in canon:
            continue
        stack, seen = [t], {t}
        while stack:
            u = stack.pop()
            for v in equiv[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        rep = min(seen)
        for u in seen:
            canon[u] = rep
    members = defaultdict(set)
    for t, c in canon.items():
        members[c].add(t)
    cbroader = defaultdict(set)
    for s, ds in broader.items():
        for d in ds:
            cbroader[canon[s]].add(canon[d])

    def ancestors(c):
        out, stack = set(), [c]
        while stack:
            u = stack.pop()
            for v in cbroader[u]:
                if v not in out:
                    out.add(v)
                    stack.append(v)
        out.discard(c)
        return out

    anc = {c: ancestors(c) for c in members}
    # trigger labels of canonical topic c: labels of every class whose ancestors include c, plus its own
    triggers = {}
    for c in members:
        classes = [d for d in members if d == c or c in anc[d]]
        triggers[c] = {labels[m] for d in classes for m in members[d]}
    return triggers


def contains(hay, needle):
    n = len(needle)
    if n == 0:
        return False
    return any(hay[i:i + n] == needle for i in range(len(hay) - n + 1))


def chapter_topics(ch, triggers):
    units = [tokens(ch["title"]), tokens(ch.get("abstract") or "")]
    units += [tokens(k) for k in ch.get("keywords") or []]
    found = set()
    for topic, labs in triggers.items():
        for lab in labs:
            lt = tokens(lab)
            if any(contains(u, lt) for u in units):
                found.add(topic)
                break
    return found


def main():
    onto, meta, ref_year = sys.argv[1], sys.argv[2], int(sys.argv[3])
    jt = float(sys.argv[4]) if len(sys.argv) > 4 else 0.125
    ct = float(sys.argv[5]) if len(sys.argv) > 5 else 0.5
    triggers = load_ontology(onto)
    chapters = []
    with open(meta, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                chapters.append(json.loads(line))

    groups = defaultdict(list)
    conferences = set()
    for ch in chapters:
        if ch["parent_kind"] == "journal":
            groups["journal:%s@%d" % (ch["parent_doi"], ch["year"])].append(ch)
        else:
            groups["book:" + ch["parent_doi"]].append(ch)
        if ch["parent_kind"] == "proceedings" and ref_year - 4 <= ch["year"] <= ref_year:
            key = "conf:" + ch["conference_series_id"]
            groups[key].append(ch)
            conferences.add(key)

    vectors = {}
    for pid, chs in groups.items():
        v = defaultdict(int)
        for ch in chs:
            for t in chapter_topics(ch, triggers):
                v[t] += 1
        vectors[pid] = dict(v)

    rows = []
    for c in sorted(conferences):
        a = vectors[c]
        for p in sorted(vectors):
            if p == c:
                continue
            b = vectors[p]
            union = set(a) | set(b)
            jac = len(set(a) & set(b)) / len(union) if union else 0.0
            if jac < jt:
                continue
            if not a or not b:
                continue
            dot = sum(a[t] * b[t] for t in a if t in b)
            cos = dot / (math.sqrt(sum(x * x for x in a.values())) * math.sqrt(sum(x * x for x in b.values())))
            if cos > ct:
                rows.append((c, p, cos))
    rows.sort(key=lambda r: (r[0], -r[2], r[1]))
    for c, p, s in rows:
        print(f"{c}\t{p}\t{s!r}")
    print(f"# pairs={sum(1 for c in conferences for p in vectors if p != c)} emitted={len(rows)}", file=sys.stderr)


if __name__ == "__main__":
    main()
