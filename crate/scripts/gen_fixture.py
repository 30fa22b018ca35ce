#!/usr/bin/env python3
"""Generate the synthetic demo corpus under fixtures/demo/.

Output is fully determined by SEED; rerunning overwrites the checked-in
files with identical bytes.
"""
import json
import os
import random

SEED = 20180917
REFERENCE_YEAR = 2018
OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures", "demo")

# id, label, broader parents, pmc codes
TOPICS = [
    ("ai", "Artificial Intelligence", [], ["I21000"]),
    ("ml", "Machine Learning", ["ai"], ["I21017"]),
    ("nn", "Neural Networks", ["ml"], []),
    ("dl", "Deep Learning", ["ml", "nn"], ["I21017"]),
    ("dnn", "Deep Neural Networks", [], []),
    ("cnn", "Convolutional Neural Networks", ["dl"], []),
    ("rl", "Reinforcement Learning", ["ml"], []),
    ("nlp", "Natural Language Processing", ["ai"], ["I21040"]),
    ("ie", "Information Extraction", ["nlp", "ir"], []),
    ("ner", "Named Entity Recognition", ["ie"], []),
    ("mt", "Machine Translation", ["nlp"], []),
    ("kr", "Knowledge Representation", ["ai"], []),
    ("onto", "Ontology", ["kr", "sw"], []),
    ("om", "Ontology Matching", ["onto"], []),
    ("oa", "Ontology  Alignment", [], []),
    ("oe", "Ontology Engineering", ["onto"], []),
    ("reasoning", "Automated Reasoning", ["kr"], []),
    ("dlogic", "Description Logics", ["reasoning", "kr"], []),
    ("sw", "Semantic Web", [], ["I18040"]),
    ("ld", "Linked Data", ["sw"], []),
    ("lod", "Linked Open Data", [], []),
    ("rdf", "RDF", ["sw"], []),
    ("sparql", "SPARQL", ["sw", "ql"], []),
    ("kg", "Knowledge Graphs", ["sw", "kr"], []),
    ("kg1", "Knowledge Graph", [], []),
    ("kge", "Knowledge Graph Embeddings", ["kg", "ml"], []),
    ("db", "Databases", [], ["I18024"]),
    ("ql", "Query Languages", ["db"], []),
    ("qo", "Query Optimization", ["db"], []),
    ("dm", "Data Mining", ["db", "ml"], ["I18030"]),
    ("clustering", "Clustering", ["dm"], []),
    ("assoc", "Association Rules", ["dm"], []),
    ("ir", "Information Retrieval", [], ["I18032"]),
    ("rs", "Recommender Systems", ["ir"], ["I18032"]),
    ("cf", "Collaborative Filtering", ["rs"], []),
    ("cbr", "Content-Based Recommendation", ["rs"], []),
    ("search", "Search Engines", ["ir"], []),
    ("qa", "Question Answering", ["ir", "nlp"], []),
    ("cv", "Computer Vision", [], ["I22021"]),
    ("od", "Object Detection", ["cv"], []),
    ("seg", "Image Segmentation", ["cv"], []),
    ("face", "Face Recognition", ["cv"], []),
    ("net", "Computer Networks", [], ["I13022"]),
    ("wsn", "Wireless Sensor Networks", ["net"], []),
    ("iot", "Internet of Things", ["net"], []),
    ("iot1", "IoT", [], []),
    ("sdn", "Software Defined Networking", ["net"], []),
    ("routing", "Routing Protocols", ["net"], []),
    ("softeng", "Software Engineering", [], ["I14029"]),
    ("testing", "Software Testing", ["softeng"], []),
    ("req", "Requirements Engineering", ["softeng"], []),
    ("mde", "Model-Driven Engineering", ["softeng"], []),
    ("fm", "Formal Methods", ["softeng", "tcs"], []),
    ("mc", "Model Checking", ["fm"], []),
    ("tcs", "Theoretical Computer Science", [], ["I16013"]),
    ("algo", "Algorithms", ["tcs"], []),
    ("graph", "Graph Theory", ["tcs"], []),
    ("complexity", "Computational Complexity", ["tcs"], []),
    ("hci", "Human-Computer Interaction", [], ["I18067"]),
    ("ux", "User Experience", ["hci"], []),
    ("usability", "Usability", ["hci"], []),
    ("vis", "Visualization", ["hci"], []),
    ("crowd", "Crowdsourcing", ["hci"], []),
    ("elearn", "E-Learning", ["hci"], ["I23028"]),
    ("sec", "Computer Security", [], ["I28010"]),
    ("cyber", "Cybersecurity", [], []),
    ("crypto", "Cryptography", ["sec"], []),
    ("privacy", "Privacy", ["sec"], []),
    ("blockchain", "Blockchain", ["sec"], []),
    ("ids", "Intrusion Detection", ["sec"], []),
]

EQUIV = [("dl", "dnn"), ("om", "oa"), ("ld", "lod"), ("kg", "kg1"), ("iot", "iot1"), ("sec", "cyber")]
CONTRIBUTES = [("ml", "cv"), ("ml", "nlp"), ("crypto", "blockchain")]
# a few relations stated as narrowerGeneric (parent -> child)
NARROWER = [("ir", "rs"), ("cv", "face")]

THEMES = {
    "sw": ["Semantic Web", "Linked Data", "Linked Open Data", "RDF", "SPARQL", "Ontology",
           "Ontology Matching", "ontology alignment", "Knowledge Graphs", "knowledge graph",
           "Ontology Engineering", "Description Logics", "Question Answering"],
    "ml": ["Machine Learning", "Deep Learning", "Deep Neural Networks", "Neural Networks",
           "Reinforcement Learning", "Convolutional Neural Networks", "Clustering",
           "Knowledge Graph Embeddings"],
    "nlp": ["Natural Language Processing", "Machine Translation", "Named Entity Recognition",
            "Information Extraction", "Question Answering", "Deep Learning"],
    "db": ["Databases", "Query Optimization", "Query Languages", "SPARQL", "Data Mining",
           "Association Rules", "Clustering"],
    "ir": ["Information Retrieval", "Recommender Systems", "Collaborative Filtering",
           "Content-Based Recommendation", "Search Engines", "Question Answering"],
    "cv": ["Computer Vision", "Object Detection", "Image Segmentation", "Face Recognition",
           "Convolutional Neural Networks", "Deep Learning"],
    "net": ["Computer Networks", "Wireless Sensor Networks", "Internet of Things", "IoT",
            "Software Defined Networking", "Routing Protocols", "Blockchain"],
    "se": ["Software Engineering", "Software Testing", "Requirements Engineering",
           "Model-Driven Engineering", "Formal Methods", "Model Checking"],
    "tcs": ["Algorithms", "Graph Theory", "Computational Complexity", "Model Checking"],
    "hci": ["Human-Computer Interaction", "User Experience", "Usability", "Visualization",
            "Crowdsourcing", "E-Learning"],
    "sec": ["Computer Security", "Cybersecurity", "Cryptography", "Privacy", "Blockchain",
            "Intrusion Detection"],
}

TITLE_PATTERNS = [
    "Towards {a} for {b}",
    "{a}: A Survey",
    "Scalable {a} with {b}",
    "On the Use of {a} in {b}",
    "{a} Revisited",
    "Improving {a} through {b}",
    "A Framework for {a}",
]
FILLER = [
    "We present a novel approach and evaluate it on several benchmarks.",
    "Experiments show consistent improvements over strong baselines.",
    "The proposed method is simple to deploy in practice.",
    "We discuss open challenges and future directions.",
    "Results indicate that the approach scales to large inputs.",
]

FIRST = ["Ada", "Alan", "Grace", "Edsger", "Barbara", "Donald", "Frances", "Tim", "Radia",
         "John", "Margaret", "Ken", "Leslie", "Shafi", "Judea", "Yoshua", "Fei", "Silvio",
         "Karen", "Niklaus"]
LAST = ["Lovelace", "Turing", "Hopper", "Dijkstra", "Liskov", "Knuth", "Allen", "Berners-Lee",
        "Perlman", "McCarthy", "Hamilton", "Thompson", "Lamport", "Goldwasser", "Pearl",
        "Bengio", "Li", "Micali", "Sparck Jones", "Wirth"]

SERIES = [
    ("iswc", "International Semantic Web Conference", "ISWC", ["sw", "sw", "kg_ml"]),
    ("eswc", "Extended Semantic Web Conference", "ESWC", ["sw", "nlp"]),
    ("ecir", "European Conference on Information Retrieval", "ECIR", ["ir", "nlp", "ml"]),
    ("icvs", "International Conference on Computer Vision Systems", "ICVS", ["cv", "ml"]),
    ("nss", "Network and System Security", "NSS", ["sec", "net"]),
    ("sefm", "Software Engineering and Formal Methods", "SEFM", ["se", "tcs"]),
]
SERIES_YEARS = [2012, 2014, 2016, 2018]

BOOKS = [
    ("Handbook of Semantic Web Technologies", ["sw", "sw", "db"], "edited"),
    ("Linked Data Management", ["sw", "db"], "authored"),
    ("Deep Learning for Vision", ["cv", "ml"], "authored"),
    ("Recommender Systems Handbook", ["ir", "ml"], "edited"),
    ("Foundations of Information Retrieval", ["ir", "nlp"], "authored"),
    ("Network Security Essentials", ["sec", "net"], "authored"),
    ("Formal Methods in Practice", ["se", "tcs"], "edited"),
    ("Human-Centred Computing", ["hci"], "authored"),
    ("Ontology Engineering in a Networked World", ["sw", "nlp"], "edited"),
    ("Graph Algorithms", ["tcs", "db"], "authored"),
    ("Miscellany of Computing", ["none"], "authored"),
]
BOOK_YEARS = [2015, 2016, 2017, 2018, 2014, 2016, 2017, 2018, 2012, 2017, 2018]

JOURNALS = [
    ("Journal of Intelligent Information Systems", ["ir", "ml", "db"]),
    ("Journal on Data Semantics", ["sw", "db"]),
    ("Machine Vision and Applications", ["cv"]),
    ("Software and Systems Modeling", ["se"]),
]
JOURNAL_YEARS = [2016, 2017]


def person(rng):
    return f"{rng.choice(FIRST)} {rng.choice(LAST)}"


def theme_labels(theme):
    if theme == "kg_ml":
        return ["Knowledge Graphs", "Knowledge Graph Embeddings", "Machine Learning", "Deep Learning"]
    if theme == "none":
        return []
    return THEMES[theme]


def make_chapter(rng, cid, themes, year, parent, authors):
    pool = []
    for t in themes:
        pool.extend(theme_labels(t))
    if pool:
        a, b = rng.choice(pool), rng.choice(pool)
        title = rng.choice(TITLE_PATTERNS).format(a=a, b=b)
        extra = rng.sample(pool, k=min(2, len(pool)))
        abstract = f"This chapter studies {extra[0].lower()} and its relation to {extra[1]}. " + rng.choice(FILLER)
        if rng.random() < 0.2:
            abstract = ""
        keywords = rng.sample(pool, k=min(rng.randint(1, 3), len(pool)))
    else:
        title = f"Essays on Computing, Part {cid[-1]}"
        abstract = rng.choice(FILLER)
        keywords = ["history"]
    rec = {
        "chapter_id": cid,
        "title": title,
        "abstract": abstract,
        "keywords": keywords,
        "year": year,
        "authors": authors,
    }
    rec.update(parent)
    return rec


def main():
    rng = random.Random(SEED)
    os.makedirs(OUT, exist_ok=True)

    with open(os.path.join(OUT, "ontology.jsonl"), "w", encoding="utf-8") as f:
        for tid, label, _, pmc in TOPICS:
            f.write(json.dumps({"rec": "topic", "id": tid, "label": label, "pmc": pmc}) + "\n")
        for tid, _, parents, _ in TOPICS:
            for p in parents:
                if (p, tid) in NARROWER:
                    continue
                f.write(json.dumps({"rec": "edge", "kind": "broaderGeneric", "src": tid, "dst": p}) + "\n")
        for p, c in NARROWER:
            f.write(json.dumps({"rec": "edge", "kind": "narrowerGeneric", "src": p, "dst": c}) + "\n")
        for a, b in EQUIV:
            f.write(json.dumps({"rec": "edge", "kind": "relatedEquivalent", "src": a, "dst": b}) + "\n")
        for a, b in CONTRIBUTES:
            f.write(json.dumps({"rec": "edge", "kind": "contributesTo", "src": a, "dst": b}) + "\n")

    chapters = []
    doi_seq = [1000]

    def next_doi():
        doi_seq[0] += 1
        return f"10.1007/978-3-319-{doi_seq[0]:05d}"

    for sid, name, acr, themes in SERIES:
        for year in SERIES_YEARS:
            doi = next_doi()
            editors = [person(rng) for _ in range(2)]
            parent = {
                "parent_doi": doi,
                "parent_kind": "proceedings",
                "parent_title": f"{acr} {year}: Proceedings",
                "editors": editors,
                "conference_series_id": sid,
                "conference_series_name": name,
                "conference_acronym": acr,
            }
            for i in range(rng.randint(3, 5)):
                cid = f"{sid}{year}-{i:02d}"
                authors = [person(rng) for _ in range(rng.randint(1, 4))]
                chapters.append(make_chapter(rng, cid, themes, year, parent, authors))

    for bi, (title, themes, style) in enumerate(BOOKS):
        doi = next_doi()
        year = BOOK_YEARS[bi]
        if style == "edited":
            editors = [person(rng) for _ in range(2)]
            n_auth = 6
        else:
            editors = []
            n_auth = rng.randint(1, 3)
        book_authors = [person(rng) for _ in range(n_auth)]
        if bi == 1:
            book_authors = ["Ada Lovelace", "Alan Turing"]
        if bi == 3:
            editors = ["Ada Lovelace", "Grace Hopper"]
        parent = {
            "parent_doi": doi,
            "parent_kind": "book",
            "parent_title": title,
            "editors": editors,
        }
        for i in range(rng.randint(4, 7)):
            cid = f"book{bi:02d}-{i:02d}"
            if style == "edited":
                authors = [book_authors[(i + k) % n_auth] for k in range(2)]
            else:
                authors = list(book_authors)
            chapters.append(make_chapter(rng, cid, themes, year, parent, authors))

    for ji, (title, themes) in enumerate(JOURNALS):
        doi = f"10.1007/journal-{ji + 1:03d}"
        for year in JOURNAL_YEARS:
            parent = {
                "parent_doi": doi,
                "parent_kind": "journal",
                "parent_title": title,
                "editors": [],
            }
            for i in range(rng.randint(3, 5)):
                cid = f"j{ji}-{year}-{i:02d}"
                authors = [person(rng) for _ in range(rng.randint(1, 3))]
                chapters.append(make_chapter(rng, cid, themes, year, parent, authors))

    rng.shuffle(chapters)
    with open(os.path.join(OUT, "metadata.jsonl"), "w", encoding="utf-8") as f:
        for c in chapters:
            f.write(json.dumps(c, ensure_ascii=False) + "\n")

    manifest = {
        "ontology": "ontology.jsonl",
        "metadata": "metadata.jsonl",
        "reference_year": REFERENCE_YEAR,
        "jaccard_threshold": 0.125,
        "cosine_threshold": 0.5,
        "inclusive_cosine": False,
        "output": "catalog.sbr",
        "budget": 15,
    }
    with open(os.path.join(OUT, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    print(f"{len(TOPICS)} topics, {len(chapters)} chapters")


if __name__ == "__main__":
    main()
