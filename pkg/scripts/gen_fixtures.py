#!/usr/bin/env python3
"""Regenerate the bundled Saeedeh fixture set under fixtures/saeedeh/.

Writes snippets.json, the page HTML files (keyed by URL hash), the
per-document annotation files (entity spans computed against the exact
raw_text the pipeline produces), and the ground-truth card.  Run from the
repository root after changing any fixture content below.
"""

import json
import os
import re
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from emergekg.corpus import (  # noqa: E402
    FixturePageFetcher,
    Snippet,
    extend_snippet,
    url_fixture_name,
)

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "fixtures", "saeedeh")

SNIPPETS = [
    {
        "rank": 1,
        "title": "Saeedeh Shekarpour - Home",
        "body": (
            "Saeedeh Shekarpour Assistant Professor Department of Computer Science "
            "University of Dayton News and Opportunities am founding CANAB: Cognitive "
            "ANalytics Lab in the University of Dayton, looking for talented, "
            "hardworking and passionate students."
        ),
        "url": "https://saeedeh-shekarpour.example.org/",
    },
    {
        "rank": 2,
        "title": "Saeedeh Shekarpour | University of Dayton",
        "body": (
            "Saeedeh Shekarpour is an Assistant Professor at the University of Dayton. "
            "Her group studies question answering over linked knowledge."
        ),
        "url": "https://udayton.example.edu/directory/saeedeh-shekarpour",
    },
    {
        "rank": 3,
        "title": "Saeedeh Shekarpour - Knoesis Center",
        "body": (
            "Saeedeh Shekarpour worked at the Knoesis Center with Amit Sheth in Dayton, "
            "Ohio before joining the University of Dayton as Assistant Professor."
        ),
        "url": "https://knoesis.example.org/people/saeedeh",
    },
    {
        "rank": 4,
        "title": "Saeedeh Shekarpour - PhD",
        "body": (
            "Saeedeh Shekarpour received her doctorate from the University of Bonn in "
            "Germany, supervised by Sören Auer, and later became an Assistant Professor."
        ),
        "url": "https://bonn.example.de/alumni/shekarpour",
    },
    {
        "rank": 5,
        "title": "Publications - Saeedeh Shekarpour",
        "body": (
            "Publications by Saeedeh Shekarpour, Assistant Professor. Recent news about "
            "her students and papers."
        ),
        "url": "https://scholar.example.com/shekarpour",
    },
    {
        "rank": 6,
        "title": "Saeedeh Shekarpour - Profile",
        "body": (
            "Saeedeh Shekarpour profile: Assistant Professor, mentoring students at the "
            "University of Dayton."
        ),
        "url": "https://profiles.example.net/saeedeh-shekarpour",
    },
    {
        "rank": 7,
        "title": "Talk by Saeedeh Shekarpour",
        "body": (
            "Seminar: Saeedeh Shekarpour, Assistant Professor, speaks to students about "
            "semantic search at the University of Dayton."
        ),
        "url": "https://events.example.org/talks/shekarpour",
    },
    {
        "rank": 8,
        "title": "Saeedeh Shekarpour (@saeedeh)",
        "body": "Saeedeh Shekarpour, Assistant Professor, Dayton.",
        # page intentionally absent from pages/: the pipeline degrades to the body
        "url": "https://social.example.com/saeedeh",
    },
]

PAGES = {
    "https://saeedeh-shekarpour.example.org/": """<!DOCTYPE html>
<html><head><title>Saeedeh Shekarpour</title>
<style>body { font-family: serif; } .nav { color: #333; }</style>
<script>var tracker = "do not index me"; console.log(tracker);</script>
</head>
<body>
<h1>Saeedeh Shekarpour</h1>
<p>I am an Assistant Professor in the Department of Computer Science at the
University of Dayton. Before that I was a researcher at the Knoesis Center
and at the University of Bonn in Germany.</p>
<h2>News</h2>
<p>News from CANAB: our students presented two papers this winter. More news for students will be posted
here.</p>
<p>As an Assistant Professor I teach question answering and knowledge graphs.
Sören Auer and Amit Sheth have been wonderful mentors.</p>
</body></html>
""",
    "https://udayton.example.edu/directory/saeedeh-shekarpour": """<!DOCTYPE html>
<html><head><title>Directory</title>
<script type="text/javascript">window.analytics = {page: "directory"};</script>
</head>
<body>
<h1>Saeedeh Shekarpour, Assistant Professor</h1>
<p>The University of Dayton welcomes Saeedeh Shekarpour as Assistant Professor.
A professor in the Department of Computer Science, she leads seminars for
students, and her students build systems that resolve user queries.</p>
<p>Campus news: the latest news digest mentions her award.</p>
</body></html>
""",
    "https://knoesis.example.org/people/saeedeh": """<!DOCTYPE html>
<html><head><title>Knoesis Center - People</title>
<style>.card { border: 1px solid #999; }</style></head>
<body>
<h1>Saeedeh Shekarpour</h1>
<p>Saeedeh Shekarpour was a research scientist at the Knoesis Center in Dayton,
Ohio, working with Amit Sheth. She is now an Assistant Professor at the
University of Dayton.</p>
<p>Center news: read the news interview where she advises students on a career
in semantics.</p>
</body></html>
""",
    "https://bonn.example.de/alumni/shekarpour": """<!DOCTYPE html>
<html><head><title>Alumni</title></head>
<body>
<h1>Saeedeh Shekarpour</h1>
<p>Saeedeh Shekarpour completed her thesis at the University of Bonn in Germany
with Sören Auer, who is now in Leipzig. She moved to Dayton and became an
Assistant Professor, and her students remember her lectures fondly.</p>
<p>Alumni news: she joined the University of Dayton.</p>
</body></html>
""",
    "https://scholar.example.com/shekarpour": """<!DOCTYPE html>
<html><head><title>Scholar profile</title>
<script>loadCitations();</script></head>
<body>
<h1>Saeedeh Shekarpour</h1>
<p>Selected works of Saeedeh Shekarpour, Assistant Professor at the
University of Dayton. Co-authors include Sören Auer and Amit Sheth.</p>
<p>Her students co-authored much of this research on question answering.</p>
</body></html>
""",
    "https://profiles.example.net/saeedeh-shekarpour": """<!DOCTYPE html>
<html><head><title>Profile</title></head>
<body>
<h1>Saeedeh Shekarpour</h1>
<p>Assistant Professor at the University of Dayton in Dayton, Ohio. Formerly
at the University of Bonn, Germany. News about her lab appears on the
department page, where students can find office hours.</p>
</body></html>
""",
    "https://events.example.org/talks/shekarpour": """<!DOCTYPE html>
<html><head><title>Events</title>
<style>h1 { margin: 0; }</style></head>
<body>
<h1>Lecture series</h1>
<p>Saeedeh Shekarpour of the University of Dayton speaks about question answering.
Students are welcome; attendance is free. She is an
Assistant Professor and leads CANAB.</p>
</body></html>
""",
}

# annotated longest-first so shorter surfaces inside longer spans are skipped
ENTITIES = [
    ("Department of Computer Science", "ORGANIZATION"),
    ("Cognitive ANalytics Lab", "ORGANIZATION"),
    ("University of Dayton", "ORGANIZATION"),
    ("University of Bonn", "ORGANIZATION"),
    ("Saeedeh Shekarpour", "PERSON"),
    ("Knoesis Center", "ORGANIZATION"),
    ("Sören Auer", "PERSON"),
    ("Amit Sheth", "PERSON"),
    ("Germany", "LOCATION"),
    ("Leipzig", "LOCATION"),
    ("Dayton", "LOCATION"),
    ("CANAB", "ORGANIZATION"),
    ("Ohio", "LOCATION"),
    ("Bonn", "LOCATION"),
]

TRUTH = {
    "entity": "Saeedeh Shekarpour",
    "card": [
        "Sören Auer",
        "Amit Sheth",
        "University of Bonn",
        "University of Dayton",
        "Knoesis Center",
        "Germany",
        "Dayton",
    ],
}


def annotate(raw_text):
    spans = []
    for surface, ctype in ENTITIES:
        for m in re.finditer(r"(?<![^\W_])" + re.escape(surface) + r"(?![^\W_])", raw_text):
            s, e = m.start(), m.end()
            if any(s >= s0 and e <= e0 for s0, e0, _ in spans):
                continue  # already inside a longer mention
            spans.append((s, e, ctype))
    spans.sort()
    return [{"start": s, "end": e, "type": t} for s, e, t in spans]


def main():
    os.makedirs(os.path.join(FIXTURE_DIR, "pages"), exist_ok=True)
    os.makedirs(os.path.join(FIXTURE_DIR, "annotations"), exist_ok=True)

    with open(os.path.join(FIXTURE_DIR, "snippets.json"), "w", encoding="utf-8") as fh:
        json.dump(SNIPPETS, fh, ensure_ascii=False, indent=2)
        fh.write("\n")

    for url, html in PAGES.items():
        path = os.path.join(FIXTURE_DIR, "pages", url_fixture_name(url))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(html)

    fetcher = FixturePageFetcher(FIXTURE_DIR)
    for raw in SNIPPETS:
        snippet = Snippet(rank=raw["rank"], title=raw["title"], body=raw["body"], url=raw["url"])
        doc = extend_snippet(snippet, fetcher)
        ann = annotate(doc.raw_text)
        out = os.path.join(FIXTURE_DIR, "annotations", f"{snippet.rank}.json")
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(ann, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
        print(f"rank {snippet.rank}: {len(ann)} mentions, degraded={doc.degraded}")

    with open(os.path.join(FIXTURE_DIR, "truth.json"), "w", encoding="utf-8") as fh:
        json.dump(TRUTH, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
