#!/usr/bin/env python3
"""Regenerates the offline test corpus under tests/fixtures.

Output is a pure function of the seed below, so re-running leaves the tree
unchanged.
"""

import argparse
import json
import random
from pathlib import Path

SEED = 20201019
DIM = 16

TOPICS = {
    "vaccine": ["vaccine", "vaccines", "vaccination", "immunization", "dose", "doses", "measles",
                "antibodies", "pediatric", "clinical", "trial", "autism", "immunity", "booster"],
    "climate": ["climate", "emissions", "carbon", "warming", "temperature", "glaciers", "sea",
                "levels", "greenhouse", "arctic", "drought", "heatwave", "coal", "renewable"],
    "economy": ["unemployment", "inflation", "wages", "jobs", "economy", "deficit", "tariffs",
                "exports", "recession", "budget", "taxes", "payroll", "growth", "manufacturing"],
    "election": ["election", "ballots", "voters", "turnout", "polling", "fraud", "precincts",
                 "recount", "candidate", "campaign", "senate", "districts", "registration", "absentee"],
    "space": ["rocket", "orbit", "satellite", "astronauts", "lunar", "mars", "launch", "spacecraft",
              "telescope", "asteroid", "probe", "mission", "payload", "station"],
}

FUNCTION_WORDS = ["the", "a", "an", "of", "in", "on", "to", "and", "by", "for", "with", "that",
                  "is", "was", "were", "are", "has", "have", "it", "this", "as", "at", "from",
                  "said", "says", "last", "year", "new", "report", "officials", "according",
                  "percent", "more", "than", "over", "after", "about", "some", "critics",
                  "experts", "data", "showed", "rose", "fell", "claimed", "state", "national"]

SUBJECTS = ["The governor", "A senator", "The ministry", "Researchers", "The agency", "Analysts",
            "The mayor", "A spokesperson"]

TEMPLATES = [
    "{S} said {a} {b} rose by {n} percent last year.",
    "{S} reported that {a} and {b} fell sharply after the {c} report.",
    "According to new data, {a} {b} has more than doubled since {y}.",
    "Experts warned that {a} could affect {b} and {c} over the next decade.",
    "Critics claimed the {a} figures on {b} were misleading.",
    "{S} confirmed that {a} {b} reached {n} in {y}.",
    "The {a} {b} was cited by officials as evidence of {c}.",
    "Some {a} data showed {b} {c} at record levels.",
]

NOISE_SENTENCES = [
    "Subscribe to our newsletter for daily updates.",
    "Photo credits belong to their respective owners.",
    "Comments are moderated before they appear.",
]


def sentence(rng, topic):
    words = TOPICS[topic]
    a, b, c = rng.sample(words, 3)
    return rng.choice(TEMPLATES).format(S=rng.choice(SUBJECTS), a=a, b=b, c=c,
                                        n=rng.randint(2, 95), y=rng.randint(1990, 2019))


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def html_escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def make_web(rng, out):
    """50 topical pages with page chrome, scripts and mixed-topic paragraphs."""
    web = out / "web"
    manifest = {}
    topics = list(TOPICS)
    for i in range(50):
        topic = topics[i % len(topics)]
        other = topics[(i + 1 + i // len(topics)) % len(topics)]
        paragraphs = []
        for p in range(rng.randint(2, 4)):
            sents = []
            for _ in range(rng.randint(2, 4)):
                sents.append(sentence(rng, topic if rng.random() < 0.75 else other))
            paragraphs.append(" ".join(sents))
        name = f"page_{i:02d}.html"
        title = f"{topic.capitalize()} report {i}"
        meta = ""
        if i % 3 == 0:
            meta += f'<meta name="author" content="Reporter {i % 7}">\n'
        if i % 4 == 0:
            meta += f'<meta property="article:published_time" content="2019-{1 + i % 12:02d}-{1 + i % 27:02d}T08:00:00Z">\n'
        body = "\n".join(f"<p>{html_escape(p)}</p>" for p in paragraphs)
        page = (f"<!DOCTYPE html>\n<html><head><title>{title}</title>\n{meta}"
                f"<script>var tracking = 'vaccine climate economy';</script>\n"
                f"<style>p {{ color: #333; }}</style></head>\n<body>\n"
                f"<nav><p>Home | World | Politics | Science</p></nav>\n"
                f"<article><h1>{title}</h1>\n{body}\n</article>\n"
                f"<footer><p>{rng.choice(NOISE_SENTENCES)}</p></footer>\n</body></html>\n")
        write(web / name, page)
        manifest[name] = {"url": f"https://{topic}-news{i % 4}.example.com/articles/{i}", "title": title}
    write(web / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def make_embeddings(rng, out):
    """Topic-clustered vectors: a topic's words sit near a shared centre,
    function words are short vectors, so sentence means separate by topic."""
    lines = []
    centres = {}
    for t in TOPICS:
        centres[t] = [rng.gauss(0, 1) for _ in range(DIM)]
    seen = set()
    for t, words in TOPICS.items():
        for w in words:
            if w in seen:
                continue
            seen.add(w)
            vec = [c + 0.45 * rng.gauss(0, 1) for c in centres[t]]
            lines.append(w + " " + " ".join(f"{v:.6f}" for v in vec))
    for w in FUNCTION_WORDS:
        if w in seen:
            continue
        seen.add(w)
        vec = [0.08 * rng.gauss(0, 1) for _ in range(DIM)]
        lines.append(w + " " + " ".join(f"{v:.6f}" for v in vec))
    write(out / "embeddings.txt", "\n".join(lines) + "\n")


# Hand-written extraction cases: (html, title, authors, date, body sentences).
EXTRACTION = [
    ("<html><head><title>Plain page</title></head><body><p>First sentence here. Second one follows.</p></body></html>",
     "Plain page", [], None, ["First sentence here.", "Second one follows."]),
    ("<html><head><title>Scripts</title><script>document.write('Hidden text.');</script>"
     "<style>.x { content: 'Styled.'; }</style></head><body><p>Visible prose only.</p>"
     "<script type=\"text/javascript\">var p = '<p>not a paragraph</p>';</script></body></html>",
     "Scripts", [], None, ["Visible prose only."]),
    ("<html><head><title>Chrome</title></head><body><nav><p>Menu item.</p></nav><header><p>Site banner.</p></header>"
     "<main><p>The story starts here. It continues.</p></main><aside><p>Related links.</p></aside>"
     "<footer><p>Copyright notice.</p></footer></body></html>",
     "Chrome", [], None, ["The story starts here.", "It continues."]),
    ("<html><head><title>Meta author</title><meta name=\"author\" content=\"Jane Doe\">"
     "<meta property=\"article:published_time\" content=\"2020-03-15T10:00:00Z\"></head>"
     "<body><p>Officials confirmed the figure.</p></body></html>",
     "Meta author", ["Jane Doe"], "2020-03-15", ["Officials confirmed the figure."]),
    ("<html><body><h1>Heading Title</h1><p>No title element here. The heading is used.</p></body></html>",
     "Heading Title", [], None, ["No title element here.", "The heading is used."]),
    ("<html><head><title>Entities</title></head><body><p>Prices rose 5&nbsp;percent &amp; wages fell. "
     "He said &quot;no&quot; &#8212; twice.</p></body></html>",
     "Entities", [], None, ["Prices rose 5 percent & wages fell.", "He said \"no\" — twice."]),
    ("<html><head><title>Inline</title></head><body><p>The <b>senator</b> said <a href=\"#\">taxes</a> rose. "
     "Dr. Smith disagreed with <em>that</em> claim.</p><!-- <p>Commented out.</p> --></body></html>",
     "Inline", [], None, ["The senator said taxes rose.", "Dr. Smith disagreed with that claim."]),
    ("<html><head><title>Quote</title><meta name=\"date\" content=\"2018-11-02\"></head><body>"
     "<p>Before the quote.</p><blockquote>A quoted sentence. Another quoted one!</blockquote>"
     "<p>After the quote?</p></body></html>",
     "Quote", [], "2018-11-02", ["Before the quote.", "A quoted sentence.", "Another quoted one!", "After the quote?"]),
    ("<html><head><title>Unclosed</title><meta name=\"author\" content=\"A. Writer\"></head><body>"
     "<p>First paragraph has no end tag.<p>Second paragraph also open.<div>Layout text.</div></body></html>",
     "Unclosed", ["A. Writer"], None, ["First paragraph has no end tag.", "Second paragraph also open."]),
    ("<html><head><title>Noscript</title></head><body><noscript><p>Enable JavaScript.</p></noscript>"
     "<form><p>Sign in here.</p></form><p>U.S. officials met on Monday. They agreed.</p></body></html>",
     "Noscript", [], None, ["U.S. officials met on Monday.", "They agreed."]),
]


def make_extraction(out):
    d = out / "extraction"
    for i, (html, title, authors, date, sentences) in enumerate(EXTRACTION):
        write(d / f"case_{i:02d}.html", html + "\n")
        golden = [f"title: {title}", f"authors: {'; '.join(authors)}", f"date: {date or ''}", ""] + sentences
        write(d / f"case_{i:02d}.txt", "\n".join(golden) + "\n")


SEGMENTS = [
    "Dr. Smith spoke.", "He left.", "The vote was close!", "Was it fair?", "Officials said yes.",
    "Mr. Jones disagreed.", "He cited e.g. the turnout figures.", "Mrs. Lee asked for a recount.",
    "The count took three days.", "Results came in late.", "Ms. Park won by 312 votes.",
    "The U.S. embassy issued a statement.", "It praised the process.", "Critics were not convinced!",
    "They filed a lawsuit.", "The court heard arguments.", "Judges ruled quickly.", "Why so fast?",
    "The law required it.", "Turnout reached 64.5 percent.", "That was a record.",
    "Analysts were surprised.", "Some blamed the weather.", "Others praised mail voting.",
    "Costs rose by 1,200 dollars per precinct.", "Budgets were strained.", "Counties asked for aid.",
    "The state refused.", "Negotiations stalled.", "A deal came in June.", "It included new machines.",
    "Vendors competed for the contract.", "One firm won.", "Its bid was lowest.",
    "Auditors checked the machines, i.e. every unit.", "No faults were found.", "Confidence improved.",
    "Polls showed rising trust.", "Young voters were most positive.", "Older voters were cautious.",
    "Campaigns adjusted their messages.", "Ads focused on security.", "Spending hit new highs.",
    "Donors gave more than ever.", "Small gifts grew fastest.", "Large gifts fell.",
    "Regulators took note etc. and then acted.", "New rules followed.", "They take effect next year.",
    "Everyone is watching.",
]


def make_segmentation(out):
    assert len(SEGMENTS) == 50
    d = out / "segmentation"
    # Mixed separators: spaces, newlines and a paragraph break.
    chunks = []
    for i, s in enumerate(SEGMENTS):
        sep = "\n" if i % 7 == 6 else ("\n\n" if i % 13 == 12 else " ")
        chunks.append(s + sep)
    write(d / "input.txt", "".join(chunks).rstrip() + "\n")
    write(d / "expected.txt", "\n".join(SEGMENTS) + "\n")


def make_planted(rng, out):
    """Article whose first sentence is a numeric claim among chit-chat."""
    lines = [
        "Unemployment fell by 12 percent over the last two years.",
        "Thank you all for coming tonight.",
        "It is a pleasure to be here with you.",
        "Let me tell you a little about my family.",
        "We really appreciate your warm welcome.",
        "I want to thank our hosts once again.",
        "Good evening and welcome, everyone.",
        "That is a great question, thank you.",
        "Please enjoy the rest of the evening.",
        "We look forward to seeing you soon.",
    ]
    write(out / "articles" / "planted_claim.txt", " ".join(lines) + "\n")


def make_sadhan_toy(rng, out):
    """Tiny dataset in the one-directory-per-example layout."""
    d = out / "sadhan_toy"
    support = ["Records confirmed the figure is accurate.", "Independent auditors verified the statement."]
    refute = ["Records show the figure is fabricated.", "Independent auditors debunked the statement."]
    for i in range(8):
        topic = list(TOPICS)[i % len(TOPICS)]
        words = TOPICS[topic]
        label = "true" if i % 2 == 0 else "false"
        ex = d / f"example_{i:02d}"
        write(ex / "claim.txt", f"{SUBJECTS[i % len(SUBJECTS)]} said {words[0]} {words[1]} rose by {10 + i} percent.\n")
        write(ex / "label", label + "\n")
        write(ex / "aspects", f"topic={topic}\nauthor=author{i % 3}\n")
        pool = support if label == "true" else refute
        for k in range(2):
            write(ex / "evidence" / f"doc{k}.txt", f"The claim about {words[0]} was reviewed. {pool[(i + k) % 2]}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    rng = random.Random(SEED)
    make_web(rng, out)
    make_embeddings(rng, out)
    make_extraction(out)
    make_segmentation(out)
    make_planted(rng, out)
    make_sadhan_toy(rng, out)


if __name__ == "__main__":
    main()
