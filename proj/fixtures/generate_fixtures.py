#!/usr/bin/env python3
# Copyright 2026 The April Summarisation Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the synthetic news-style clusters under fixtures/.

Each cluster is built around "core" facts that recur across documents and
appear in the reference summaries, "peripheral" facts that recur less often,
and boilerplate or background sentences that are frequent in the documents
but never in the references. The synth-* clusters are sized like newswire
evaluation topics (about ten documents of 20-30 sentences, four abstractive
references of 100 words) and draw names from a per-cluster lexicon, so their
vocabulary is much larger than the 200 features the learners use. The tiny-*
and micro-* clusters keep a small fixed lexicon for hand-checked tests.
Output is deterministic.

    python3 fixtures/generate_fixtures.py
"""

import os
import random
import shutil

HERE = os.path.dirname(os.path.abspath(__file__))

PEOPLE = [
    "governor alvarez", "mayor okafor", "senator lindqvist", "minister tanaka",
    "director moreau", "chief petrov", "judge haddad", "commissioner novak",
    "professor mbeki", "captain ferreira", "inspector walsh", "president dumont",
    "secretary kowalski", "ambassador reyes", "doctor ingram", "general castillo",
]
ORGS = [
    "the city council", "the port authority", "the health ministry",
    "the national weather service", "the transit agency", "the water board",
    "the regional court", "the energy company", "the university hospital",
    "the fisheries council", "the rail operator", "the election commission",
    "the school district", "the forest service", "the central bank",
]
PLACES = [
    "northbridge", "the harbor district", "east valley", "the river delta",
    "port selwyn", "the coastal highway", "granite falls", "lake morrow",
    "the old quarter", "south ridge", "marlow county", "the capital",
]
VERBS = [
    "approved", "rejected", "announced", "delayed", "expanded", "suspended",
    "investigated", "funded", "closed", "reopened", "evacuated", "inspected",
    "criticised", "defended", "launched", "cancelled",
]
OBJECTS = [
    "a flood barrier", "the bridge repairs", "a new hospital wing",
    "the water rationing plan", "an emergency shelter", "the tax increase",
    "the vaccine programme", "a rail extension", "the fishing quota",
    "the power plant", "a wildfire response team", "the housing project",
    "the budget proposal", "a cleanup operation", "the school closures",
    "the ferry service",
]
AMOUNTS = [
    "12 million dollars", "340 workers", "five new stations", "two thousand homes",
    "eighty families", "nine districts", "forty kilometres", "three ships",
    "600 beds", "seventeen schools", "a third of the budget", "half the fleet",
]
DAYS = ["on monday", "on tuesday", "on wednesday", "on thursday", "on friday",
        "late on saturday", "early on sunday", "last week", "this month"]
REASONS = [
    "after heavy storms damaged the area", "because costs had doubled",
    "following complaints from residents", "after an audit found problems",
    "because of rising water levels", "after a fire spread overnight",
    "following a vote by local members", "because supplies ran short",
    "after months of negotiation", "because inspectors found cracks",
]
BOILERPLATE = [
    "officials said in a statement that",
    "according to local media reports",
    "a spokesperson told reporters that",
    "it was not immediately clear whether",
    "sources familiar with the matter said",
    "in a press briefing officials confirmed that",
    "local residents told the newspaper that",
    "the agency said in an emailed statement that",
]
FILLER = [
    "the weather remained cold for much of the week",
    "traffic was heavy across the region during the morning",
    "several shops stayed closed for the holiday",
    "the story drew wide attention on social media",
    "further details were expected to be released later",
    "markets were mixed in early trading",
    "the event was attended by dozens of people",
    "a smaller ceremony was held in the afternoon",
    "critics and supporters gathered outside the building",
    "the annual festival went ahead as planned",
    "visitors were advised to check schedules before travelling",
    "the local team won its match on the same evening",
]
SYNONYMS = {
    "approved": "backed", "rejected": "turned down", "announced": "revealed",
    "delayed": "postponed", "expanded": "enlarged", "suspended": "halted",
    "investigated": "probed", "funded": "financed", "closed": "shut",
    "reopened": "restarted", "evacuated": "cleared", "inspected": "examined",
    "criticised": "condemned", "defended": "backed", "launched": "started",
    "cancelled": "scrapped", "new": "fresh", "homes": "houses",
    "workers": "staff", "storms": "gales", "residents": "locals",
    "costs": "expenses", "damaged": "hit", "found": "discovered",
}


def fact(rng):
    """A core or peripheral fact as a clause."""
    kind = rng.randrange(4)
    who = rng.choice(PEOPLE + ORGS)
    if kind == 0:
        return f"{who} {rng.choice(VERBS)} {rng.choice(OBJECTS)} in {rng.choice(PLACES)} {rng.choice(DAYS)}"
    if kind == 1:
        return f"{who} {rng.choice(VERBS)} {rng.choice(OBJECTS)} {rng.choice(REASONS)}"
    if kind == 2:
        return f"{rng.choice(OBJECTS)} in {rng.choice(PLACES)} will affect {rng.choice(AMOUNTS)}"
    return f"{who} said {rng.choice(OBJECTS)} would cost {rng.choice(AMOUNTS)}"


def paraphrase(rng, text, rate):
    out = []
    for tok in text.split():
        if tok in SYNONYMS and rng.random() < rate:
            out.extend(SYNONYMS[tok].split())
        else:
            out.append(tok)
    return " ".join(out)


def cap(sentence):
    return sentence[0].upper() + sentence[1:] + "."


def make_sentence(rng, facts, core, peripheral):
    r = rng.random()
    if r < 0.45:
        body = paraphrase(rng, facts[rng.choice(core)], 0.15)
    elif r < 0.75:
        body = paraphrase(rng, facts[rng.choice(peripheral)], 0.15)
    else:
        body = rng.choice(FILLER)
    if rng.random() < 0.5:
        body = f"{rng.choice(BOILERPLATE)} {body}"
    if rng.random() < 0.4:
        body = f"{body} and {rng.choice(FILLER)}"
    return cap(body)


def make_small_cluster(name, seed, n_docs, sents_per_doc, n_refs, min_len=None, max_len=None):
    rng = random.Random(seed)
    facts = [fact(rng) for _ in range(10)]
    core, peripheral = list(range(0, 5)), list(range(5, 10))
    docs = []
    for _ in range(n_docs):
        sentences = []
        while len(sentences) < sents_per_doc:
            s = make_sentence(rng, facts, core, peripheral)
            n = len(s.split())
            if min_len is not None and not (min_len <= n <= max_len):
                continue
            sentences.append(s)
        docs.append(sentences)
    refs = []
    for _ in range(n_refs):
        order = core[:] + rng.sample(peripheral, 1)
        rng.shuffle(order)
        words = []
        for k in order:
            words.extend(cap(paraphrase(rng, facts[k], 0.35)).split())
        refs.append(" ".join(words[:100]))
    write_cluster(name, docs, refs)


def write_cluster(name, docs, refs):
    root = os.path.join(HERE, name)
    shutil.rmtree(root, ignore_errors=True)
    os.makedirs(os.path.join(root, "docs"))
    os.makedirs(os.path.join(root, "refs"))
    for d, sentences in enumerate(docs):
        with open(os.path.join(root, "docs", f"d{d:02d}.txt"), "w") as f:
            f.write(" ".join(sentences) + "\n")
    for r, text in enumerate(refs):
        with open(os.path.join(root, "refs", f"r{r:02d}.txt"), "w") as f:
            f.write(text + "\n")


# ---------------------------------------------------------------- news-sized

SYLLABLES = [
    "ka", "lo", "mer", "vin", "sa", "tor", "el", "bra", "dun", "fi", "gar", "hol",
    "is", "jen", "ku", "lan", "mo", "nor", "pel", "quin", "ras", "sol", "tam",
    "ul", "ves", "wyn", "yar", "zel", "ro", "bek", "cas", "dro",
]
TITLES = [
    "governor", "mayor", "senator", "minister", "director", "chief", "judge",
    "commissioner", "professor", "captain", "inspector", "spokeswoman",
    "spokesman", "secretary", "ambassador", "doctor", "general", "chairman",
]
INSTITUTIONS = [
    "council", "authority", "ministry", "agency", "board", "court", "company",
    "hospital", "commission", "district", "service", "union", "bank",
    "institute", "foundation", "coalition",
]
PLACE_SUFFIXES = ["ton", "field", "ford", "mouth", "bury", "dale", "port", "wick", "stead"]
NEWS_VERBS = [
    ("approved", "approved"), ("rejected", "rejected"), ("announced", "announced"),
    ("delayed", "delayed"), ("expanded", "expanded"), ("suspended", "suspended"),
    ("investigated", "investigated"), ("funded", "funded"), ("closed", "closed"),
    ("reopened", "reopened"), ("evacuated", "evacuated"), ("inspected", "inspected"),
    ("criticised", "criticised"), ("defended", "defended"), ("launched", "launched"),
    ("cancelled", "cancelled"), ("blocked", "blocked"), ("backed", "backed"),
    ("reviewed", "reviewed"), ("ordered", "ordered"), ("halted", "halted"),
    ("restored", "restored"), ("proposed", "proposed"), ("challenged", "challenged"),
]
NOUNS = [
    "flood barrier", "bridge", "hospital wing", "rationing plan", "shelter",
    "tax increase", "vaccine programme", "rail extension", "fishing quota",
    "power plant", "response team", "housing project", "budget", "cleanup",
    "ferry service", "pipeline", "dam", "airport runway", "water supply",
    "curfew", "trade deal", "strike", "ceasefire", "election", "reservoir",
    "mine", "factory", "school", "clinic", "highway", "harbour", "levee",
    "bus network", "tunnel", "reactor", "market", "warehouse", "stadium",
]
ADJECTIVES = [
    "new", "disputed", "emergency", "regional", "planned", "temporary",
    "controversial", "long-awaited", "damaged", "ageing", "private", "public",
]
QUANTITIES = [
    "twelve", "forty", "three hundred", "two thousand", "eighty", "nine", "fifteen",
    "six hundred", "seventeen", "fifty", "one million", "250", "1,400", "31",
]
UNITS = [
    "million dollars", "workers", "families", "homes", "residents", "students",
    "jobs", "patients", "kilometres", "tonnes", "households", "vehicles",
]
TIMES = [
    "on monday", "on tuesday", "on wednesday", "on thursday", "on friday",
    "on saturday", "on sunday", "last week", "this month", "overnight",
    "earlier this year", "in march", "in october", "since january",
]
CAUSES = [
    "after heavy storms", "because costs had doubled", "following complaints",
    "after an audit", "because of rising water", "after a fire", "following a vote",
    "because supplies ran short", "after months of talks", "because of cracks",
    "after a court ruling", "amid protests", "after an outbreak", "amid a drought",
    "after an explosion", "because of a strike",
]
ATTRIBUTIONS = [
    "officials said that", "according to reports", "a spokesperson said",
    "it was unclear whether", "sources said", "officials confirmed that",
    "residents said", "the agency said", "analysts noted that",
    "witnesses said", "the statement added that", "records show that",
]
BACKGROUND_SUBJECTS = [
    "the weather", "traffic", "the region", "the economy", "the city",
    "local shops", "the market", "the crowd", "tourism", "the festival",
    "public transport", "the harvest", "the opposition", "the local team",
]
BACKGROUND_PREDICATES = [
    "remained quiet for most of the day", "was heavier than usual",
    "has changed a great deal over the years", "drew attention online",
    "was expected to recover slowly", "stayed busy through the evening",
    "was the subject of earlier reports", "has long been a concern for many",
    "went ahead as planned", "was discussed at length by commentators",
    "had been affected by similar events before", "showed little change",
]
BACKGROUND_VERBS = [
    "visited", "described", "recalled", "praised", "joined", "hosted", "painted",
    "mentioned", "photographed", "remembered", "celebrated", "organised",
    "welcomed", "followed", "watched", "renamed", "decorated", "surveyed",
]
BACKGROUND_OBJECTS = [
    "garden", "museum", "parade", "choir", "bakery", "library", "chapel",
    "orchard", "gallery", "fair", "lighthouse", "theatre", "square", "mill",
    "vineyard", "concert", "bookshop", "fountain",
]
NEWS_SYNONYMS = {
    "approved": "endorsed", "rejected": "refused", "announced": "unveiled",
    "delayed": "postponed", "expanded": "enlarged", "suspended": "paused",
    "investigated": "probed", "funded": "financed", "closed": "shut",
    "reopened": "restarted", "evacuated": "cleared", "inspected": "examined",
    "criticised": "attacked", "defended": "supported", "launched": "began",
    "cancelled": "scrapped", "blocked": "stopped", "backed": "supported",
    "reviewed": "assessed", "ordered": "demanded", "halted": "stopped",
    "restored": "repaired", "proposed": "suggested", "challenged": "disputed",
    "new": "fresh", "homes": "houses", "workers": "employees", "families": "households",
    "damaged": "hit", "storms": "rain", "costs": "prices", "said": "stated",
    "officials": "authorities", "residents": "locals", "plan": "scheme",
    "programme": "scheme", "project": "scheme", "team": "unit", "budget": "spending plan",
    "would": "will", "cost": "require", "affect": "hit", "after": "following",
}


def pseudo_word(rng, parts):
    return "".join(rng.choice(SYLLABLES) for _ in range(parts))


def lexicon(rng):
    """Per-cluster names so each cluster has its own content vocabulary."""
    people = [f"{rng.choice(TITLES)} {pseudo_word(rng, 2)}" for _ in range(10)]
    orgs = [f"the {pseudo_word(rng, 2)} {rng.choice(INSTITUTIONS)}" for _ in range(8)]
    places = [pseudo_word(rng, 2) + rng.choice(PLACE_SUFFIXES) for _ in range(8)]
    return people, orgs, places


def news_fact(rng, people, orgs, places):
    """A fact as a bag of slots; sentences realise different subsets."""
    return {
        "who": rng.choice(people + orgs),
        "verb": rng.choice(NEWS_VERBS),
        "what": f"the {rng.choice(ADJECTIVES)} {rng.choice(NOUNS)}",
        "where": rng.choice(places),
        "when": rng.choice(TIMES),
        "why": rng.choice(CAUSES),
        "amount": f"{rng.choice(QUANTITIES)} {rng.choice(UNITS)}",
        "speaker": rng.choice(people),
    }


def realise(rng, f):
    v, pp = f["verb"]
    templates = [
        f"{f['who']} {v} {f['what']} in {f['where']} {f['when']}",
        f"{f['what']} in {f['where']} was {pp} by {f['who']} {f['why']}",
        f"{f['who']} {v} {f['what']} {f['why']}",
        f"{f['when']} {f['who']} {v} {f['what']} which will affect {f['amount']}",
        f"{f['speaker']} said {f['what']} in {f['where']} would cost {f['amount']}",
        f"{f['what']} {f['why']} will affect {f['amount']} in {f['where']}",
        f"{f['who']} {v} {f['what']} {f['when']} and said it would affect {f['amount']}",
    ]
    return rng.choice(templates)


def background(rng, local):
    """Document-specific colour: its content words occur in one document."""
    subject = f"the {rng.choice(local)} {rng.choice(BACKGROUND_SUBJECTS)}"
    if rng.random() < 0.5:
        return f"{subject} {rng.choice(BACKGROUND_PREDICATES)}"
    return f"{subject} {rng.choice(BACKGROUND_VERBS)} the {rng.choice(local)} {rng.choice(BACKGROUND_OBJECTS)}"


def news_sentence(rng, facts, core, peripheral, local):
    r = rng.random()
    if r < 0.30:
        body = paraphrase_with(rng, realise(rng, facts[rng.choice(core)]), 0.2)
    elif r < 0.65:
        body = paraphrase_with(rng, realise(rng, facts[rng.choice(peripheral)]), 0.2)
    else:
        body = background(rng, local)
    if rng.random() < 0.4:
        body = f"{rng.choice(ATTRIBUTIONS)} {body}"
    if rng.random() < 0.3:
        body = f"{body} while {background(rng, local)}"
    return cap(body)


def paraphrase_with(rng, text, rate):
    out = []
    for tok in text.split():
        if tok in NEWS_SYNONYMS and rng.random() < rate:
            out.extend(NEWS_SYNONYMS[tok].split())
        else:
            out.append(tok)
    return " ".join(out)


def make_news_cluster(name, seed, n_docs, n_refs=4):
    rng = random.Random(seed)
    people, orgs, places = lexicon(rng)
    facts = [news_fact(rng, people, orgs, places) for _ in range(32)]
    core, peripheral = list(range(0, 8)), list(range(8, 32))
    docs = []
    for _ in range(n_docs):
        n = rng.randint(20, 30)
        local = [pseudo_word(rng, 3) for _ in range(8)]
        docs.append([news_sentence(rng, facts, core, peripheral, local) for _ in range(n)])
    refs = []
    for _ in range(n_refs):
        order = rng.sample(core, 6) + rng.sample(peripheral, 2)
        rng.shuffle(order)
        words = []
        for k in order:
            words.extend(cap(paraphrase_with(rng, realise(rng, facts[k]), 0.4)).split())
        refs.append(" ".join(words[:100]))
    write_cluster(name, docs, refs)


def main():
    for i in range(1, 21):
        rng = random.Random(7000 + i)
        make_news_cluster(f"synth-{i:02d}", 2000 + i, n_docs=rng.choice([8, 9, 10]))
    # Three short documents with a small lexicon, small enough to check
    # document frequencies by hand.
    make_small_cluster("tiny-01", 1001, n_docs=3, sents_per_doc=8, n_refs=3)
    # Eight sentences of 18..25 tokens: every pair fits a 50-token budget,
    # no triple does.
    make_small_cluster("micro-01", 77, n_docs=2, sents_per_doc=4, n_refs=2,
                       min_len=18, max_len=25)


if __name__ == "__main__":
    main()
