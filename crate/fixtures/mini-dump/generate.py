#!/usr/bin/env python3
"""Regenerates the mini-dump fixture: four MediaWiki XML exports, langlinks
as TSV and as an SQL INSERT dump, and the run config.

Output is byte-stable for a given script version. Run from any directory:

    python3 fixtures/mini-dump/generate.py
"""

import os
import random
from xml.sax.saxutils import escape

HERE = os.path.dirname(os.path.abspath(__file__))
LANGS = ["en", "de", "fr", "cs"]
SITES = {"en": "enwiki", "de": "dewiki", "fr": "frwiki", "cs": "cswiki"}

ONSETS = {
    "en": ["b", "c", "d", "f", "g", "h", "l", "m", "n", "p", "r", "s", "t", "w", "st", "tr", "br", "sh"],
    "de": ["b", "d", "f", "g", "h", "k", "l", "m", "n", "r", "s", "t", "w", "z", "sch", "st", "kr", "pf"],
    "fr": ["b", "c", "d", "f", "g", "j", "l", "m", "n", "p", "r", "s", "t", "v", "ch", "gr", "pl", "qu"],
    "cs": ["b", "c", "d", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "st", "kr", "pr"],
}
NUCLEI = {
    "en": ["a", "e", "i", "o", "u", "ea", "oo", "ai"],
    "de": ["a", "e", "i", "o", "u", "ei", "au", "ie"],
    "fr": ["a", "e", "i", "o", "u", "ou", "ai", "eau"],
    "cs": ["a", "e", "i", "o", "u", "y", "ou", "ie"],
}
CODAS = {
    "en": ["", "n", "t", "r", "l", "s", "nd", "ck"],
    "de": ["", "n", "t", "r", "l", "s", "ng", "ch"],
    "fr": ["", "n", "t", "r", "l", "s", "nt", "x"],
    "cs": ["", "n", "t", "r", "l", "k", "m", "ch"],
}
FUNCTION_WORDS = {
    "en": "the of and in to a is was for on with as by from that it at which its".split(),
    "de": "der die das und in von zu mit den ist im des auf für als ein eine dem".split(),
    "fr": "le la les de des et en du un une est dans pour par sur au qui avec".split(),
    "cs": "a v na se je z do s k o ve by jako pro od za po jeho které".split(),
}

rng = random.Random(20240611)


def word(lang, syllables=None):
    n = syllables or rng.choice([1, 2, 2, 3])
    return "".join(rng.choice(ONSETS[lang]) + rng.choice(NUCLEI[lang]) + rng.choice(CODAS[lang]) for _ in range(n))


def vocab(lang, size):
    out = []
    seen = set(FUNCTION_WORDS[lang])
    while len(out) < size:
        w = word(lang)
        if len(w) > 2 and w not in seen:
            seen.add(w)
            out.append(w)
    return out


def sentence(lang, pools, length):
    words = []
    for _ in range(length):
        pool = rng.choices(pools, weights=[p[1] for p in pools])[0][0]
        words.append(rng.choice(pool))
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def paragraph(lang, pools, sentences, lo=10, hi=16):
    return " ".join(sentence(lang, pools, rng.randint(lo, hi)) for _ in range(sentences))


def decorate(text, lang, links):
    """Adds inline markup that extraction must strip without losing words."""
    words = text.split(" ")
    if len(words) > 8:
        i = rng.randrange(1, len(words) - 4)
        w = words[i].rstrip(".")
        if w == words[i] and w.isalpha():
            target = links[rng.randrange(len(links))] if links else w
            words[i] = f"[[{target}|{w}]]"
        j = rng.randrange(1, len(words) - 2)
        if words[j].isalpha():
            words[j] = f"'''{words[j]}'''"
    out = " ".join(words)
    if rng.random() < 0.5:
        out = out.replace(". ", ".<ref>{{cite web |url=http://example.org/" + word(lang) + " |title=" + word(lang) + "}}</ref> ", 1)
    return out


class Article:
    def __init__(self, lang, title, lead, sections, extra=""):
        self.lang, self.title, self.lead, self.sections, self.extra = lang, title, lead, sections, extra

    def markup(self):
        parts = ["{{Infobox topic\n| name = " + self.title + "\n| image = x.jpg\n| note = {{nowrap|" + word(self.lang) + "}}\n}}"]
        parts.append("<!-- " + word(self.lang) + " -->")
        parts.extend(self.lead)
        for heading, level, paras in self.sections:
            bar = "=" * level
            parts.append(f"{bar} {heading} {bar}")
            parts.extend(paras)
        if self.extra:
            parts.append(self.extra)
        parts.append(f"[[Category:{word(self.lang)}]]")
        return "\n\n".join(parts) + "\n"


def full_article(lang, title, topic, heads, distractors, body_paras=(5, 4), lead_sents=(3, 2), links=()):
    fw = FUNCTION_WORDS[lang]
    on_topic = [(fw, 2), (topic, 5)]
    lead = [decorate(paragraph(lang, on_topic, n), lang, links) for n in lead_sents]
    on, off = body_paras
    paras = [paragraph(lang, on_topic, rng.randint(5, 6)) for _ in range(on)]
    for _ in range(off):
        noise = vocab(lang, 40)
        paras.append(paragraph(lang, [(fw, 2), (noise, 8)], rng.randint(5, 6)))
    rng.shuffle(paras)
    paras = [decorate(p, lang, links) for p in paras]
    sections = []
    k = 0
    for h, size in zip(heads, [2, 2, 2, len(paras) - 6]):
        sections.append((h, 2, paras[k:k + size]))
        k += size
    # nested subsection under the second heading
    sub = sections[1]
    sections[1] = (sub[0], 2, sub[2][:1])
    sections.insert(2, (word(lang).capitalize(), 3, sub[2][1:]))
    return Article(lang, title, lead, sections)


def small_article(lang, title, topic, heads, n_paras, lead_sents=2, links=()):
    fw = FUNCTION_WORDS[lang]
    pools = [(fw, 5), (topic, 4)]
    lead = [decorate(paragraph(lang, pools, lead_sents), lang, links)]
    paras = [decorate(paragraph(lang, pools, 5), lang, links) for _ in range(n_paras)]
    half = max(1, n_paras // 2)
    sections = [(heads[0], 2, paras[:half])]
    if paras[half:]:
        sections.append((heads[1], 2, paras[half:]))
    return Article(lang, title, lead, sections)


def headings(lang, n):
    return [w.capitalize() for w in vocab(lang, n)]


def main():
    pages = {l: [] for l in LANGS}
    links = []  # (src_title, src_lang, tgt_lang, tgt_title)
    head_pool = {l: headings(l, 8) for l in LANGS}

    def heads(lang):
        return rng.sample(head_pool[lang], 4)

    def link_cluster(titles):
        langs = [l for l in LANGS if l in titles]
        for i, a in enumerate(langs):
            for b in langs[i + 1:]:
                links.append((titles[a].replace(" ", "_"), a, b, titles[b].replace(" ", "_")))

    def title(lang):
        return " ".join(w.capitalize() if i == 0 else w for i, w in enumerate([word(lang, 2), word(lang, 1)]))

    # F1..F6: full clusters in every language
    for i in range(6):
        titles = {l: title(l) for l in LANGS}
        if i == 0:
            titles["en"], titles["fr"] = "Olive oil", "Huile d'olive"
        for l in LANGS:
            topic = vocab(l, 25)
            pages[l].append(full_article(l, titles[l], topic, heads(l), None, links=[titles[l]]))
        link_cluster(titles)

    # P1: en, de, fr only
    titles = {l: title(l) for l in ["en", "de", "fr"]}
    for l in titles:
        pages[l].append(full_article(l, titles[l], vocab(l, 25), heads(l), None))
    link_cluster(titles)

    # M1: linked in all four, but the cs page is absent from the dump
    titles = {l: title(l) for l in LANGS}
    for l in ["en", "de", "fr"]:
        pages[l].append(full_article(l, titles[l], vocab(l, 25), heads(l), None))
    link_cluster(titles)

    # S1: en body of about 100 tokens
    titles = {l: title(l) for l in LANGS}
    for l in LANGS:
        topic = vocab(l, 25)
        if l == "en":
            art = Article(l, titles[l], [paragraph(l, [(FUNCTION_WORDS[l], 5), (topic, 4)], 3)],
                          [(heads(l)[0], 2, [paragraph(l, [(FUNCTION_WORDS[l], 5), (topic, 4)], 6, 12, 14)])])
        else:
            art = full_article(l, titles[l], topic, heads(l), None)
        pages[l].append(art)
    link_cluster(titles)

    # L1: de lead of 7 tokens
    titles = {l: title(l) for l in LANGS}
    for l in LANGS:
        art = full_article(l, titles[l], vocab(l, 25), heads(l), None)
        if l == "de":
            art.lead = [sentence(l, [(FUNCTION_WORDS[l], 1), (vocab(l, 5), 1)], 6)]
        pages[l].append(art)
    link_cluster(titles)

    # E1..E12: en-de only, bodies around 350 tokens
    for _ in range(12):
        titles = {l: title(l) for l in ["en", "de"]}
        for l in titles:
            pages[l].append(small_article(l, titles[l], vocab(l, 20), heads(l), 5))
        link_cluster(titles)

    # conflict: two en titles reach the same fr title
    fr_title = title("fr")
    en_a, en_b = title("en"), title("en")
    pages["fr"].append(full_article("fr", fr_title, vocab("fr", 25), heads("fr"), None))
    for t in (en_a, en_b):
        pages["en"].append(full_article("en", t, vocab("en", 25), heads("en"), None))
    links.append((en_a.replace(" ", "_"), "en", "fr", fr_title.replace(" ", "_")))
    links.append((en_b.replace(" ", "_"), "en", "fr", fr_title.replace(" ", "_")))

    # links into a language outside the configured set
    links.append(("Olive_oil", "en", "it", "Olio_di_oliva"))

    # extra pages that must be skipped or stay unaligned
    redirects = {
        "en": ("Olive Oil", "#REDIRECT [[Olive oil]]\n"),
        "fr": ("Huile olive", "#REDIRECTION [[Huile d'olive]]\n"),
    }
    specials = [
        ("en", "Talk:Olive oil", 1, "Discussion of the article.\n"),
        ("en", "Orphan " + word("en"), 0, None),
        ("de", "Leer " + word("de"), 0, "== " + word("de") + " ==\n\n" + paragraph("de", [(FUNCTION_WORDS["de"], 1)], 3) + "\n"),
    ]

    ids = {l: 100 for l in LANGS}
    page_ids = {}
    for l in LANGS:
        out = [f'<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/" xml:lang="{l}">',
               f"  <siteinfo>\n    <sitename>Wikipedia</sitename>\n    <dbname>{SITES[l]}</dbname>\n  </siteinfo>"]

        def emit(t, ns, text, redirect=None):
            ids[l] += 1
            page_ids[(l, t)] = ids[l]
            red = f'\n    <redirect title="{escape(redirect)}" />' if redirect else ""
            out.append(
                f"  <page>\n    <title>{escape(t)}</title>\n    <ns>{ns}</ns>\n    <id>{ids[l]}</id>{red}\n"
                f"    <revision>\n      <id>{ids[l] * 10}</id>\n      <timestamp>2021-03-01T00:00:00Z</timestamp>\n"
                f'      <text bytes="{len(text.encode())}" xml:space="preserve">{escape(text)}</text>\n    </revision>\n  </page>'
            )

        for art in pages[l]:
            emit(art.title, 0, art.markup())
        if l in redirects:
            t, text = redirects[l]
            emit(t, 0, text, redirect=text.split("[[")[1].split("]]")[0])
        for lang, t, ns, text in specials:
            if lang == l:
                if text is None:
                    text = full_article(l, t, vocab(l, 25), heads(l), None).markup()
                emit(t, ns, text)
        out.append("</mediawiki>\n")
        with open(os.path.join(HERE, f"{SITES[l]}.xml"), "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(out))

    with open(os.path.join(HERE, "langlinks.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for row in links:
            f.write("\t".join(row) + "\n")

    # enwiki langlinks as MediaWiki SQL: (ll_from, ll_lang, ll_title)
    rows = []
    for src_title, src_lang, tgt_lang, tgt_title in links:
        if src_lang != "en":
            continue
        pid = page_ids[("en", src_title.replace("_", " "))]
        esc = tgt_title.replace("_", " ").replace("\\", "\\\\").replace("'", "\\'")
        rows.append(f"({pid},'{tgt_lang}','{esc}')")
    with open(os.path.join(HERE, "enwiki-langlinks.sql"), "w", encoding="utf-8", newline="\n") as f:
        f.write("-- MySQL dump\n")
        f.write("CREATE TABLE `langlinks` (\n  `ll_from` int(8) unsigned NOT NULL DEFAULT 0,\n"
                "  `ll_lang` varbinary(35) NOT NULL DEFAULT '',\n  `ll_title` varbinary(255) NOT NULL DEFAULT ''\n);\n")
        for start in range(0, len(rows), 10):
            f.write("INSERT INTO `langlinks` VALUES " + ",".join(rows[start:start + 10]) + ";\n")


if __name__ == "__main__":
    main()
