#!/usr/bin/env python3
"""Writes the bundled toy corpus under data/toy (deterministic for a seed).

Produces a small code-switched treebank, token-level language tags, word
normalization pairs for both languages, a bilingual lexicon, an English
wordlist, trigram LM corpora and 64-dim word vectors whose Hindi side is a
rotated copy of the English side plus noise.
"""

import argparse
import math
import os
import random

# clean English word -> noisy variants
EN = {
    "please": ["pls", "plz"], "tell": ["tel"], "me": [], "you": ["u"], "are": ["r"],
    "good": ["gud"], "movie": ["movi"], "friend": ["frnd"], "tomorrow": ["tmrw"],
    "message": ["msg"], "thanks": ["thnx"], "what": ["wat"], "send": ["snd"],
    "call": [], "watch": ["wtch"], "match": [], "song": [], "phone": ["fone"],
    "the": ["da"], "a": [], "love": ["luv"], "check": ["chk"], "i": [], "this": ["dis"],
    "really": ["rly"],
}
# Romanized Hindi -> (Devanagari, noisy variants)
HI = {
    "yaar": ("यार", ["yar"]), "kya": ("क्या", ["kia"]), "hai": ("है", ["h"]),
    "bahut": ("बहुत", ["bhut", "bohot"]), "accha": ("अच्छा", ["acha", "achha"]),
    "mera": ("मेरा", ["mra"]), "tum": ("तुम", ["tm"]), "main": ("मैं", ["mai"]),
    "kal": ("कल", []), "dekha": ("देखा", ["dekhaa"]), "bhai": ("भाई", ["bahi"]),
    "ka": ("का", []), "ko": ("को", []), "tha": ("था", []), "jo": ("जो", []),
    "naya": ("नया", ["nya"]), "gaya": ("गया", ["gya"]), "kho": ("खो", []),
    "chalo": ("चलो", ["chlo"]), "abhi": ("अभी", ["abi"]), "aaj": ("आज", ["aj"]),
    "pe": ("पे", []), "karo": ("करो", ["kro"]),
}
# vocabulary outside the treebank, used to fill the pair files and LM corpora
EN_EXTRA = ["home", "work", "office", "night", "party", "game", "team", "music", "book", "happy",
            "late", "food", "sleep", "rain", "weather", "nice", "come", "back", "story", "money",
            "ticket", "train", "market", "family", "doctor", "school", "water", "window", "summer",
            "winter", "paper", "letter", "mother", "father", "sister", "brother", "garden", "dinner",
            "morning", "evening"]
HI_EXTRA = {"khana": "खाना", "paani": "पानी", "din": "दिन", "raat": "रात", "log": "लोग",
            "kaam": "काम", "baat": "बात", "sab": "सब", "kuch": "कुछ", "pyaar": "प्यार",
            "dil": "दिल", "sach": "सच", "mausam": "मौसम", "khush": "खुश", "sapna": "सपना",
            "ghar": "घर", "dost": "दोस्त", "kitab": "किताब", "safar": "सफ़र", "bazaar": "बाज़ार",
            "subah": "सुबह", "shaam": "शाम", "gaana": "गाना", "khel": "खेल", "paisa": "पैसा",
            "chai": "चाय", "raasta": "रास्ता", "samay": "समय", "duniya": "दुनिया", "zindagi": "ज़िंदगी"}
NE = ["Rahul", "Delhi", "Priya", "Mumbai"]
ACRO = ["IPL", "TV", "BCCI"]
UNIV = ["!", "?", ":)", "..."]

LEXICON = [("यार", "friend"), ("दोस्त", "friend"), ("भाई", "brother"), ("अच्छा", "good"),
           ("बहुत", "very"), ("घर", "home"), ("आज", "today"), ("कल", "tomorrow"), ("देखा", "saw"),
           ("नया", "new"), ("क्या", "what"), ("तुम", "you"), ("मैं", "i"), ("मेरा", "my"),
           ("था", "was"), ("है", "is"), ("गया", "went"), ("खो", "lose"), ("चलो", "go"),
           ("अभी", "now"), ("करो", "do"), ("जो", "which"), ("फ़िल्म", "movie"), ("गाना", "song"),
           ("खेल", "match"), ("संदेश", "message"), ("शुक्रिया", "thanks"), ("प्यार", "love"),
           ("खाना", "food"), ("पानी", "water"), ("रात", "night"), ("काम", "work"), ("किताब", "book"),
           ("सुबह", "morning"), ("शाम", "evening"), ("पैसा", "money"), ("बाज़ार", "market"),
           ("मौसम", "weather"), ("खुश", "happy"), ("दिन", "day")]
# Extra anchors so the cross-lingual projection has at least `dim` pairs.
LEXICON += [("लाल", "red"), ("नीला", "blue"), ("हरा", "green"), ("काला", "black"), ("सफ़ेद", "white"),
            ("एक", "one"), ("दो", "two"), ("तीन", "three"), ("चार", "four"), ("पांच", "five"),
            ("हाथ", "hand"), ("आंख", "eye"), ("सिर", "head"), ("पैर", "foot"), ("दरवाज़ा", "door"),
            ("खिड़की", "window"), ("पेड़", "tree"), ("फूल", "flower"), ("सूरज", "sun"), ("चांद", "moon"),
            ("बारिश", "rain"), ("गर्मी", "summer"), ("सर्दी", "winter"), ("माँ", "mother"),
            ("पिता", "father"), ("बहन", "sister"), ("स्कूल", "school"), ("डॉक्टर", "doctor"),
            ("परिवार", "family"), ("कहानी", "story"), ("रेल", "train"), ("टिकट", "ticket")]

# Templates: (word, upos, head, deprel). Words: "hi:x", "en:x", or a $CLASS.
CLASSES = {
    "$EN_NOUN": ["movie", "match", "song", "phone", "message"],
    "$EN_VERB": ["tell", "call", "send", "check"],
    "$HI_VOC": ["yaar", "bhai"],
}
TEMPLATES = [
    [("hi:main", "PRON", 4, "nsubj"), ("hi:kal", "ADV", 4, "advmod"), ("$EN_NOUN", "NOUN", 4, "obj"),
     ("hi:dekha", "VERB", 0, "root"), ("$UNIV", "PUNCT", 4, "punct")],
    [("$HI_VOC", "NOUN", 3, "vocative"), ("en:please", "INTJ", 3, "discourse"), ("$EN_VERB", "VERB", 0, "root"),
     ("en:me", "PRON", 3, "obj"), ("$UNIV", "PUNCT", 3, "punct")],
    [("$NE", "PROPN", 3, "nmod"), ("hi:ka", "ADP", 1, "case"), ("$EN_NOUN", "NOUN", 5, "nsubj"),
     ("hi:bahut", "ADV", 5, "advmod"), ("hi:accha", "ADJ", 0, "root"), ("hi:hai", "AUX", 5, "cop")],
    [("en:you", "PRON", 5, "nsubj"), ("en:are", "AUX", 5, "cop"), ("en:a", "DET", 5, "det"),
     ("en:good", "ADJ", 5, "amod"), ("en:friend", "NOUN", 0, "root"), ("$HI_VOC", "NOUN", 5, "vocative")],
    [("hi:kya", "PART", 5, "discourse"), ("hi:tum", "PRON", 5, "nsubj"), ("$ACRO", "PROPN", 4, "compound"),
     ("en:match", "NOUN", 5, "obj"), ("hi:dekha", "VERB", 0, "root"), ("$UNIV", "PUNCT", 5, "punct")],
    [("en:thanks", "NOUN", 0, "root"), ("$HI_VOC", "NOUN", 1, "vocative"), ("$UNIV", "PUNCT", 1, "punct")],
    [("en:what", "DET", 3, "det"), ("en:a", "DET", 3, "det"), ("$EN_NOUN", "NOUN", 0, "root"),
     ("$HI_VOC", "NOUN", 3, "vocative"), ("$UNIV", "PUNCT", 3, "punct")],
    [("hi:mera", "PRON", 2, "nmod"), ("en:phone", "NOUN", 4, "nsubj"), ("hi:kal", "ADV", 4, "advmod"),
     ("hi:kho", "VERB", 0, "root"), ("hi:gaya", "AUX", 4, "aux"), ("hi:jo", "PRON", 7, "nsubj"),
     ("hi:naya", "ADJ", 2, "acl"), ("hi:tha", "AUX", 7, "cop")],
    [("hi:aaj", "ADV", 5, "advmod"), ("$NE", "PROPN", 5, "iobj"), ("hi:ko", "ADP", 2, "case"),
     ("en:call", "NOUN", 5, "compound"), ("hi:karo", "VERB", 0, "root")],
    [("en:i", "PRON", 3, "nsubj"), ("en:really", "ADV", 3, "advmod"), ("en:love", "VERB", 0, "root"),
     ("en:this", "DET", 5, "det"), ("$EN_NOUN", "NOUN", 3, "obj")],
    [("$HI_VOC", "NOUN", 5, "vocative"), ("en:tomorrow", "NOUN", 5, "obl"), ("$EN_NOUN", "NOUN", 5, "obl"),
     ("hi:pe", "ADP", 3, "case"), ("hi:chalo", "VERB", 0, "root")],
    [("en:send", "VERB", 0, "root"), ("en:me", "PRON", 1, "iobj"), ("en:the", "DET", 4, "det"),
     ("en:message", "NOUN", 1, "obj"), ("hi:abhi", "ADV", 1, "advmod")],
]


def drop_vowels(w):
    out = w[0] + "".join(c for c in w[1:] if c not in "aeiou")
    return out if out != w and len(out) >= 2 else None


def build_pairs():
    en_pairs, hi_pairs = [], []
    for clean, variants in EN.items():
        en_pairs.append((clean, clean))
        en_pairs += [(v, clean) for v in variants]
    for rom, (dev, variants) in HI.items():
        hi_pairs.append((rom, dev))
        hi_pairs += [(v, dev) for v in variants]
    extra_en = []
    for w in EN_EXTRA:
        extra_en.append((w, w))
        v = drop_vowels(w)
        if v:
            extra_en.append((v, w))
    extra_hi = []
    for rom, dev in HI_EXTRA.items():
        extra_hi.append((rom, dev))
        v = drop_vowels(rom)
        if v:
            extra_hi.append((v, dev))
    # Fill to 200 pairs, alternating languages; noisy forms stay unique per
    # language so every pair is learnable.
    seen_en = {p[0] for p in en_pairs}
    seen_hi = {p[0] for p in hi_pairs}
    queue = []
    for i in range(max(len(extra_en), len(extra_hi))):
        if i < len(extra_hi):
            queue.append(("hi", extra_hi[i]))
        if i < len(extra_en):
            queue.append(("en", extra_en[i]))
    for lang, pair in queue:
        if len(en_pairs) + len(hi_pairs) >= 200:
            break
        seen = seen_en if lang == "en" else seen_hi
        if pair[0] in seen:
            continue
        seen.add(pair[0])
        (en_pairs if lang == "en" else hi_pairs).append(pair)
    assert len(en_pairs) + len(hi_pairs) == 200, len(en_pairs) + len(hi_pairs)
    return en_pairs, hi_pairs


def realize(slot, rng):
    word = slot
    if slot.startswith("$"):
        if slot == "$NE":
            return rng.choice(NE), "ne", None
        if slot == "$ACRO":
            return rng.choice(ACRO), "acro", None
        if slot == "$UNIV":
            return rng.choice(UNIV), "univ", None
        choice = rng.choice(CLASSES[slot])
        word = ("hi:" if slot.startswith("$HI") else "en:") + choice
    lang, w = word.split(":", 1)
    if lang == "en":
        forms = [w] + EN[w]
        return rng.choice(forms), "en", w
    dev, variants = HI[w]
    return rng.choice([w] + variants), "hi", dev


def build_treebank(rng, count):
    sentences = []
    for k in range(count):
        template = TEMPLATES[k % len(TEMPLATES)]
        tokens = []
        for i, (slot, upos, head, rel) in enumerate(template, start=1):
            form, lang, norm = realize(slot, rng)
            if k % 3 == 0 and i == 1 and lang in ("en", "hi") and form[0].isalpha():
                form = form[0].upper() + form[1:]
            if lang == "en" and norm == form.lower():
                norm = form  # casing survives when only case differs
            tokens.append({"id": i, "form": form, "upos": upos, "head": head, "deprel": rel,
                           "lang": lang, "norm": norm if norm is not None else form})
        sentences.append(tokens)
    return sentences


def conllu(sentences):
    lines = []
    for k, toks in enumerate(sentences, start=1):
        lines.append(f"# sent_id = toy-{k}")
        lines.append("# text = " + " ".join(t["form"] for t in toks))
        for t in toks:
            misc = f"lang={t['lang']}|norm={t['norm']}"
            lines.append("\t".join([str(t["id"]), t["form"], "_", t["upos"], "_", "_", str(t["head"]),
                                    t["deprel"], "_", misc]))
        lines.append("")
    return "\n".join(lines) + "\n"


def renderings(sentences):
    """English and Hindi monolingual renderings of each sentence for the LMs."""
    hi2en = {}
    en2hi = {}
    for h, e in LEXICON:
        hi2en.setdefault(h, e)
        en2hi.setdefault(e, h)
    en_lines, hi_lines = [], []
    for toks in sentences:
        en_words, hi_words = [], []
        for t in toks:
            if t["lang"] in ("ne", "acro"):
                en_words.append(t["norm"].lower())
                hi_words.append(t["norm"].lower())
            elif t["lang"] == "univ":
                continue
            elif t["lang"] == "en":
                en_words.append(t["norm"].lower())
                hi_words.append(en2hi.get(t["norm"].lower(), t["norm"].lower()))
            else:
                en_words.append(hi2en.get(t["norm"], t["norm"]))
                hi_words.append(t["norm"])
        en_lines.append(" ".join(en_words))
        hi_lines.append(" ".join(hi_words))
    return en_lines, hi_lines


def extra_lm_lines(rng, n):
    en_core = list(EN) + EN_EXTRA
    hi_core = [v[0] for v in HI.values()] + list(HI_EXTRA.values())
    en = [" ".join(rng.choice(en_core) for _ in range(rng.randint(3, 7))) for _ in range(n)]
    hi = [" ".join(rng.choice(hi_core) for _ in range(rng.randint(3, 7))) for _ in range(n)]
    return en, hi


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def random_rotation(rng, dim):
    # Gram-Schmidt over Gaussian columns
    cols = []
    while len(cols) < dim:
        v = [rng.gauss(0, 1) for _ in range(dim)]
        for c in cols:
            d = sum(a * b for a, b in zip(v, c))
            v = [a - d * b for a, b in zip(v, c)]
        n = math.sqrt(sum(x * x for x in v))
        if n > 1e-8:
            cols.append([x / n for x in v])
    return cols


def vectors(rng, dim):
    en_words = list(EN) + EN_EXTRA + [w.lower() for w in NE + ACRO] + sorted({e for _, e in LEXICON})
    en = {}
    for w in en_words:
        if w not in en:
            en[w] = unit([rng.gauss(0, 1) for _ in range(dim)])
    rot = random_rotation(rng, dim)  # columns; mapped x = sum_j x_j * rot[j]
    hi_words = [v[0] for v in HI.values()] + list(HI_EXTRA.values()) + [h for h, _ in LEXICON]
    hi2en = {}
    for h, e in LEXICON:
        hi2en.setdefault(h, e)
    hi = {}
    for h in hi_words:
        if h in hi:
            continue
        if h in hi2en:
            src = en[hi2en[h]]
            v = [sum(src[j] * rot[j][i] for j in range(dim)) + rng.gauss(0, 0.02) for i in range(dim)]
        else:
            v = [rng.gauss(0, 1) for _ in range(dim)]
        hi[h] = unit(v)
    return en, hi


def write_vectors(path, table):
    dim = len(next(iter(table.values())))
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(table)} {dim}\n")
        for w, v in table.items():
            f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "toy"))
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--sentences", type=int, default=50)
    ap.add_argument("--dim", type=int, default=64)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)

    def out(name, text):
        with open(os.path.join(args.out, name), "w", encoding="utf-8") as f:
            f.write(text)

    sentences = build_treebank(rng, args.sentences)
    out("treebank.conllu", conllu(sentences))
    out("raw.txt", "".join(" ".join(t["form"] for t in s) + "\n" for s in sentences))
    out("langid.tsv", "".join("".join(f"{t['form']}\t{t['lang']}\n" for t in s) + "\n" for s in sentences))
    en_pairs, hi_pairs = build_pairs()
    out("norm_en.tsv", "".join(f"{a}\t{b}\n" for a, b in en_pairs))
    out("norm_hi.tsv", "".join(f"{a}\t{b}\n" for a, b in hi_pairs))
    out("lexicon.tsv", "# hindi\tenglish\n" + "".join(f"{h}\t{e}\n" for h, e in LEXICON))
    out("en_dict.txt", "".join(w + "\n" for w in sorted(set(EN) | set(EN_EXTRA) | {e for _, e in LEXICON})))
    en_lines, hi_lines = renderings(sentences)
    extra_en, extra_hi = extra_lm_lines(rng, 150)
    out("lm_en.txt", "\n".join(en_lines + extra_en) + "\n")
    out("lm_hi.txt", "\n".join(hi_lines + extra_hi) + "\n")
    en_vec, hi_vec = vectors(rng, args.dim)
    write_vectors(os.path.join(args.out, "emb_en.vec"), en_vec)
    write_vectors(os.path.join(args.out, "emb_hi.vec"), hi_vec)


if __name__ == "__main__":
    main()
