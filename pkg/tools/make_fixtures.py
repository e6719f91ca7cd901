#!/usr/bin/env python3
"""Regenerate the bundled data files under src/histner/data/.

Output is deterministic: running this twice gives byte-identical files.
"""
import random
import re
import sys
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "histner" / "data"

FIRST = ["Matti", "Juho", "Antti", "Kalle", "Heikki", "Liisa", "Maria", "Eero", "Pekka", "Aino"]
SURNAMES = ["Virtanen", "Nieminen", "Mäkinen", "Korhonen", "Järvinen", "Koskinen", "Heikkinen", "Laine"]
# towns that are also family names
AMBIGUOUS = ["Lahti", "Salo", "Kotka", "Hamina", "Kemi", "Raahe", "Forssa", "Loimaa",
             "Somero", "Nurmes", "Lohja", "Kouvola"]
CITIES = {  # nominative: (inessive, genitive)
    "Helsinki": ("Helsingissä", "Helsingin"),
    "Tampere": ("Tampereella", "Tampereen"),
    "Turku": ("Turussa", "Turun"),
    "Oulu": ("Oulussa", "Oulun"),
    "Vaasa": ("Vaasassa", "Vaasan"),
    "Viipuri": ("Viipurissa", "Viipurin"),
    "Pori": ("Porissa", "Porin"),
    "Kuopio": ("Kuopiossa", "Kuopion"),
}
VILLAGES = ["Virtamaa", "Mäkelä", "Kauhava", "Pihlajavesi", "Valkeala", "Virolahti", "Vesilahti"]
STREETS = ["Hämeenkatu", "Puistokatu", "Kauppakatu", "Aleksanterinkatu", "Mannerheimintie"]
WATERS = ["Näsijärvi", "Pyhäjärvi", "Kemijoki", "Oulujoki", "Seurasaari"]
SCHOOLS = ["yliopisto", "lyseo", "seminaari", "kansakoulu"]
CORPS = ["Valio", "Fiskars", "Kone", "Arabia", "Stockmann", "Serlachius"]
MONTHS = ["tammikuu", "helmikuu", "maaliskuu", "huhtikuu", "toukokuu", "kesäkuu",
          "heinäkuu", "elokuu", "syyskuu", "lokakuu", "marraskuu", "joulukuu"]
INITIALS = ["A.", "K.", "J.", "E.", "M.", "I."]
PARTIES = ["kok.", "sd.", "rkp."]
AGES = [str(n) for n in range(21, 80, 3)]
YEARS = [str(n) for n in range(1880, 1900)]
DAYS = ["%d." % n for n in range(1, 29)]
COUNTS = [str(n) for n in range(100, 1000, 50)]

COMMON = {
    # surface: (lemma, pos, case)
    "kuoli": ("kuolla", "verb", None), "eilen": ("eilen", "adv", None),
    "asuu": ("asua", "verb", None), "nyt": ("nyt", "adv", None),
    "kokous": ("kokous", "noun", "nom"), "pidettiin": ("pitää", "verb", None),
    "työllistää": ("työllistää", "verb", None), "henkeä": ("henki", "noun", "par"),
    "työmiestä": ("työmies", "noun", "par"), "korjataan": ("korjata", "verb", None),
    "vuonna": ("vuosi", "noun", "ess"), "sai": ("saada", "verb", None),
    "uuden": ("uusi", "adj", "gen"), "rehtorin": ("rehtori", "noun", "gen"),
    "kaupunki": ("kaupunki", "noun", "nom"), "nimeltä": ("nimeltä", "adv", None),
    "kasvaa": ("kasvaa", "verb", None), "nopeasti": ("nopeasti", "adv", None),
    "junat": ("juna", "noun", "nom"), "kulkevat": ("kulkea", "verb", None),
    "on": ("olla", "verb", None), "jäätyi": ("jäätyä", "verb", None),
    "toimittaja": ("toimittaja", "noun", "nom"), "kirjoitti": ("kirjoittaa", "verb", None),
    "kertoi": ("kertoa", "verb", None), "että": ("että", "conj", None),
    "hinnat": ("hinta", "noun", "nom"), "nousevat": ("nousta", "verb", None),
    "sanomat": ("sanoma", "noun", "nom"), "herra": ("herra", "noun", "nom"),
    "puhui": ("puhua", "verb", None), "eduskunnassa": ("eduskunta", "noun", "ine"),
    "satoi": ("sataa", "verb", None), "ja": ("ja", "conj", None),
    "tuottaa": ("tuottaa", "verb", None), "voita": ("voi", "noun", "par"),
    "lehti": ("lehti", "noun", "nom"), "mukava": ("mukava", "adj", "nom"),
    "juttu": ("juttu", "noun", "nom"), "meistä": ("me", "pron", "ela"),
    "osakeyhtiö": ("osakeyhtiö", "noun", "nom"), "kauppias": ("kauppias", "noun", "nom"),
    "matkusti": ("matkustaa", "verb", None), "lauantaina": ("lauantai", "noun", "ess"),
    ",": (",", "punct", None), ".": (".", "punct", None),
    "(": ("(", "punct", None), ")": (")", "punct", None),
    "Oy": ("Oy", "abbr", None),
}

# Gold templates. [Label words] marks an entity; {slot} draws a filler.
TEMPLATES = [
    "[EnamexPrsHum {first} {sur}] , {age} , kuoli eilen [EnamexLocPpl {city_ine}] .",
    "[EnamexPrsHum {initial} {sur}] asuu nyt [EnamexLocPpl {city_ine}] .",
    "Kokous pidettiin [TimexTmeDat {day} {month_par} {year}] [EnamexLocPpl {city_ine}] .",
    "[EnamexOrgCrp {corp} Oy] työllistää nyt {count} henkeä .",
    "[EnamexOrgCrp {corp}] työllistää {count} työmiestä .",
    "[EnamexLocStr {street}] korjataan vuonna [TimexTmeDat {year}] .",
    "[EnamexOrgEdu {city_gen} {school}] sai uuden rehtorin .",
    "Kaupunki nimeltä [EnamexLocPpl {amb}] kasvaa nopeasti .",
    "Junat kulkevat [EnamexLocPpl {city_ine}] ja [EnamexLocPpl {city_ine}] .",
    "[EnamexPrsHum {first} {amb}] ( {age} ) asuu [EnamexLocPpl {city_ine}] .",
    "[EnamexLocGpl {water}] jäätyi [TimexTmeDat {day} {month_par}] .",
    "Toimittaja [EnamexPrsHum {first} {sur}] kirjoitti eilen .",
    "[EnamexPrsHum {first}] kertoi , että hinnat nousevat .",
    "Sanomat kirjoitti , että [EnamexLocPpl {city}] kasvaa .",
    "Herra [EnamexPrsHum {sur}] , {party} , puhui eduskunnassa .",
    "Eilen [EnamexLocPpl {city_ine}] satoi .",
    "Kauppias matkusti lauantaina [EnamexLocPpl {city_ine}] .",
    "[EnamexOrgCrp {corp}] tuottaa voita ja [EnamexOrgCrp {corp} Oy] kasvaa .",
]

TWOPASS_TEMPLATES = [
    ("age-comma", "[EnamexPrsHum {first} {amb}] , {age} , kuoli eilen ."),
    ("age-paren", "[EnamexPrsHum {amb}] ( {age} ) asuu nyt [EnamexLocPpl {city_ine}] ."),
    ("initials", "[EnamexPrsHum {initial} {amb}] asuu nyt [EnamexLocPpl {city_ine}] ."),
    ("neutral", "Kaupunki nimeltä [EnamexLocPpl {amb}] kasvaa nopeasti ."),
]

WSPELLED = [
    "Kokous pidettiin wuonna [TimexTmeDat 1885] [EnamexLocPpl Wiipurissa] .",
    "Junat kulkewat [EnamexLocPpl Waasassa] ja [EnamexLocPpl Wiipurissa] .",
    "Kauppias matkusti lauantaina [EnamexLocPpl Waasassa] .",
    "Sanomat kirjoitti , että [EnamexLocPpl Wiipuri] kaswaa .",
    "Eilen [EnamexLocPpl Waasassa] satoi .",
    "Kaupunki nimeltä [EnamexLocPpl Waasa] kaswaa nopeasti .",
    "[EnamexPrsHum Matti Wirtanen] , 45 , kuoli eilen [EnamexLocPpl Wiipurissa] .",
    "Kauppias matkusti [EnamexLocPpl Kuopiossa] ja [EnamexLocPpl Wiipurissa] .",
    "Kaupunki nimeltä [EnamexLocPpl Walkeala] kasvaa nopeasti .",
    "Kauppias matkusti lauantaina [EnamexLocPpl Wesilahdella] .",
    "Sanomat kirjoitti , että [EnamexLocPpl Wirolahti] kaswaa .",
]

STARTER_RULES = """\
# Starter ruleset. Phase 1 fixes person readings from context, phase 2 tags
# what is left. Within a phase, earlier rules win ties of equal length.

# -- phase 1: persons ---------------------------------------------------
rule prs_initials phase=1 label=EnamexPrsHum : INITIAL+ CAP
rule prs_context phase=1 label=EnamexPrsHum : CAP&GAZ(person-first|person-last)+ CTX(TRIG(person))
rule prs_full phase=1 label=EnamexPrsHum : CAP&GAZ(person-first) CAP&GAZ(person-last)+

# -- phase 2: everything else -------------------------------------------
rule loc_street phase=2 label=EnamexLocStr : CAP&SUFFIX(katu|tie|kuja)
rule loc_water phase=2 label=EnamexLocGpl : CAP&SUFFIX(järvi|joki|saari|vuori)
rule org_edu phase=2 label=EnamexOrgEdu : CAP&CASE(gen) LEMMA(yliopisto|lyseo|seminaari|kansakoulu)
rule org_corp phase=2 label=EnamexOrgCrp : CAP+ "Oy"|"Ab"|"Osakeyhtiö"
rule org_corp_verb phase=2 label=EnamexOrgCrp : CAP+ CTX(TRIG(corp))
rule date_full phase=2 label=TimexTmeDat : NUM LEMMA(tammikuu|helmikuu|maaliskuu|huhtikuu|toukokuu|kesäkuu|heinäkuu|elokuu|syyskuu|lokakuu|marraskuu|joulukuu) NUM?
rule date_year phase=2 label=TimexTmeDat : CTX("vuonna") NUM
rule loc_place phase=2 label=EnamexLocPpl : CAP&GAZ(place)
"""

CONTEXT_RULES = """\
# Context-licensed places: a gazetteer name is tagged only next to a clause
# verb that supports the reading. A bare name stays untagged.
rule loc_subject phase=2 label=EnamexLocPpl : CAP&GAZ(place) CTX(LEMMA(olla|sijaita))
rule loc_predicate phase=2 label=EnamexLocPpl : CTX(LEMMA(olla)) CAP&GAZ(place)
"""

_MARK = re.compile(r"\[(\w+) ([^\]]+)\]|(\S+)")


def render(template, rng, fillers):
    def fill(m):
        return rng.choice(fillers[m.group(1)])
    text = re.sub(r"\{(\w+)\}", fill, template)
    rows = []
    for m in _MARK.finditer(text):
        if m.group(3):
            rows.append((m.group(3), "O"))
            continue
        label, words = m.group(1), m.group(2).split()
        if len(words) == 1:
            rows.append((words[0], "<%s/>" % label))
        else:
            rows.extend((w, "<%s>" % label) for w in words[:-1])
            rows.append((words[-1], "</%s>" % label))
    return rows


def serialize(snippets):
    return "\n".join("".join("%s\t%s\n" % r for r in s) for s in snippets)


def fillers():
    return {
        "first": FIRST, "sur": SURNAMES, "amb": AMBIGUOUS, "initial": INITIALS,
        "city": sorted(CITIES), "city_ine": [v[0] for _, v in sorted(CITIES.items())],
        "city_gen": [v[1] for _, v in sorted(CITIES.items())],
        "street": STREETS, "water": WATERS, "school": SCHOOLS, "corp": CORPS,
        "month_par": [m + "ta" for m in MONTHS], "age": AGES, "year": YEARS,
        "day": DAYS, "count": COUNTS, "party": PARTIES,
    }


def make_sample(n_tokens=1000, seed=1890):
    rng = random.Random(seed)
    fill = fillers()
    snippets, total = [], 0
    while True:
        rows = render(rng.choice(TEMPLATES), rng, fill)
        if total + len(rows) > n_tokens:
            break
        snippets.append(rows)
        total += len(rows)
    # top up with short untagged clauses to hit the exact size
    pad = ["ja", "nyt", "eilen", "satoi", "."]
    while total < n_tokens:
        k = min(len(pad), n_tokens - total)
        snippets.append([(w, "O") for w in pad[:k]])
        total += k
    return snippets


def make_twopass(seed=45):
    rng = random.Random(seed)
    fill = fillers()
    snippets = []
    for name in AMBIGUOUS:
        for _, template in TWOPASS_TEMPLATES:
            snippets.append(render(template.replace("{amb}", name), rng, fill))
    return snippets


def lexicon_rows():
    rows = []

    def add(surface, lemma, pos, case=None, cls=None, weight=1.0):
        rows.append((surface, lemma, pos, case or "-", cls or "-", "%g" % weight))

    for name in FIRST:
        add(name, name, "propn", "nom", "person", 2)
    for name in SURNAMES:
        add(name, name, "propn", "nom", "person", 2)
    for name in AMBIGUOUS:
        add(name, name, "propn", "nom", "place", 3)
        add(name, name, "propn", "nom", "person", 1)
    for city, (ine, gen) in sorted(CITIES.items()):
        add(city, city, "propn", "nom", "place", 5)
        add(ine, city, "propn", "ine" if not ine.endswith("lla") else "ade", "place", 5)
        add(gen, city, "propn", "gen", "place", 5)
    add("Suomen", "Suomi", "propn", "gen", "place", 5)
    add("Suomi", "Suomi", "propn", "nom", "place", 5)
    add("Pankki", "pankki", "noun", "nom", None, 1)
    add("pankki", "pankki", "noun", "nom", None, 1)
    for v in VILLAGES:
        add(v, v, "propn", "nom", "place", 1)
    add("Vesilahdella", "Vesilahti", "propn", "ade", "place", 1)
    for s in STREETS:
        add(s, s, "propn", "nom", None, 1)
    for w in WATERS:
        add(w, w, "propn", "nom", "place", 1)
    for s in SCHOOLS:
        add(s, s, "noun", "nom", None, 1)
    for c in CORPS:
        add(c, c, "propn", "nom", None, 1)
    add("kone", "kone", "noun", "nom", None, 4)
    for m in MONTHS:
        add(m + "ta", m, "noun", "par", None, 1)
        add(m, m, "noun", "nom", None, 1)
    for i in INITIALS:
        add(i, i, "abbr")
    for p in PARTIES:
        add(p, p, "abbr")
    for n in sorted(set(AGES + YEARS + COUNTS + ["45"])):
        add(n, n, "num")
    for d in DAYS:
        add(d, d, "num")
    for surface, (lemma, pos, case) in sorted(COMMON.items()):
        add(surface, lemma, pos, case)
    return rows


REGISTRIES = {
    "pnr": [
        ("Helsinki", "Helsinki|Helsingfors", "place", 600000, "pnr:1", 60.17, 24.94),
        ("Tampere", "Tampere|Tammerfors", "place", 200000, "pnr:2", 61.50, 23.76),
        ("Turku", "Turku|Åbo", "place", 100000, "pnr:3", 60.45, 22.27),
        ("Oulu", "Oulu|Uleåborg", "place", 60000, "pnr:4", 65.01, 25.47),
        ("Viipuri", "Viipuri|Wiborg", "place", 80000, "pnr:5", 60.71, 28.75),
        ("Pori", "Pori|Björneborg", "place", 30000, "pnr:6", 61.48, 21.80),
        ("Kuopio", "Kuopio", "place", 40000, "pnr:7", 62.89, 27.68),
        ("Lahti", "Lahti", "place", 45000, "pnr:8", 60.98, 25.66),
        ("Salo", "Salo", "place", 8000, "pnr:9", 60.38, 23.13),
        ("Kotka", "Kotka", "place", 30000, "pnr:10", 60.47, 26.95),
        ("Kemi", "Kemi", "place", 20000, "pnr:11", 65.74, 24.56),
        ("Kauhava", "Kauhava", "place", 2000, "pnr:12", 63.10, 23.07),
        ("Valkeala", "Valkeala", "place", 5000, "pnr:13", 60.94, 26.80),
        ("Virolahti", "Virolahti", "place", 4000, "pnr:14", 60.58, 27.71),
        ("Vesilahti", "Vesilahti", "place", 3000, "pnr:15", 61.31, 23.62),
    ],
    "sapo": [
        ("Virtamaa", "Virtamaa", "place", 300, "sapo:1", None, None),
        ("Mäkelä", "Mäkelä", "place", 150, "sapo:2", None, None),
        ("Pihlajavesi", "Pihlajavesi", "place", 900, "sapo:3", None, None),
        ("Helsinki", "Helsinki|Helsingfors", "place", 600000, "sapo:4", None, None),
    ],
    "geonames": [
        ("Helsinki", "Helsinki", "place", 600000, "gn:658225", 60.17, 24.94),
        ("Vaasa", "Vaasa|Vasa", "place", 55000, "gn:632978", 63.10, 21.62),
        ("New York", "New York", "place", 3000000, "gn:5128581", 40.71, -74.01),
        ("Tukholma", "Tukholma|Stockholm", "place", 900000, "gn:2673730", 59.33, 18.07),
        ("Pietari", "Pietari|Sankt-Peterburg", "place", 1000000, "gn:498817", 59.94, 30.31),
    ],
    "oldmaps": [
        ("Viipuri", "Wiipuri|Wiburg", "place", 80000, "om:1", None, None),
        ("Vaasa", "Waasa|Nikolainkaupunki", "place", 55000, "om:2", None, None),
        ("Virtamaa", "Virtamaa|Wirtamaa", "place", None, "om:3", None, None),
    ],
}


def registry_text(rows):
    out = ["# canonical\tvariants\tclass\tsize\texternal_id\tlat\tlon"]
    for canon, variants, cls, size, ext, lat, lon in rows:
        out.append("\t".join([canon, variants, cls, "-" if size is None else str(size), ext or "-",
                              "-" if lat is None else "%.2f" % lat, "-" if lon is None else "%.2f" % lon]))
    return "\n".join(out) + "\n"


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "registries").mkdir(exist_ok=True)
    header = "# surface\tlemma\tpos\tcase\tname_class\tweight\n"
    lex = sorted(set(lexicon_rows()))
    (DATA / "lexicon.tsv").write_text(header + "".join("\t".join(r) + "\n" for r in lex), encoding="utf-8")
    (DATA / "starter.rules").write_text(STARTER_RULES, encoding="utf-8")
    (DATA / "context.rules").write_text(CONTEXT_RULES, encoding="utf-8")
    (DATA / "sample.tsv").write_text(serialize(make_sample()), encoding="utf-8")
    (DATA / "twopass.tsv").write_text(serialize(make_twopass()), encoding="utf-8")
    rng = random.Random(0)
    (DATA / "wspelled.tsv").write_text(serialize([render(t, rng, {}) for t in WSPELLED]), encoding="utf-8")
    for source, rows in REGISTRIES.items():
        (DATA / "registries" / (source + ".tsv")).write_text(registry_text(rows), encoding="utf-8")
    auth = ["# name\tkind"] + ["%s\tfirst" % n for n in FIRST] + \
        ["%s\tlast" % n for n in SURNAMES + AMBIGUOUS + ["Wirtanen"]]
    (DATA / "authority.tsv").write_text("\n".join(auth) + "\n", encoding="utf-8")
    names = AMBIGUOUS[:10]
    (DATA / "names.txt").write_text("\n".join(names) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
