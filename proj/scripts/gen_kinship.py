#!/usr/bin/env python3
"""Generate the two-family kinship dataset (104 triples, 24 people,
12 relations) in the rel(A,B) format read by `nsrbm experiment-kinship`.

Each triple rel(a, b) reads "a is the rel of b": son(Marco, Pierro).
"""
import argparse
import sys

# (husband, wife) -> children per family; the Italian tree is isomorphic
# to the English one.
FAMILIES = [
    {
        "couples": [
            ("Christopher", "Penelope", ["Arthur", "Victoria"]),
            ("Andrew", "Christine", ["James", "Jennifer"]),
            ("James", "Victoria", ["Colin", "Charlotte"]),
            ("Arthur", "Margaret", []),
            ("Charles", "Jennifer", []),
        ],
        "males": {"Christopher", "Andrew", "Arthur", "James", "Charles", "Colin"},
    },
    {
        "couples": [
            ("Roberto", "Maria", ["Emilio", "Lucia"]),
            ("Pierro", "Francesca", ["Marco", "Angela"]),
            ("Marco", "Lucia", ["Alfonso", "Sophia"]),
            ("Emilio", "Gina", []),
            ("Tomaso", "Angela", []),
        ],
        "males": {"Roberto", "Pierro", "Emilio", "Marco", "Tomaso", "Alfonso"},
    },
]


def family_triples(family):
    couples = family["couples"]
    males = family["males"]
    parents = {}   # child -> (father, mother)
    spouse = {}
    for husband, wife, children in couples:
        spouse[husband] = wife
        spouse[wife] = husband
        for child in children:
            parents[child] = (husband, wife)

    def siblings(person):
        return [
            c
            for _, _, children in couples
            for c in children
            if person in children and c != person
        ]

    triples = []
    for husband, wife, children in couples:
        triples.append(("husband", husband, wife))
        triples.append(("wife", wife, husband))
    for child, (father, mother) in parents.items():
        triples.append(("father", father, child))
        triples.append(("mother", mother, child))
        rel = "son" if child in males else "daughter"
        triples.append((rel, child, father))
        triples.append((rel, child, mother))
    for child in parents:
        for sib in siblings(child):
            triples.append(("brother" if child in males else "sister", child, sib))
    # Aunts and uncles: parents' siblings and those siblings' spouses.
    # Nephews and nieces: toward blood aunts/uncles only.
    for child, (father, mother) in parents.items():
        for parent in (father, mother):
            for sib in siblings(parent):
                triples.append(("uncle" if sib in males else "aunt", sib, child))
                triples.append(
                    ("nephew" if child in males else "niece", child, sib)
                )
                partner = spouse.get(sib)
                if partner:
                    triples.append(
                        ("uncle" if partner in males else "aunt", partner, child)
                    )
    return triples


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", nargs="?", default="-", help="output path (default stdout)")
    args = parser.parse_args()

    triples = []
    for family in FAMILIES:
        triples.extend(family_triples(family))
    assert len(triples) == len(set(triples)), "duplicate triple generated"
    assert len(triples) == 104, f"expected 104 triples, got {len(triples)}"

    lines = [f"{rel}({a},{b})" for rel, a, b in triples]
    out = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(out)
    else:
        with open(args.out, "w") as fh:
            fh.write(out)


if __name__ == "__main__":
    main()
