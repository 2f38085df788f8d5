"""Print the worked examples: proofs, loops and one transformed system."""
from cycterm.proof import print_proof
from cycterm.prover import prove
from cycterm.tpdb import print_tpdb
from cycterm.transform import TransformKind, transform
from cycterm.words import make_srs

EXAMPLES = [
    ("aa -> aba", [("aa", "aba")]),
    ("ab -> ba", [("ab", "ba")]),
    ("binary counter", [("P0", "P100"), ("0P", "1P"), ("1P", "cP"), ("0c", "10"), ("1c", "c0")]),
    ("killer triple", [("aa", "bc"), ("bb", "ac"), ("cc", "ab")]),
    ("relative ab -> ca, c ->= b", [("ab", "ca"), ("c", "b", False)]),
    ("relative aa -> aba, ab ->= ba", [("aa", "aba"), ("ab", "ba", False)]),
]


def main():
    for title, rules in EXAMPLES:
        R = make_srs(rules)
        res = prove(R, 30)
        print(f"== {title}")
        print(print_proof(res.proof) if res.proof else "MAYBE\n")
    print("== split(aa -> aba)")
    print(print_tpdb(transform(TransformKind.SPLIT, make_srs([("aa", "aba")])).srs))


if __name__ == "__main__":
    main()
