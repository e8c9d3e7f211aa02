"""4-ranks from Redei matrices, and Redei symbols checked against reciprocity
and the class group.

    python3 demos/redei_symbols.py
"""
from negpell_lab.arith import family_primes
from negpell_lab.qfclass import artin_pairing, oracle_rk4
from negpell_lab.redei import (
    RedeiTriple,
    admissible_splits,
    art2_prediction,
    random_admissible_triples,
    redei_matrix,
    redei_symbol,
    rk4,
)

if __name__ == "__main__":
    for d in (34, 65, 5 * 29 * 109, 2 * 5 * 13 * 17 * 29):
        print(f"d = {d}: Redei matrix")
        for row in redei_matrix(d).to_array().tolist():
            print("   ", row)
        print(f"  rk4 = {rk4(d)} (class group says {oracle_rk4(d)})")

    t = RedeiTriple(5, 29, 109)
    print(f"\n[{t.a}, {t.b}, {t.c}] = {redei_symbol(t)}, [{t.c}, {t.b}, {t.a}] = {redei_symbol(t.reversed())}")

    flips = sum(redei_symbol(x) != redei_symbol(x.reversed()) for x in random_admissible_triples(200, seed=1))
    print(f"reciprocity violations among 200 random triples: {flips}")

    d = 5 * 29 * 109
    print(f"\nsplits of d = {d} against the Art_2 pairing <Up(c), chi_a>:")
    for s in admissible_splits(family_primes(d)):
        print(f"  (a, b, c) = ({s.a}, {s.b}, {s.c}): symbols predict {art2_prediction(s)},"
              f" class group gives {artin_pairing(d, s.c, s.a)}")
