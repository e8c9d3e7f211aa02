"""Negative Pell three ways: continued fractions, the narrow class group, and
the chain of Artin pairings.

    python3 demos/pell_and_class_groups.py
"""
from negpell_lab.pell import cf_sqrt, fundamental_solution, neg_pell_soluble, plus_one_fundamental
from negpell_lab.qfclass import artin_sequence, narrow_class_group, sqrt_d_class_trivial


def show(d: int) -> None:
    cf = cf_sqrt(d)
    data = narrow_class_group(d)
    seq = artin_sequence(d)
    print(f"d = {d}  primes {data.primes}")
    print(f"  sqrt(d) = [{cf.a0}; {', '.join(map(str, cf.period))}]  period {cf.period_length}")
    s = fundamental_solution(d)
    print(f"  fundamental solution x^2 - {d} y^2 = {s.sign}: ({s.x}, {s.y})")
    exps = " x ".join(f"Z/{1 << e}" for e in data.exponents) or "trivial"
    print(f"  h+ = {data.h_plus}, 2-part {exps}, rk4 = {data.rk4}")
    print(f"  class of (sqrt d) = {data.R_class}; trivial: {sqrt_d_class_trivial(d)}")
    print(f"  Artin pairings up to k = {seq.K}: Pellian = {seq.pellian}")
    print(f"  negative Pell soluble: {neg_pell_soluble(d)}")
    print()


if __name__ == "__main__":
    s = plus_one_fundamental(61)
    print(f"The smallest solution of x^2 - 61 y^2 = 1 is ({s.x}, {s.y}).\n")
    # a prime (always soluble), two insoluble cases, and two soluble composites
    for d in (61, 34, 205, 1105, 2 * 5 * 13 * 17):
        show(d)
