"""The random matrix model: rank laws, the transition kernel and the
predicted density 1 - alpha of radicands with a negative Pell solution.

    python3 demos/random_matrix_model.py
"""
from negpell_lab import model

if __name__ == "__main__":
    a = model.alpha()
    print(f"alpha     = {a.value:.15f}  (+- {float(a.error):.1e})")
    print(f"1 - alpha = {1 - a.value:.15f}\n")

    print("limit law of the kernel dimension of a random symmetric matrix:")
    for n in range(5):
        lim = model.p_sym_limit(n)
        print(f"  n = {n}: {lim.value:.10f}   (r = 6: {float(model.p_sym(6, n)):.10f})")

    k = model.markov_kernel(3)
    print("\nT(n -> j) = P(n, n, j) / 2^n; each row leaks 1 - 2^-n to 'not Pellian':")
    for n in range(4):
        row = "  ".join(f"{str(x):>7}" for x in k.raw[n][: n + 1])
        print(f"  n = {n}: {row}   sum {k.row_sum(n)}")

    print("\nsolubility chance given 4-rank m, and the recursion it satisfies:")
    for m in range(5):
        model.check_pell_recursion(m)
        print(f"  m = {m}: {model.pell_probability(m)}")

    s = model.stevenhagen_density()
    print(f"\nsum over m: {s.value:.12f}, which is 1 - alpha to {float(abs(s.center - (1 - a.center))):.0e}")
