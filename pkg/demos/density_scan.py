"""How slowly the share of soluble radicands approaches 1 - alpha.

    python3 demos/density_scan.py [LIMIT]      (default 10^6)
"""
import sys

from negpell_lab.harness import ExperimentConfig, run_experiment

if __name__ == "__main__":
    limit = int(float(sys.argv[1])) if len(sys.argv) > 1 else 10**6
    rep = run_experiment(ExperimentConfig.make("density_scan", limit))
    t = rep.tables["density_scan"]
    print(f"{'X':>10} {'|D(X)|':>9} {'|D-(X)|':>9} {'ratio':>8}")
    for X, n, neg, ratio, target in t.rows:
        print(f"{int(X):>10} {int(n):>9} {int(neg):>9} {float(ratio):>8.4f}")
    print(f"target 1 - alpha = {float(t.rows[-1][4]):.4f}")

    rk = run_experiment(ExperimentConfig.make("rank_distribution", min(limit, 10**6)))
    print("\n4-rank histogram next to the limit law and the omega-weighted finite model:")
    for n, cnt, freq, lim, omega in rk.tables["rank_distribution"].rows[:5]:
        print(f"  rk4 = {n}: {float(freq):.4f}   limit {float(lim):.4f}   finite-r model {float(omega):.4f}")
