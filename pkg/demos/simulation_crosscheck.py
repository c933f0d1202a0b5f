#!/usr/bin/env python3
"""Three independent routes to the same two numbers.

The package computes EAR and ESJD three ways that share no code path:
an analytic route (one-dimensional quadrature against the target's
one-coordinate marginal CDF), a Monte Carlo route (averaging the
acceptance function over stationary draws), and a bare simulation of
the Metropolis chain itself (batch-means error bars).  On healthy
cases the three agree within joint error bars.

The demo closes with a deliberately unhealthy case: a two-component
mixture at d = 10 whose radial marginal has a deep entropic valley.
The analytic and Monte Carlo routes still agree (they integrate the
stationary law directly), but a million-step chain cannot cross the
valley: it reports statistics for whichever component its start fell
in.  The mean squared radius makes the failure visible -- honest error
bars cannot rescue a chain that has not mixed.

Run:  python demos/simulation_crosscheck.py   (about a minute)
"""
from __future__ import annotations

from rwmscaling import (
    get_marginal_table,
    mc_expectation,
    parse_target_spec,
    run_rwm,
    table_point,
)

CASES = [
    ("gaussian", "gaussian", 10, 0.7528),
    ("exponential", "gaussian", 10, 0.45),
    ("radial-gaussian", "gaussian", 2, 1.67),
    ("gaussian", "laplace", 30, 0.0794),
]


def healthy_cases() -> None:
    print("Analytic vs Monte Carlo vs chain")
    print("-" * 72)
    print(f"{'case':>32s} {'analytic':>9s} {'mc':>9s} {'chain':>9s}")
    for i, (target_spec, proposal_spec, d, lam) in enumerate(CASES):
        target = parse_target_spec(target_spec, d)
        proposal = parse_target_spec(proposal_spec, d)
        exact = table_point(get_marginal_table(target), proposal, lam)
        mc = mc_expectation(target, proposal, lam, n_samples=100_000,
                            seed=300 + i)
        chain = run_rwm(target, proposal, lam, n_iters=500_000, seed=400 + i)
        label = f"{target_spec}/{proposal_spec} d={d} lam={lam}"
        print(f"{label:>32s} {exact.ear:9.5f} {mc.ear:9.5f} "
              f"{chain.accept_rate:9.5f}   (EAR)")
        print(f"{'':>32s} {exact.esjd:9.4f} {mc.esjd:9.4f} "
              f"{chain.esjd:9.4f}   (ESJD)")
    print()


def metastable_mixture() -> None:
    print("Metastable mixture: mixture:p=1/d^2 at d = 10, lambda = 0.8")
    print("-" * 72)
    d, lam = 10, 0.8
    target = parse_target_spec("mixture:p=1/d^2", d)
    proposal = parse_target_spec("gaussian", d)
    exact = table_point(get_marginal_table(target), proposal, lam)
    mc = mc_expectation(target, proposal, lam, n_samples=200_000, seed=5)
    print(f"  stationary E[R^2] = {target.moment(2):.2f}")
    print(f"  analytic EAR = {exact.ear:.5f}, Monte Carlo EAR = {mc.ear:.5f}")
    print("  chains started from stationary draws, 1e6 steps each:")
    # Seed 234 is the first seed whose stationary start falls in the wide
    # component (weight 1/d^2 = 0.01, so such starts are rare).
    for seed in (0, 1, 2, 3, 4, 5, 234):
        chain = run_rwm(target, proposal, lam, n_iters=1_000_000, seed=seed)
        print(f"    seed {seed:3d}: EAR = {chain.accept_rate:.5f} "
              f"(+/- {chain.accept_se:.5f}), mean R^2 = "
              f"{chain.mean_sq_radius:7.2f}")
    print()
    print("Each chain's mean R^2 sits near one component (about 10 narrow,")
    print("about 1000 wide), never near the stationary value 19.9: the chain")
    print("tracks its starting component, and its EAR inherits that")
    print("component's local acceptance rate (0.234 narrow, 0.903 wide)")
    print("rather than the stationary blend of the two.  Honest per-chain")
    print("error bars cannot flag this; the mean R^2 diagnostic can.")


def main() -> None:
    healthy_cases()
    metastable_mixture()


if __name__ == "__main__":
    main()
