#!/usr/bin/env python3
"""Averaging convergence: quadrature node refinement vs Monte Carlo cost.

Shows how fast the deterministic Gauss-Legendre average settles compared
to the sqrt(n) Monte Carlo error at the same physical point.

Run with: python3 scripts/convergence_check.py --sigma 0.1 --omega-tau 1e3
"""

import argparse

from rabi_quench import (
    DisorderChannel,
    DisorderModel,
    MonteCarlo,
    QuenchSpec,
    convergence_report,
    ensemble_residual_energy,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--channel", choices=("time", "param"), default="time")
    ap.add_argument("--sigma", type=float, default=0.1)
    ap.add_argument("--g-final", type=float, default=1.0)
    ap.add_argument("--omega-tau", type=float, default=1e3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = QuenchSpec(g_final=args.g_final, omega_tau=args.omega_tau)
    model = DisorderModel(channel=DisorderChannel(args.channel), sigma=args.sigma)

    rep = convergence_report(spec, model, [5, 9, 17, 33, 65], mode="quadrature")
    print("quadrature refinement")
    print(f"{'nodes':>6}  {'mean_Er':>16}  {'delta_vs_prev':>14}")
    for n, mean, delta in rep.rows:
        print(f"{n:>6}  {mean:>16.9e}  {delta:>14.3e}")
    print(f"converged: {rep.converged}")

    print("\nmonte carlo at matching cost")
    print(f"{'samples':>8}  {'mean_Er':>16}  {'stderr':>12}")
    for n in (16, 64, 256, 1024):
        mean, err = ensemble_residual_energy(
            spec, model, MonteCarlo(n_samples=n, seed=args.seed))
        print(f"{n:>8}  {mean:>16.9e}  {err:>12.3e}")


if __name__ == "__main__":
    main()
