"""Adiabatic angular eigenvalues lambda_n(rho) for a finite-range pair force.

At rho -> 0 the potential term scales out and the spectrum approaches the
free values 4 nu (nu + 1) = 0, 8, 24, ...  At large rho the lowest channel
dives like 2 E2 rho^2 (pair stays bound, third particle far away) while the
upper channels flatten back onto the free ladder.  This crossover is the
whole story of the adiabatic expansion; everything downstream (effective
potentials, bound trimers) is read off these curves.

Run:  python3 demos/angular_channels.py [--plot]
"""

import argparse

import numpy as np

from halo2d import AngularGrid, bound_states, gaussian_pair, solve_angular


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plot", action="store_true", help="save angular_channels.png")
    ap.add_argument("--n", type=int, default=420, help="angular grid size")
    args = ap.parse_args()

    spec = gaussian_pair(1.0, -4.0)
    e2 = bound_states(spec)[-1]
    print(f"pair potential: gaussian, S1 = -4, b = 1, E2 = {e2:.6f}")

    grid = AngularGrid(n=args.n)
    rhos = np.geomspace(0.05, 40.0, 12)
    print(f"\n{'rho':>8} {'lam0':>14} {'lam0 - 2*E2*rho^2':>18} {'lam1':>12} {'dropped':>8}")
    for rho in rhos:
        sp = solve_angular(spec, rho, grid, n_channels=2)
        print(f"{rho:8.3f} {sp.lam[0]:14.5f} {sp.lam[0] - 2.0 * e2 * rho * rho:18.5f} "
              f"{sp.lam[1]:12.5f} {sp.n_dropped:8d}")

    print("\nsymmetric free ladder for reference: 0, 24, 48 (the nu = 1 member")
    print("of 4 nu (nu+1) symmetrizes to zero and is filtered out)")
    print("lam0 - 2*E2*rho^2 levels off once rho >> b: the universal -1/3")
    print("plus finite-range corrections.  lam1 reshuffles through avoided")
    print("crossings around rho ~ 5-10 b, where borderline states sit right")
    print("at the spurious-norm threshold; only the lowest channel feeds the")
    print("single-channel trimer calculations, so the wobble is cosmetic.")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        dense = np.geomspace(0.05, 40.0, 60)
        lam = np.array([solve_angular(spec, r, grid, n_channels=3).lam for r in dense])
        fig, ax = plt.subplots(figsize=(5, 4))
        for j in range(3):
            ax.plot(dense, lam[:, j], label=f"n={j}")
        ax.plot(dense, 2.0 * e2 * dense**2, "k:", label="2 E2 rho^2")
        ax.set_xscale("log")
        ax.set_ylim(-30, 30)
        ax.set_xlabel("rho / b")
        ax.set_ylabel("lambda_n")
        ax.legend()
        fig.tight_layout()
        fig.savefig("angular_channels.png", dpi=150)
        print("wrote angular_channels.png")


if __name__ == "__main__":
    main()
