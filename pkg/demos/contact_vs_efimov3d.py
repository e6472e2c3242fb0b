"""Why there is no Efimov tower in two dimensions.

Side by side comparison of the adiabatic channel for a contact (zero-range)
pair interaction in 2D against its 3D counterpart.  In 3D the transcendental
root turns imaginary once rho/a drops below about one: the channel eigenvalue
falls under the fall-to-center threshold and the effective potential picks up a
supercritical -1/rho^2 tail, which is what generates the geometric tower of
trimers.  In 2D the root stays real all the way down, the channel is only
finitely attractive, and the trimer count stops at two.

Run:  python3 demos/contact_vs_efimov3d.py
"""

import numpy as np

from halo2d import (
    build_channel_table,
    count_zero_energy_nodes,
    efimov3d_lowest,
    efimov3d_nu,
    lambda_zero_range,
    solve_bound_states,
    zero_range,
)


def main():
    a = 1.0
    print("2D contact channel, a = 1")
    print(f"{'rho/a':>8} {'lambda0 (2D)':>14} {'lam3d (3D)':>12} {'3D branch':>10}")
    for rho in (0.1, 0.5, 1.0, 2.0, 8.0, 30.0):
        lam2d = lambda_zero_range(rho, a)[0]
        nu3d = efimov3d_nu(rho / a)
        lam3d = efimov3d_lowest(rho / a)
        print(f"{rho:8.2f} {lam2d:14.5f} {lam3d:12.5f} {nu3d.branch:>10}")
    print("\n3D: imaginary branch at small rho means lam3d < -4, i.e. the")
    print("effective potential beats the -1/(4 rho^2) fall-to-center bound")
    print(f"and supports infinitely many states; lam3d(0) = {efimov3d_lowest(0.0):.4f}.")
    print("2D: lambda0 -> 0 at small rho (free limit), nothing singular.")

    table = build_channel_table(zero_range(a))
    states = solve_bound_states(table)
    print(f"\n2D trimer count from the tabulated channel: {len(states)}")
    for s in states:
        print(f"  n={s.nodes}  E3/E2 = {s.energy / (0.5 * table.e_thr):10.5f}")
    for box in (1e2, 1e3, 1e4):
        n = count_zero_energy_nodes(table, box * a)
        print(f"zero-energy nodes inside rho = {box:8.0f} a: {n}")
    print("the node count saturates instead of growing with the box:")
    print("two bound states, never a third, no matter how far out you look")


if __name__ == "__main__":
    main()
