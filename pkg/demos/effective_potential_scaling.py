"""Universal collapse of the adiabatic effective potential.

For a contact pair interaction the only length is the two-body scattering
length a, so a^2 * [W(rho) - eps_thr] against rho/a must be a single curve
for every a.  The curve has a long -1/(4 rho^2) attractive tail beyond the
dimer threshold; that tail is exactly what carries the second, halo-like
trimer.  A finite-range potential follows the same curve once a >> range.

Run:  python3 demos/effective_potential_scaling.py [--plot]
"""

import argparse

import numpy as np

from halo2d import (
    build_channel_table,
    effective_potential,
    gaussian_pair,
    scattering_length,
    zero_range,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plot", action="store_true", help="save effective_potential_scaling.png")
    args = ap.parse_args()

    x = np.array([0.3, 1.0, 3.0, 10.0, 40.0])  # rho/a
    print("contact interaction, scaled potential a^2 (W - eps_thr) at rho/a:")
    header = "".join(f"{v:>12.1f}" for v in x)
    print(f"{'a':>8}" + header)
    for a in (1.0, 2.0, 5.0):
        table = build_channel_table(zero_range(a))
        w = effective_potential(table, x * a) - table.e_thr
        print(f"{a:8.1f}" + "".join(f"{v:12.5f}" for v in a * a * w))

    # shallow gaussian dimer: same curve where rho is outside the range
    spec = gaussian_pair(1.0, -0.72)
    ag = scattering_length(spec)
    tg = build_channel_table(spec, n_points=72)
    wg = effective_potential(tg, x * ag) - tg.e_thr
    print(f"{'gauss':>8}" + "".join(f"{v:12.5f}" for v in ag * ag * wg)
          + f"   (a = {ag:.2f} b)")

    print("\ntail check at rho/a = 40: a^2 (W - eps_thr) * (rho/a)^2 -> -1/4")
    table = build_channel_table(zero_range(1.0))
    w40 = effective_potential(table, 40.0) - table.e_thr
    print(f"  contact: {w40 * 40.0**2:.5f}")
    print(f"  gauss:   {(wg[-1] * ag * ag) * 40.0**2:.5f}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        xs = np.geomspace(0.05, 60.0, 300)
        fig, ax = plt.subplots(figsize=(5.5, 4))
        for a in (1.0, 2.0, 5.0):
            t = build_channel_table(zero_range(a))
            ax.plot(xs, a * a * (effective_potential(t, xs * a) - t.e_thr),
                    label=f"contact a={a:g}")
        ax.plot(xs, ag * ag * (effective_potential(tg, xs * ag) - tg.e_thr),
                "k--", label="gaussian")
        ax.plot(xs, -0.25 / xs**2, ":", label="-1/(4 x^2)")
        ax.set_xscale("log")
        ax.set_ylim(-8, 2)
        ax.set_xlabel("rho / a")
        ax.set_ylabel("a^2 (W - eps_thr)")
        ax.legend()
        fig.tight_layout()
        fig.savefig("effective_potential_scaling.png", dpi=150)
        print("wrote effective_potential_scaling.png")


if __name__ == "__main__":
    main()
