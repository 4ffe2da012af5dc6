"""Writes the THz index table shipped with the benea2019 preset.

The table samples the ZnTe phonon-resonance model with absorption on; it
stands in for measured data and keeps the tabulated-index code path honest.
"""

import numpy as np

C = 299792458.0
EPS_INF, F_TO, F_LO, GAMMA = 6.7, 5.31, 6.18, 0.09


def index(f_thz):
    w = 2 * np.pi * f_thz
    wt, wl, g = 2 * np.pi * F_TO, 2 * np.pi * F_LO, 2 * np.pi * GAMMA
    eps = EPS_INF * (1 + (wl**2 - wt**2) / (wt**2 - w**2 - 1j * g * w))
    n = np.sqrt(eps)
    return np.where(n.imag < 0, -n, n)


def main(path="presets/benea2019_thz_index.csv"):
    f = np.concatenate([np.arange(1, 10) * 1e-3, np.round(np.arange(0.01, 10.0 + 1e-9, 0.01), 2)])
    n = index(f)
    alpha = n.imag * 2 * np.pi * f * 1e12 / C
    with open(path, "w") as out:
        out.write("# ZnTe phonon model, eps_inf 6.7, TO 5.31 THz, LO 6.18 THz, gamma 0.09 THz\n")
        out.write("# alpha = Im[n] Omega / c\n")
        out.write("freq_thz,n_re,alpha_per_m\n")
        for fi, ni, ai in zip(f, n, alpha):
            out.write(f"{fi:.3f},{ni.real:.10g},{ai:.10g}\n")


if __name__ == "__main__":
    main()
