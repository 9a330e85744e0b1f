"""Regenerate src/hardylab/data/golden.json from the oracles.

Run from the repository root: ``python3 tests/make_golden.py``.
"""

import math
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).parent))

import oracles  # noqa: E402
from golden_cases import CASES  # noqa: E402

from hardylab.verify import GoldenEntry, save_golden  # noqa: E402

TARGET = pathlib.Path(__file__).resolve().parent.parent / "src" / "hardylab" / "data" / "golden.json"


def bump_profile(center, width):
    def R(r):
        x = (r - center) / width
        out = np.zeros_like(x)
        inside = np.abs(x) < 1
        out[inside] = np.exp(1 - 1 / (1 - x[inside] ** 2))
        return out

    def dR(r):
        x = (r - center) / width
        out = np.zeros_like(x)
        inside = np.abs(x) < 1
        xi = x[inside]
        out[inside] = np.exp(1 - 1 / (1 - xi**2)) * (-2 * xi / (1 - xi**2) ** 2) / width
        return out

    return R, dR, (center - width, center + width)


def oracle_values():
    R, dR, support = oracles.tent_profile(1, 3)
    closed = oracles.tent_closed_form_n1_p2()
    mix3 = oracles.radial_terms(R, dR, support, 2, 3, oracles.angular_moment_cos(0.5, 3))
    mix2 = oracles.radial_terms(R, dR, support, 2, 2, oracles.angular_moment_cos(0.5, 2))
    bump = oracles.radial_terms(*bump_profile(2, 1), 3, 4, oracles.sphere_area(3))
    decay = oracles.weighted1d_dense_linear()
    uncertainty_rhs = 2 * math.sqrt(closed["moment"]) * math.sqrt(closed["energy"])
    return {
        "classical/tent(a=1,b=3)/N=1/p=2": (closed["classical"], 4 * closed["energy"], 1e-2, "closed form"),
        "improved-radial/tent(a=1,b=3)/N=1/p=2": (closed["improved"], 4 * closed["energy"], 1e-2, "closed form"),
        "uncertainty-radial:suffix/tent(a=1,b=3)/N=1/p=2": (closed["mass"], uncertainty_rhs, 1e-2, "closed form"),
        "classical/smooth_bump(center=2,width=1)/N=3/p=4":
            (bump["classical"], 4**4 * bump["energy"], 2e-3, "dense uniform grid"),
        "improved/angular_mix(tent(a=1,b=3),k=1,amp=0.5)/N=2/p=3":
            (mix3["improved"], 27 * mix3["energy"], 2e-3, "dense uniform grid"),
        "radialise-contraction/angular_mix(tent(a=1,b=3),k=1,amp=0.5)/N=2/p=2":
            (mix2["energy"], mix2["energy"], 2e-3, "dense uniform grid"),
        "sup-exchange/angular_mix(tent(a=1,b=3),k=1,amp=0.5)/N=2/p=3":
            (mix3["improved"], mix3["max_integral"], 2e-3, "dense uniform grid"),
        "weighted1d/linear_decay/N=1/p=2": (decay["lhs"], decay["rhs"], 1e-3, "dense uniform grid"),
    }


def main():
    values = oracle_values()
    if set(values) != set(CASES):
        raise SystemExit(f"oracle and evaluator tables differ: {set(values) ^ set(CASES)}")
    entries = {}
    for key, (lhs, rhs, tol, note) in values.items():
        entries[key] = GoldenEntry(float(lhs), float(rhs), tol, CASES[key][1], note)
    save_golden(entries, TARGET)
    print(f"wrote {len(entries)} entries to {TARGET}")


if __name__ == "__main__":
    main()
