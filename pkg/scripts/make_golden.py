"""Regenerate the T^4 golden values used by the acceptance suite and `symflat eval`.

The oracle is independent of the package: the fields of the T^4 example depend
only on (x_1, x_2), so each L2 norm is (2 pi)^2 times a 2D periodic integral,
evaluated here by a 64 x 64 midpoint sum of the closed-form integrands.  The
exact values 12 pi^2, 23 pi^2 / 2 and pi^2 / 2 are checked on the way.
"""

import json
import math
import pathlib

import numpy as np

N = 64
OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "symflat" / "data" / "golden_t4.json"


def integrands(n):
    x = np.arange(n) * 2 * math.pi / n
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    s = np.sin(2 * x1) * np.cos(x2)
    f = (3 + 2 * s) / (1 - 0.5 * s)
    F01 = -np.cos(2 * x1) * np.sin(x2) / (2 * math.pi)
    F02 = (1 - 0.5 * s) / (2 * math.pi)
    # metric diag(1, 1, 1/f, f): g^{22} = f, g^{33} = 1/f, sqrt det g = 1
    phi = F01 / 2
    return {
        "ym": F01 ** 2 + f * F02 ** 2,
        "pym": F01 ** 2 / 2 + f * F02 ** 2,
        "phi": 2 * phi ** 2,
    }


def main():
    cell = (2 * math.pi / N) ** 2 * (2 * math.pi) ** 2
    values = {k: float(np.sum(v) * cell) for k, v in integrands(N).items()}
    exact = {"ym": 12 * math.pi ** 2, "pym": 11.5 * math.pi ** 2, "phi": 0.5 * math.pi ** 2}
    for k in values:
        assert abs(values[k] - exact[k]) <= 1e-10 * exact[k], (k, values[k], exact[k])
    record = {
        "preset": "t4_yang_mills_example",
        "oracle": f"2D midpoint quadrature of closed-form integrands, resolution {N}",
        "values": values,
        "exact": {"ym": "12 pi^2", "pym": "23 pi^2 / 2", "phi": "pi^2 / 2"},
        "relative_tolerance": 1e-4,
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    print(json.dumps(values, indent=2))


if __name__ == "__main__":
    main()
