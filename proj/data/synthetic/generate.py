"""Regenerates the bundled synthetic pair (fixed seed, deterministic output).

Leg B is a geometric random walk. Leg A is built so that A/A0 - 0.8 * B/B0 is a
mean-reverting OU process, so the pair is cointegrated with hedge ratio 0.8.
"""

from pathlib import Path

import numpy as np
import pandas as pd

SEED = 20210104
DAYS = 504
BETA = 0.8
THETA, SIGMA = 25.0, 0.12  # OU speed and vol, per year
DT = 1.0 / 252.0


def main() -> None:
    rng = np.random.default_rng(SEED)
    dates = pd.bdate_range("2021-01-04", periods=DAYS)

    log_b = np.cumsum(np.concatenate([[0.0], rng.normal(0.0002, 0.015, DAYS - 1)]))
    norm_b = np.exp(log_b)

    ou = np.zeros(DAYS)
    decay = np.exp(-THETA * DT)
    sd = SIGMA * np.sqrt((1 - decay**2) / (2 * THETA))
    for j in range(1, DAYS):
        ou[j] = ou[j - 1] * decay + sd * rng.standard_normal()

    norm_a = 1.0 + BETA * (norm_b - 1.0) + ou
    out = Path(__file__).parent
    for name, level, norm in (("AAA", 100.0, norm_a), ("BBB", 50.0, norm_b)):
        frame = pd.DataFrame({"date": dates.strftime("%Y-%m-%d"), "close": np.round(level * norm, 4)})
        frame.to_csv(out / f"{name}.csv", index=False)


if __name__ == "__main__":
    main()
