"""Regenerate the bundled simulated price CSVs.

Two price paths are simulated from the bundled mixture margins coupled
by a Gumbel copula (theta from the bundled parameter file), then written
as date,close CSVs over consecutive business days. The output is fully
determined by SEED, so re-running this script reproduces the bundled
files byte for byte.

Usage: python tools/generate_sim_data.py [output_dir]
"""

from __future__ import annotations

import json
import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from rainbow_pricer.copula import make_copula
from rainbow_pricer.mixture import GaussianMixture

SEED = 20140102
N_RETURNS = 1533
START = date(2014, 1, 2)
SPOT0 = (60.0, 90.0)
NAMES = ("sim_asset_a.csv", "sim_asset_b.csv")


def business_days(start: date, count: int) -> list[date]:
    out, d = [], start
    while len(out) < count:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "rainbow_pricer" / "data"
    )
    params = json.loads((out_dir / "paper_params.json").read_text())
    margins = [GaussianMixture.from_dict(a["mixture"]) for a in params["assets"]]
    cop = make_copula("gumbel", tuple(params["copulas"]["gumbel"]))

    u = cop.sample(N_RETURNS, seed=SEED)
    dates = business_days(START, N_RETURNS + 1)
    for j, (name, spot) in enumerate(zip(NAMES, SPOT0)):
        x = margins[j].quantile(u[:, j])
        closes = spot * np.exp(np.concatenate([[0.0], np.cumsum(x)]))
        lines = ["date,close"]
        lines += [f"{d.isoformat()},{c:.6f}" for d, c in zip(dates, closes)]
        (out_dir / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {out_dir / name} ({len(closes)} rows)")


if __name__ == "__main__":
    main()
