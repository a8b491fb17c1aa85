"""ME versus FPE across flat sidelobe levels; best-of-seeds table to CSV."""

import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

from adthin.afpa import solve_afpa
from adthin.autocorr import consistent_me_count
from adthin.layout import GridSpec, flat_mask, sample_mask
from adthin.optimizer import GaConfig, run_fpe_ad, run_me_ad


@dataclass
class SweepConfig:
    num_slots: int = 24
    sll_db: list = field(default_factory=lambda: [-10.0, -12.5, -15.0, -17.5, -20.0])
    seeds: int = 10
    ga: GaConfig = field(default_factory=GaConfig)
    out: Path = Path("runs/sll_sweep.csv")


def best(runs):
    return min(runs, key=lambda r: (r.xi, r.sll))


def main(cfg: SweepConfig) -> None:
    g = GridSpec(cfg.num_slots)
    rows = []
    for sll in cfg.sll_db:
        mask = flat_mask(g, sll)
        aux = solve_afpa(mask, g)
        n_me = consistent_me_count(sample_mask(mask, g))
        seeds = [GaConfig(**{**cfg.ga.__dict__, "rng_seed": s}) for s in range(cfg.seeds)]
        me = best([run_me_ad(mask, g, n_me, c) for c in seeds])
        fpe = best([run_fpe_ad(mask, g, config=c, aux=aux) for c in seeds])
        for name, r in (("me-ad", me), ("fpe-ad", fpe)):
            rows.append({"sll_mask_db": sll, "mode": name, "N": r.num_elements, "xi_opt": r.xi,
                         "sll_db": r.sll, "sll_parent_db": r.sll_parent})
            print(f"{sll:6.1f} dB {name:6s} N={r.num_elements:3d} xi={r.xi:.4g} sll={r.sll:.2f}")
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--slots", type=int, default=24)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--out", type=Path, default=SweepConfig.out)
    a = ap.parse_args()
    main(SweepConfig(num_slots=a.slots, seeds=a.seeds, out=a.out))
