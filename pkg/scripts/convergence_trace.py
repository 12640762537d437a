"""Scale random integral tensors and record ds / ||Y||^2 per iteration.

Writes one CSV per tensor and prints, per tensor, the smallest ratio between
the actual and the guaranteed per-step decrease of log ||Y||^2.
"""

import argparse
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nullcone import Tensor, scale
from nullcone.scaling import norm_decrease_factor, write_trace_csv


@dataclass
class TraceConfig:
    dims: tuple[int, ...] = (1, 2, 3, 3)
    count: int = 5
    eps: float = 1e-4
    seed: int = 0
    out: Path = Path("traces")


def parse_args() -> TraceConfig:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", default="1,2,3,3")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("traces"))
    a = p.parse_args()
    return TraceConfig(tuple(int(x) for x in a.dims.split(",")), a.count, a.eps, a.seed, a.out)


def main() -> None:
    cfg = parse_args()
    cfg.out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    for k in range(cfg.count):
        X = Tensor.from_array(rng.integers(-3, 4, size=cfg.dims))
        out = scale(X, cfg.eps)
        with open(cfg.out / f"trace_{k}.csv", "w") as fh:
            write_trace_csv(out.trace, fh)
        # log(actual ratio) / log(guaranteed factor); the guarantee means >= 1
        slack = [
            math.log(b.norm_sq / a.norm_sq)
            / math.log(norm_decrease_factor(cfg.dims[a.axis], cfg.eps, X.d))
            for a, b in zip(out.trace, out.trace[1:])
        ]
        worst = min(slack, default=math.nan)
        print(f"tensor {k}: {out.verdict.value:<10} reason={out.reason and out.reason.value} "
              f"iters={out.iterations:<4} ds={out.ds_value:.3e} "
              f"min decrease / guaranteed={worst:.1f}")


if __name__ == "__main__":
    main()
