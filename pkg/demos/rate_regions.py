"""Write broadcast and helper rate-region boundaries for Z_8 as CSV.

    python demos/rate_regions.py [outdir]
"""
import sys
from pathlib import Path

from groupepi import FiniteAbelianGroup, broadcast_region_gaussian, gaussian_2n, helper_region

Z8 = FiniteAbelianGroup.cyclic(8)


def main(outdir="."):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    bc = broadcast_region_gaussian(3, gaussian_2n(Z8, 0.9), gaussian_2n(Z8, 0.75))
    hp = helper_region(3, gaussian_2n(Z8, 0.85))
    (out / "broadcast_z8.csv").write_text(bc.to_csv())
    (out / "helper_z8.csv").write_text(hp.to_csv())
    print(f"degrading noise subgroup mass {bc.meta['degrading_parameter']:.6f}")
    print(f"max equality residual: broadcast {abs(bc.equality_residual).max():.2e}, "
          f"helper {abs(hp.equality_residual).max():.2e}")
    print(f"wrote {len(bc)} + {len(hp)} boundary points to {out.resolve()}")


if __name__ == "__main__":
    main(*sys.argv[1:])
