"""Regenerate the data of the five reference plots as CSV files.

Figure 1 is the subsolution function G_c(beta) at p=4, q=3, L+=6; figures
2-5 are backward shoots y(v) for the cooperative and competitive (4, 2)
operators.  Each CSV is accompanied by a JSON file with the parameters and
the classification of the shoot.

Run:  python demos/reference_shoots.py [OUT_DIR]
"""

import sys
from pathlib import Path

from pqfronts.figures import FIGURE_IDS, figure_data
from pqfronts.io import dump_json, write_table


def main(out_dir="reference_shoots"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for fid in FIGURE_IDS:
        fd = figure_data(fid)
        write_table(out / f"figure{fid}.csv", fd.header, fd.rows)
        dump_json(fd.meta, out / f"figure{fid}.json")
        if fid == 1:
            print(f"figure 1: min G at case-(i) c = {fd.meta['min_G_case_i']:.4f} (> 0), "
                  f"at c = 10: {fd.meta['min_G_case_ii']:.4f} (<= 0)")
        else:
            m = fd.meta
            print(f"figure {fid}: c = {m['c']:.4f}, H = {m['H']:g}: {m['classification']}, "
                  f"max y = {m['max_y']:.4g}")
    print(f"wrote {out.resolve()}")


if __name__ == "__main__":
    main(*sys.argv[1:])
