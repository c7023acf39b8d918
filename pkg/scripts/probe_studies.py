"""Ratio studies for every estimate probe, written as CSV plus a text summary.

Usage: python3 scripts/probe_studies.py --out probe_results
"""

import argparse
from pathlib import Path

from twofluid import probes
from twofluid.io import write_series
from twofluid.spectral import Grid

HEADER = ["study", "tag", "sample", "lhs", "rhs", "ratio"]


def dump(out, name, studies):
    rows = [dict(r, study=i) for i, st in enumerate(studies) for r in st.rows()]
    write_series(out / f"{name}.csv", HEADER, rows)
    for st in studies:
        print(f"{name:28s} N={st.corpus.get('N')} max {st.max_ratio:.5g} median {st.median_ratio:.5g}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="probe_results")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for tag in probes.STATIC_TAGS:
        dump(out, tag, [probes.probe_product_estimate(tag, probes.make_corpus(Grid(2, n), 100, args.seed))
                        for n in (64, 128)])
    for tag in probes.SPACE_TIME_TAGS:
        dump(out, tag, [probes.probe_product_estimate(tag, probes.make_corpus(Grid(3, n), 10, args.seed))
                        for n in (16, 32)])

    heat = probes.heat_corpus(Grid(2, 32), 20, seed=args.seed)
    for p in (float("inf"), 2.0):
        studies, spread = probes.friction_spread(heat, p=p)
        dump(out, f"heat_p{p:g}", studies)
        print(f"  friction spread over a in (0, 1, 10): {spread:.3%}")

    corpus = probes.maxwell_corpus(Grid(2, 32), 20, seed=0)
    dump(out, probes.MAXWELL, [probes.probe_maxwell_bound(corpus)])
    dump(out, probes.MAXWELL_ENERGY, [probes.probe_maxwell_bound(corpus, energy_form=True)])


if __name__ == "__main__":
    main()
