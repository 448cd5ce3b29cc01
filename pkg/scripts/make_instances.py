"""Write the desk-scale instance panel as QDIMACS files."""

import argparse
import random
from pathlib import Path

from skolemcount.formula import to_qdimacs
from skolemcount.instances import factorization_spec, or_spec, random_spec, sparse_spec, unsat_spec, xor_spec


def panel(seed: int = 7) -> dict:
    """Small specs with exactly computable Skolem counts."""
    rng = random.Random(seed)
    specs = {
        "factorization5": factorization_spec(5),
        "xor": xor_spec(),
        "unsat": unsat_spec(),
        "or": or_spec(),
    }
    for i in range(6):
        n, m = rng.randint(2, 5), rng.randint(2, 4)
        specs[f"random{i}"] = random_spec(rng, n, m, rng.randint(2, 2 * (n + m)))
    return specs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="instances")
    ap.add_argument("--sparse", action="store_true", help="also write the large sparse instance")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    specs = panel()
    if args.sparse:
        specs["sparse14"] = sparse_spec(14)
    for name, spec in specs.items():
        (out / f"{name}.qdimacs").write_text(to_qdimacs(spec))
    print(f"wrote {len(specs)} instances to {out}")


if __name__ == "__main__":
    main()
