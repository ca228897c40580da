#!/usr/bin/env python3
"""Print the conserved-quantity catalog: every built-in interaction with its
validity report, quantity dimension, and canonical basis vectors.
"""

import argparse

from configcalc.interactions import (CATALOG_NAMES, basis_to_json, by_name,
                                     check_validity, conserved_basis)
from configcalc.serialize import dump_json


def main():
  parser = argparse.ArgumentParser(description=__doc__)
  parser.add_argument("--kappa", type=int, default=3,
                      help="largest species/capacity parameter to include")
  parser.add_argument("--out", help="write the catalog as JSON instead")
  args = parser.parse_args()

  names = []
  for name in CATALOG_NAMES:
    if ":" in name:
      prefix = name.split(":")[0]
      for k in range(2, args.kappa + 1):
        entry = f"{prefix}:{k}"
        if entry not in names:
          names.append(entry)
    elif name not in names:
      names.append(name)

  rows = []
  for name in names:
    inter = by_name(name)
    basis = conserved_basis(inter)
    validity = check_validity(inter)
    rows.append({
        "name": name,
        "states": list(inter.states),
        "valid": validity["valid"],
        "strictly": validity["strict"],
        "c_phi": len(basis),
        "basis": basis_to_json(basis),
    })

  if args.out:
    dump_json({"catalog": rows}, args.out)
    print(f"wrote {args.out}")
    return

  width = max(len(r["name"]) for r in rows)
  print(f"{'interaction':<{width}}  c  strict  basis (state -> value)")
  for r in rows:
    vecs = "; ".join(",".join(v) for v in r["basis"]) or "-"
    strict = "yes" if r["strictly"] else "no"
    print(f"{r['name']:<{width}}  {r['c_phi']}  {strict:<6}  {vecs}")


if __name__ == "__main__":
  main()
