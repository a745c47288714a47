#!/usr/bin/env python3
"""Writes fixtures/car.csv and fixtures/car.domain: a full-factorial car
evaluation table (6 ordinal attributes, 1728 rows) labelled by a small
hierarchical rule model (price, comfort, technical quality). The layout and
value domains follow the classic car evaluation data set; the labels come from
the rule model below, not from the original data."""
import itertools
import pathlib
import sys

DOMAINS = [
    ("buying", ["low", "med", "high", "vhigh"]),
    ("maint", ["low", "med", "high", "vhigh"]),
    ("doors", ["2", "3", "4", "5more"]),
    ("persons", ["2", "4", "more"]),
    ("lug_boot", ["small", "med", "big"]),
    ("safety", ["low", "med", "high"]),
]
CLASSES = ["unacc", "acc", "good", "vgood"]


def price(buying, maint):
    # 0 = too expensive, 3 = cheap; index 0 of the domains is the cheapest
    b, m = 3 - buying, 3 - maint
    if (b == 0 and m <= 1) or (m == 0 and b <= 1):
        return 0
    s = b + m
    return 1 if s <= 3 else 2 if s <= 5 else 3


def comfort(doors, persons, lug):
    if persons == 0:
        return 0
    c = (persons - 1) + lug + (1 if doors >= 2 else 0)
    if doors == 0 and persons == 2 and lug == 0:
        c -= 1
    return 1 if c <= 1 else 2 if c <= 3 else 3


def tech(com, safety):
    if safety == 0 or com == 0:
        return 0
    t = safety + com
    return 1 if t <= 2 else 2 if t <= 3 else 3


def label(buying, maint, doors, persons, lug, safety):
    p = price(buying, maint)
    t = tech(comfort(doors, persons, lug), safety)
    if p == 0 or t == 0:
        return "unacc"
    if t == 1:
        return "unacc" if p <= 1 else "acc"
    s = p + t
    if s <= 4:
        return "acc"
    if s == 5:
        return "acc" if t == 2 else "good"
    return "good" if t == 2 or p == 2 else "vgood"


def main(out_dir):
    out = pathlib.Path(out_dir)
    rows = []
    for idx in itertools.product(*[range(len(v)) for _, v in DOMAINS]):
        rows.append([DOMAINS[i][1][j] for i, j in enumerate(idx)] + [label(*idx)])
    with open(out / "car.csv", "w") as f:
        f.write("id," + ",".join(n for n, _ in DOMAINS) + ",class\n")
        for i, r in enumerate(rows):
            f.write(f"c{i}," + ",".join(r) + "\n")
    with open(out / "car.domain", "w") as f:
        f.write("# car evaluation stand-in, generated by tools/make_car.py\n@id id\n@label class\n")
        for n, vals in DOMAINS:
            f.write(f"{n}: " + " < ".join(vals) + "\n")
    counts = {c: sum(r[-1] == c for r in rows) for c in CLASSES}
    print(len(rows), counts)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "fixtures")
