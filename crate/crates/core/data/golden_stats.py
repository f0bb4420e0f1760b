"""Counts records, nonzeros, largest index and label balance with plain
string handling, independently of the Rust parser."""

import json

out = {}
for name in ("train.svm", "test.svm"):
    count = nnz = max_index = positives = 0
    for line in open(name):
        parts = line.split()
        if not parts:
            continue
        count += 1
        if float(parts[0]) > 0:
            positives += 1
        for p in parts[1:]:
            nnz += 1
            max_index = max(max_index, int(p.split(":")[0]))
    out[name] = {
        "count": count,
        "nnz": nnz,
        "max_index": max_index,
        "positives": positives,
    }
with open("golden_stats.json", "w") as f:
    json.dump(out, f, indent=2, sort_keys=True)
    f.write("\n")
