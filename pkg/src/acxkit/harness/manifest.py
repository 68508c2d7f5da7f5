"""Run directories: manifest, CSV tables and the plain-text verdict."""
import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

RUN_FILES = ("manifest.json", "attraction.csv", "convergence.csv", "verdict.txt")
CONVERGENCE_COLUMNS = ("nu", "tau", "K_id", "domain_dev", "structure_dev", "structure_dev_d1")


def fmt(x):
    """Locale-independent cell text; floats carry 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def write_csv(path, rows, columns):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c, "")) for c in columns])


def jsonable(obj):
    """Plain JSON types; non-finite floats become strings so the output stays strict JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def canonical_json(obj):
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass
class RunManifest:
    command: str
    scenario_hash: str
    config: dict
    per_nu: list
    verdict: str
    files: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def body(self):
        return {"command": self.command, "scenario_hash": self.scenario_hash, "config": self.config,
                "per_nu": self.per_nu, "verdict": self.verdict, "files": sorted(self.files),
                "details": self.details}

    def digest(self):
        return hashlib.sha256(canonical_json(self.body()).encode()).hexdigest()

    def to_json(self):
        out = jsonable(self.body())
        out["manifest_sha256"] = self.digest()
        return json.dumps(out, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_run(out_dir, manifest, attraction_rows, attraction_columns, convergence_rows,
              verdict_lines, extra_tables=None):
    """Write the four run files (plus ``extra_tables``: ``name -> (rows, columns)``)."""
    os.makedirs(out_dir, exist_ok=True)
    extra_tables = extra_tables or {}
    manifest.files = list(RUN_FILES) + sorted(extra_tables)
    write_csv(os.path.join(out_dir, "attraction.csv"), attraction_rows, attraction_columns)
    write_csv(os.path.join(out_dir, "convergence.csv"), convergence_rows, CONVERGENCE_COLUMNS)
    for name in sorted(extra_tables):
        rows, cols = extra_tables[name]
        write_csv(os.path.join(out_dir, name), rows, cols)
    with open(os.path.join(out_dir, "verdict.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(verdict_lines) + "\n")
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json())
    return os.path.join(out_dir, "manifest.json")
