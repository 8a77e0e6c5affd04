"""CSV/JSON schema validation for the upstream artifact files.

Every reader validates the header against a named-column schema and fails
with a message that names the offending column, never a bare parse error.
"""

import csv
import hashlib
import json
import os


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


# documented schemas of the upstream artifacts, keyed by artifact name
SCHEMAS = {
    "a2_scan.csv": ["beta", "weight_kind", "level", "constant",
                    "classification"],
    "persistence_scan.csv": ["family", "r", "level", "norm_sq", "verdict"],
    "smoothing_budget.csv": ["theta", "variant", "cap_scale", "value",
                             "stride_audit"],
    "norm_series.csv": ["t", "s", "r", "sobolev", "weighted", "combined",
                        "mean_mode", "first_moment"],
    "shape_error.csv": ["n", "half_length", "shape_error"],
    "commutator_ratios.csv": ["inequality", "trials", "max_ratio",
                              "mean_ratio"],
}

NUMERIC_COLUMNS = {
    "beta", "level", "constant", "r", "norm_sq", "theta", "cap_scale",
    "value", "stride_audit", "t", "s", "sobolev", "weighted", "combined",
    "mean_mode", "first_moment", "n", "half_length", "shape_error",
    "trials", "max_ratio", "mean_ratio",
}


def read_table(path, columns=None):
    """Read a CSV artifact into a list of dict rows.

    columns defaults to the documented schema for the file's basename.
    Raises SchemaError naming any missing column or unparseable cell.
    """
    name = os.path.basename(path)
    if columns is None:
        if name not in SCHEMAS:
            raise SchemaError("no documented schema for %r" % name)
        columns = SCHEMAS[name]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("%s: empty file, expected header %s"
                              % (name, ",".join(columns)))
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(
                "%s: missing required column(s) %s; found columns: %s"
                % (name, ", ".join(repr(c) for c in missing),
                   ", ".join(header)))
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            record = dict(zip(header, raw))
            row = {}
            for col in columns:
                cell = record[col]
                if col in NUMERIC_COLUMNS:
                    try:
                        row[col] = float(cell)
                    except ValueError:
                        raise SchemaError(
                            "%s line %d: column %r is not numeric "
                            "(got %r)" % (name, lineno, col, cell))
                else:
                    row[col] = cell
            rows.append(row)
    return rows


def read_report(path):
    """Parse the persistence report JSON, checking the fields the figure
    layer consumes."""
    with open(path) as fh:
        data = json.load(fh)
    for key in ("family", "ladder", "entries"):
        if key not in data:
            raise SchemaError("%s: missing required field %r"
                              % (os.path.basename(path), key))
    for entry in data["entries"]:
        for key in ("r", "verdict", "norms_sq"):
            if key not in entry:
                raise SchemaError(
                    "%s: report entry missing required field %r"
                    % (os.path.basename(path), key))
    return data


def file_hash(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_hash(in_dir, artifact):
    """Look up the manifest-recorded hash of an artifact, if any manifest
    in the input directory lists it; falls back to hashing the file."""
    for name in sorted(os.listdir(in_dir)):
        if not name.endswith("manifest.json"):
            continue
        try:
            with open(os.path.join(in_dir, name)) as fh:
                manifest = json.load(fh)
        except (OSError, json.JSONDecodeError):
            continue
        outputs = manifest.get("outputs", {})
        if artifact in outputs:
            return outputs[artifact]
    return file_hash(os.path.join(in_dir, artifact))
