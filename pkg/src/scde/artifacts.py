"""Reproducible run artifacts: JSON manifests and CSV outputs.

Every CLI run writes one CSV plus one JSON manifest describing it (command,
parameters, tolerances, seeds, tool version, timestamp).  Both files are named
by a content hash over the manifest minus its timestamp, so re-running the
same parameters overwrites the same artifact instead of littering near
duplicates, and two different runs can never collide on a name.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI run."""

    command: str
    argv: list
    params: dict
    tolerances: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    version: str = ""
    timestamp: str = ""

    def content_hash(self):
        """Hash of the run identity: command, params, tolerances, seeds and
        tool version.  Timestamp and raw argv are deliberately excluded so
        identical parameters always map to the same artifact names (argv
        carries incidentals like --out-dir)."""
        payload = asdict(self)
        payload.pop("timestamp")
        payload.pop("argv")
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def basename(self):
        return f"{self.command}-{self.content_hash()}"


def make_manifest(command, argv, params, tolerances=None, seeds=None,
                  version=""):
    return RunManifest(
        command=command,
        argv=[str(a) for a in argv],
        params={k: _plain(v) for k, v in params.items()},
        tolerances={k: _plain(v) for k, v in (tolerances or {}).items()},
        seeds={k: _plain(v) for k, v in (seeds or {}).items()},
        version=version,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def _plain(value):
    """Coerce numpy scalars and sequences into JSON-clean built-ins."""
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def output_dir(explicit=None):
    """Output directory: flag value, else $SCDE_OUT_DIR, else the cwd."""
    out = explicit or os.environ.get("SCDE_OUT_DIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def write_artifacts(manifest, header, rows, directory):
    """Write the manifest JSON and its CSV; returns (csv_path, json_path)."""
    directory = output_dir(directory)
    base = os.path.join(directory, manifest.basename())
    csv_path, json_path = base + ".csv", base + ".json"
    with open(json_path, "w") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return csv_path, json_path
