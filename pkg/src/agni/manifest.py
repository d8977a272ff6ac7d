"""Run manifests for reproducible command-line runs.

Every file the CLI writes gets a sibling `<name>.manifest.json` recording
the command line, hashes of any config files consumed, the effective seed,
and the tool version.  The output bytes themselves are a pure function of
that manifest (the timestamp lives only in the manifest, never in the
output), so identical manifests modulo timestamp imply byte-identical
outputs.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from pathlib import Path

from . import __version__


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def build_manifest(argv, seed=None, config_paths=()) -> dict:
    return {
        "command": list(argv),
        "config_hashes": {str(p): _sha256(Path(p)) for p in config_paths},
        "seed": seed,
        "tool_version": __version__,
        "timestamp_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def write_output(path, data: str, manifest: dict) -> None:
    """Write `data` to `path` and the manifest beside it."""
    path = Path(path)
    path.write_text(data)
    sidecar = path.with_name(path.name + ".manifest.json")
    sidecar.write_text(json.dumps(manifest, indent=2) + "\n")
