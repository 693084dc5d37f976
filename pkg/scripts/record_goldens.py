#!/usr/bin/env python3
"""Regenerate the golden fixtures under tests/golden/.

Run from the repository root after an intentional behavior change, then
inspect the diff before committing:

    python3 scripts/record_goldens.py
"""

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from splkit.backend import generate_product, scan_workspace  # noqa: E402
from splkit.mdl import parse_module  # noqa: E402
from splkit.protocol import Session, dumps  # noqa: E402

CORPUS = REPO / "corpus" / "rotlog"
GOLDEN = REPO / "tests" / "golden"

FEATURES = scan_workspace(CORPUS)

LOAD_SESSION = [FEATURES]

CONFIGURE_SESSION = [
    FEATURES,
    {"method": "activate", "feature": "rot.Backup"},
    {"method": "activate", "feature": "rot.Backup.eval"},
    {"method": "activate", "feature": "visit:postorder"},
    {"method": "validate"},
    {"method": "activate", "feature": "rot.FileOpEndemic.impl"},
    {"method": "validate"},
]

COMMIT_SESSION = [
    FEATURES,
    {"method": "activate", "feature": "rot.Backup"},
    {"method": "activate", "feature": "rot.Backup.eval"},
    {"method": "activate", "feature": "rot.FileOpEndemic.impl"},
    {"method": "activate", "feature": "visit:postorder"},
    {"method": "updateAttribute", "feature": "rot.Backup.eval", "attribute": "priority", "value": "10"},
    {"method": "validate"},
    {"method": "commit"},
]


def record_transcript(name: str, requests: list) -> None:
    session = Session()
    responses = [session.dispatch(req) for req in requests]
    directory = GOLDEN / "transcripts"
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{name}.in.ndjson").write_text(
        "".join(dumps(r) + "\n" for r in requests), encoding="utf-8"
    )
    (directory / f"{name}.out.ndjson").write_text(
        "".join(dumps(r) + "\n" for r in responses), encoding="utf-8"
    )
    print(f"recorded transcript {name} ({len(requests)} messages)")
    return responses


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    (GOLDEN / "features_rotlog.json").write_text(dumps(FEATURES) + "\n", encoding="utf-8")
    print("recorded features payload")

    record_transcript("load", LOAD_SESSION)
    record_transcript("configure", CONFIGURE_SESSION)
    responses = record_transcript("commit", COMMIT_SESSION)

    commit_response = responses[-1]
    assert commit_response["ok"], commit_response
    payload = {k: commit_response[k] for k in ("active", "locals", "globals")}
    modules = [
        parse_module(p.read_text(encoding="utf-8"), source=p.name)
        for p in sorted(CORPUS.glob("*.mdl"))
    ]
    product_dir = GOLDEN / "product"
    product_dir.mkdir(parents=True, exist_ok=True)
    for stale in product_dir.glob("*.mdlc"):
        stale.unlink()
    for path in generate_product(payload, modules, product_dir):
        print(f"recorded {path.relative_to(REPO)}")


if __name__ == "__main__":
    main()
