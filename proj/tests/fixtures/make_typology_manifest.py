"""Writes typology_manifest.jsonl: 11,200 resolved markets whose questions the
default rules split 1,145 / 1,224 / 8,831 with 333 / 0 / 2,782 YES outcomes."""

import json
import random

EVENT = [
    "Will Candidate-{i} win the election?",
    "Will the FDA approve Drug-{i}?",
    "Will Person-{i} be named in the filing?",
    "Will Company-{i} announce a merger?",
    "Will Defendant-{i} be sentenced?",
]
DEADLINE = [
    "Will Country-{i} strike by Friday?",
    "Will Company-{i} launch its product by October 31?",
    "Ceasefire in Region-{i} by end of June?",
    "Will Agency-{i} issue the ruling before 2026?",
]
UNCLASSIFIABLE = [
    "How many goals will Team-{i} score?",
    "Team-{i} vs. Team-{j}: who covers the spread?",
    "Total points for Player-{i} over 24.5?",
    "Token-{i} above its listing price on expiry?",
]

COUNTS = {"event": (1145, 333), "deadline": (1224, 0), "unclassifiable": (8831, 2782)}
TEMPLATES = {"event": EVENT, "deadline": DEADLINE, "unclassifiable": UNCLASSIFIABLE}


def main() -> None:
    rng = random.Random(5)
    rows = []
    for kind, (n, yes) in COUNTS.items():
        for i in range(n):
            tpl = TEMPLATES[kind][i % len(TEMPLATES[kind])]
            row = {
                "question": tpl.format(i=i, j=i + 1),
                "outcome": "YES" if i < yes else "NO",
                "open_ts": "2025-01-01T00:00:00Z",
                "resolve_ts": "2025-02-01T00:00:00Z",
                "total_volume_usdc": 50000.0 + 10.0 * i,
            }
            if kind == "deadline":
                row["deadline_ts"] = "2025-01-31T00:00:00Z"
            rows.append(row)
    rng.shuffle(rows)
    with open("typology_manifest.jsonl", "w", encoding="utf-8") as f:
        for k, row in enumerate(rows):
            f.write(json.dumps({"market_id": f"t5-{k:05d}", **row}, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
