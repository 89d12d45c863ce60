import json

import pandas as pd

from config import CSV_COLUMNS, RNG_NAME


def trials_csv(rows):
    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    if not df.empty:
        df["success"] = df["success"].astype(int)
    body = df.to_csv(index=False, lineterminator="\n")
    return (f"# rng={RNG_NAME}\n" + body).encode("utf-8")


def build_trial_artifacts(config, records):
    rows = [r.to_row() for r in records]
    successes = sum(1 for r in records if r.success)

    summary = {
        "config": config,
        "rng": RNG_NAME,
        "trials": len(records),
        "successes": successes,
        "success_rate": successes / len(records) if records else None,
        "records": [
            {
                "trial": r.trial,
                "seed": r.seed,
                "defectives": list(r.truth),
                "deleted": list(r.deleted),
                "status": r.status,
                "recovered": list(r.recovered),
                "diagnostics": r.diagnostics,
            }
            for r in records
        ],
    }
    summary_json = json.dumps(summary, indent=2).encode("utf-8")

    return {
        "trials.csv": trials_csv(rows),
        "summary.json": summary_json,
    }
