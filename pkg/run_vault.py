import json

from utils import now_iso, sha256_bytes


def save_run(con, command, config, artifacts):
    cur = con.cursor()

    cur.execute("""
        INSERT INTO runs
        (command, config_json, created_at)
        VALUES (?, ?, ?)
    """, (command, json.dumps(config, sort_keys=True), now_iso()))

    run_id = cur.lastrowid

    for name, content in artifacts.items():
        cur.execute("""
            INSERT INTO artifacts
            (run_id, name, sha256, content, created_at)
            VALUES (?, ?, ?, ?, ?)
        """, (run_id, name, sha256_bytes(content), content, now_iso()))

    con.commit()
    return run_id


def verify_run(con, run_id):
    """Map artifact name -> True when the stored content still matches its hash."""
    arts = con.execute("""
        SELECT name, sha256, content
        FROM artifacts
        WHERE run_id=?
        ORDER BY name ASC
    """, (run_id,)).fetchall()
    return {a["name"]: sha256_bytes(a["content"]) == a["sha256"] for a in arts}


def list_runs(con):
    rows = con.execute("""
        SELECT id, command, config_json, created_at
        FROM runs
        ORDER BY id ASC
    """).fetchall()

    return [
        {
            "id": r["id"],
            "command": r["command"],
            "config": json.loads(r["config_json"] or "{}"),
            "created_at": r["created_at"],
            "artifacts": verify_run(con, r["id"]),
        }
        for r in rows
    ]
