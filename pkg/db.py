import sqlite3
from pathlib import Path

DB_PATH = Path("group_testing_runs.db")


def get_db(path: str | Path | None = None):
    con = sqlite3.connect(path or DB_PATH, check_same_thread=False)
    con.row_factory = sqlite3.Row
    return con


def init_db(con=None):
    con = con or get_db()

    con.executescript("""
    CREATE TABLE IF NOT EXISTS runs (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        command TEXT NOT NULL,
        config_json TEXT,
        created_at TEXT
    );

    CREATE TABLE IF NOT EXISTS artifacts (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        run_id INTEGER NOT NULL,
        name TEXT NOT NULL,
        sha256 TEXT NOT NULL,
        content BLOB,
        created_at TEXT
    );

    CREATE TABLE IF NOT EXISTS audit_log (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        command TEXT,
        target TEXT,
        timestamp TEXT
    );
    """)

    con.commit()
    return con
