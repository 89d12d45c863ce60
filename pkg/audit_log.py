from utils import now_iso


def log_event(con, command, target=""):
    con.execute(
        """
        INSERT INTO audit_log
        (command, target, timestamp)
        VALUES (?,?,?)
        """,
        (command, target, now_iso()),
    )
    con.commit()


def recent_events(con, limit=50):
    return con.execute(
        "SELECT command, target, timestamp FROM audit_log ORDER BY id DESC LIMIT ?",
        (limit,),
    ).fetchall()
