import json
import logging
import sqlite3
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

log = logging.getLogger(__name__)


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class ResultStore:
    """Archive of CLI runs: the command, the state it ran on, and its JSON output."""

    def __init__(self, path: str):
        self.path = path
        if path != ":memory:":
            Path(path).parent.mkdir(parents=True, exist_ok=True)
        self.conn = sqlite3.connect(self.path)
        self.conn.row_factory = sqlite3.Row

        self._ensure_schema()

    def close(self) -> None:
        self.conn.close()

    # ---------------- Schema helpers ----------------

    def _table_columns(self, table: str) -> list[str]:
        cur = self.conn.cursor()
        cur.execute(f"PRAGMA table_info({table})")
        return [r[1] for r in cur.fetchall()]

    def _ensure_column(self, table: str, col: str, decl: str) -> None:
        if col not in self._table_columns(table):
            cur = self.conn.cursor()
            cur.execute(f"ALTER TABLE {table} ADD COLUMN {col} {decl}")
            self.conn.commit()

    def _ensure_schema(self) -> None:
        cur = self.conn.cursor()
        cur.execute(
            """
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                state_json TEXT,
                payload_json TEXT NOT NULL,
                created_at TEXT NOT NULL
            )
            """
        )
        self.conn.commit()

        self._ensure_column("runs", "exit_code", "INTEGER NOT NULL DEFAULT 0")

    # ---------------- Runs ----------------

    def record_run(self, command: str, payload, state: Optional[dict] = None, exit_code: int = 0) -> int:
        cur = self.conn.cursor()
        cur.execute(
            """
            INSERT INTO runs (command, state_json, payload_json, created_at, exit_code)
            VALUES (?, ?, ?, ?, ?)
            """,
            (
                command,
                json.dumps(state) if state is not None else None,
                json.dumps(payload),
                _utcnow_iso(),
                int(exit_code),
            ),
        )
        self.conn.commit()
        run_id = int(cur.lastrowid)
        log.info("Store: recorded %s run #%d", command, run_id)
        return run_id

    def get_by_id(self, run_id: int) -> Optional[dict]:
        cur = self.conn.cursor()
        cur.execute("SELECT * FROM runs WHERE id=?", (int(run_id),))
        return self._row_to_run(cur.fetchone())

    def list_runs(self, command: Optional[str] = None, limit: int = 20) -> list[dict]:
        cur = self.conn.cursor()
        if command:
            cur.execute("SELECT * FROM runs WHERE command=? ORDER BY id DESC LIMIT ?", (command, int(limit)))
        else:
            cur.execute("SELECT * FROM runs ORDER BY id DESC LIMIT ?", (int(limit),))
        return [self._row_to_run(r) for r in cur.fetchall()]

    def delete_run(self, run_id: int) -> bool:
        cur = self.conn.cursor()
        cur.execute("DELETE FROM runs WHERE id=?", (int(run_id),))
        self.conn.commit()
        return cur.rowcount > 0

    def _row_to_run(self, row) -> Optional[dict]:
        if not row:
            return None

        def _load(raw):
            try:
                return json.loads(raw) if raw else None
            except json.JSONDecodeError:
                log.warning("Store: run #%s has an unreadable JSON column", row["id"])
                return None

        return {
            "id": row["id"],
            "command": row["command"],
            "state": _load(row["state_json"]),
            "payload": _load(row["payload_json"]),
            "exit_code": row["exit_code"],
            "created_at": row["created_at"],
        }
