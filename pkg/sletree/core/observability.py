"""
RunLogger - Phase-based logging of simulation runs.

Records what was configured, sampled, checked and written, with structured
data for later analysis.
"""

import json
import sqlite3
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from sletree.core.config import RunConfig


@dataclass
class LogEntry:
    """A log entry from the run database."""

    id: int
    ts: str
    session: str
    phase: str
    data: Dict[str, Any] = field(default_factory=dict)


def _entry(row: sqlite3.Row) -> LogEntry:
    return LogEntry(
        id=row["id"],
        ts=row["ts"],
        session=row["session"],
        phase=row["phase"],
        data=json.loads(row["data"]),
    )


class RunLogger:
    """Phase-based logging for simulation runs.

    Phases:
    - config: Resolved command, seed and parameters
    - sample: What was sampled and how much
    - check: A statistical or exhaustive check with its outcome
    - write: Artifacts written to disk
    - verify: Suite-level verification results
    - error: Errors and how they were handled
    """

    PHASES = ["config", "sample", "check", "write", "verify", "error"]

    def __init__(self, db_path: Path):
        """Initialize logger with database path.

        Args:
            db_path: Path to SQLite database file
        """
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._init_db()
        self.session_id = self._new_session()

    def _init_db(self) -> None:
        with sqlite3.connect(self.db_path) as conn:
            conn.executescript(
                """
                CREATE TABLE IF NOT EXISTS logs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    ts TEXT NOT NULL DEFAULT (datetime('now')),
                    session TEXT NOT NULL,
                    phase TEXT NOT NULL,
                    data JSON NOT NULL
                );

                CREATE INDEX IF NOT EXISTS idx_session ON logs(session);
                CREATE INDEX IF NOT EXISTS idx_phase ON logs(phase);
                CREATE INDEX IF NOT EXISTS idx_ts ON logs(ts);

                CREATE VIEW IF NOT EXISTS errors AS
                SELECT id, ts, session,
                       json_extract(data, '$.error_type') as error_type,
                       json_extract(data, '$.resolution') as resolution,
                       data
                FROM logs WHERE phase = 'error';

                CREATE VIEW IF NOT EXISTS checks AS
                SELECT id, ts, session,
                       json_extract(data, '$.name') as name,
                       json_extract(data, '$.passed') as passed,
                       json_extract(data, '$.statistic') as statistic
                FROM logs WHERE phase = 'check';
            """
            )

    def _new_session(self) -> str:
        return f"session_{datetime.now().strftime('%Y%m%d_%H%M%S')}_{uuid.uuid4().hex[:6]}"

    def new_session(self) -> str:
        """Start a new session and return its ID."""
        self.session_id = self._new_session()
        return self.session_id

    def log(self, phase: str, data: Dict[str, Any]) -> None:
        """Log a phase with structured data.

        Args:
            phase: One of ``PHASES``
            data: Structured data for the log entry
        """
        if phase not in self.PHASES:
            raise ValueError(f"Invalid phase: {phase}. Must be one of {self.PHASES}")

        with sqlite3.connect(self.db_path) as conn:
            conn.execute(
                "INSERT INTO logs (session, phase, data) VALUES (?, ?, ?)",
                (self.session_id, phase, json.dumps(data, default=str)),
            )

    # Convenience methods

    def log_config(self, config: RunConfig) -> None:
        self.log("config", config.model_dump(mode="json"))

    def log_sample(self, what: str, count: int, **extra: Any) -> None:
        self.log("sample", {"what": what, "count": count, **extra})

    def log_check(
        self,
        name: str,
        passed: bool,
        statistic: Optional[float] = None,
        threshold: Optional[float] = None,
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Log a check outcome.

        Args:
            name: Check identifier
            passed: Whether the check passed
            statistic: Observed statistic (KS distance, TV distance, ...)
            threshold: Value the statistic was compared with
            details: Optional additional details
        """
        data: Dict[str, Any] = {"name": name, "passed": bool(passed)}
        if statistic is not None:
            data["statistic"] = statistic
        if threshold is not None:
            data["threshold"] = threshold
        if details:
            data["details"] = details
        self.log("check", data)

    def log_write(self, path: str, kind: str, size: int) -> None:
        self.log("write", {"path": path, "kind": kind, "bytes": size})

    def log_error(
        self,
        error_type: str,
        details: Optional[Dict] = None,
        resolution: Optional[str] = None,
    ) -> None:
        data: Dict[str, Any] = {"error_type": error_type}
        if details:
            data["details"] = details
        if resolution:
            data["resolution"] = resolution
        self.log("error", data)

    # Query methods

    def get_session(self, session_id: Optional[str] = None) -> List[LogEntry]:
        """Get all logs for a session (defaults to the current one)."""
        session_id = session_id or self.session_id
        with sqlite3.connect(self.db_path) as conn:
            conn.row_factory = sqlite3.Row
            rows = conn.execute(
                "SELECT * FROM logs WHERE session = ? ORDER BY id", (session_id,)
            ).fetchall()
            return [_entry(row) for row in rows]

    def get_errors(self, since: Optional[str] = None, limit: int = 100) -> List[LogEntry]:
        with sqlite3.connect(self.db_path) as conn:
            conn.row_factory = sqlite3.Row
            if since:
                rows = conn.execute(
                    """
                    SELECT * FROM logs
                    WHERE phase = 'error' AND ts >= ?
                    ORDER BY ts DESC LIMIT ?
                    """,
                    (since, limit),
                ).fetchall()
            else:
                rows = conn.execute(
                    "SELECT * FROM logs WHERE phase = 'error' ORDER BY ts DESC LIMIT ?",
                    (limit,),
                ).fetchall()
            return [_entry(row) for row in rows]

    def get_checks(self, passed: Optional[bool] = None, limit: int = 100) -> List[LogEntry]:
        """Get check logs, optionally only passing or only failing ones."""
        with sqlite3.connect(self.db_path) as conn:
            conn.row_factory = sqlite3.Row
            if passed is None:
                rows = conn.execute(
                    "SELECT * FROM logs WHERE phase = 'check' ORDER BY id DESC LIMIT ?",
                    (limit,),
                ).fetchall()
            else:
                rows = conn.execute(
                    """
                    SELECT * FROM logs
                    WHERE phase = 'check' AND json_extract(data, '$.passed') = ?
                    ORDER BY id DESC LIMIT ?
                    """,
                    (1 if passed else 0, limit),
                ).fetchall()
            return [_entry(row) for row in rows]

    def list_sessions(self, limit: int = 20) -> List[str]:
        """List recent session IDs by most recent activity."""
        with sqlite3.connect(self.db_path) as conn:
            rows = conn.execute(
                """
                SELECT session
                FROM logs
                GROUP BY session
                ORDER BY MAX(id) DESC
                LIMIT ?
                """,
                (limit,),
            ).fetchall()
            return [str(row[0]) for row in rows]

    def get_session_summary(self, session_id: Optional[str] = None) -> Dict[str, Any]:
        """Phase counts, check pass/fail counts and error count for a session.

        Defaults to the most recently active session in the database.
        """
        with sqlite3.connect(self.db_path) as conn:
            resolved_session_id = session_id
            if resolved_session_id is None:
                row = conn.execute("SELECT session FROM logs ORDER BY id DESC LIMIT 1").fetchone()
                resolved_session_id = str(row[0]) if row else self.session_id

            phase_counts = {}
            for row in conn.execute(
                """
                SELECT phase, COUNT(*) as count
                FROM logs WHERE session = ?
                GROUP BY phase
                """,
                (resolved_session_id,),
            ):
                phase_counts[row[0]] = row[1]

            check_counts = {"passed": 0, "failed": 0}
            for row in conn.execute(
                """
                SELECT json_extract(data, '$.passed') as passed, COUNT(*) as count
                FROM logs
                WHERE session = ? AND phase = 'check'
                GROUP BY json_extract(data, '$.passed')
                """,
                (resolved_session_id,),
            ):
                check_counts["passed" if row[0] else "failed"] += row[1]

            return {
                "session_id": resolved_session_id,
                "phase_counts": phase_counts,
                "check_counts": check_counts,
                "error_count": phase_counts.get("error", 0),
                "total_logs": sum(phase_counts.values()),
            }


__all__ = ["LogEntry", "RunLogger"]
