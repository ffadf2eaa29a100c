#!/usr/bin/env python3
"""JSON-lines shell over an in-memory SQLite database.

Reads one request per line from stdin and writes one response per line:
  {"op": "reset"}             -> {"ok": true, "rows": []}
  {"op": "exec", "sql": "..."} -> {"ok": true, "rows": [[...], ...]}
Errors come back as {"ok": false, "error": "..."}.
"""
import json
import sqlite3
import sys


def cell(v):
    if isinstance(v, (bytes, bytearray, memoryview)):
        return {"blob": bytes(v).hex()}
    return v


def main():
    db = sqlite3.connect(":memory:", isolation_level=None)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            if req.get("op") == "reset":
                db.close()
                db = sqlite3.connect(":memory:", isolation_level=None)
                out = {"ok": True, "rows": []}
            elif req.get("op") == "exec":
                rows = db.execute(req["sql"]).fetchall()
                out = {"ok": True, "rows": [[cell(v) for v in r] for r in rows]}
            else:
                out = {"ok": False, "error": "unknown op"}
        except Exception as e:  # reported to the caller, never fatal
            out = {"ok": False, "error": str(e)}
        sys.stdout.write(json.dumps(out) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
