#!/usr/bin/env python3
"""Wire protocol walk-through over the stdio NDJSON loop.

Starts `gridbook stdio` as a subprocess and has a scripted conversation
with it: typed entries, a formula, a drag-fill whose every display is
computed engine-side, and an explain trace. Each exchange is printed as
the exact JSON that crossed the pipe. Run from the repository root:

    python3 scripts/demo_protocol.py
"""

import json
import subprocess
import sys

COMMANDS = [
    {"id": "1", "verb": "SetEntry", "params": {"addr": "G2", "text": "8:20"}},
    {"id": "2", "verb": "SetEntry", "params": {"addr": "G3", "text": "8:30"}},
    {"id": "3", "verb": "Fill",
     "params": {"seed": "G2:G3", "target": "G2:G6"}},
    {"id": "4", "verb": "SetEntry", "params": {"addr": "A1", "text": "33%"}},
    {"id": "5", "verb": "SetEntry", "params": {"addr": "A2", "text": "70%"}},
    {"id": "6", "verb": "SetEntry",
     "params": {"addr": "A3", "text": "=A2-A1"}},
    {"id": "7", "verb": "Explain", "params": {"text": "12/3"}},
    {"id": "8", "verb": "SnapshotRequest", "params": {"window": "A1:G6"}},
]


def main():
    proc = subprocess.Popen(
        [sys.executable, "-m", "gridbook", "stdio"],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
    wire_in = "\n".join(json.dumps(c) for c in COMMANDS) + "\n"
    out, _ = proc.communicate(wire_in, timeout=60)

    responses = [json.loads(line) for line in out.splitlines() if line]
    for cmd, resp in zip(COMMANDS, responses):
        print(f"-> {json.dumps(cmd)}")
        body = json.dumps(resp)
        if len(body) > 300:
            body = body[:300] + f"... ({len(body)} bytes)"
        print(f"<- {body}\n")

    fill = responses[2]
    displays = {c["addr"]: c["display"] for c in fill["changes"]}
    print("drag-fill of 8:20/8:30 continued engine-side:",
          {a: displays[a] for a in ("G4", "G5", "G6")})
    trace = responses[6]["payload"]["trace"]
    print("\nexplain('12/3') says:")
    for line in trace.splitlines():
        print(f"  {line}")
    return proc.returncode or 0


if __name__ == "__main__":
    sys.exit(main())
