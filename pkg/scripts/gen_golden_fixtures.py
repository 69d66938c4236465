#!/usr/bin/env python3
"""Regenerate golden AST fixtures from the .c sources in tests/fixtures/golden/.

Uses pycparser as the independent reference parser so the fixtures do not
depend on the package's own parser. Run from the repository root:

    python3 scripts/gen_golden_fixtures.py
"""

import json
import sys
from pathlib import Path

from pycparser import c_parser

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "fixtures" / "golden"


def convert(node) -> dict:
    kind = type(node).__name__
    if kind == "FileAST":
        kind = "Root"
    return {
        "kind": kind,
        "children": [convert(child) for _, child in node.children()],
    }


def main() -> int:
    parser = c_parser.CParser()
    count = 0
    for src_path in sorted(GOLDEN.glob("*.c")):
        source = src_path.read_text(encoding="utf-8")
        ast = parser.parse(source, filename=str(src_path))
        doc = json.dumps(convert(ast), separators=(",", ":"))
        out = src_path.with_suffix(".ast.json")
        out.write_text(doc + "\n", encoding="utf-8")
        count += 1
        print(f"wrote {out.relative_to(ROOT)}")
    if count == 0:
        print("no .c sources found", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
