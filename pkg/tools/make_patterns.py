"""Regenerate the shipped pattern library (T3.ttl is kept as printed)."""
from pathlib import Path

from swemls.boxology import parse_pattern
from swemls.patterns import compile_template
from swemls.turtle import serialize

PATTERNS = Path(__file__).resolve().parents[1] / "src" / "swemls" / "data" / "patterns"

# Notations for A1, F2, F3 and F4 are illustrative: only their ids are known.
NOTATIONS = {
    "A1": "[sym -> ML -> sym]",
    "F2": "[{sym / data} -> ML -> sym]",
    "F3": "[{sym / data} -> ML -> sym -> KR -> sym]",
    "F4": "[{sym / sym} -> ML -> sym]",
}

if __name__ == "__main__":
    for pid, notation in NOTATIONS.items():
        text = serialize(compile_template(pid, parse_pattern(notation)))
        (PATTERNS / f"{pid}.ttl").write_text(text, encoding="utf-8")
