#!/usr/bin/env python3
"""
Deterministic stand-in for a C compiler.

    mock_cc.py -O<level> -o OUTPUT INPUT

Reads the behavior marker written by ``mock_csmith.py`` and misbehaves
accordingly; otherwise writes an executable that prints the program's
checksum line. Level 0 is the low optimization level, anything else the
high one.
"""

import os
import re
import shlex
import sys
import time

MARKER_RE = re.compile(r"MOCK-BEHAVIOR:\s*([\w-]+)")
CRC_RE = re.compile(r"crc\s*=\s*0x([0-9A-Fa-f]+)U")


def parse_arguments(argv: list[str]) -> tuple[str, str, str]:
    level, output, source = "-O0", None, None
    arguments = iter(argv)
    for argument in arguments:
        if argument == "-o":
            output = next(arguments, None)
        elif argument.startswith("-O"):
            level = argument
        elif argument.startswith("-"):
            continue
        else:
            source = argument
    if output is None or source is None:
        print("mock_cc: usage: mock_cc.py -O<level> -o OUTPUT INPUT", file=sys.stderr)
        sys.exit(2)
    return level, output, source


def applies(behavior: str, high: bool) -> bool:
    """Whether a level-specific behavior (``-o0``, ``-o3``, ``-both``) fires at this level."""
    if behavior.endswith("-both"):
        return True
    if behavior.endswith("-o0"):
        return not high
    if behavior.endswith("-o3"):
        return high
    return False


def binary_script(body: str) -> str:
    return f"#!/bin/sh\nexec {shlex.quote(sys.executable)} -c {shlex.quote(body)}\n"


def main(argv: list[str] | None = None) -> int:
    level, output, source = parse_arguments(sys.argv[1:] if argv is None else argv)
    high = level not in ("-O0", "-O")
    try:
        with open(source, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"mock_cc: error: cannot read input: {exc.strerror}", file=sys.stderr)
        return 1

    marker = MARKER_RE.search(text)
    behavior = marker.group(1) if marker else "none"
    crc_match = CRC_RE.search(text)
    if crc_match is None:
        print("mock_cc: error: no checksum in program", file=sys.stderr)
        return 1
    checksum = int(crc_match.group(1), 16)

    if behavior.startswith("crash-") and applies(behavior, high):
        sys.stderr.flush()
        os.abort()
    if behavior == "ice-o3" and high:
        print("program.c: internal compiler error: in mock_fold, at mock.c:42", file=sys.stderr)
        return 4
    if behavior.startswith("timeout-") and applies(behavior, high):
        time.sleep(3600)
    if behavior.startswith("reject-") and applies(behavior, high):
        print("program.c:1:1: error: mock rejects this program", file=sys.stderr)
        return 1

    if behavior == "miscompile" and high:
        checksum = (checksum + 1) & 0xFFFFFFFF
    if behavior == "run-hang-o3" and high:
        body = "import time\nwhile True:\n    time.sleep(1)\n"
    else:
        body = f"print('checksum = {checksum:X}')\n"

    with open(output, "w", encoding="utf-8") as handle:
        handle.write(binary_script(body))
    os.chmod(output, 0o755)
    return 0


if __name__ == "__main__":
    sys.exit(main())
