#!/usr/bin/env python3
"""
Deterministic stand-in for a random C program generator.

    mock_csmith.py [--<feature> | --no-<feature> ...] --seed N --output FILE

The seed alone picks a behavior (see ``choose_behavior``) that the mock
compiler acts on when it reads the marker comment in the program. Feature
flags are accepted and echoed into the program but change nothing else.
``--force-behavior NAME`` overrides the seed's choice.
"""

import argparse
import random
import sys

# (behavior, probability); the remainder is "none". Behaviors missing here
# are only reachable through --force-behavior.
BEHAVIOR_WEIGHTS = (
    ("miscompile", 0.10),
    ("crash-o0", 0.02),
    ("crash-o3", 0.02),
    ("crash-both", 0.01),
    ("ice-o3", 0.01),
    ("timeout-o0", 0.01),
    ("timeout-o3", 0.02),
    ("timeout-both", 0.01),
    ("reject-both", 0.02),
    ("run-hang-o3", 0.01),
    ("gen-fail", 0.02),
)

# failure class a campaign must record for each behavior
EXPECTED_CLASS = {
    "none": "none",
    "miscompile": "miscompilation",
    "crash-o0": "crashO0",
    "crash-o3": "crashO3",
    "crash-both": "crashBoth",
    "ice-o3": "crashO3",
    "timeout-o0": "timeoutO0",
    "timeout-o3": "timeoutO3",
    "timeout-both": "timeoutBoth",
    "reject-o3": "compileErrorO3",
    "reject-both": "compileErrorBoth",
    "run-hang-o3": "runDivergenceTimeout",
    "gen-fail": "generatorError",
}

MARKER = "MOCK-BEHAVIOR:"


def choose_behavior(seed: int) -> str:
    roll = random.Random(seed).random()
    for behavior, weight in BEHAVIOR_WEIGHTS:
        if roll < weight:
            return behavior
        roll -= weight
    return "none"


def checksum_for(seed: int) -> int:
    return random.Random(seed ^ 0x5EED).getrandbits(32)


def render_program(seed: int, behavior: str, flags: list[str]) -> str:
    enabled = " ".join(flag[2:] for flag in flags if not flag.startswith("--no-")) or "(defaults)"
    return (
        f"/* {MARKER} {behavior} */\n"
        f"/* seed {seed}; features: {enabled} */\n"
        "#include <stdio.h>\n"
        f"static unsigned int crc = 0x{checksum_for(seed):08X}U;\n"
        "int main(void)\n"
        "{\n"
        '    printf("checksum = %X\\n", crc);\n'
        "    return 0;\n"
        "}\n"
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1], allow_abbrev=False)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--output", required=True)
    parser.add_argument("--force-behavior", choices=sorted(EXPECTED_CLASS))
    options, rest = parser.parse_known_args(argv)
    flags = [arg for arg in rest if arg.startswith("--")]
    if len(flags) != len(rest):
        parser.error(f"unexpected arguments: {[arg for arg in rest if not arg.startswith('--')]}")

    behavior = options.force_behavior or choose_behavior(options.seed)
    if behavior == "gen-fail":
        print("mock_csmith: refusing to generate for this seed", file=sys.stderr)
        return 1
    with open(options.output, "w", encoding="utf-8") as handle:
        handle.write(render_program(options.seed, behavior, flags))
    return 0


if __name__ == "__main__":
    sys.exit(main())
