"""Reference facet inequalities of the five two-sender scenarios.

Each entry is ``(name, orbit_size, inequality)``. Named inequalities are the
ones with a reported quantum advantage; the rest are labeled by position.
Different tables eliminate different outcomes through normalization, so
comparisons go through hull canonicalization and orbit membership.
"""
from __future__ import annotations

from .scenario import ScenarioSpec

SCENARIOS = {
    "222": ScenarioSpec.uniform((2, 2), 2, "D"),
    "223": ScenarioSpec.uniform((2, 2), 3, "D"),
    "322A": ScenarioSpec.uniform((3, 2), 2, "A"),
    "322D": ScenarioSpec.uniform((3, 2), 2, "D"),
    "224": ScenarioSpec.uniform((2, 2), 4, "A"),
}

FACET_COUNTS = {
    # total facets, trivial facets, nontrivial orbit sizes
    "222": (18, 10, [8]),
    "223": (134, 14, [24, 48, 24, 24]),
    "322A": (44, 14, [12, 6, 12]),
    "322D": (116, 14, [6, 12, 24, 24, 12, 24]),
    "224": (2210, 18, None),
}
N_CLASSES_224 = 21

REFERENCE = {
    "222": [
        ("r1", 8, "p(1|2,1)-p(1|2,2) <= 2D2-1"),
    ],
    "223": [
        ("r1", 24, "-p(2|2,1)+p(2|2,2)-p(3|2,1)+p(3|2,2) <= 2D2-1"),
        ("r2", 48, "-2p(2|1,1)+p(2|2,1)+2p(2|1,2)-p(2|2,2)+2p(3|1,2)-2p(3|2,2) <= 4D1+2D2-3"),
        ("r3", 24, "-p(2|2,1)+p(2|1,2)-p(3|1,1)+2p(3|1,2)-p(3|2,2) <= 2D1+2D2-2"),
        ("r4", 24, "-2p(2|2,1)+2p(2|1,2)-p(3|1,1)+p(3|2,1)+3p(3|1,2)-3p(3|2,2) <= 4D1+4D2-4"),
    ],
    "322A": [
        ("r1", 12, "p(1|1,1)-p(1|2,1) <= 3A1-2"),
        ("r2", 6, "-p(1|1,1)+p(1|1,2) <= 2A2-1"),
        ("r3", 12, "-p(1|2,1)+2p(1|3,1)-2p(1|1,2)+p(1|2,2) <= 6A1+2A2-5"),
    ],
    "322D": [
        ("r1", 6, "-p(2|3,1)+p(2|3,2) <= 2D2-1"),
        ("r2", 12, "p(2|1,1)-p(2|2,1) <= 3D1-1"),
        ("I1", 24, "p(2|1,1)-3p(2|2,1)+p(2|3,1)-p(2|1,2)+p(2|2,2)+p(2|3,2) <= 6D1+2D2-3"),
        ("I2", 24, "2p(2|1,1)-2p(2|2,1)+p(2|3,1)-2p(2|1,2)+p(2|3,2) <= 6D1+2D2-3"),
        ("I3", 12, "p(2|1,1)-3p(2|2,1)+3p(2|3,1)+3p(2|1,2)-p(2|2,2)-3p(2|3,2) <= 12D1+2D2-5"),
        ("I4", 24, "-p(2|1,1)+p(2|2,1)-p(2|1,2)-p(2|2,2)+p(2|3,2) <= 3D1-1"),
    ],
    "224": [
        ("r1", 32, "-p(1|1,1)+p(1|1,2)-p(2|1,1)+p(2|1,2)-p(3|1,1)+p(3|1,2) <= 2A2-1"),
        ("r2", 96, "-2p(1|1,1)+p(1|2,1)+2p(1|1,2)-p(1|2,2)-p(2|2,1)+2p(2|1,2)-p(2|2,2) <= 4A1+2A2-3"),
        ("I5", 96, "-p(1|1,1)+p(1|1,2)+p(2|1,1)-2p(2|2,1)+p(2|1,2)+2p(3|1,2)-2p(3|2,2) <= 4A1+2A2-3"),
        ("r4", 192, "-p(1|2,1)-p(1|1,2)+2p(1|2,2)-2p(2|1,1)+p(2|2,1)+p(2|2,2)-2p(3|1,2)+2p(3|2,2) <= 4A1+2A2-3"),
        ("r5", 96, "-2p(1|1,2)+2p(1|2,2)-2p(2|1,2)+2p(2|2,2)-2p(3|1,1)+p(3|2,1)+p(3|2,2) <= 4A1+2A2-3"),
        ("r6", 96, "p(1|1,1)-2p(1|2,1)+p(1|1,2)+2p(3|1,2)-2p(3|2,2) <= 4A1+2A2-3"),
        ("r7", 192, "-2p(1|1,2)+2p(1|2,2)+p(2|1,1)-p(2|2,1)-p(2|1,2)+p(2|2,2)+p(3|1,1)-2p(3|2,1)-p(3|1,2)"
                    "+2p(3|2,2) <= 4A1+2A2-3"),
        ("r8", 48, "-p(1|1,1)+p(1|2,2)+p(2|1,1)-p(2|2,1)-p(2|1,2)+p(2|2,2) <= 2A1+2A2-2"),
        ("r9", 24, "p(1|1,1)-3p(1|2,1)-p(1|1,2)+3p(1|2,2)-2p(2|1,1)+2p(2|2,2)+p(3|1,1)-p(3|2,1)-3p(3|1,2)"
                   "+3p(3|2,2) <= 4A1+4A2-4"),
        ("r10", 192, "p(1|2,1)-2p(1|1,2)+p(1|2,2)+p(2|2,1)-p(2|2,2)+p(3|1,1)-p(3|2,1)-p(3|1,2)+p(3|2,2)"
                     " <= 4A1+2A2-3"),
        ("r11", 96, "p(1|1,1)-3p(1|2,1)-p(1|1,2)+3p(1|2,2)-2p(2|2,1)+2p(2|2,2)-2p(3|1,1)+2p(3|2,2) <= 4A1+4A2-4"),
        ("r12", 48, "-p(1|1,1)+p(1|2,1)+p(1|1,2)-p(1|2,2)+p(2|2,1)-p(2|1,2)+p(3|2,1)-p(3|1,2) <= 2A1+2A2-2"),
        ("r13", 48, "3p(1|1,1)-3p(1|2,1)-p(1|1,2)+p(1|2,2)+2p(2|1,1)-2p(2|2,2)+3p(3|1,1)-3p(3|2,1)-p(3|1,2)"
                    "+p(3|2,2) <= 4A1+4A2-4"),
        ("I6", 96, "p(1|1,2)-p(1|2,2)-p(2|1,1)+p(2|2,1)+p(2|1,2)-p(2|2,2)+p(3|2,1)-p(3|2,2) <= 2A1+2A2-2"),
        ("r15", 192, "-2p(1|1,1)+2p(1|2,1)+p(1|1,2)-p(1|2,2)+2p(2|2,1)-p(2|1,2)-p(2|2,2)+p(3|2,1)-p(3|1,2)"
                     " <= 2A1+4A2-3"),
        ("r16", 192, "p(1|1,1)-3p(1|2,1)-p(1|1,2)+3p(1|2,2)-2p(2|2,1)+2p(2|2,2)+p(3|1,1)-p(3|2,1)-3p(3|1,2)"
                     "+3p(3|2,2) <= 4A1+4A2-4"),
        ("I7", 192, "p(1|1,2)-p(1|2,2)-p(2|1,1)+2p(2|1,2)-p(2|2,2)-p(3|2,1)+p(3|1,2) <= 2A1+2A2-2"),
        ("r18", 96, "p(1|1,1)-p(1|2,1)-3p(1|1,2)+3p(1|2,2)+p(2|1,1)-3p(2|2,1)-p(2|1,2)+3p(2|2,2)+p(3|1,1)"
                    "-p(3|2,1)-3p(3|1,2)+3p(3|2,2) <= 4A1+4A2-4"),
        ("r19", 96, "p(1|1,1)-p(1|2,1)-3p(1|1,2)+3p(1|2,2)-2p(2|1,1)+2p(2|2,2)-2p(3|2,1)+2p(3|2,2) <= 4A1+4A2-4"),
        ("r20", 48, "p(2|1,1)-2p(2|1,2)+p(2|2,2)+p(3|1,1)-p(3|2,1)-p(3|1,2)+p(3|2,2) <= 2A1+2A2-2"),
    ],
}

# (scenario, name) -> (target value of the figure of merit, reported total-resource ratio)
TOTAL_RESOURCE_TARGETS = {
    ("322D", "I1"): (2.1339, 1.0517),
    ("322D", "I2"): (3.1579, 1.06093),
    ("322D", "I3"): (4.3975, 1.04715),
    ("322D", "I4"): (0.0323, 1.0121),
    ("224", "I5"): (1.0655, 1.0066),
    ("224", "I6"): (1.02, 1.117),
    ("224", "I7"): (1.2166, 1.0225),
}


def reference(key: str, name: str) -> str:
    for n, _, text in REFERENCE[key]:
        if n == name:
            return text
    raise KeyError(f"{key}/{name}")
