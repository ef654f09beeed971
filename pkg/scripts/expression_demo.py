#!/usr/bin/env python3
"""Walk through the expression mechanism on three hand-written trees: the
plain ORDER example, one with junk terminals, and one under NEG_JOIN."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gpscale.cli import main

DEMOS = [
    ("plain ORDER, l=4",
     ["express", "--problem", "order", "--l", "4",
      "(JOIN (JOIN ~X3 X1) (JOIN (JOIN ~X1 ~X2) (JOIN X4 ~X3)))"]),
    ("two junk leaves are ignored, l=4",
     ["express", "--problem", "order", "--l", "4", "--junk", "2",
      "(JOIN (JOIN ~X3 J1) (JOIN (JOIN ~X1 X2) (JOIN J2 X4)))"]),
    ("NEG_JOIN flips each descendant leaf once, l=2",
     ["express", "--problem", "order", "--l", "2", "--neg-join",
      "(NEG_JOIN ~X1 X2)"]),
]

for title, argv in DEMOS:
    print(f"--- {title}")
    main(argv)
    print()
