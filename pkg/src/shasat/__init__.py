"""SAT-based semi-free-start collision search for step-reduced SHA-256.

The package encodes a differential characteristic and the two compression
runs it describes as CNF, and searches it with a CDCL kernel that accepts an
external propagator reasoning directly about signed differences.
"""

from __future__ import annotations

__version__ = "0.1.0"
