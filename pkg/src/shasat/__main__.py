from __future__ import annotations

import sys

from .orchestrator import main

sys.exit(main())
