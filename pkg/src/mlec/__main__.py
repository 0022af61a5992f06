"""Allow ``python3 -m mlec``."""

import sys

from .cli import main

sys.exit(main())
