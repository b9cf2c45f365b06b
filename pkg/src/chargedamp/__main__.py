"""Allow ``python -m chargedamp``."""

import sys

from .cli import main

sys.exit(main())
