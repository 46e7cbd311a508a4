"""Run bpire as ``python -m bpire``."""

import sys

from .cli import main

sys.exit(main())
