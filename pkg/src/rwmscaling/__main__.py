"""Allow `python -m rwmscaling` as an alias for the rwmscale script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
