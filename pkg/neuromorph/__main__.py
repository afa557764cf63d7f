"""
Main entry point for running neuromorph as a module with python -m neuromorph
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
