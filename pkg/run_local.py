#!/usr/bin/env python3
"""
Run the laboratory from a source checkout.

Loads ``.env`` (GLELAB_LOG_LEVEL, GLELAB_THREADS), configures logging and
hands the arguments to the CLI.

Usage:
    uv run python run_local.py report --config config/exponential.cfg
    # or
    uv run gle-lab report --config config/exponential.cfg
"""

import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

# Add project root to path
project_root = Path(__file__).parent.absolute()
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    level=getattr(logging, os.environ.get("GLELAB_LOG_LEVEL", "INFO").upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


def main() -> int:
    from app.cli import main as cli_main

    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        sys.exit(130)
