"""Utility modules for diqsim.

Includes:
- logger: Structured logging setup
- seeding: Seeded, order-independent random streams
"""

from diqsim.utils.logger import get_logger, setup_logger
from diqsim.utils.seeding import Stream, derive_rng

__all__ = ["setup_logger", "get_logger", "derive_rng", "Stream"]
