"""Reproducible random streams.

Every stochastic routine in the package draws from a counter-based
Philox generator keyed by (master_seed, stream_id). Streams with
distinct ids are statistically independent, so parallel workers can
share a master seed without coordination, and any single stream can
be replayed in isolation.
"""

import numpy as np

__all__ = ["stream"]


def stream(master_seed, stream_id=0):
    """Independent Generator for (master_seed, stream_id)."""
    if master_seed < 0 or stream_id < 0:
        raise ValueError("seed and stream id must be nonnegative")
    key = (int(master_seed) << 64) + int(stream_id)
    return np.random.Generator(np.random.Philox(key=key))
