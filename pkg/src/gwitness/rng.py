"""Counter-based random streams keyed by (seed, index).

Each stream is a Philox4x64 generator whose 128-bit key packs the campaign
seed (low word) and the sample index (high word), so sample ``i`` draws the
same numbers no matter which worker runs it or in what order.
"""

import numpy as np

from .errors import ValidationError

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int) -> np.random.Generator:
    seed, index = int(seed), int(index)
    if not (0 <= seed <= _MASK64 and 0 <= index <= _MASK64):
        raise ValidationError("seed and index must be integers in [0, 2**64)")
    return np.random.Generator(np.random.Philox(key=(index << 64) | seed))
