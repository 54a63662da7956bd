import numpy as np

SEED_MASK = (1 << 64) - 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for (seed, key), independent of call order.

    Subject j of replicate r draws from substream(seed, r, j), so a
    trajectory does not depend on how many others run or in what order.
    """
    sequence = np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def seed_tag(seed: int, *key: int) -> int:
    """64-bit token identifying a substream."""
    sequence = np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
