import zlib
from typing import Optional, Union

import numpy as np

# Keeps inverse-CDF draws away from the ends of (0, 1).
QUANTILE_EPS = 1e-12


class NoiseStream:
    """Seeded source of the standard-normal and uniform draws used by samplers.

    Every sampler takes one of these so the same seed replays the same
    trajectory. `scale=0` turns the normal draws into zeros and `greedy=True`
    makes categorical draws pick the most probable entry, which together give
    the deterministic point-estimate rollout.
    """

    def __init__(self, seed: Union[int, np.random.Generator, None] = 0, scale: float = 1.0,
                 greedy: bool = False):
        if isinstance(seed, np.random.Generator):
            self.rng = seed
        else:
            self.rng = np.random.default_rng(seed)
        self.scale = float(scale)
        self.greedy = greedy

    @classmethod
    def deterministic(cls) -> 'NoiseStream':
        return cls(0, scale=0.0, greedy=True)

    def normal(self, size: Optional[int] = None):
        draw = self.rng.standard_normal(size)
        return self.scale * draw if size is not None else float(self.scale * draw)

    def uniform(self) -> float:
        return float(self.rng.random())

    def quantile(self) -> float:
        """A level in (0, 1) for inverse-CDF sampling; the median 0.5 when normal draws are zeroed."""
        if self.scale == 0.0:
            return 0.5
        return min(max(self.uniform(), QUANTILE_EPS), 1.0 - QUANTILE_EPS)

    def choice(self, probs) -> int:
        """Draw an index from a probability vector by inverting its CDF."""
        probs = np.asarray(probs, dtype=np.float64)
        if self.greedy:
            return int(np.argmax(probs))
        cumulative = np.cumsum(probs)
        index = int(np.searchsorted(cumulative, self.uniform() * cumulative[-1], side='right'))
        return min(index, len(probs) - 1)

    def spawn(self) -> 'NoiseStream':
        """Derive an independent child stream from this one."""
        child_seed = int(self.rng.integers(0, 2**63 - 1))
        return NoiseStream(child_seed, scale=self.scale, greedy=self.greedy)


def sequence_seed(seed: int, seq_id: str) -> int:
    """Seed of one sequence's draws, fixed by its id so dataset order does not matter."""
    return int(np.random.SeedSequence([seed, zlib.crc32(seq_id.encode('utf-8'))]).generate_state(1)[0])
