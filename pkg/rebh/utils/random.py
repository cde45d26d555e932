from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

__all__ = ("UniformSource", )

_MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class UniformSource:
    """Reproducible source of Uniform[0, 1] draws, split into independent substreams.

    A source is identified by a seed and a stream path. The draws of a source are a pure
    function of ``(seed, stream)``: asking twice for ``uniforms(n)`` gives the same
    numbers. Consumers never share a source; they derive their own with
    :meth:`substream`, e.g. ``source.substream(trial, 2)`` for the per-hypothesis
    uniforms of a trial.

    Streams are generated by numpy's counter-based Philox bit generator, keyed through a
    :class:`numpy.random.SeedSequence` whose spawn key is the stream path. Distinct paths
    therefore give statistically independent streams, and a trial's draws do not depend
    on which thread, or in which order, it is run.

    Parameters
    ----------
    seed : int
        Nonnegative integer below 2**64.
    stream : tuple of int
        Path of the substream. The root source has an empty path.
    """
    seed: int
    stream: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if isinstance(self.seed, bool) or int(self.seed) != self.seed:
            raise TypeError("seed must be an integer, got %r" % (self.seed, ))
        if not (0 <= int(self.seed) < _MAX_SEED):
            raise ValueError("seed must be in [0, 2**64), got %d" % (self.seed))
        for s in self.stream:
            if int(s) != s or s < 0:
                raise ValueError("stream ids must be nonnegative integers, got %r" % (self.stream, ))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream", tuple(int(s) for s in self.stream))

    def substream(self, *ids: int) -> "UniformSource":
        return UniformSource(self.seed, self.stream + tuple(ids))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(seq))

    def uniforms(self, n: int) -> np.ndarray:
        """The first `n` draws of this stream, each in (0, 1]."""
        return 1.0 - self.generator().random(n)

    def uniform(self) -> float:
        """The first draw of this stream."""
        return float(self.uniforms(1)[0])
