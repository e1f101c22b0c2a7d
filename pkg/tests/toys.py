"""Random toy instances shared by the solver tests and the acceptance suite."""

import numpy as np

from robustxva.samples import BcvaSample, BcvaSampleSet, FvaSample, FvaSampleSet


def random_bcva_sample(rng: np.random.Generator, n: int) -> BcvaSample:
    scale = 10.0 ** rng.uniform(-1, 1)
    x = rng.normal(scale=scale, size=n)
    tau_c = int(rng.integers(0, n + 1))
    tau_f = int(rng.integers(0, n + 1)) if tau_c == 0 else 0
    return BcvaSample(x, tau_c, tau_f)


def random_bcva_set(rng: np.random.Generator, size: int, n: int) -> BcvaSampleSet:
    return BcvaSampleSet.from_samples([random_bcva_sample(rng, n) for _ in range(size)])


def random_fva_sample(rng: np.random.Generator, n: int) -> FvaSample:
    scale = 10.0 ** rng.uniform(-1, 1)
    z = rng.normal(scale=scale, size=n)
    return FvaSample(z, int(rng.integers(0, n + 1)))


def random_fva_set(rng: np.random.Generator, size: int, n: int) -> FvaSampleSet:
    return FvaSampleSet.from_samples([random_fva_sample(rng, n) for _ in range(size)])
