import numpy as np
import pytest

from g2pstack.align import parallel_from_aligned
from g2pstack.lexicon import PhonemeInventory
from g2pstack.synth import SyntheticSpec, generate_synthetic


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def dutch_inventory():
    base = ["a", "a:", "e", "e:", "@", "i:", "I", "l", "m", "n", "o", "u:", "r", "t", "z", "b", "j", "}", "x", "s"]
    return PhonemeInventory.build("test", base, {"]": ("e", "j")})


@pytest.fixture(scope="session")
def small_synthetic():
    return generate_synthetic(SyntheticSpec(word_count=300, seed=11))


@pytest.fixture(scope="session")
def small_corpus(small_synthetic):
    return parallel_from_aligned(small_synthetic.aligned_a, small_synthetic.aligned_b)
