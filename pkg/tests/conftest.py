import pytest

from madim import FULL, CarpetSystem, make_sft


def four_pair_sft():
    return make_sft(3, 2, [(0, 0), (1, 0), (2, 0), (0, 1)], FULL)


def full_product_sft(a=3, b=2):
    return make_sft(a, b, [(u, v) for u in range(a) for v in range(b)], FULL)


def golden_pair_sft():
    # forbid (1,0) -> (1,0): golden-mean constraint on the A coordinate
    pairs = [(0, 0), (1, 0)]
    transitions = [((0, 0), (0, 0)), ((0, 0), (1, 0)), ((1, 0), (0, 0))]
    return make_sft(3, 2, pairs, transitions)


def golden_language_sft():
    # projection equals the golden-mean language on B = {0, 1}
    pairs = [(0, 0), (0, 1)]
    transitions = [((0, 0), (0, 0)), ((0, 0), (0, 1)), ((0, 1), (0, 0))]
    return make_sft(3, 2, pairs, transitions)


def single_pair_sft():
    return make_sft(3, 2, [(0, 0)], FULL)


@pytest.fixture
def four_pair():
    return four_pair_sft()


@pytest.fixture
def full_product():
    return full_product_sft()


@pytest.fixture
def golden_pair():
    return golden_pair_sft()


@pytest.fixture
def single_pair():
    return single_pair_sft()


@pytest.fixture
def four_pair_carpet(four_pair):
    return CarpetSystem(3, 2, four_pair)


@pytest.fixture
def full_carpet(full_product):
    return CarpetSystem(3, 2, full_product)


@pytest.fixture
def golden_carpet(golden_pair):
    return CarpetSystem(3, 2, golden_pair)


@pytest.fixture
def single_carpet(single_pair):
    return CarpetSystem(3, 2, single_pair)


CARPET_FIXTURES = {
    "full_product": full_product_sft,
    "four_pair": four_pair_sft,
    "golden_pair": golden_pair_sft,
}
