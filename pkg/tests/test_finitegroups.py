import pytest

from upgame.finitegroups import FiniteGroupModel, elementary_quotient
from upgame.matrices import swap_word
from upgame.patterns import builtin_pattern
from upgame.rings import RingSpec


@pytest.fixture(scope="module")
def model():
    return elementary_quotient(3, 2)


def test_order_and_closure(model):
    assert len(model) == 168  # the full elementary group at n=3 over Z/2
    for g in model.generators:
        assert model.inv(g) in model.generators


def test_mul_inv_consistency(model):
    for g in list(model.generators) + [17, 42, 101]:
        assert model.mul(g, model.inv(g)) == model.identity
        assert model.mul(model.inv(g), g) == model.identity


def test_pattern_images(model):
    expected = {"trivial": 1, "M": 4, "L": 4, "Q": 6, "H1_1": 24, "H2_1": 24, "G": 168}
    for name, size in expected.items():
        assert len(model.pattern_image(builtin_pattern(name, 3))) == size


def test_pattern_generators_fix_nothing_extra(model):
    gens = model.pattern_generators(builtin_pattern("M", 3))
    assert len(gens) == 2  # two positions, one nonzero residue mod 2
    assert model.subgroup(gens) == model.pattern_image(builtin_pattern("M", 3))


def test_word_image(model):
    w = model.word_image(swap_word(3, RingSpec.parse("Z/2")))
    assert model.elements[w] == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert model.mul(w, w) == model.identity


def test_product_set(model):
    m_set = model.pattern_image(builtin_pattern("M", 3))
    q_set = model.pattern_image(builtin_pattern("Q", 3))
    prod = model.product_set(q_set, m_set)
    assert prod == model.pattern_image(builtin_pattern("H1_1", 3))


def test_modulus_four_quotient():
    small = elementary_quotient(2, 2)
    assert len(small) == 6  # SL(2, Z/2)
    with pytest.raises(ValueError):
        elementary_quotient(3, 2, max_order=100)


def test_invalid_models_rejected():
    good = elementary_quotient(2, 2)
    # drop one element: no longer closed
    broken = [e for e in good.elements if e != good.elements[-1]]
    with pytest.raises(ValueError):
        FiniteGroupModel(2, 2, broken, [0])
