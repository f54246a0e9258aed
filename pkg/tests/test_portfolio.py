import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critdebt.errors import CSVParseError, EmptyPortfolio, InputError, NonPositiveAmount
from critdebt.portfolio import (
    DebtRecord,
    normalize,
    parse_debts_csv,
    portfolios_close,
    read_debts_csv,
    scale_check,
)

EXAMPLE_3 = [DebtRecord("a", 100, 2), DebtRecord("b", 200, 3), DebtRecord("c", 300, 6)]

debts_strategy = st.lists(
    st.tuples(st.floats(1e-3, 1e6), st.floats(0.5, 400.0)), min_size=1, max_size=40
).map(lambda rows: [DebtRecord(str(i), a, l) for i, (a, l) in enumerate(rows)])


def test_single_debt_normalizes_to_unity():
    p = normalize([DebtRecord("x", 500, 30)])
    assert p.k == 1 and p.s_hat == 500
    assert list(p.slots) == [1.0]
    assert (p.sigma, p.E, p.E1) == (1.0, 1.0, 1.0)


def test_two_equal_debts():
    p = normalize([DebtRecord("a", 1, 1), DebtRecord("b", 1, 2)])
    assert p.k == 2 and p.s_hat == 1
    assert list(p.slots) == [1.0, 1.0]
    assert (p.sigma, p.E1, p.E) == (2.0, 3.0, 3.0)
    assert (p.k + 1) * p.sigma - p.E1 == p.E


def test_three_debt_example():
    p = normalize(EXAMPLE_3)
    assert p.k == 3 and p.s_hat == 200
    np.testing.assert_array_equal(p.slots, [0.5, 1.0, 1.5])
    assert list(p.reverse_durations) == [3, 2, 1]
    assert p.sigma == 3.0 and p.E == 5.0 and p.E1 == 7.0


def test_gaps_become_zero_slots_and_merges_add():
    # durations 1 and 4 -> reverse ratios 4 and 1; two debts share ratio 4
    p = normalize([DebtRecord("a", 1, 1), DebtRecord("b", 3, 1), DebtRecord("c", 2, 4)])
    assert p.k == 4
    # s_hat = 6 / 3 = 2: merged slot (1 + 3) / 2, single slot 2 / 2
    np.testing.assert_array_equal(p.slots, [2.0, 0.0, 0.0, 1.0])
    assert p.sigma == 3.0


def test_grid_resolution_refines_slots():
    coarse = normalize(EXAMPLE_3, 1)
    fine = normalize(EXAMPLE_3, 4)
    assert fine.k == 4 * coarse.k
    assert fine.sigma == pytest.approx(coarse.sigma)


def test_slots_are_read_only():
    p = normalize(EXAMPLE_3)
    with pytest.raises(ValueError):
        p.slots[0] = 9.0


def test_empty_portfolio():
    with pytest.raises(EmptyPortfolio):
        normalize([])


def test_invalid_records():
    with pytest.raises(NonPositiveAmount):
        DebtRecord("x", -1, 3)
    with pytest.raises(InputError):
        normalize(EXAMPLE_3, grid_resolution=0)


@pytest.mark.parametrize("c", [1, 7, 1e9])
def test_scale_check_example(c):
    assert scale_check(EXAMPLE_3, c)


@settings(max_examples=200, deadline=None)
@given(debts_strategy)
def test_payoff_identity(debts):
    p = normalize(debts)
    assert p.E == pytest.approx((p.k + 1) * p.sigma - p.E1, rel=1e-12)
    # every debt has unit mean after normalization
    assert p.sigma == pytest.approx(len(debts), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(debts_strategy, st.sampled_from([1e-6, 3.0, 1e9]), st.randoms(use_true_random=False))
def test_scale_and_permutation_invariance(debts, c, rnd):
    shuffled = list(debts)
    rnd.shuffle(shuffled)
    assert portfolios_close(normalize(debts), normalize(shuffled))
    assert scale_check(shuffled, c)


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "book.csv"
    path.write_text("id,amount,duration\na,100,2\n\nb,200,3\nc,300,6\n", encoding="utf-8")
    assert read_debts_csv(path) == EXAMPLE_3


def test_csv_error_names_line():
    text = "id,amount,duration\na,1,2\nb,2,3\nc,-4,6\n"
    with pytest.raises(CSVParseError) as info:
        parse_debts_csv(text.splitlines(keepends=True))
    assert info.value.line == 4
    assert "line 4" in str(info.value)


@pytest.mark.parametrize("text, line", [
    ("id,amount\n", 1),
    ("id,amount,duration\na,xyz,2\n", 2),
    ("id,amount,duration\na,1,2\nb,1\n", 3),
    ("id,amount,duration\na,1,nan\n", 2),
    ("id,amount,duration\na,1,0\n", 2),
])
def test_csv_rejects(text, line):
    with pytest.raises(CSVParseError) as info:
        parse_debts_csv(text.splitlines(keepends=True))
    assert info.value.line == line


def test_empty_csv_gives_empty_portfolio():
    with pytest.raises(EmptyPortfolio):
        normalize(parse_debts_csv(["id,amount,duration\n"]))


def test_merge_is_order_independent():
    rnd = random.Random(3)
    debts = [DebtRecord(str(i), rnd.uniform(0.1, 1e7), rnd.choice([1, 2, 3, 5])) for i in range(300)]
    base = normalize(debts)
    for _ in range(5):
        rnd.shuffle(debts)
        again = normalize(debts)
        assert np.array_equal(base.slots, again.slots)
        assert math.isclose(base.E, again.E, rel_tol=1e-15)
