import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylmax.arith import (
    ODD_PHI_DENSITY,
    TotientTable,
    mod_inverse,
    odd_phi_residual_sup,
    odd_phi_sum,
    odd_phi_weighted_sum,
    totient_sieve,
)


def phi_brute(y: int) -> int:
    # gcd-counting oracle, no sieve machinery shared with the implementation
    ks = np.arange(1, y + 1, dtype=np.int64)
    return int(np.count_nonzero(np.gcd(ks, y) == 1))


def test_mod_inverse_examples():
    assert mod_inverse(4, 3) == 1
    assert mod_inverse(4, 5) == 4
    assert mod_inverse(4, 7) == 2


def test_mod_inverse_edge_cases():
    assert mod_inverse(5, 1) == 0
    assert mod_inverse(1, 2) == 1
    with pytest.raises(ValueError):
        mod_inverse(6, 9)
    with pytest.raises(ValueError):
        mod_inverse(0, 4)
    with pytest.raises(ValueError):
        mod_inverse(3, 0)


@given(q=st.integers(2, 10**6), a=st.integers(1, 10**6))
@settings(max_examples=60)
def test_mod_inverse_is_involution_on_units(q, a):
    if math.gcd(a, q) != 1:
        a = 1
    r = mod_inverse(a, q)
    assert 0 <= r < q
    assert (a * r) % q == 1
    assert mod_inverse(r, q) == a % q


def test_totient_sieve_small_values():
    table = totient_sieve(10)
    assert table.values[1] == 1
    assert table.phi(9) == 6
    assert table.phi(10) == 4
    assert totient_sieve(1).values.tolist() == [0, 1]


def test_totient_sieve_prime_spot_check():
    table = totient_sieve(10**6)
    assert table.phi(999983) == 999982  # prime
    assert table.phi(2) == 1
    assert table.phi(999966) == phi_brute(999966)


def test_totient_matches_gcd_oracle_to_2000():
    table = totient_sieve(2000)
    for y in range(1, 2001):
        assert table.phi(y) == phi_brute(y), y


def test_totient_divisor_sum_identity():
    # sum of phi(d) over d | n equals n
    table = totient_sieve(2000)
    for n in range(1, 2001):
        s = sum(table.phi(d) for d in range(1, n + 1) if n % d == 0)
        assert s == n


def test_sieve_cap_rejected():
    with pytest.raises(ValueError):
        totient_sieve(100, cap=50)
    with pytest.raises(ValueError):
        totient_sieve(0)


def test_odd_phi_sum_examples():
    exact, _ = odd_phi_sum(2)
    assert exact == 1
    exact, residual = odd_phi_sum(10)
    assert exact == 19
    assert residual == pytest.approx(19 - ODD_PHI_DENSITY * 100, abs=1e-9)
    assert residual == pytest.approx(-1.2642, abs=5e-4)


def test_odd_phi_sum_matches_gcd_oracle_cumulative():
    limit = 10**4
    table = totient_sieve(limit)
    brute = np.array([phi_brute(y) for y in range(1, limit + 1, 2)], dtype=np.int64)
    cum = np.cumsum(brute)
    for Y in list(range(2, 64)) + [100, 999, 1000, 4097, 9999, 10**4]:
        exact, _ = odd_phi_sum(Y, table)
        n_odd = (Y + 1) // 2
        assert exact == int(cum[n_odd - 1]), Y


def test_odd_phi_ratio_converges():
    table = totient_sieve(10**6)
    for Y in (10**3, 10**4, 10**5, 10**6):
        exact, _ = odd_phi_sum(Y, table)
        ratio = exact / Y**2
        assert abs(ratio - 0.202642) <= 5 * math.log(Y) / Y


def test_odd_phi_residual_envelope():
    # measured sup over dyadic Y <= 2^20 is ~0.52; assert a safe ceiling
    # and that the recorded value is reproducible
    sup = odd_phi_residual_sup(2**20)
    assert sup <= 1.1
    assert sup == pytest.approx(odd_phi_residual_sup(2**20), rel=0)


def test_odd_phi_weighted_sum_examples():
    assert odd_phi_weighted_sum(4, 0.0, "dyadic") == 2.0  # only y=3
    table = totient_sieve(2**10)
    full = odd_phi_weighted_sum(2**10, 2, "full", table)
    assert full / math.log(2**10) > 0.1
    dyadic = odd_phi_weighted_sum(2**10, 1, "dyadic", table)
    assert 0.15 <= dyadic / 2**10 <= 0.35


def test_odd_phi_weighted_sum_against_direct():
    table = totient_sieve(200)
    want = math.fsum(
        table.phi(y) / y**1.5 for y in range(101, 201) if y % 2 == 1
    )
    got = odd_phi_weighted_sum(200, 1.5, "dyadic", table)
    assert got == pytest.approx(want, rel=1e-12)
    want_full = math.fsum(table.phi(y) / y**2 for y in range(1, 201, 2))
    assert odd_phi_weighted_sum(200, 2, "full", table) == pytest.approx(
        want_full, rel=1e-12
    )


def test_odd_phi_weighted_sum_rejects_bad_args():
    with pytest.raises(ValueError):
        odd_phi_weighted_sum(3, 1.0)
    with pytest.raises(ValueError):
        odd_phi_weighted_sum(16, 1.0, "full")
    with pytest.raises(ValueError):
        odd_phi_weighted_sum(16, 1.0, "blocks")


def test_totient_table_is_immutable_dataclass():
    table = totient_sieve(10)
    assert isinstance(table, TotientTable)
    with pytest.raises(Exception):
        table.limit = 5
