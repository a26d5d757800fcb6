import math

import pytest
import sympy

from oddforms.primes import is_prime, prime_tools, primes_up_to, von_mangoldt, von_mangoldt_table


def test_small_primes():
    assert primes_up_to(10) == [2, 3, 5, 7]
    assert primes_up_to(1) == []


def test_sieve_matches_sympy():
    assert primes_up_to(5000) == list(sympy.primerange(2, 5001))


@pytest.mark.parametrize("n,expected", [(8, math.log(2)), (12, 0.0), (9, math.log(3)), (1, 0.0), (13, math.log(13))])
def test_von_mangoldt(n, expected):
    assert von_mangoldt(n) == pytest.approx(expected)
    assert von_mangoldt_table(20)[n] == pytest.approx(expected)


def test_table_matches_factorisation():
    lam = von_mangoldt_table(500)
    for n in range(2, 501):
        f = sympy.factorint(n)
        want = math.log(next(iter(f))) if len(f) == 1 else 0.0
        assert lam[n] == pytest.approx(want)


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == list(sympy.primerange(0, 30))


def test_prime_tools():
    primes, lam = prime_tools(10)
    assert primes == [2, 3, 5, 7]
    assert lam[8] == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        prime_tools(1)
