import pytest

from thetagrade.field import FieldError, PrimeField, choose_field, is_prime, root_of_unity


def brute_force_choice(family, N, m):
    """Independent trial oracle over primes with the stated predicate."""
    p = 3
    while True:
        if is_prime(p) and p > 2 * N and (p - 1) % (2 * m) == 0:
            if family not in ("SL", "GL") or N % p != 0:
                return p
        p += 2


@pytest.mark.parametrize(
    "family,N,m",
    [("SL", 3, 3), ("SL", 6, 1), ("Sp", 6, 3), ("SO_even", 8, 3), ("SL", 4, 4), ("Sp", 4, 4)],
)
def test_choose_field_matches_trial_oracle(family, N, m):
    assert choose_field(family, N, m).p == brute_force_choice(family, N, m)


def test_choose_field_frozen_values():
    # values computed with the trial oracle above
    assert choose_field("SL", 3, 3).p == 7
    assert choose_field("SL", 6, 1).p == 13
    assert choose_field("Sp", 6, 3).p == 13


def test_choose_field_respects_all_constraints():
    for family, N, m in [("SL", 5, 5), ("SO_odd", 7, 3), ("Sp", 8, 2)]:
        F = choose_field(family, N, m)
        assert F.p > 2 * N
        assert (F.p - 1) % (2 * m) == 0
        if family == "SL":
            assert N % F.p != 0


def test_root_of_unity_order():
    F = PrimeField(13)
    z = root_of_unity(F, 3)
    assert z == 3  # generator 2, 2^4 = 16 = 3 mod 13
    assert pow(z, 3, 13) == 1 and z != 1 and pow(z, 1, 13) != 1
    # brute order check
    order = next(k for k in range(1, 13) if pow(z, k, 13) == 1)
    assert order == 3


def test_root_of_unity_identity_case():
    F = PrimeField(7)
    assert root_of_unity(F, 1) == 1


def test_root_of_unity_unavailable():
    F = PrimeField(13)
    with pytest.raises(FieldError):
        root_of_unity(F, 5)  # 5 does not divide 12


def test_dlog_table():
    F = PrimeField(17)
    for a in range(1, 17):
        assert pow(F.generator, F.dlog(a), 17) == a
    assert F.element_order(16) == 2  # -1
    with pytest.raises(ZeroDivisionError):
        F.dlog(0)


def test_prime_validation():
    with pytest.raises(FieldError):
        PrimeField(15)
    with pytest.raises(FieldError):
        PrimeField(2)
