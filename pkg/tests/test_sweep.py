from itertools import product

import pytest

from ellifloor.arith import Partition, parse_partition
from ellifloor.diagrams import TangencyProfile
from ellifloor.invariants import Problem, enumerated_sum, free_profiles
from ellifloor.sweep import sweep_sum


def _problems():
    for delta, d1, d2 in product((0, 1), range(3), range(3)):
        for nu0, nuinf in product(free_profiles(delta * d1 + d2, 2), free_profiles(d2, 2)):
            prof = TangencyProfile(Partition(), nu0, Partition(), nuinf)
            for g, conn in product(range(-1, 4), (False, True)):
                yield Problem(delta, d1, d2, g, prof, True, conn)


FIXED = [
    (0, 2, 2, 1, "", "1^2", "1^1", "1^1"),
    (1, 2, 1, 1, "1^1", "1^2", "", "1^1"),
    (0, 3, 2, 2, "2^1", "", "", "2^1"),
    (1, 1, 2, 0, "", "1^3", "2^1", ""),
]


def _agree(problem):
    count, classical, refined = sweep_sum(problem)
    ref = enumerated_sum(problem)
    assert (count, classical, refined) == ref, problem


def test_sweep_matches_listing_on_grid():
    n = 0
    for problem in _problems():
        _agree(problem)
        n += 1
    assert n > 200


@pytest.mark.parametrize("delta,d1,d2,g,mu0,nu0,muinf,nuinf", FIXED)
def test_sweep_matches_listing_with_fixed_ends(delta, d1, d2, g, mu0, nu0, muinf, nuinf):
    prof = TangencyProfile(*(parse_partition(x) if x else Partition() for x in (mu0, nu0, muinf, nuinf)))
    for conn in (False, True):
        _agree(Problem(delta, d1, d2, g, prof, True, conn))
