"""Vacuum expectations in the two-family Heisenberg algebra.

Every balanced product of at most six generators with indices up to 3 is
evaluated by commuting annihilators to the right and, separately, by summing
over perfect pairings; the two must agree.
"""
from ellifloor.fock import vacuum_expectation, wick_agreement


def main():
    word = [("a", 1), ("a", 1), ("b", -1), ("b", -1)]
    print(f"<a_1 a_1 b_-1 b_-1> = {vacuum_expectation(word)}")
    for refined in (False, True):
        rep = wick_agreement(6, 3, refined)
        kind = "deformed" if refined else "classical"
        print(f"{kind}: {rep.checked} words, {rep.nonzero} nonzero, {len(rep.mismatches)} mismatches")


if __name__ == "__main__":
    main()
