"""Small invariants computed three ways, with their diagrams and markings.

Run with ``python demos/small_counts.py``.
"""
from ellifloor.caporaso_harris import caporaso_harris
from ellifloor.diagrams import enumerate_diagrams, enumerate_markings
from ellifloor.fock import fock_invariant
from ellifloor.invariants import Problem, absolute_invariant, relative_invariant
from ellifloor.multiplicities import diagram_mult


def main():
    print("genus 2, bidegree (2, d2), delta = 1")
    for d2 in (0, 1):
        classical = absolute_invariant(1, 2, d2, 2).value
        refined = absolute_invariant(1, 2, d2, 2, refined=True).value
        print(f"  d2 = {d2}: N = {classical}, refined {refined}")

    print("\nper-diagram multiplicities for d2 = 1")
    for D in enumerate_diagrams(1, 2, 1, 2):
        mults = sorted(int(diagram_mult(M, False)) for M in enumerate_markings(D))
        print(f"  floors {D.floors}, {len(D.elevators)} elevators: {mults} -> {sum(mults)}")

    print("\nthe same number from the recursion and from the Fock expectation")
    pr = Problem(1, 2, 1, 2, connected=False)
    print(f"  enumerator {relative_invariant(pr).value}, recursion {caporaso_harris(pr)}, "
          f"Fock {fock_invariant(pr)}")


if __name__ == "__main__":
    main()
