"""The genus-3 family with one tangency point of order w over each section.

The counts are polynomial in w; an exact fit on w = 1..12 predicts w = 13, 14.
"""
from ellifloor.arith import Partition
from ellifloor.diagrams import TangencyProfile
from ellifloor.invariants import Problem, relative_invariant
from ellifloor.series import poly_fit


def count(w: int):
    prof = TangencyProfile(Partition(), Partition.single(w), Partition(), Partition.single(w))
    return relative_invariant(Problem(0, 3, w, 3, prof)).value


def main():
    ws = list(range(1, 13))
    values = [count(w) for w in ws]
    for w, v in zip(ws, values):
        print(f"  w = {w:2d}: {v}")
    rep = poly_fit(ws, values, 9, heldout=[(w, count(w)) for w in (13, 14)])
    print(f"fit: {rep.polynomial}")
    print(f"exact on samples: {rep.exact}, predicts held-out values: {rep.predicts}")


if __name__ == "__main__":
    main()
