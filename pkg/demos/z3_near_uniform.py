"""Behaviour of f_{Z_3}(x, y) as x approaches ln 3.

Write X = uniform + d with a small perturbation d. To second order,
ln 3 - H(X+Y) is proportional to the deficit ln 3 - H(X). On a group of
odd order the third-order term does not vanish and its phase can be
chosen freely, which lowers the sum further by a term of order
deficit^(3/2). The secant slope (ln 3 - f) / deficit is then
c + K deficit^(1/2): it falls toward its limit c like a square root as the
deficit shrinks, and x -> f is concave very close to the top. On 2-groups all characters are real and the cubic term is zero.

    python demos/z3_near_uniform.py
"""
import numpy as np

from groupepi import FiniteAbelianGroup, MinimizationConfig, min_sum_entropy

Z3 = FiniteAbelianGroup.cyclic(3)
TOP = np.log(3)


def main():
    cfg = MinimizationConfig(restarts=12)
    for frac in (0.3, 0.6):
        y = frac * TOP
        print(f"y = {frac} ln 3")
        print(f"{'deficit':>10} {'(ln3 - f)/deficit':>20}")
        for eps in (0.05, 0.02, 0.01, 0.005, 0.002, 0.001):
            f = min_sum_entropy(Z3, TOP - eps, y, cfg).value
            print(f"{eps:10.4f} {(TOP - f) / eps:20.6f}")
        print()


if __name__ == "__main__":
    main()
