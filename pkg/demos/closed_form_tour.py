"""Closed form against explicit distributions and the numeric oracle.

    python demos/closed_form_tour.py
"""
from groupepi import FiniteAbelianGroup, convolve, extremal_pair, f_gk, f_group, min_sum_entropy

for text, x, y in (("z4", 0.3, 0.4), ("z4", 1.0, 0.5), ("z2xz4", 1.5, 1.8), ("z8", 0.9, 1.0)):
    g = FiniteAbelianGroup.parse(text)
    px, py = extremal_pair(g, x, y)
    attained = convolve(px, py).entropy()
    numeric = min_sum_entropy(g, x, y).value
    print(f"{text:>6} x={x:<4} y={y:<4} f={f_group(g, x, y):.9f} extremal={attained:.9f} oracle={numeric:.9f}")

print(f"\nthree summands on Z_8, entropies (0.2, 0.5, 0.4): {f_gk(3, [0.2, 0.5, 0.4]):.9f}")
