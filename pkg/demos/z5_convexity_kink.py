"""Where the convexity scan on Z_5 bends the wrong way.

At y = 0.3 ln 5 two families of local minimizers compete: one puts both
summands mostly on two adjacent elements, the other on a symmetric
three-element shape. Each family is convex in x, but the lower envelope
switches families near x = 0.652 and the slope drops there, so the
envelope has a concave kink.

The values below are the best the numeric oracle found; they are upper
bounds on the true minimum, not certified optima.

    python demos/z5_convexity_kink.py
"""
import numpy as np

from groupepi import FiniteAbelianGroup, MinimizationConfig, convexity_scan, min_sum_entropy

Z5 = FiniteAbelianGroup.cyclic(5)
Y = 0.3 * np.log(5)


def shape(dist, cutoff=0.05):
    p = np.sort(dist.probs)[::-1]
    return int(np.sum(p > cutoff)), np.round(p, 4)


def main():
    xs = np.linspace(0.60, 0.70, 21)
    rep = convexity_scan(Z5, axis_grid=xs, fixed_values=[Y], tol_conv=0.0,
                         config=MinimizationConfig(restarts=12))
    vals = np.array(rep["rows"][0]["values"])
    d2 = vals[:-2] - 2 * vals[1:-1] + vals[2:]
    print(f"y = {Y:.6f}; step {xs[1] - xs[0]:.4f}")
    print(f"{'x':>8} {'min H(X+Y)':>14} {'2nd diff':>12}")
    for i, x in enumerate(xs):
        tail = f"{d2[i - 1]:12.3e}" if 0 < i < len(xs) - 1 else ""
        print(f"{x:8.4f} {vals[i]:14.9f} {tail}")
    slopes = np.diff(vals) / np.diff(xs)
    print(f"\nslope left of the kink  {slopes[:5].mean():.4f}")
    print(f"slope right of the kink {slopes[-5:].mean():.4f}")
    for x in (0.62, 0.68):
        res = min_sum_entropy(Z5, x, Y, MinimizationConfig(restarts=12))
        (kx, px), (ky, py) = shape(res.argmin[0]), shape(res.argmin[1])
        print(f"\nx={x}: X has {kx} heavy atoms {px}, Y has {ky} heavy atoms {py}")


if __name__ == "__main__":
    main()
