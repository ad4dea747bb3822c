"""Independent evaluation of the interval terms for the frozen count tables
used by tests/golden.rs. Run with: python3 confidence_golden.py"""
import math

import numpy as np

C = 48.0

DELAYED_CYCLE = {
    1: ([0, 25019, 0, 0, 0, 25019, 25019, 0, 24942], 99999),
    2: ([0, 0, 12558, 6217, 0, 6244, 6340, 12461, 6179], 49999),
    3: ([4242, 0, 4123, 2059, 4133, 2062, 2064, 4121, 10529], 33333),
}
LAZY = ([20193, 9999, 3359, 10004, 16661, 6627, 3355, 6631, 23170], 99999)


def tau(delta, m, d_plus):
    f = lambda t: (1 + max(0, math.ceil(math.log(2 * m / t)))) * d_plus * math.exp(-t)
    lo, hi = 1e-9, 1e3
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if f(mid) <= delta:
            hi = mid
        else:
            lo = mid
    return hi


def smoothed(n, alpha):
    d = n.shape[0]
    rows = n.sum(axis=1) + d * alpha
    m_hat = (n + alpha) / rows[:, None]
    pi_hat = rows / (n.sum() + d * d * alpha)
    l_hat = (n + alpha) / np.sqrt(np.outer(rows, rows))
    return m_hat, pi_hat, l_hat


def dilation(a):
    d = a.shape[0]
    z = np.zeros((d, d))
    return np.block([[z, a], [a.T, z]])


def stationary(m):
    w, v = np.linalg.eig(m.T)
    x = np.real(v[:, np.argmin(abs(w - 1))])
    return x / x.sum()


def dilated_gap_sweep(m, k_max):
    pi = stationary(m)
    r = np.sqrt(pi)
    best = 0.0
    for k in range(1, k_max + 1):
        l = np.diag(r) @ np.linalg.matrix_power(m, k) @ np.diag(1 / r)
        ev = np.sort(np.linalg.eigvalsh(dilation(l)))[::-1]
        best = max(best, (1 - ev[1]) / k)
    return best


def terms(n, steps, alpha, tau_v, divisor, pi_hat):
    d = n.shape[0]
    out_counts = n.sum(axis=1)
    nmin, nmax = out_counts.min(), out_counts.max()
    floor = nmin + d * alpha
    d_hat = 4 * tau_v * math.sqrt(d / floor) + 2 * alpha * d / floor
    a_hat = math.sqrt(d) * (nmax + d * alpha) / floor * d_hat
    b_hat = C / divisor * math.log(2 * math.sqrt(2 * (steps + d * d * alpha) / floor)) * d_hat
    c = 0.0
    for p in pi_hat:
        second = b_hat / (p - b_hat) if p > b_hat else math.inf
        c = max(c, b_hat / p, second)
    return dict(a_hat=a_hat, b_hat=b_hat, c_hat=0.5 * c, d_hat=d_hat, tau=tau_v, divisor=divisor)


def show(label, values):
    print(label)
    for k, v in values.items():
        print(f"  {k} = {float(v)!r}")


def delayed_cycle(alpha=1.0, delta=0.05, big_k=3):
    d = 3
    worst, point = 0.0, 0.0
    for k, (flat, steps) in DELAYED_CYCLE.items():
        n = np.array(flat, dtype=float).reshape(d, d)
        m_hat, pi_hat, l_hat = smoothed(n, alpha)
        mags = np.sort(abs(np.linalg.eigvalsh(dilation(l_hat))))[::-1]
        g_hat = 1 - mags[2]
        point = max(point, g_hat / k)
        divisor = dilated_gap_sweep(m_hat, big_k)
        t = terms(n, steps, alpha, tau(delta / (4 * d * big_k), steps, d + 1), divisor, pi_hat)
        t["g_hat"] = g_hat
        show(f"delayed_cycle k={k}", t)
        worst = max(worst, (t["a_hat"] + 2 * t["c_hat"] + t["c_hat"] ** 2) / k)
        if k == 1:
            pimin = pi_hat.min()
    print(f"delayed_cycle point = {float(point)!r}, half_width = {float(1 / big_k + worst)!r}, pimin = {float(pimin)!r}")


def lazy(alpha=1.0, delta=0.05):
    d = 3
    flat, steps = LAZY
    n = np.array(flat, dtype=float).reshape(d, d)
    _, pi_hat, _ = smoothed(n, alpha)
    rows = n.sum(axis=1) + d * alpha
    sym = (n + n.T + 2 * alpha) / (2 * np.sqrt(np.outer(rows, rows)))
    mags = np.sort(abs(np.linalg.eigvalsh(sym)))[::-1]
    point = 1 - mags[1]
    t = terms(n, steps, alpha, tau(delta / d, steps, d + 1), point, pi_hat)
    show("lazy", t)
    print(f"lazy point = {float(point)!r}, half_width = {float(t['a_hat'] + 2 * t['c_hat'] + t['c_hat'] ** 2)!r}")


if __name__ == "__main__":
    delayed_cycle()
    lazy()
