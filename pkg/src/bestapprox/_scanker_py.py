"""Scaled-integer scan kernels, numpy/pure-Python implementation.

Both kernels work on fixed-point approximations A_j = floor(2^s alpha_j)
with alpha_j reduced to [0, 1). They never decide records; they only emit
a superset of the denominators/heights that could carry one, using a
running upper bound on the best distance seen so far. The caller supplies
per-unit and constant slack terms that dominate the rounding error, so the
filter is sound: any exact record survives it.

Distances are measured in scaled units: dist(x) = min(x mod 2^s,
2^s - x mod 2^s) approximates 2^s * ||x / 2^s|| to within the slack.
"""

from __future__ import annotations

from itertools import product

import numpy as np

_CHUNK = 1 << 16


def simul_candidates(
    a_scaled: list[int],
    one: int,
    q_lo: int,
    q_hi: int,
    slack_per_q: int,
    slack_const: int,
) -> list[int]:
    """Denominators in [q_lo, q_hi] that may improve the running sup-distance.

    Proposes q whenever maxdist(q) - slack(q) <= best_hi, where best_hi is
    the minimum of maxdist(q') + slack(q') over q' < q. Ties survive the
    <= test, so exact adjudication downstream can still detect them.
    """
    a_arr = np.asarray(a_scaled, dtype=np.int64)
    out: list[int] = []
    best_hi = one  # dist never exceeds 2^s / 2
    for lo in range(q_lo, q_hi + 1, _CHUNK):
        hi = min(lo + _CHUNK - 1, q_hi)
        qs = np.arange(lo, hi + 1, dtype=np.int64)
        r = (qs[:, None] * a_arr[None, :]) % one
        dist = np.minimum(r, one - r).max(axis=1)
        slack = qs * slack_per_q + slack_const
        ub = dist + slack
        # prefix minimum over strictly earlier q, seeded with carry-in
        prefix = np.minimum.accumulate(ub)
        shifted = np.empty_like(prefix)
        shifted[0] = best_hi
        np.minimum(prefix[:-1], best_hi, out=shifted[1:])
        mask = dist - slack <= shifted
        out.extend(int(q) for q in qs[mask])
        best_hi = min(best_hi, int(prefix[-1]))
    return out


def _half_shell_d2(m_abs: int) -> np.ndarray:
    """Shell max(|m1|,|m2|) = m_abs, one vector per {v, -v} pair.

    Normalization: first nonzero coordinate positive.
    """
    m1 = np.full(2 * m_abs + 1, m_abs, dtype=np.int64)
    m2 = np.arange(-m_abs, m_abs + 1, dtype=np.int64)
    face = np.stack([m1, m2], axis=1)
    if m_abs == 0:
        return np.empty((0, 2), dtype=np.int64)
    inner = np.arange(1, m_abs, dtype=np.int64)
    rim_hi = np.stack([inner, np.full(m_abs - 1, m_abs, dtype=np.int64)], axis=1)
    rim_lo = np.stack([inner, np.full(m_abs - 1, -m_abs, dtype=np.int64)], axis=1)
    axis = np.array([[0, m_abs]], dtype=np.int64)
    return np.concatenate([face, rim_hi, rim_lo, axis], axis=0)


def linform_candidates(
    a_scaled: list[int],
    one: int,
    m_max: int,
    slack_per_m: int,
    slack_const: int,
) -> list[tuple[int, ...]]:
    """Coefficient vectors of height <= m_max that may carry a record.

    Scans shells of increasing height; within a shell, vector order is
    deterministic. Only one of each {v, -v} pair is emitted.
    """
    if len(a_scaled) == 2:
        return _linform_candidates_d2(a_scaled, one, m_max, slack_per_m, slack_const)
    return _linform_candidates_generic(a_scaled, one, m_max, slack_per_m, slack_const)


def _linform_candidates_d2(
    a_scaled: list[int],
    one: int,
    m_max: int,
    slack_per_m: int,
    slack_const: int,
) -> list[tuple[int, ...]]:
    a_arr = np.asarray(a_scaled, dtype=np.int64)
    out: list[tuple[int, ...]] = []
    best_hi = one
    for m_abs in range(1, m_max + 1):
        shell = _half_shell_d2(m_abs)
        r = (shell @ a_arr) % one
        dist = np.minimum(r, one - r)
        slack = m_abs * slack_per_m + slack_const
        mask = dist - slack <= best_hi
        out.extend((int(v[0]), int(v[1])) for v in shell[mask])
        shell_min = int(dist.min()) if len(dist) else one
        best_hi = min(best_hi, shell_min + slack)
    return out


def _linform_candidates_generic(
    a_scaled: list[int],
    one: int,
    m_max: int,
    slack_per_m: int,
    slack_const: int,
) -> list[tuple[int, ...]]:
    d = len(a_scaled)
    out: list[tuple[int, ...]] = []
    best_hi = one
    for m_abs in range(1, m_max + 1):
        slack = m_abs * slack_per_m + slack_const
        shell_min = one
        for vec in _half_shell_generic(d, m_abs):
            s = sum(m * a for m, a in zip(vec, a_scaled, strict=True))
            r = s % one
            dist = min(r, one - r)
            if dist - slack <= best_hi:
                out.append(vec)
            if dist < shell_min:
                shell_min = dist
        best_hi = min(best_hi, shell_min + slack)
    return out


def _half_shell_generic(d: int, m_abs: int):
    rng = range(-m_abs, m_abs + 1)
    for vec in product(rng, repeat=d):
        if max(abs(c) for c in vec) != m_abs:
            continue
        lead = next(c for c in vec if c)
        if lead > 0:
            yield vec
