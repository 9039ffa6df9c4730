# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Scaled-integer scan kernels, compiled implementation.

Same contract as the fallback module: emit a sound superset of the
denominators/heights that could carry a record, measured in fixed-point
units with caller-supplied slack. See _scanker_py for the full notes.
"""

from libc.stdint cimport int64_t


def simul_candidates(
    list a_scaled,
    long long one,
    long long q_lo,
    long long q_hi,
    long long slack_per_q,
    long long slack_const,
):
    cdef int d = len(a_scaled)
    cdef int64_t[8] a
    cdef int j
    if d > 8:
        raise ValueError("compiled kernel supports at most 8 coordinates")
    for j in range(d):
        a[j] = a_scaled[j]
    cdef list out = []
    cdef int64_t best_hi = one
    cdef int64_t q, r, dist, maxdist, slack, ub
    for q in range(q_lo, q_hi + 1):
        maxdist = 0
        for j in range(d):
            r = (q * a[j]) % one
            dist = r if r <= one - r else one - r
            if dist > maxdist:
                maxdist = dist
        slack = q * slack_per_q + slack_const
        if maxdist - slack <= best_hi:
            out.append(q)
        ub = maxdist + slack
        if ub < best_hi:
            best_hi = ub
    return out


def linform_candidates(
    list a_scaled,
    long long one,
    long long m_max,
    long long slack_per_m,
    long long slack_const,
):
    if len(a_scaled) != 2:
        raise ValueError("compiled kernel is specialized to two coordinates")
    cdef int64_t a1 = a_scaled[0]
    cdef int64_t a2 = a_scaled[1]
    cdef list out = []
    cdef int64_t best_hi = one
    cdef int64_t m_abs, m1, m2, s, r, dist, slack, shell_min
    for m_abs in range(1, m_max + 1):
        slack = m_abs * slack_per_m + slack_const
        shell_min = one
        # face m1 = m_abs, m2 in [-m_abs, m_abs]
        for m2 in range(-m_abs, m_abs + 1):
            s = m_abs * a1 + m2 * a2
            r = s % one
            if r < 0:
                r += one
            dist = r if r <= one - r else one - r
            if dist - slack <= best_hi:
                out.append((m_abs, m2))
            if dist < shell_min:
                shell_min = dist
        # rims m1 in (0, m_abs), m2 = +m_abs then m2 = -m_abs
        for m1 in range(1, m_abs):
            s = m1 * a1 + m_abs * a2
            r = s % one
            if r < 0:
                r += one
            dist = r if r <= one - r else one - r
            if dist - slack <= best_hi:
                out.append((m1, m_abs))
            if dist < shell_min:
                shell_min = dist
        for m1 in range(1, m_abs):
            s = m1 * a1 - m_abs * a2
            r = s % one
            if r < 0:
                r += one
            dist = r if r <= one - r else one - r
            if dist - slack <= best_hi:
                out.append((m1, -m_abs))
            if dist < shell_min:
                shell_min = dist
        # axis vector (0, m_abs)
        s = m_abs * a2
        r = s % one
        if r < 0:
            r += one
        dist = r if r <= one - r else one - r
        if dist - slack <= best_hi:
            out.append((0, m_abs))
        if dist < shell_min:
            shell_min = dist
        if shell_min + slack < best_hi:
            best_hi = shell_min + slack
    return out
