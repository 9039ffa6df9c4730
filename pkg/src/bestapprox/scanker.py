"""Backend selector for the scan kernels.

Prefers the compiled extension when it imported cleanly; falls back to the
numpy implementation otherwise. Set BESTAPPROX_FORCE_PY=1 to force the
fallback (used by the benchmark and by backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _scanker_py

_COMPILED = None
if not os.environ.get("BESTAPPROX_FORCE_PY"):
    try:
        from . import _scanker as _COMPILED  # type: ignore[no-redef]
    except ImportError:
        _COMPILED = None

BACKEND = "compiled" if _COMPILED is not None else "python"


def simul_candidates(
    a_scaled: list[int],
    one: int,
    q_lo: int,
    q_hi: int,
    slack_per_q: int,
    slack_const: int,
) -> list[int]:
    if _COMPILED is not None and len(a_scaled) <= 8:
        return _COMPILED.simul_candidates(
            a_scaled, one, q_lo, q_hi, slack_per_q, slack_const
        )
    return _scanker_py.simul_candidates(
        a_scaled, one, q_lo, q_hi, slack_per_q, slack_const
    )


def linform_candidates(
    a_scaled: list[int],
    one: int,
    m_max: int,
    slack_per_m: int,
    slack_const: int,
) -> list[tuple[int, ...]]:
    if _COMPILED is not None and len(a_scaled) == 2:
        return _COMPILED.linform_candidates(
            a_scaled, one, m_max, slack_per_m, slack_const
        )
    return _scanker_py.linform_candidates(
        a_scaled, one, m_max, slack_per_m, slack_const
    )
