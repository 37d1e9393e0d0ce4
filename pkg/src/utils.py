from __future__ import annotations

import os
import sys
import time
from typing import Sequence

import numpy as np


# -----------------------------
# Logging helpers
# -----------------------------
def log(msg: str) -> None:
    if os.getenv("CASORATI_QUIET", "0").strip() == "1":
        return
    print(msg, file=sys.stderr, flush=True)


def tick() -> float:
    return time.monotonic()


# -----------------------------
# Env helpers
# -----------------------------
def getenv_int(key: str, default: int | None) -> int | None:
    val = os.getenv(key)
    if not val:
        return default
    try:
        return int(val)
    except ValueError:
        log(f"[WARN] {key}={val!r} is not an integer -> using {default}")
        return default


# -----------------------------
# Errors
# -----------------------------
class LabError(ValueError):
    """Base class for every input/contract error raised by the lab."""


class DimensionError(LabError):
    pass


class DomainError(LabError):
    pass


class MissingAmbientError(LabError):
    pass


class AsymmetryError(LabError):
    def __init__(self, alpha: int, i: int, j: int, defect: float):
        # 1-based, like every report
        self.alpha, self.i, self.j, self.defect = alpha, i, j, defect
        super().__init__(f"zeta not symmetric at (alpha={alpha}, i={i}, j={j}): defect {defect:.3g}")


# -----------------------------
# Numeric helpers
# -----------------------------
def frozen(a: np.ndarray | Sequence, dtype=float) -> np.ndarray:
    """Copy into a read-only float array."""
    out = np.array(a, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


def canonical_sign(u: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """u ~ -u: flip so the first coordinate with |x| > eps is positive."""
    for x in u:
        if abs(x) > eps:
            return u if x > 0 else -u
    return u


def rel_close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def one_based(idx: int) -> int:
    return int(idx) + 1
