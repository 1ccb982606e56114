"""Erasure-channel transfer functions and the capacity algebra built on them.

Two closed-form channels are supported.  The dicode erasure channel (DEC) is the
binary-input 1-D partial-response filter whose ternary output symbols are erased
i.i.d. with probability eps; its detector-side extrinsic erasure transfer is

    f(eps, x) = 4 eps^2 / (2 - x (1 - eps))^2

where x is the erasure fraction of the i.i.d. priors fed to the detector.  The
memoryless binary erasure channel (BEC) has the constant transfer f(eps, x) = eps.
A third kind wraps a tabulated transfer sampled on an x grid at one fixed eps,
so measured or precoded channels can be plugged into the same machinery.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEC = "dec"
BEC = "bec"
CUSTOM = "custom"


def _check_unit(name, value):
    v = np.asarray(value, dtype=float)
    if np.any(v < 0.0) or np.any(v > 1.0) or np.any(~np.isfinite(v)):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def dec_transfer(epsilon, x):
    """Extrinsic erasure probability of the dicode erasure channel detector.

    Increasing in both arguments; equals eps^2 at x=0 and 4 eps^2/(1+eps)^2 at x=1.
    Accepts scalars or numpy arrays for x.
    """
    _check_unit("epsilon", epsilon)
    _check_unit("x", x)
    return 4.0 * epsilon * epsilon / (2.0 - x * (1.0 - epsilon)) ** 2


def bec_transfer(epsilon, x):
    """Memoryless erasure channel: the transfer is the channel erasure rate itself."""
    _check_unit("epsilon", epsilon)
    _check_unit("x", x)
    if np.isscalar(x):
        return float(epsilon)
    return np.full_like(np.asarray(x, dtype=float), epsilon)


def sir(epsilon):
    """Symmetric information rate of the dicode erasure channel, 1 - 2 eps^2/(1+eps)."""
    _check_unit("epsilon", epsilon)
    return 1.0 - 2.0 * epsilon * epsilon / (1.0 + epsilon)


def shannon_threshold(rate):
    """Largest eps whose symmetric information rate still supports the given rate.

    Inverts sir(): the positive root of 2 eps^2 - (1-r) eps - (1-r) = 0.
    """
    if not (0.0 < rate < 1.0):
        raise ValueError(f"rate must lie in (0, 1), got {rate!r}")
    q = 1.0 - rate
    return 0.25 * q + 0.25 * math.sqrt(q * q + 8.0 * q)


@dataclass(frozen=True)
class TransferTable:
    """Tabulated transfer f(x) at one fixed eps, linearly interpolated.

    The grid must be ascending in [0, 1] and include both endpoints; values must
    be non-decreasing in [0, 1].  These are validated on construction so a bad
    table fails at load time, not inside a DE run.
    """

    x: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if x.ndim != 1 or x.size < 2 or x.shape != f.shape:
            raise ValueError("table needs two equal-length 1-d columns with >= 2 rows")
        if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
            raise ValueError("x grid must ascend from 0.0 to 1.0")
        _check_unit("f", f)
        if np.any(np.diff(f) < 0):
            raise ValueError("transfer values must be non-decreasing in x")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)

    def __call__(self, x):
        _check_unit("x", x)
        return np.interp(x, self.x, self.f)


def load_transfer_table(path):
    """Read a two-column CSV (x, f_value) into a validated TransferTable.

    path may be a filename or an open text stream.  A header row is accepted
    and skipped if its first cell is not numeric.
    """
    xs, fs = [], []
    fh = path if hasattr(path, "read") else open(path, newline="")
    try:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                x = float(row[0])
            except ValueError:
                continue  # header
            xs.append(x)
            fs.append(float(row[1]))
    finally:
        if fh is not path:
            fh.close()
    return TransferTable(np.array(xs), np.array(fs))


@dataclass(frozen=True)
class ChannelModel:
    """A channel kind plus its erasure rate, exposing transfer(x) at that rate.

    For table channels the stored slice is taken at face value for any eps, so
    only fixed-eps operations make sense there; eps sweeps need dec or bec.
    """

    kind: str
    epsilon: float
    _transfer: Callable = field(repr=False, compare=False)

    def transfer(self, x):
        """Extrinsic erasure probability for prior erasure fraction x (scalar or array)."""
        return self._transfer(self.epsilon, x)

    def with_epsilon(self, epsilon):
        _check_unit("epsilon", epsilon)
        return ChannelModel(self.kind, float(epsilon), self._transfer)


def make_channel(kind, epsilon, table=None):
    """Construct a ChannelModel for kind in {dec, bec, custom}."""
    _check_unit("epsilon", epsilon)
    if kind == DEC:
        return ChannelModel(DEC, float(epsilon), dec_transfer)
    if kind == BEC:
        return ChannelModel(BEC, float(epsilon), bec_transfer)
    if kind == CUSTOM:
        if table is None:
            raise ValueError("custom channel needs a TransferTable")
        return ChannelModel(CUSTOM, float(epsilon), lambda eps, x: table(x))
    raise ValueError(f"unknown channel kind {kind!r}")


def as_channel(channel, epsilon=0.5):
    """Accept a kind string or a ChannelModel; eps only seeds string inputs."""
    if isinstance(channel, str):
        return make_channel(channel, epsilon)
    if isinstance(channel, ChannelModel):
        return channel
    raise TypeError(f"expected channel kind or ChannelModel, got {channel!r}")
