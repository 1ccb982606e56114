"""Density evolution for spatially coupled regular LDPC ensembles.

A (dl, dr, L, w) ensemble places variable sections at positions -L..L and
smooths each edge over a window of w consecutive positions.  With x_i the
erasure fraction at section i (zero outside the chain), one parallel sweep is

    y_i  = 1 - (1/w) sum_j (1 - (1/w) sum_k x_{i+j-k})^(dr-1)
    x_i' = f(eps, y_i^dl) * y_i^(dl-1)          j, k in 0..w-1

Decoding near the saturated threshold proceeds as two boundary waves that
cross the chain at speed O(threshold - eps), so a naive sup-change stopping
rule either runs for millions of sweeps or misclassifies.  forward_de_coupled
instead certifies decoding as soon as the profile fits strictly inside its own
past translated one section inward on both sides: monotonicity of the update
map plus translation covariance (the zero boundary only helps) then force
convergence to zero.  Failure is declared only on a genuine fixed point or a
long stall of the decoded-section count, never by extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .channels import _check_unit, as_channel

_CHECK = 256                 # sweeps between bookkeeping points
_STALL_SWEEPS = 120_000      # no new decoded section for this long => stuck
_STALL_DELTA = 1.0e-7        # ... but only if the profile is also barely moving
_SNAPSHOT_KEEP = 320_000     # how far back profile snapshots are retained
_WAVE_MIN_T = 16_384         # no wave certification before the transient ends
_WAVE_MARGIN = 3.6           # sweeps per section of required front advance, x2 safety
_DEC_LEVEL = 1.0e-3          # a section below this counts as decoded
_WAVE_SLACK = 1.0e-14        # absolute tolerance in the profile comparison


@dataclass(frozen=True)
class CoupledEnsemble:
    """(dl, dr)-regular chain of 2L+1 sections with coupling width w.

    w > 2L is accepted here (the DE recursion is still well defined) but the
    design-rate formula requires w <= 2L and raises if violated.
    """

    dl: int
    dr: int
    L: int
    w: int

    def __post_init__(self):
        if self.dl < 2 or self.dr <= self.dl:
            raise ValueError(f"need 2 <= dl < dr, got ({self.dl}, {self.dr})")
        if self.dl % 1 or self.dr % 1:
            raise ValueError("degrees must be integers")
        if self.L < 1 or self.w < 1:
            raise ValueError(f"need L >= 1 and w >= 1, got L={self.L}, w={self.w}")

    @property
    def sections(self):
        return 2 * self.L + 1

    def design_rate(self):
        """Rate of the coupled ensemble after removing degree-0 boundary checks.

        (1 - dl/dr) minus the boundary rate loss, which decays as 1/L:

            loss = (dl/dr) * (w + 1 - 2 sum_{i=0..w} (i/w)^dr) / (2L + 1)
        """
        if self.w > 2 * self.L:
            raise ValueError("design rate needs w <= 2L")
        dl, dr, L, w = self.dl, self.dr, self.L, self.w
        s = sum((i / w) ** dr for i in range(w + 1))
        loss = (dl / dr) * (w + 1 - 2.0 * s) / (2 * L + 1)
        return (1.0 - dl / dr) - loss


def design_rate(ensemble):
    """Rate of the coupled ensemble; see CoupledEnsemble.design_rate."""
    return ensemble.design_rate()


@dataclass(frozen=True)
class Constellation:
    """Erasure profile over sections -L..L; reads outside the chain are zero."""

    values: np.ndarray
    L: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2 * self.L + 1,):
            raise ValueError(f"need 2L+1 = {2 * self.L + 1} values, got {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, L, value):
        return cls(np.full(2 * L + 1, float(value)), L)

    def at(self, position):
        """Value at a chain position, zero beyond the boundary."""
        if -self.L <= position <= self.L:
            return float(self.values[position + self.L])
        return 0.0

    @property
    def entropy(self):
        """Average erasure fraction over the 2L+1 sections."""
        return float(np.mean(self.values))

    @property
    def maximum(self):
        return float(np.max(self.values))


def entropy(constellation):
    """Average erasure fraction of a constellation (or raw profile array)."""
    values = getattr(constellation, "values", constellation)
    return float(np.mean(np.asarray(values, dtype=float)))


def coupled_sweep(values, ensemble, channel):
    """One parallel DE sweep over all sections; values is the length-2L+1 array.

    Both window averages are convolutions with a flat kernel: the first runs
    over variable positions feeding each check (trailing window, checks live at
    -L..L+w-1), the second over the checks feeding each variable (leading
    window, back to length 2L+1).
    """
    dl, dr, w = ensemble.dl, ensemble.dr, ensemble.w
    kern = np.full(w, 1.0 / w)
    padded = np.concatenate([np.zeros(w - 1), values, np.zeros(w - 1)])
    # window means of [0,1] data can round an ulp outside the interval, and an
    # odd power of the residue then goes negative; clamp both averages
    check_in = np.clip(np.convolve(padded, kern, mode="valid"), 0.0, 1.0)
    check_out = (1.0 - check_in) ** (dr - 1)
    y = np.clip(1.0 - np.convolve(check_out, kern, mode="valid"), 0.0, 1.0)
    return channel.transfer(y**dl) * y ** (dl - 1)


def coupled_sweep_reference(values, ensemble, channel):
    """Literal triple-loop transcription of the sweep; pins the vectorized one."""
    dl, dr, w, L = ensemble.dl, ensemble.dr, ensemble.w, ensemble.L
    n = 2 * L + 1

    def xat(i):
        return values[i] if 0 <= i < n else 0.0

    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(w):
            inner = min(1.0, sum(xat(i + j - k) for k in range(w)) / w)
            acc += (1.0 - inner) ** (dr - 1)
        y = min(1.0, max(0.0, 1.0 - acc / w))
        out[i] = channel.transfer(y**dl) * y ** (dl - 1)
    return out


def _section_y(values, i, ensemble):
    """Averaged check-side erasure y_i seen by section i (zero-padded reads)."""
    dr, w = ensemble.dr, ensemble.w
    n = values.size
    acc = 0.0
    for j in range(w):
        inner = 0.0
        for k in range(w):
            m = i + j - k
            if 0 <= m < n:
                inner += values[m]
        acc += (1.0 - min(1.0, inner / w)) ** (dr - 1)
    return min(1.0, max(0.0, 1.0 - acc / w))


def _section_value(values, i, ensemble, channel):
    """New value of section i from the current profile."""
    y = _section_y(values, i, ensemble)
    dl = ensemble.dl
    return float(channel.transfer(y**dl) * y ** (dl - 1))


def coupled_epsilon_i(ensemble, channel, constellation, i):
    """Detector-side erasure emitted toward section i (chain position index).

    Returns f(eps, y_i^dl) where y_i is the doubly averaged check-side erasure
    at position i; near the boundary the zero padding makes y_i smaller, so
    this never exceeds the interior value.
    """
    if not -ensemble.L <= i <= ensemble.L:
        raise ValueError(f"position {i} outside [-{ensemble.L}, {ensemble.L}]")
    values = getattr(constellation, "values", constellation)
    values = np.asarray(values, dtype=float)
    y = _section_y(values, i + ensemble.L, ensemble)
    return float(channel.transfer(y**ensemble.dl))


def coupled_de_update(ensemble, channel, constellation):
    """Parallel-schedule image of a constellation under one DE sweep."""
    values = getattr(constellation, "values", constellation)
    values = np.asarray(values, dtype=float)
    return Constellation(coupled_sweep(values, ensemble, channel), ensemble.L)


def _shifted_inward(x):
    """Profile translated one section toward the center on each side.

    Vacated boundary slots become zero; the center keeps the larger of its two
    inbound neighbors so neither half's bound is weakened.
    """
    n = x.size
    c = n // 2
    out = np.zeros_like(x)
    out[1:c + 1] = x[:c]
    out[c:n - 1] = x[c + 1:]
    out[c] = max(x[c - 1], x[c + 1])
    return out


@dataclass(frozen=True)
class CoupledFixedPoint:
    """Terminal state of a coupled forward DE run.

    status is one of:
      zero         profile fell below zero_threshold everywhere
      zero-wave    decoding waves certified; convergence to zero is forced
      fixed-point  sup-change fell below tol at a nonzero profile
      stall        decoded-section count frozen for _STALL_SWEEPS at tiny delta
      cap          sweep budget exhausted with no certified outcome
    """

    epsilon: float
    constellation: Constellation
    residual: float
    entropy: float
    iterations: int
    status: str
    metadata: dict = field(default_factory=dict, repr=False)

    @property
    def decoded(self):
        return self.status in ("zero", "zero-wave")

    @property
    def converged(self):
        return self.status != "cap"


def forward_de_coupled(ensemble, channel, x0=1.0, tol=1.0e-12,
                       max_sweeps=1_000_000, zero_threshold=1.0e-10,
                       schedule="parallel", rng=None, record_entropy=False):
    """Run coupled DE from a uniform (or given) profile until the outcome is known.

    schedule "parallel" updates all sections at once and enables the wave and
    stall machinery; "round-robin" and "random-admissible" update sections
    serially in place (the latter in a fresh rng permutation each sweep, so
    every section still updates infinitely often) and stop only on the
    zero/tol exits, which is plenty for the short chains they are meant for.
    """
    n = ensemble.sections
    if np.isscalar(x0):
        _check_unit("x0", x0)
        x = np.full(n, float(x0))
    else:
        x = np.asarray(x0, dtype=float).copy()
        _check_unit("x0", x)
        if x.shape != (n,):
            raise ValueError(f"x0 must have {n} sections")
    if schedule not in ("parallel", "round-robin", "random-admissible"):
        raise ValueError(f"unknown schedule {schedule!r}")
    if schedule == "random-admissible" and rng is None:
        rng = np.random.default_rng()

    entropy_hist = [float(np.mean(x))] if record_entropy else None
    status = "cap"
    delta = float("inf")
    t = 0

    if schedule != "parallel":
        order = np.arange(n)
        for t in range(1, max_sweeps + 1):
            if schedule == "random-admissible":
                order = rng.permutation(n)
            before = x.copy()
            for i in order:
                x[i] = _section_value(x, i, ensemble, channel)
            delta = float(np.max(np.abs(x - before)))
            if record_entropy:
                entropy_hist.append(float(np.mean(x)))
            if float(x.max()) <= zero_threshold:
                status = "zero"
                break
            if delta < tol:
                status = "fixed-point"
                break
    else:
        snapshots = {}
        ndec_hist = {0: int(np.count_nonzero(x < _DEC_LEVEL))}
        best_ndec = ndec_hist[0]
        best_ndec_t = 0
        wave_hits = 0
        for t in range(1, max_sweeps + 1):
            x_new = coupled_sweep(x, ensemble, channel)
            delta = float(np.max(np.abs(x_new - x)))
            x = x_new
            if record_entropy:
                entropy_hist.append(float(np.mean(x)))
            if float(x.max()) <= zero_threshold:
                status = "zero"
                break
            if delta < tol:
                status = "fixed-point"
                break
            if t % _CHECK:
                continue
            snapshots[t] = x.copy()
            for key in [k for k in snapshots if k < t - _SNAPSHOT_KEEP]:
                del snapshots[key]
            n_dec = int(np.count_nonzero(x < _DEC_LEVEL))
            ndec_hist[t] = n_dec
            if n_dec > best_ndec:
                best_ndec, best_ndec_t = n_dec, t
            elif t - best_ndec_t >= _STALL_SWEEPS and delta < _STALL_DELTA:
                status = "stall"
                break
            if t < _WAVE_MIN_T:
                continue
            # total front speed in sections per sweep, from the latter half
            half = (t // 2) // _CHECK * _CHECK
            v = (n_dec - ndec_hist.get(half, ndec_hist[0])) / (t - half)
            if v <= 0.0:
                continue
            lag = max(2 * _CHECK, _CHECK * math.ceil(_WAVE_MARGIN / v / _CHECK))
            ref = snapshots.get(t - lag)
            if ref is None:
                continue
            if np.all(x <= _shifted_inward(ref) + _WAVE_SLACK):
                wave_hits += 1
                if wave_hits >= 2:
                    status = "zero-wave"
                    break
            else:
                wave_hits = 0

    meta = {}
    if record_entropy:
        meta["entropy_history"] = np.array(entropy_hist)
    return CoupledFixedPoint(
        epsilon=float(channel.epsilon),
        constellation=Constellation(x, ensemble.L),
        residual=delta,
        entropy=float(np.mean(x)),
        iterations=t,
        status=status,
        metadata=meta,
    )


def jit_threshold_coupled(ensemble, channel, lo=0.0, hi=1.0, tol_eps=1.0e-6,
                          max_sweeps=1_000_000, validate_bracket=True):
    """Bisect the decoding threshold of the coupled ensemble on [lo, hi].

    channel is a kind string or ChannelModel.  A probe counts as below
    threshold only when forward DE certifies decoding; fixed-point, stall, and
    budget-capped runs all count as above.  With validate_bracket the
    endpoints are checked first so a bad bracket raises instead of silently
    returning an endpoint.
    """
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"need 0 <= lo < hi <= 1, got [{lo}, {hi}]")
    ch = as_channel(channel)

    def decodes(eps):
        r = forward_de_coupled(ensemble, ch.with_epsilon(eps),
                               max_sweeps=max_sweeps)
        return r.decoded

    if validate_bracket:
        if not decodes(lo):
            raise ValueError(f"lower bracket eps={lo} does not decode")
        if decodes(hi):
            raise ValueError(f"upper bracket eps={hi} decodes")
    while hi - lo > tol_eps:
        mid = 0.5 * (lo + hi)
        if decodes(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def coupled_threshold_lower_bound(ensemble):
    """Area bound: on the dicode erasure channel the coupled threshold is >= dl/dr."""
    return ensemble.dl / ensemble.dr


def reverse_de(ensemble, channel, chi, tol=1.0e-12, max_iter=100_000):
    """Find the (eps, profile) pair whose DE fixed point has mean erasure chi.

    Starting from the flat profile at chi, each round solves for the eps whose
    sweep preserves the mean (a bracketed root find, monotone in eps), then
    applies that sweep.  The mean stays pinned at chi while the shape relaxes,
    which reaches fixed points that forward DE skips over, unstable ones
    included.  Raises RuntimeError when no eps in [0, 1] can hold the mean
    (chi too small for this ensemble: the graph corrects more than chi even
    at eps = 1).  channel is a kind string or ChannelModel.
    """
    if not (0.0 < chi < 1.0):
        raise ValueError(f"chi must lie in (0, 1), got {chi!r}")
    ch = as_channel(channel)
    n = ensemble.sections
    x = np.full(n, float(chi))
    eps = float("nan")
    status = "cap"
    delta = float("inf")
    it = 0
    for it in range(1, max_iter + 1):

        def g(e):
            swept = coupled_sweep(x, ensemble, ch.with_epsilon(e))
            return float(np.mean(swept)) - chi

        if g(0.0) > 0.0 or g(1.0) < 0.0:
            raise RuntimeError(
                f"no eps in [0, 1] holds mean erasure {chi} for this ensemble")
        eps = brentq(g, 0.0, 1.0, xtol=1.0e-14)
        x_new = coupled_sweep(x, ensemble, ch.with_epsilon(eps))
        delta = float(np.max(np.abs(x_new - x)))
        x = x_new
        if delta < tol:
            status = "fixed-point"
            break
    return CoupledFixedPoint(
        epsilon=float(eps),
        constellation=Constellation(x, ensemble.L),
        residual=delta,
        entropy=float(np.mean(x)),
        iterations=it,
        status=status,
        metadata={"anchor_entropy": float(chi)},
    )


@dataclass(frozen=True)
class CoupledExitPoint:
    """One coupled EXIT sample; epsilon is nan when no eps can hold this chi."""

    chi: float
    epsilon: float
    exit_value: float


def exit_curve_coupled(ensemble, channel, chi_grid, tol=1.0e-12,
                       max_iter=100_000):
    """Coupled EXIT curve traced by reverse DE over a grid of mean erasures.

    The ordinate is the section-averaged detector prior erasure
    mean_i (1 - (1 - x_i)^(dr-1))^dl at the anchored fixed point.  Grid points
    whose anchor has no solution are kept as nan rows so curves over different
    chain lengths stay aligned.  Points come back sorted by chi.
    """
    dr, dl = ensemble.dr, ensemble.dl
    ch = as_channel(channel)
    points = []
    for chi in np.sort(np.asarray(chi_grid, dtype=float)):
        try:
            res = reverse_de(ensemble, ch, float(chi), tol=tol,
                             max_iter=max_iter)
        except RuntimeError:
            points.append(CoupledExitPoint(chi=float(chi), epsilon=float("nan"),
                                           exit_value=float("nan")))
            continue
        xv = res.constellation.values
        exit_value = float(np.mean((1.0 - (1.0 - xv) ** (dr - 1)) ** dl))
        points.append(CoupledExitPoint(chi=float(chi), epsilon=res.epsilon,
                                       exit_value=exit_value))
    return points


@dataclass(frozen=True)
class ShapeReport:
    """Geometry summary of a nonzero constellation."""

    is_symmetric: bool
    asymmetry: float
    is_unimodal: bool
    plateau_value: float
    transition_width: int
    maximum: float


def shape_report(fp, symmetry_tol=1.0e-8, slack=1.0e-10):
    """Measure symmetry, unimodality, plateau height, and transition width.

    fp may be a fixed point or a bare Constellation.  plateau_value is the
    median over the middle third of the chain; the transition width on each
    side counts sections strictly between 1% and 99% of the plateau, and the
    reported width is the larger side.  Unimodality allows per-step violations
    up to slack so a flat plateau is not a failure.
    """
    c = getattr(fp, "constellation", fp)
    x = np.asarray(getattr(c, "values", c), dtype=float)
    if float(np.max(x)) <= 0.0:
        raise ValueError("all-zero constellation has no shape to report")
    asym = float(np.max(np.abs(x - x[::-1])))
    peak = int(np.argmax(x))
    rising = bool(np.all(np.diff(x[:peak + 1]) >= -slack))
    falling = bool(np.all(np.diff(x[peak:]) <= slack))
    n = x.size
    third = n // 3
    plateau = float(np.median(x[third:n - third]))
    lo_lvl, hi_lvl = 0.01 * plateau, 0.99 * plateau
    mid = (lo_lvl < x) & (x < hi_lvl)
    left = int(np.count_nonzero(mid[:peak]))
    right = int(np.count_nonzero(mid[peak + 1:]))
    return ShapeReport(
        is_symmetric=asym < symmetry_tol,
        asymmetry=asym,
        is_unimodal=rising and falling,
        plateau_value=plateau,
        transition_width=max(left, right),
        maximum=float(np.max(x)),
    )
