"""Density evolution for uncoupled regular LDPC ensembles on erasure channels.

State is the erasure fraction x of variable-to-check messages.  One joint
iteration runs the detector transfer against the current a-priori quality and
the check-side update together:

    y = 1 - (1 - x)^(dr - 1)
    x' = f(eps, y^dl) * y^(dl - 1)

The detector sees priors of erasure fraction y^dl (all dl check inputs erased),
while the extrinsic graph side excludes one edge, hence the dl-1 power.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .channels import _check_unit, as_channel, bec_transfer, dec_transfer


@dataclass(frozen=True)
class RegularEnsemble:
    """(dl, dr)-regular ensemble; design rate 1 - dl/dr."""

    dl: int
    dr: int

    def __post_init__(self):
        if self.dl < 2 or self.dr <= self.dl:
            raise ValueError(f"need 2 <= dl < dr, got ({self.dl}, {self.dr})")

    @property
    def rate(self):
        return 1.0 - self.dl / self.dr


def de_update(ensemble, channel, x):
    """One joint detector/decoder density evolution step from erasure fraction x."""
    _check_unit("x", x)
    y = 1.0 - (1.0 - x) ** (ensemble.dr - 1)
    return channel.transfer(y**ensemble.dl) * y ** (ensemble.dl - 1)


@dataclass(frozen=True)
class DeTrace:
    """Forward DE run record; history holds x per iteration, index 0 = x0."""

    final_x: float
    iterations: int
    converged_to_zero: bool
    history: np.ndarray = field(repr=False)


def forward_de(ensemble, channel, x0=1.0, tol=1.0e-12, max_iter=100_000,
               zero_threshold=1.0e-10):
    """Iterate de_update from x0 until the step size drops below tol.

    Exits early once x falls under zero_threshold: below that the update map
    is a contraction to 0 for any eps < 1, so the outcome is decided.
    converged_to_zero reports final_x < zero_threshold either way.
    """
    _check_unit("x0", x0)
    x = float(x0)
    history = [x]
    it = 0
    for it in range(1, max_iter + 1):
        x_new = float(de_update(ensemble, channel, x))
        history.append(x_new)
        done = x_new <= zero_threshold or abs(x_new - x) < tol
        x = x_new
        if done:
            break
    return DeTrace(final_x=x, iterations=it,
                   converged_to_zero=x < zero_threshold,
                   history=np.array(history))


def jit_threshold(ensemble, channel="dec", tol_eps=1.0e-7, max_iter=100_000):
    """Supremum eps for which forward DE from x=1 converges to zero.

    channel is a kind string ("dec", "bec") or any ChannelModel; bisection on
    eps is valid because the update is monotone in eps and in x, making
    decodability monotone.
    """
    ch = as_channel(channel)
    lo, hi = 0.0, 1.0
    if forward_de(ensemble, ch.with_epsilon(hi),
                  max_iter=max_iter).converged_to_zero:
        return hi
    while hi - lo > tol_eps:
        mid = 0.5 * (lo + hi)
        if forward_de(ensemble, ch.with_epsilon(mid),
                      max_iter=max_iter).converged_to_zero:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ExitPoint:
    """One EXIT-curve sample: the eps making x a DE fixed point, if any.

    exit_value is the detector prior erasure (1 - (1-x)^(dr-1))^dl; epsilon is
    nan for grid points where no eps in [0, 1] solves the fixed-point equation.
    """

    x: float
    exit_value: float
    epsilon: float


def exit_curve(ensemble, n_points=2001, channel_kind="dec"):
    """Fixed-point EXIT curve on a uniform x grid over (0, 1].

    g(eps) = f(eps, y^dl) * y^(dl-1) - x is increasing in eps, so a bracketed
    root find on [0, 1] gives the unique solution when one exists.  Near x = 0
    the graph side alone forces the update below x for dl >= 3 even at eps = 1;
    such points are kept with a nan sentinel so curve files stay aligned to the
    grid.
    """
    if n_points < 2:
        raise ValueError("need n_points >= 2")
    f = {"dec": dec_transfer, "bec": bec_transfer}[channel_kind]
    dl, dr = ensemble.dl, ensemble.dr
    xs = np.linspace(0.0, 1.0, n_points + 1)[1:]
    points = []
    for x in xs:
        y = 1.0 - (1.0 - x) ** (dr - 1)
        prior = y**dl

        def g(eps, _x=x, _y=y, _p=prior):
            return f(eps, _p) * _y ** (dl - 1) - _x

        if g(1.0) < 0.0:
            eps = float("nan")
        else:
            eps = brentq(g, 0.0, 1.0, xtol=1.0e-14)
        points.append(ExitPoint(x=float(x), exit_value=float(prior),
                                epsilon=float(eps)))
    return points


def count_fixed_points(ensemble, channel, n_grid=100_000, include_zero=True):
    """Count DE fixed points in [0, 1] by sign changes of x - de_update(x).

    x = 0 is always a fixed point; interior ones are bracketed on a uniform
    grid, refined by root finding, and deduplicated.
    """
    xs = np.linspace(0.0, 1.0, n_grid)
    resid = xs - de_update(ensemble, channel, xs)
    roots = [0.0] if include_zero else []
    for i in range(1, n_grid - 1):
        a, b = resid[i], resid[i + 1]
        if a == 0.0 and xs[i] > 0.0:
            roots.append(float(xs[i]))
        elif a * b < 0.0:
            r = brentq(lambda x: x - float(de_update(ensemble, channel, x)),
                       xs[i], xs[i + 1], xtol=1.0e-14)
            roots.append(float(r))
    dedup = []
    for r in sorted(roots):
        if not dedup or r - dedup[-1] > 1.0e-9:
            dedup.append(r)
    return dedup


def jit_threshold_upper_bound(ensemble):
    """Closed-form eps above which a nonzero DE fixed point provably exists.

    min(1, sqrt(1 / (sqrt(dr-1) * (1 - (dl-1) exp(-sqrt(dr-1)))))), using only
    f >= eps^2; valid when (dl-1) exp(-sqrt(dr-1)) < 1, ValueError otherwise.
    Along a fixed-rate degree sweep the bound drives the threshold to zero.
    """
    dl, dr = ensemble.dl, ensemble.dr
    s = np.sqrt(dr - 1.0)
    slack = 1.0 - (dl - 1.0) * np.exp(-s)
    if slack <= 0.0:
        raise ValueError(
            f"bound needs (dl-1) exp(-sqrt(dr-1)) < 1; ({dl}, {dr}) violates it")
    return min(1.0, float(np.sqrt(1.0 / (s * slack))))
