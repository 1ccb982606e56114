"""Finite-length Monte-Carlo pipeline: graph sampling, dicode channel,
exact erasure trellis detection, and joint iterative erasure decoding.

Bits b in {0,1} map to m = 2b - 1; the dicode output is the rescaled filter
difference y_k = (m_k - m_{k-1})/2 in {-1, 0, +1}.  Each section of M payload
bits starts from a known zero state and appends one known zero flush bit, so
sections form independent trellises exactly as the density evolution assumes.
Symbols are erased i.i.d.; bit values are never flipped, which is why every
quantity the decoder can determine equals the transmitted value and erasure
flags are the only decoder state that matters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import _check_unit


def dicode_symbols(bits):
    """Ternary dicode outputs for (S, n) payload bits: (S, n+1) symbols.

    Symbol j is produced by bits j-1 and j of the zero-extended stream (known
    zero start state, one known zero flush bit per section).
    """
    bits = np.asarray(bits)
    if bits.ndim != 2 or bits.size == 0:
        raise ValueError("bits must be a nonempty (sections, n) array")
    s, n = bits.shape
    ext = np.concatenate(
        [np.zeros((s, 1), dtype=int), bits, np.zeros((s, 1), dtype=int)], axis=1)
    m = 2 * ext - 1
    return (m[:, 1:] - m[:, :-1]) // 2


@dataclass(frozen=True)
class ChannelRealization:
    """One transmission: per-section bits, dicode symbols, and erasure mask."""

    bits: np.ndarray       # (S, n) payload bits in {0,1}
    symbols: np.ndarray    # (S, n+1) dicode outputs in {-1,0,1}
    erased: np.ndarray     # (S, n+1) i.i.d. Bernoulli(epsilon) mask
    epsilon: float
    seed: object = None

    @property
    def sections(self):
        return self.bits.shape[0]

    @property
    def section_length(self):
        return self.bits.shape[1]


def simulate_channel(bits, epsilon, seed):
    """Transmit bits over the dicode erasure channel; deterministic per seed."""
    _check_unit("epsilon", epsilon)
    bits = np.asarray(bits)
    symbols = dicode_symbols(bits)
    rng = np.random.default_rng(seed)
    erased = rng.random(symbols.shape) < epsilon
    return ChannelRealization(bits=bits, symbols=symbols, erased=erased,
                              epsilon=float(epsilon), seed=seed)


def _trellis_pass(symbols, erased, prior_known, prior_val):
    """Exact extrinsic erasure forward-backward over all sections at once.

    The dicode trellis has two states.  Running along a section, the state is
    pinned by the most recent anchor: an unerased nonzero symbol (y = +1 pins
    the state to 1, y = -1 to 0) or a known bit prior.  The state is known at
    step k iff no erased, anchor-free gap separates k from the last anchor;
    max-accumulated positions of erasures and anchors decide that in O(n).
    The backward pass mirrors this from the right (there y = -1 pins state 1
    seen from the other side, and the flush prior is usable).  A bit is
    extrinsically known iff either adjacent state is determined without its
    own prior.  Forward and backward determinations must agree; disagreement
    means a bug, not a channel event, hence the hard error.

    symbols, erased: (S, n+1); prior_known, prior_val: (S, n) payload priors.
    Returns (ext_known, ext_val) of shape (S, n).
    """
    s, n1 = symbols.shape
    n = n1 - 1
    pos = np.arange(1, n1 + 1)
    seen = ~erased
    src = seen & (symbols != 0)
    src_val_fwd = (symbols == 1).astype(np.int8)
    src_val_bwd = (symbols == -1).astype(np.int8)

    e_last = np.maximum.accumulate(np.where(erased, pos, 0), axis=1)
    s_last = np.maximum.accumulate(np.where(src, pos, 0), axis=1)
    pk = np.concatenate([prior_known, np.zeros((s, 1), bool)], axis=1)
    pv = np.concatenate([prior_val, np.zeros((s, 1), np.int8)], axis=1)
    p_last = np.maximum.accumulate(np.where(pk, pos, 0), axis=1)
    p_last = np.concatenate([np.zeros((s, 1), int), p_last[:, :-1]], axis=1)
    fwd_known = (e_last == 0) | (s_last >= e_last) | (p_last >= e_last)
    anchor = np.maximum(s_last, p_last)
    use_src = s_last >= p_last
    idx = np.maximum(anchor - 1, 0)
    fwd_val = np.where(anchor == 0, 0,
                       np.where(use_src,
                                np.take_along_axis(src_val_fwd, idx, axis=1),
                                np.take_along_axis(pv, idx, axis=1)))

    big = n1 + 2

    def min_from_right(a):
        return np.minimum.accumulate(a[:, ::-1], axis=1)[:, ::-1]

    e_next = min_from_right(np.where(erased, pos, big))
    s_next = min_from_right(np.where(src, pos, big))
    pk_b = np.concatenate([prior_known, np.ones((s, 1), bool)], axis=1)
    pv_b = np.concatenate([prior_val, np.zeros((s, 1), np.int8)], axis=1)
    p_next = min_from_right(np.where(pk_b, pos, big))

    def shift_left(a):
        return np.concatenate([a[:, 1:], np.full((s, 1), big)], axis=1)

    e_k = shift_left(e_next)
    s_k = shift_left(s_next)
    p_k = shift_left(p_next)
    bwd_known = (s_k < e_k) | (p_k < e_k)
    use_src_b = s_k <= p_k
    idx_b = np.minimum(np.minimum(s_k, p_k) - 1, n1 - 1)
    bwd_val = np.where(use_src_b,
                       np.take_along_axis(src_val_bwd, idx_b, axis=1),
                       np.take_along_axis(pv_b, idx_b, axis=1))

    ext_known = fwd_known[:, :n] | bwd_known[:, :n]
    both = fwd_known[:, :n] & bwd_known[:, :n]
    if np.any(both & (fwd_val[:, :n] != bwd_val[:, :n])):
        raise RuntimeError("forward/backward disagree on a determined bit")
    ext_val = np.where(fwd_known[:, :n], fwd_val[:, :n],
                       bwd_val[:, :n]).astype(np.int8)
    ext_val[~ext_known] = 0
    return ext_known, ext_val


def trellis_detector_pass(realization, prior_known, prior_val=None):
    """Per-bit extrinsic detector outputs given graph-side priors.

    prior_known flags which payload bits the LDPC side already pins; their
    values default to the transmitted bits, which is not a shortcut: erasure
    decoding never produces a wrong value, only "unknown".  Returns
    (ext_known, ext_val) with values zeroed where unknown.
    """
    prior_known = np.asarray(prior_known, dtype=bool)
    if prior_known.shape != realization.bits.shape:
        raise ValueError("prior flags must match the payload shape")
    if prior_val is None:
        prior_val = np.where(prior_known, realization.bits, 0)
    prior_val = np.asarray(prior_val).astype(np.int8)
    return _trellis_pass(realization.symbols, realization.erased,
                         prior_known, prior_val)


@dataclass(frozen=True)
class TannerGraph:
    """Sampled bipartite graph of a (dl, dr, L, w) chain (L=0, w=1: uncoupled).

    Variables sit M per section at positions -L..L; check positions span
    -L..L+w-1 with M*dl/dr checks each.  Edges carry (variable, check, socket)
    with socket the slot inside the check; boundary checks may be underfull
    and degree-0 checks impose no constraint.
    """

    dl: int
    dr: int
    L: int
    w: int
    M: int
    seed: object
    edge_var: np.ndarray = field(repr=False)
    edge_chk: np.ndarray = field(repr=False)
    edge_socket: np.ndarray = field(repr=False)

    @property
    def sections(self):
        return 2 * self.L + 1

    @property
    def n_vars(self):
        return self.sections * self.M

    @property
    def n_checks(self):
        return (2 * self.L + self.w) * (self.M * self.dl // self.dr)

    @property
    def check_degrees(self):
        return np.bincount(self.edge_chk, minlength=self.n_checks)

    @property
    def variable_degrees(self):
        return np.bincount(self.edge_var, minlength=self.n_vars)

    @property
    def empirical_rate(self):
        """(variables - constraining checks) / variables; degree-0 checks excluded."""
        active = int(np.count_nonzero(self.check_degrees))
        return (self.n_vars - active) / self.n_vars

    def dump_edges(self, path):
        """Write one 'variable check socket' line per edge (text, 0-indexed)."""
        with open(path, "w") as fh:
            fh.write(f"# variable check socket  (dl={self.dl} dr={self.dr} "
                     f"L={self.L} w={self.w} M={self.M})\n")
            for v, c, k in zip(self.edge_var, self.edge_chk, self.edge_socket):
                fh.write(f"{v} {c} {k}\n")


def sample_graph(ensemble, M, seed):
    """Sample a Tanner graph: each variable stub picks a uniform window offset,
    overfull check positions hand back uniformly chosen excess stubs for a
    redraw among offsets with room, then stubs match uniformly to free sockets.

    ensemble may be coupled (dl, dr, L, w) or uncoupled (dl, dr), the latter
    treated as a single section with w = 1.  M*dl must be divisible by dr.
    """
    dl, dr = ensemble.dl, ensemble.dr
    chain_l = getattr(ensemble, "L", 0)
    w = getattr(ensemble, "w", 1)
    if M < 1 or (M * dl) % dr:
        raise ValueError(f"need M >= 1 with M*dl divisible by dr, got M={M}")
    q = M * dl // dr
    n_vpos = 2 * chain_l + 1
    n_cpos = 2 * chain_l + w
    cap = M * dl
    rng = np.random.default_rng(seed)

    n_vars = n_vpos * M
    stub_var = np.repeat(np.arange(n_vars), dl)
    stub_vpos = stub_var // M
    target = stub_vpos + rng.integers(0, w, size=stub_var.size)
    counts = np.bincount(target, minlength=n_cpos)

    over = np.flatnonzero(counts > cap)
    if over.size:
        # per-position stub lists let handback and displacement run without
        # rescanning the whole edge array
        pos_stubs = [[] for _ in range(n_cpos)]
        for s, c in enumerate(target):
            pos_stubs[c].append(s)
        redraw = []
        for c in over:
            lst = pos_stubs[c]
            picks = rng.choice(len(lst), size=counts[c] - cap, replace=False)
            for k in sorted(picks, reverse=True):
                s = lst[k]
                lst[k] = lst[-1]
                lst.pop()
                target[s] = -1
                redraw.append(s)
            counts[c] = cap
        for oi in rng.permutation(len(redraw)):
            # place the stub at a uniform offset with room; if its whole
            # window sits at capacity, displace a uniform occupant and let it
            # redraw in turn, walking the surplus toward boundary slack
            cur = redraw[oi]
            for _ in range(100_000):
                p = stub_vpos[cur]
                open_j = [j for j in range(w) if counts[p + j] < cap]
                if open_j:
                    j = open_j[int(rng.integers(len(open_j)))]
                    target[cur] = p + j
                    counts[p + j] += 1
                    pos_stubs[p + j].append(cur)
                    break
                c = p + int(rng.integers(w))
                lst = pos_stubs[c]
                k = int(rng.integers(len(lst)))
                victim = lst[k]
                lst[k] = cur
                target[victim] = -1
                target[cur] = c
                cur = victim
            else:
                raise RuntimeError(
                    "stub placement did not settle; M too small for (L, w)")

    edge_chk = np.empty(stub_var.size, dtype=int)
    edge_socket = np.empty(stub_var.size, dtype=int)
    for c in range(n_cpos):
        idx = np.flatnonzero(target == c)
        sockets = rng.permutation(cap)[:idx.size]
        edge_chk[idx] = c * q + sockets // dr
        edge_socket[idx] = sockets % dr
    return TannerGraph(dl=dl, dr=dr, L=chain_l, w=w, M=M, seed=seed,
                       edge_var=stub_var, edge_chk=edge_chk,
                       edge_socket=edge_socket)


@dataclass
class DecoderState:
    """Erasure flags of the message-passing decoder; flags only ever set."""

    c2v_known: np.ndarray   # per edge, check to variable
    v2c_known: np.ndarray   # per edge, variable to check
    chan_known: np.ndarray  # per bit, detector extrinsic
    iteration: int


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of joint iterative decoding on one realization."""

    resolved: np.ndarray      # per bit: known from channel or any check message
    residual_erasure_fraction: float
    iterations: int
    trace: np.ndarray         # unresolved fraction after each joint iteration
    message_trace: np.ndarray  # variable-to-check erasure fraction, the DE iterate
    state: DecoderState = field(repr=False)

    @property
    def decoded(self):
        return self.residual_erasure_fraction == 0.0


def jit_decode(graph, realization, max_iter=1000):
    """Alternate one detector pass and one LDPC erasure round until fixpoint.

    Variable rule: the message to a check is known iff the detector extrinsic
    is known or any other incoming check message is; check rule: the message
    to a variable is known iff all other incoming messages are.  Known sets
    grow monotonically (asserted), so a fixpoint always exists; iteration
    stops there or at max_iter.
    """
    s, n = realization.bits.shape
    if s != graph.sections or n != graph.M:
        raise ValueError("realization shape does not match graph sections/M")
    ev, ec = graph.edge_var, graph.edge_chk
    n_vars, n_checks = graph.n_vars, graph.n_checks
    c2v_known = np.zeros(ev.size, dtype=bool)
    v2c_known = np.zeros(ev.size, dtype=bool)
    chan_known = np.zeros(n_vars, dtype=bool)
    trace = []
    message_trace = []
    last_total = -1
    it = 0
    for it in range(1, max_iter + 1):
        graph_known = np.bincount(ev, weights=c2v_known, minlength=n_vars) > 0.5
        dk, _ = trellis_detector_pass(realization,
                                      graph_known.reshape(s, n))
        chan_new = dk.ravel()
        assert not np.any(chan_known & ~chan_new), "channel flag regressed"
        chan_known = chan_new

        known_at_var = np.bincount(ev, weights=c2v_known, minlength=n_vars)
        v2c_new = chan_known[ev] | ((known_at_var[ev] - c2v_known) > 0.5)
        assert not np.any(v2c_known & ~v2c_new), "variable flag regressed"
        v2c_known = v2c_new
        message_trace.append(1.0 - float(np.mean(v2c_known)))
        unknown_at_chk = np.bincount(ec, weights=~v2c_known,
                                     minlength=n_checks)
        c2v_new = (unknown_at_chk[ec] - ~v2c_known) < 0.5
        assert not np.any(c2v_known & ~c2v_new), "check flag regressed"
        c2v_known = c2v_new

        resolved = chan_known | (
            np.bincount(ev, weights=c2v_known, minlength=n_vars) > 0.5)
        trace.append(1.0 - float(np.mean(resolved)))
        total = int(chan_known.sum()) + int(c2v_known.sum())
        if total == last_total:
            break
        last_total = total
    resolved = chan_known | (
        np.bincount(ev, weights=c2v_known, minlength=n_vars) > 0.5)
    return DecodeResult(
        resolved=resolved,
        residual_erasure_fraction=1.0 - float(np.mean(resolved)),
        iterations=it,
        trace=np.array(trace),
        message_trace=np.array(message_trace),
        state=DecoderState(c2v_known=c2v_known, v2c_known=v2c_known,
                           chan_known=chan_known, iteration=it),
    )


def split_seeds(master_seed, n):
    """n per-trial integer seeds derived from one master seed.

    The split rule is fixed (substream words of SeedSequence(master_seed)) so
    a manifest recording master_seed and n pins every trial's randomness.
    """
    return np.random.SeedSequence(master_seed).generate_state(n, np.uint64)


@dataclass(frozen=True)
class SimTrial:
    """One Monte-Carlo row: decode a fresh graph and realization."""

    epsilon: float
    seed: int
    residual_erasure_fraction: float
    iterations: int


def run_trial(ensemble, M, epsilon, seed, max_iter=1000):
    """Sample graph, bits, and channel from one trial seed, decode, summarize.

    Graph, payload, and erasures use independent child streams of the trial
    seed, so trials are reproducible in isolation.
    """
    ss = np.random.SeedSequence(int(seed))
    graph_ss, bits_ss, chan_ss = ss.spawn(3)
    graph = sample_graph(ensemble, M, graph_ss)
    sections = 2 * getattr(ensemble, "L", 0) + 1
    bits = np.random.default_rng(bits_ss).integers(0, 2, size=(sections, M))
    realization = simulate_channel(bits, epsilon, chan_ss)
    result = jit_decode(graph, realization, max_iter=max_iter)
    return SimTrial(epsilon=float(epsilon), seed=int(seed),
                    residual_erasure_fraction=result.residual_erasure_fraction,
                    iterations=result.iterations)
