"""Density evolution and finite-length simulation for spatially coupled LDPC
ensembles on erasure channels with and without memory."""

from .channels import (BEC, CUSTOM, DEC, ChannelModel, TransferTable,
                       as_channel, bec_transfer, dec_transfer,
                       load_transfer_table, make_channel, shannon_threshold,
                       sir)
from .coupled import (Constellation, CoupledEnsemble, CoupledExitPoint,
                      CoupledFixedPoint, ShapeReport, coupled_de_update,
                      coupled_epsilon_i, coupled_sweep, coupled_sweep_reference,
                      coupled_threshold_lower_bound, design_rate, entropy,
                      exit_curve_coupled, forward_de_coupled,
                      jit_threshold_coupled, reverse_de, shape_report)
from .simulate import (ChannelRealization, DecodeResult, DecoderState,
                       SimTrial, TannerGraph, dicode_symbols, jit_decode,
                       run_trial, sample_graph, simulate_channel, split_seeds,
                       trellis_detector_pass)
from .uncoupled import (DeTrace, ExitPoint, RegularEnsemble,
                        count_fixed_points, de_update, exit_curve, forward_de,
                        jit_threshold, jit_threshold_upper_bound)

__version__ = "0.1.0"
