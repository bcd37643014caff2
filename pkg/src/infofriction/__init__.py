"""Bit-meters accounting, information-friction lower bounds and a placed-decoder simulator."""
from .bounds import (
    decoding_bm_lb, encoding_bm_lb, near_capacity_bm_lb, erasure_block_error_lb,
    optimal_transmit_power, total_energy_per_bit_lb,
)
from .channel import ChannelParams, CodeParams, estimate_block_error, q_function
from .codes import GallagerBCoder, Hamming74Coder, PlacedCoder, RepetitionCoder, make_coder, place
from .computation import MessageRecord, MessageTrace, bitmeters_in_region, bitmeters_of_trace
from .geometry import Circuit, Node, Rect, Substrate, clip_segment_to_rect, euclidean_distance
from .stencil import Stencil, best_origin, build_cuts, partition

__version__ = "0.1.0"
