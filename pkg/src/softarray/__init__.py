"""Deformable tentacle antenna arrays for multi-user MISO downlinks."""

from ._kernels import BACKEND
from .baselines import (BaselineSettings, ElementOffsets2D, ElementOffsets3D, fixed_ccaa_rate,
                        optimize_2d_ccaa, optimize_3d_ccaa)
from .channel import (ChannelConfig, ChannelMatrix, PathSet, assemble_channel, draw_paths,
                      element_gain, steering_entry)
from .config import ExperimentConfig, load_config
from .exceptions import (ConfigError, DimensionMismatchError, DomainError, InfeasibleStateError,
                         RankDeficientChannelError)
from .geometry import (ArrayConstants, ArrayLayout, DeformationState, element_positions,
                       projected_length, verify_arc_length)
from .gradient import (GradientReport, grad_sum_rate_wrt_params, grad_sum_rate_wrt_z, jacobian)
from .harness import SweepResult, emit_csv, run_sweep
from .precoding import PrecodeResult, RateReport, sinr, sum_rate, zf_precoder
from .sca import ScaSettings, ScaTrace, linearized_objective, run_sca, solve_subproblem

__version__ = "0.1.0"
