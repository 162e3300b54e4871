"""Companion-model graph signal processing.

Shift graphs, their graph Fourier transform, the companion (canonical)
model, four signal representations, barycentric coefficient recovery,
convolution modulo the characteristic polynomial, q-domain multiplexing
and companion-model decimation.
"""

from .companion import (
    CompanionModel,
    build_companion,
    companion_delta,
    companion_graph_dot,
    companion_matrix,
    shift_in_rep,
    to_representation,
)
from .errors import AssumptionError, GSPError, InputError, InvariantError
from .fftpoly import Poly, convolve, fft, filter_from_signal, poly_mod, poly_mul
from .generators import cycle_graph, ladder_graph, random_corpus, random_digraph
from .graph_model import (
    CharPoly,
    GraphSignal,
    Rep,
    ShiftGraph,
    SpectralDecomposition,
    char_poly,
    decompose,
    delayed_impulses,
    delayed_spectral_impulses,
    gft,
    igft,
    load_graph,
    lsi_filter_apply,
    spectral_impulse,
    vertex_impulse,
)
from .interp import BarycentricTable, build_table, evaluate, recover_coeffs, recover_q
from .modulation import (
    MultiplexPlan,
    bandlimit_project,
    demultiplex,
    is_q_bandlimited,
    modulate,
    multiplex,
    spectral_view,
)
from .sampling import Decimation, DecimationPlan, decimate, reconstruct

__version__ = "0.1.0"
