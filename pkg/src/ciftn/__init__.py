"""Link-level simulator for coordinate-interleaved faster-than-Nyquist signaling."""

__version__ = "0.1.0"

from .pulse import IsiKernel, IsiMatrix, PulseSpec, build_isi_matrix, default_isi_len, rc_autocorr
from .txchain import (
    SymbolFrame,
    build_frame,
    compute_zeta,
    coordinate_deinterleave,
    coordinate_interleave,
    map_and_rotate,
    transmit_waveform,
)
from .channel import (
    RxFrame,
    apply_channel_matrix,
    apply_channel_waveform,
    frame_rng,
    sigma2_for_ebn0,
)
from .detect import (
    DetectorOutput,
    MlseProblem,
    detect_ci_pairwise,
    detect_mlse_bruteforce,
    detect_zf,
    soft_output,
)
from .isi_analysis import IsiBudget, isi_budget, isi_table, worst_case_isi
from .coding import LdpcCode
from .simharness import (
    BerPoint,
    SimConfig,
    ber_points_csv,
    ebn0_at_ber,
    run_ber,
    spectral_efficiency,
    trace_example,
)

__all__ = [
    "__version__",
    "PulseSpec", "IsiKernel", "IsiMatrix", "rc_autocorr", "build_isi_matrix", "default_isi_len",
    "SymbolFrame", "build_frame", "compute_zeta", "coordinate_interleave",
    "coordinate_deinterleave", "map_and_rotate", "transmit_waveform",
    "RxFrame", "apply_channel_matrix", "apply_channel_waveform", "frame_rng", "sigma2_for_ebn0",
    "DetectorOutput", "MlseProblem", "detect_ci_pairwise", "detect_mlse_bruteforce",
    "detect_zf", "soft_output",
    "IsiBudget", "isi_budget", "isi_table", "worst_case_isi",
    "LdpcCode",
    "SimConfig", "BerPoint", "run_ber", "ber_points_csv", "ebn0_at_ber",
    "spectral_efficiency", "trace_example",
]
