"""Heart-rate estimation from wrist PPG under motion.

The pipeline band-limits and averages the two PPG channels, cancels motion
artifacts with a three-stage adaptive filter cascade referenced on the three
accelerometer axes, independently denoises via singular spectrum analysis with
accelerometer-guided component rejection, conditionally fuses the two branches,
and tracks the spectral heart-rate peak across windows.
"""

from .adaptive import (
    CascadeConfig,
    LmsState,
    RlsState,
    cascade_filter,
    filter_window,
    lms_init,
    lms_step,
    rls_init,
    rls_step,
)
from .dsp import (
    DEFAULT_BAND,
    Peak,
    Signal,
    Spectrum,
    average_channels,
    band_bins,
    bandpass,
    bin_to_bpm,
    bpm_to_bin,
    dominant_peaks,
    normalize_energy,
    periodogram,
)
from .errors import (
    CellError,
    ColumnError,
    DegenerateInputError,
    NumericError,
    ParameterError,
    RecordingLoadError,
    SampleRateError,
    TruthAlignmentError,
)
from .fusion import conditional_sum, spectrum_argmax_bpm
from .io import Recording, expected_window_count, load_recording, write_recording
from .metrics import BlandAltman, EvaluationReport, aae, bland_altman, evaluate_traces, pearson
from .pipeline import (
    MODES,
    EstimateTrace,
    PipelineConfig,
    TraceRow,
    run_recording,
    window_iter,
)
from .ssa import ComponentGroup, SsaDecomposition, decompose, group_components, reject_motion_components
from .synth import SynthSpec, ToneSpec, synth_recording
from .tracker import (
    TrackerParams,
    TrackerState,
    clamp,
    init_tracker,
    initial_estimate,
    select_peak,
    smooth,
    track_window,
)

__version__ = "0.1.0"
