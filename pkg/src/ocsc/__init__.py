"""Convolutional sparse coding with an online frequency-domain dictionary learner.

The package learns a bank of small convolutional filters from streamed
signals or images. Per sample it sparse-codes against the current filters
(ADMM, one closed-form rank-one solve per frequency), folds the sample into
a constant-size frequency-domain history, and refreshes the filters with a
few inner ADMM rounds. Batch and accelerated-gradient baselines, evaluation
utilities, binary file formats, and a CLI round out the toolkit.
"""

__version__ = "0.1.0"

from .baselines import DenseHistory, dense_history, fista_dict_update, update_dense_history
from .coding import (
    CodeState,
    CodingConfig,
    coding_objective,
    infer_code,
    reconstruct,
    soft_threshold,
    solve_code_rows,
)
from .dictionary import (
    DictState,
    HistoryState,
    batch_history,
    dict_objective,
    dict_state_from_filters,
    empty_history,
    project_filter_cols,
    quadratic_objective,
    reconstruct_gram,
    solve_dict_rows,
    update_dictionary,
    update_history,
)
from .errors import (
    BadMagicError,
    ChecksumError,
    DataFileError,
    DivergenceError,
    NumericalConsistencyError,
    ShapeMismatchError,
    TruncatedFileError,
    UndefinedVarianceError,
    UninitializedHistoryError,
)
from .evaluate import (
    EvalResult,
    evaluate_dictionary,
    export_mosaic,
    filter_variances,
    mosaic_array,
    sort_filters_by_variance,
)
from .persistence import (
    load_dictionary,
    load_sample,
    save_dictionary,
    save_sample,
)
from .preprocessing import (
    PreprocessSpec,
    edge_taper,
    grayscale,
    load_image,
    local_contrast_normalize,
    preprocess,
)
from .synthetic import SynthData, synth_generate
from .training import (
    OnlineTrainer,
    PassRecord,
    TrainConfig,
    TrainReport,
    init_dictionary,
    train,
    train_batch,
    train_fista_dict,
    train_online,
)
from .transforms import (
    SignalShape,
    circular_convolve,
    crop_filter,
    crop_filter_cols,
    forward_dft,
    forward_dft_cols,
    inverse_dft,
    inverse_dft_cols,
    pad_filter,
    pad_filter_cols,
)
