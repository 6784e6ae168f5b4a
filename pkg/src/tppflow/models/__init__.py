"""Neural MTPP, its missing-event extension, transfer and the Hawkes surrogate."""

from .encoder import Encoder, EncoderConfig
from .heads import (
    LogNormalHead,
    LogNormalParams,
    MarkHead,
    kl_categorical,
    kl_lognormal,
    lognormal_logpdf,
    lognormal_point,
    lognormal_sample,
    mark_nll,
    mark_probs,
)
from .training import LossTrace, LossWeights, TrainConfig, fit_store
from .mtpp import (
    COMPONENTS,
    ModelConfig,
    MtppModel,
    NextEventPrediction,
    event_nll,
    forecast,
    global_mean_gap,
    mean_nll_components,
    mean_sequence_loss,
    nll_components,
    predict_next,
    prefix_predictions,
    sequence_nll,
    sequence_nll_graph,
    train,
)
from .imtpp import (
    ImtppConfig,
    ImtppModel,
    MissingEvent,
    elbo,
    elbo_curve,
    elbo_graph,
    forecast_with_missing,
    impute,
    impute_dataset,
    observed_nll_bound,
    prior_from_dataset,
    sample_missing_between,
    train_imtpp,
    uniform_imputation,
)
from .transfer import TransferConfig, epochs_to_threshold, fine_tune, temporal_only_mode, train_source
from .hawkes import (
    CommunityAssignment,
    HawkesFitConfig,
    HawkesParams,
    HawkesStatistics,
    assign_communities,
    block_excitation,
    fit_mle,
    intensity,
    label_agreement,
    nll as hawkes_nll,
    simulate as simulate_hawkes,
    simulate_dataset as simulate_hawkes_dataset,
)

__all__ = [
    'Encoder', 'EncoderConfig',
    'LogNormalHead', 'LogNormalParams', 'MarkHead', 'kl_categorical', 'kl_lognormal',
    'lognormal_logpdf', 'lognormal_point', 'lognormal_sample', 'mark_nll', 'mark_probs',
    'LossTrace', 'LossWeights', 'TrainConfig', 'fit_store',
    'COMPONENTS', 'ModelConfig', 'MtppModel', 'NextEventPrediction', 'event_nll', 'forecast',
    'global_mean_gap', 'mean_nll_components', 'mean_sequence_loss', 'nll_components', 'predict_next',
    'prefix_predictions', 'sequence_nll', 'sequence_nll_graph', 'train',
    'ImtppConfig', 'ImtppModel', 'MissingEvent', 'elbo', 'elbo_curve', 'elbo_graph',
    'forecast_with_missing', 'impute', 'impute_dataset', 'observed_nll_bound', 'prior_from_dataset',
    'sample_missing_between', 'train_imtpp', 'uniform_imputation',
    'TransferConfig', 'epochs_to_threshold', 'fine_tune', 'temporal_only_mode', 'train_source',
    'CommunityAssignment', 'HawkesFitConfig', 'HawkesParams', 'HawkesStatistics',
    'assign_communities', 'block_excitation', 'fit_mle', 'intensity', 'label_agreement',
    'hawkes_nll', 'simulate_hawkes', 'simulate_hawkes_dataset',
]
