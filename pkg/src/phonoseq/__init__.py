"""Native-language identification from discriminative phone sequences."""

from .classifier import (
    ClassificationResult,
    ObservationList,
    classify,
    classify_global,
    classify_local,
    collect_observations,
)
from .corpus import (
    LabeledCorpus,
    Speaker,
    Utterance,
    format_corpus,
    leave_one_out_split,
    parse_corpus,
    partition_by_language,
    read_corpus,
)
from .counting import CountTable, build_count_table, count_sequences
from .evaluation import ConfusionMatrix, evaluate_loo, evaluate_modes, render_confusion
from .extraction import DiscriminativeSet, ExtractionConfig, extract_sets, is_discriminative
from .model import SequenceModel, format_model, parse_model, read_model, write_model
from .syngen import SynthSpec, generate, paper_shaped_spec

__version__ = "0.1.0"
