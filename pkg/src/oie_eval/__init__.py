"""Evaluation toolkit for Open Information Extraction benchmarks built on fact synsets."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    AnnotationError,
    Cluster,
    ConcreteTriple,
    Extraction,
    Formulation,
    Group,
    SentenceGold,
    SlotPattern,
    expand_formulation,
    expand_slot,
    linearize,
    normalize_punc,
)
from .annotation_io import (  # noqa: E402
    ExtractionSet,
    FormatError,
    GoldCorpus,
    MatchAnnotation,
    ScoreTable,
    parse_extractions,
    parse_gold,
    parse_match_annotations,
    parse_score_table,
    serialize_extractions,
    serialize_gold,
    serialize_match_annotations,
    serialize_score_table,
)
from .matcher import (  # noqa: E402
    EM_ONLY,
    FULL,
    MatchDecision,
    MatcherConfig,
    Method,
    RewritingPair,
    SentenceIndex,
    af_match,
    collect_rewriting_pairs,
    exact_match,
    generate_alternatives,
    lod_match,
    match_corpus,
    match_extraction,
)
from .scorer import (  # noqa: E402
    MatchEvalReport,
    ScoreReport,
    abqa_score,
    evaluate_matcher,
    extraction_length_stats,
    flatten_gold,
    pearson,
    score_corpus,
    token_level_score,
)
from .lint import (  # noqa: E402
    Finding,
    Kind,
    diff_annotation_sets,
    find_double_annotations,
    find_double_meanings,
    lint_corpus,
)
