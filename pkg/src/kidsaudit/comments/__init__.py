"""Review-mining pipeline: preprocessing, TF-IDF vectors, cosine
k-means clustering with automatic model selection, and rule-based
complaint detection."""
from .cluster import (ClusterModel, cluster, cosine_silhouette,
                      representatives, select_k, summarization_metric)
from .preprocess import (Comment, PreprocessConfig, content_tokens,
                         load_comments, preprocess, tokenize)
from .rules import (SemanticRule, TopicCatalog, apply_rules,
                    categorize_corpus, default_rules, induce_rules,
                    load_keyword_sets, load_rules, save_rules,
                    validate_rules)
from .vectors import DocVector, load_dense_vectors, to_matrix, vectorize

__all__ = [
    "ClusterModel", "Comment", "DocVector", "PreprocessConfig",
    "SemanticRule", "TopicCatalog", "apply_rules", "categorize_corpus",
    "cluster", "content_tokens", "cosine_silhouette", "default_rules",
    "induce_rules", "load_comments", "load_dense_vectors",
    "load_keyword_sets", "load_rules", "preprocess", "representatives",
    "save_rules", "select_k", "summarization_metric", "to_matrix",
    "tokenize", "validate_rules", "vectorize",
]
