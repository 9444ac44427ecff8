"""Recommend microservice decompositions of a monolith from class call data
and source-token semantics, and score decompositions with SM, ICP, IFN, NED
and DUP."""

from .model import (NOISE, CallMatrix, ClassId, Decomposition, Encoding, HyperParams,
                    InputError, MetricsReport, SimilarityMatrix, TokenCorpus,
                    validate_project)

__all__ = ["NOISE", "CallMatrix", "ClassId", "Decomposition", "Encoding", "HyperParams",
           "InputError", "MetricsReport", "SimilarityMatrix", "TokenCorpus",
           "validate_project"]
