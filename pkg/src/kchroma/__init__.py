"""Randomized list coloring of k-partite k-uniform hypergraphs."""

from .hypergraph import InvalidHypergraphError, KPartiteHypergraph, VertexId, max_degree, regular_embedding, validate
from .lists import InsufficientListError, ListAssignment, index_of, normalize_lists
from .sampler import Distribution, make_rng, problematic_prob, sample_partial, tilted_prob
from .solver import SolveOutcome, Status, solve, verify

__version__ = "0.1.0"
