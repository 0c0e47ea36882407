"""Sublinear-time matching and vertex-cover size estimation via local RGMM simulation."""

from .graph import (AccessCounter, Graph, GraphStats, ListAccess, degree_query, gen_complete_bipartite,
                    gen_gnp, gen_structured, load_edge_list, neighbor_query, pair_query, stats)
from .oracle import OracleSession
from .ranks import ExplicitRanks, LazyRanks, RankValue, binomial_sample, new_explicit, new_lazy

__version__ = "0.1.0"
