"""Community- and gender-aware seed refinement for targeted influence maximization."""
from .community import (CommunityAssignment, CommunityGraph, CommunityType, build_community_graph,
                        classify_community, detect_communities, is_boundary_user, pagerank)
from .diffusion import DiffusionEstimate, WorldSet, estimate_spread, exact_spread, sample_worlds
from .graph import Gender, SocialGraph, interaction_degree, load_graph, normalize_weights
from .potential import gci, gpi
from .seeding import SwapConfig, SwapResult, seed_agnostic, seed_celf, seed_diversity, swap_refine
from .synthgen import SbmSpec, generate_sbm

__version__ = "0.1.0"
