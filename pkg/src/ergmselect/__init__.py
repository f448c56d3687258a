"""Bayesian model selection for exponential random graph models."""

__version__ = "0.1.0"

from .graph import Graph, GraphError, NodeCovariate, enumerate_graphs, from_edge_list, read_covariates, read_edge_list
from .stats import (ModelError, ModelSpec, StatKind, Statistic, compute_statistics, change_statistics,
                    load_models, cov_homophily, cov_main, edges, fourcycle, gwd, gwesp, threestar, triangle,
                    twostar)
from .sampler import NetworkSimulator, SimConfig, expected_stats, sample_statistics, simulate_network
from .exchange import ExchangeConfig, GaussianSummary, PosteriorSample, run_exchange, summarize
from .modelselect import (ModelSelectionResult, ModelSpace, PilotTuning, bayes_factors, bma_predictive,
                          kass_raftery, load_space, run_selection)
from .evidence import EvidenceEstimate, PathSchedule, kde_log_density, log_evidence, log_z_path, path_sampling
