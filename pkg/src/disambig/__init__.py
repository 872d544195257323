"""Inventor name disambiguation with a random-forest linkage model and DBSCAN."""

from .blocking import Block, BlockingKeySpec, block_key, group_by_size, partition
from .cluster import DbscanParams, VoteDBSCAN, brute_force_reference, cluster_block
from .evaluation import PairwiseMetrics, cluster_size_histogram, pairwise_metrics
from .exceptions import DataError, DisambigError, ModelError
from .features import (FEATURE_NAMES, FEATURE_ORDER_ID, FeatureContext, PairFeaturizer,
                       extract, order_feature)
from .forest import RandomForestLinker
from .pipeline import BlockScheduler, Disambiguator, disambiguate
from .records import LabeledCluster, Mention, load_labels, load_mentions
from .sampler import PairSample, build_pairs
from .textmetrics import NameIdfTable, idf, jaccard, jaro, jaro_winkler, soundex, tiered_exact

__version__ = "0.1.0"
