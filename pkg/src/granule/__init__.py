"""Ball clustering and granular verification toolkit.

Subpackages:

- :mod:`granule.metrics` - generalized distances, sample-based axiom checks,
  Hausdorff/infimal set distances.
- :mod:`granule.ball_kmeans` - exact accelerated clustering over ball-shaped
  clusters with a naive oracle and distance-count accounting.
- :mod:`granule.granular_ball` - purity-driven ball refinement and a nearest
  ball-surface classifier.
- :mod:`granule.ball_algebra` - partial linear-combination operations on
  ambient and cautious closed balls with exhaustive law verification.
- :mod:`granule.existential` - finite-model checking for granular operator
  space axioms, self-determining operator fixed points, powerset systems.
- :mod:`granule.rough_random` - approximation spaces, rough pairs, typed
  rough-random function wrappers, clustering-trace formalization.
- :mod:`granule.cli` - the ``granule`` command-line interface.
"""

__version__ = "0.1.0"

from .ball_kmeans import BkmConfig, Clustering, Dataset, Init, RunStats, lloyd_run, run
from .granular_ball import GbConfig, GranularBall, LabeledDataset, classify, generate
from .metrics import DistanceFn, Kind, classify_distance, euclidean

__all__ = [
    "__version__",
    "BkmConfig",
    "Clustering",
    "Dataset",
    "Init",
    "RunStats",
    "lloyd_run",
    "run",
    "GbConfig",
    "GranularBall",
    "LabeledDataset",
    "classify",
    "generate",
    "DistanceFn",
    "Kind",
    "classify_distance",
    "euclidean",
]
