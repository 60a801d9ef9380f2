"""Eye-tracking measure prediction with histogram gradient boosting.

Subpackages and modules:

- :mod:`gazeboost.corpus` -- task data, annotations and lexical resources
- :mod:`gazeboost.association` -- bigram association measures
- :mod:`gazeboost.features` -- feature matrix construction and ablation groups
- :mod:`gazeboost.gbdt` -- the boosted-tree regressor
- :mod:`gazeboost.harness` -- cross-validation, search, ablation, baselines
- :mod:`gazeboost.synthetic` -- generated corpora and input fixtures
- :mod:`gazeboost.cli` -- the ``gazeboost`` command
"""

from .corpus import DVS

__version__ = "0.1.0"
__all__ = ["DVS", "__version__"]
