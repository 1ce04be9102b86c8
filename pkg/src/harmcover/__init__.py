"""harmcover: frequency-plane coverings, decomposition norms, and embedding decisions.

The package builds coverings of the frequency plane (uniform, dyadic,
alpha-scale, shear-induced), measures their geometric invariants, decides
embeddings between the smoothness spaces they generate, and verifies those
decisions numerically on sampled signals: partitions of unity, decomposition
norms, dyadic-cube analysis/synthesis, tight frames over structured
coverings, and the generalized wavelet transform for shear-dilation groups.
"""

from .covering import (AffineMap, Covering, CoveringReport, CoveringSet, Region,
                       covering_constants, covering_constants_stable,
                       covering_from_json, covering_to_json, neighbor_sets_of,
                       verify_covering)
from .embedding import (EmbeddingQuery, EmbeddingVerdict, RelationBundle,
                        decide_alpha_modulation, decide_general,
                        decide_shearlet_besov, embedding_constants)
from .exponents import conjugate, holder_exponent, triangle_down, triangle_up
from .grid import GridFunction, GridSpec
from .relations import RelationReport, almost_subordinate, intersection_sets, \
    moderate_constants
from .zoo import (AlphaCoveringParams, WeightFamily, make_alpha, make_dyadic,
                  make_shearlet_induced, make_uniform, make_weight)

__version__ = "0.1.0"
