"""Format-preserving encryption for geographic coordinates.

Encrypts longitude/latitude text while keeping ciphertexts inside valid
geographic ranges and preserving the decimal format; a composite-key mapping
store makes the lossy range constraints exactly reversible.  The metrics
subpackage reproduces the privacy evaluation protocols (RDR, DBSCAN hotspot
disruption, decryption accuracy).
"""

from .cipher import (
    BACKEND,
    DEFAULT_ROUNDS,
    KINDS,
    CoordinateCipher,
    DomainError,
    compute_tweak,
    decrypt_rounds,
    encrypt_component,
    encrypt_rounds,
    key_index,
    shift_amount,
)
from .coords import (
    DecimalNumber,
    GeoPoint,
    ParseError,
    decompose,
    recombine,
    validate_point,
)
from .mapstore import Ambiguous, IntegrityError, MapFormatError, MappingStore
from .ranges import fraction_constrain, mask_width, range_constrain, range_type
from .sm4 import derive_round_keys

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_ROUNDS",
    "KINDS",
    "Ambiguous",
    "CoordinateCipher",
    "DecimalNumber",
    "DomainError",
    "GeoPoint",
    "IntegrityError",
    "MapFormatError",
    "MappingStore",
    "ParseError",
    "compute_tweak",
    "decompose",
    "decrypt_rounds",
    "derive_round_keys",
    "encrypt_component",
    "encrypt_rounds",
    "fraction_constrain",
    "key_index",
    "mask_width",
    "range_constrain",
    "range_type",
    "recombine",
    "shift_amount",
    "validate_point",
    "__version__",
]
