"""Learn salient ADS-B flight features with a small autoencoder.

Pipeline: snapshot files -> filtered per-aircraft tracks -> hourly
sequences of 12 sampled events x 17 features -> scaled [0, 1] vectors ->
dense or LSTM autoencoder -> per-feature salience scores.
"""

from .core import FEATURES, N_FEATURES, AircraftEvent, event_to_vector, normalize_angles, parse_event
from .errors import (AdsbError, BadK, DegenerateRange, EmptyDataset, EmptyInput, FormatError,
                     ParseError, RangeError, VariantMismatch)

__version__ = "0.1.0"

__all__ = [
    "FEATURES", "N_FEATURES", "AircraftEvent", "event_to_vector", "normalize_angles",
    "parse_event", "AdsbError", "BadK", "DegenerateRange", "EmptyDataset", "EmptyInput",
    "FormatError", "ParseError", "RangeError", "VariantMismatch",
]
