"""Exception types shared across the toolkit."""


class PeerInfluenceError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(PeerInfluenceError):
    """A value, column, or file does not conform to the feature schema."""


class EncodingError(SchemaError):
    """A categorical label is not among the declared categories."""


class DataParseError(PeerInfluenceError):
    """A cell could not be parsed; carries row and column context."""


class TrainingError(PeerInfluenceError):
    """Model training cannot proceed or diverged."""


class CapacityError(PeerInfluenceError):
    """Requested computation exceeds a configured capacity guard."""


class ModelFormatError(PeerInfluenceError):
    """A model file is malformed or has an unsupported version."""


class ConsistencyError(PeerInfluenceError):
    """Two artifacts that must agree (e.g. on feature names) do not."""


class DegenerateColumnError(PeerInfluenceError):
    """A computation requires non-constant columns and one is constant."""
