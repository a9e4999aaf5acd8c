"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class PoleProximityError(ValueError):
    """Inclination too close to a pole for the cot(theta)-based derivative formulas."""


class FieldOfViewError(ValueError):
    """A direction falls outside the field of view covered by a sector model."""


class CalibrationFormatError(ValueError):
    """A calibration or model file failed to parse or validate."""


class RankDeficiencyError(ValueError):
    """A least-squares system is numerically rank deficient."""


class UnderdeterminedSectorError(ValueError):
    """A sector holds fewer calibration samples than virtual array elements."""


class ConfigError(ValueError):
    """A simulation configuration failed validation."""
