"""Package exception types."""


class ConfigurationError(ValueError):
    """Raised when a configuration object or file is inconsistent or unsupported."""
