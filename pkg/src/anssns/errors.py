"""Package-level exception types, mapped to CLI exit codes."""


class ConfigurationError(Exception):
    """Invalid configuration, file format, or model setup (CLI exit code 2)."""


class NumericalError(Exception):
    """Numerical failure during likelihood or quadrature evaluation (CLI exit code 3)."""
