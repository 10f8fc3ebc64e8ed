"""Exception hierarchy.

Two broad failure classes map onto CLI exit codes: problems with user
input (configs, scan files, unknown names) and violations of numeric
contracts (grids, validity ranges, sampling rules).
"""


class CpiLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CpiLabError):
    """Invalid or inconsistent configuration input (CLI exit code 2)."""


class ScanFormatError(ConfigError):
    """Malformed or unsupported scan file."""


class ContractError(CpiLabError):
    """Numeric contract violated (CLI exit code 3)."""


class ValidityError(ContractError):
    """Wavelength outside a material model's validity range."""
