"""Exception hierarchy.

Every error carries the process exit code the command-line front end
reports for it: 2 for bad input or configuration, 3 for schema or
contract violations between artifacts.
"""


class GazeboostError(Exception):
    exit_code = 1


class InputError(GazeboostError):
    """Malformed or invalid input file or configuration."""

    exit_code = 2


class ParseError(InputError):
    pass


class ValidationError(InputError):
    pass


class StructureError(InputError):
    pass


class AlignmentError(InputError):
    pass


class SchemaError(InputError):
    pass


class ConsistencyError(InputError):
    pass


class ConfigurationError(InputError):
    pass


class PolicyError(InputError):
    pass


class ContractError(GazeboostError):
    """Artifacts that do not fit together (shape, columns, manifests)."""

    exit_code = 3


class UndefinedStatisticError(GazeboostError, ValueError):
    pass
