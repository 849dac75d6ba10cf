"""Exception types shared across modules; the CLI maps each to an exit code."""


class TGroupsError(Exception):
    pass


class ConfigError(TGroupsError, ValueError):
    pass


class RangeExceeded(TGroupsError, ValueError):
    pass


class BudgetExceeded(TGroupsError, RuntimeError):
    pass


class VerificationFailed(TGroupsError, AssertionError):
    pass


class Unsupported(TGroupsError, ValueError):
    pass
