class GroupTestingError(Exception):
    pass


class ContractViolation(GroupTestingError, ValueError):
    """A caller broke an operation's precondition."""


class InfeasibleEnumeration(GroupTestingError, RuntimeError):
    """A brute-force enumeration would exceed its configured cap."""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} evaluations exceeds cap {cap}")
        self.what = what
        self.count = count
        self.cap = cap


class DecodeFailure(GroupTestingError):
    pass


class AmbiguousDecode(DecodeFailure):
    pass


class ConfigError(GroupTestingError, ValueError):
    pass
