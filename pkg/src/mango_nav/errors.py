"""Exception hierarchy shared across the package."""


class MangoNavError(Exception):
    """Base class for all package errors."""


class InvalidUrl(MangoNavError):
    pass


class FetchError(MangoNavError):
    """A single page fetch failed; non-fatal during a crawl."""


class RootUnreachable(MangoNavError):
    """The root URL could not be fetched; the only fatal crawl error."""


class EmptyCorpus(MangoNavError):
    pass


class EmptyCandidates(MangoNavError):
    pass


class SearchUnavailable(MangoNavError):
    """Search backend failed; callers degrade to crawl-only candidates."""


class AdapterFailure(MangoNavError):
    pass


class UnknownArm(MangoNavError):
    pass


class ArmAlreadyExhausted(MangoNavError):
    pass


class AllArmsExhausted(MangoNavError):
    pass


class PersistenceFailure(MangoNavError):
    """Episodic memory could not be written; fatal for the run."""


class EnvironmentFailure(MangoNavError):
    """Browser environment failed to reset on the start URL."""


class AgentFailure(MangoNavError):
    pass


class ReflectorFailure(MangoNavError):
    """Reflector returned malformed output twice in a row."""


class ConfigError(MangoNavError):
    def __init__(self, message: str, key: str | None = None, layer: str | None = None):
        super().__init__(message)
        self.key = key
        self.layer = layer
