"""Exception hierarchy. The CLI prints ``<ClassName>: <message>`` for these."""


class SencError(Exception):
    """Base class for pipeline errors (CLI exit code 1)."""


class MissingChannel(SencError):
    pass


class MalformedCsv(SencError):
    pass


class EmptyChannel(SencError):
    pass


class NoOverlap(SencError):
    pass


class SeriesTooShort(SencError):
    pass


class ZeroVariance(SencError):
    pass


class FamilyMismatch(SencError):
    pass


class TooFewPoints(SencError):
    pass


class LengthMismatch(SencError):
    pass


class NonFiniteObjective(SencError):
    pass


class EmptyModelSet(SencError):
    pass


class RaggedReport(SencError):
    pass
