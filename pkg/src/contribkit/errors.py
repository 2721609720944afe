"""Exception hierarchy.

Everything derives from :class:`ContribError`. :class:`InputError` covers bad
documents, bad data and bad configuration; :class:`BackendError` covers the
remote model services. The CLI maps the two families to exit codes 1 and 2.
"""


class ContribError(Exception):
    pass


class InputError(ContribError):
    pass


class BackendError(ContribError):
    pass


# ingest
class NotAZipError(InputError):
    pass


class MissingDocumentPartError(InputError):
    pass


class MalformedXmlError(InputError):
    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class DuplicateDocumentIdError(InputError):
    pass


class NoDocumentsError(InputError):
    pass


# embedding
class EmptyCorpusError(InputError):
    pass


class EmptyTextError(InputError):
    pass


class EmptySectionError(InputError):
    pass


class EmptyDocumentError(InputError):
    pass


class TransportError(BackendError):
    pass


class ProtocolError(BackendError):
    pass


# summarize
class NoSentencesError(InputError):
    pass


# similarity
class ZeroVectorError(InputError):
    def __init__(self, message: str = "zero vector", ref: str | None = None):
        super().__init__(message if ref is None else f"{message}: {ref}")
        self.ref = ref


class DimMismatchError(InputError):
    pass


class NoPairsError(InputError):
    pass


class InsufficientDataError(InputError):
    pass


class ZeroVarianceError(InputError):
    pass


# analytics
class TooFewPointsError(InputError):
    pass


class PerplexityTooLargeError(InputError):
    pass


class NoValuesError(InputError):
    pass


# report
class BadThresholdsError(InputError):
    pass


class UnknownPairIdError(InputError):
    def __init__(self, pair_id: str):
        super().__init__(f"unknown pair id {pair_id!r}")
        self.pair_id = pair_id


class ReportIoError(InputError):
    def __init__(self, path, cause: Exception):
        super().__init__(f"cannot write {path}: {cause}")
        self.path = path
