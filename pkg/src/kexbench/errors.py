"""Exception hierarchy shared across the package."""


class KexbenchError(Exception):
    """Base class for all package-specific errors."""


class PathNotFound(KexbenchError):
    pass


class DuplicateId(KexbenchError):
    def __init__(self, code, first, second):
        super().__init__(
            f"duplicate record code {code!r} (first seen at {first}, again at {second})"
        )
        self.code = code
        self.first = first
        self.second = second


class EmptyCorpus(KexbenchError):
    pass


class InvalidParameter(KexbenchError):
    pass


class CorruptTable(KexbenchError):
    pass


class EmptyDocument(KexbenchError):
    """Document yields no candidates at all; folded into a result status."""


class MissingModel(KexbenchError):
    """An extractor needs a fitted corpus artifact that was not supplied."""


class UnknownDoc(KexbenchError):
    def __init__(self, doc_id):
        super().__init__(f"result references unknown doc_id {doc_id!r}")
        self.doc_id = doc_id


class NoConvergenceWarning(UserWarning):
    """PageRank hit max_iter before reaching the residual bound."""
