"""Exception types shared across the package."""


class VisemeDecodeError(Exception):
    """Base class for all errors raised by this package."""


class DictionaryParseError(VisemeDecodeError):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class RankFileError(VisemeDecodeError):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class UnknownPhonemeError(VisemeDecodeError):
    def __init__(self, phoneme):
        super().__init__(f"unknown phoneme symbol: {phoneme!r}")
        self.phoneme = phoneme


class UnknownVisemeError(VisemeDecodeError):
    def __init__(self, symbol):
        super().__init__(f"unknown viseme class: {symbol!r}")
        self.symbol = symbol


class OutOfVocabularyError(VisemeDecodeError):
    def __init__(self, token):
        super().__init__(f"word not in lexicon: {token!r}")
        self.token = token


class EmptyInputError(VisemeDecodeError):
    pass


class EmptyClusterError(VisemeDecodeError):
    """A viseme cluster matched no dictionary word."""

    def __init__(self, cluster):
        super().__init__(f"no word matches viseme cluster {' '.join(cluster)!r}")
        self.cluster = tuple(cluster)


class NoSegmentationError(VisemeDecodeError):
    """A viseme stream admits no lexicon-consistent segmentation."""


class CapExceededError(VisemeDecodeError):
    """A segmentation or sequence-length cap was exceeded (not silently truncated)."""

    def __init__(self, message, limit=None, actual=None):
        super().__init__(message)
        self.limit = limit
        self.actual = actual


class UndefinedRateError(VisemeDecodeError):
    """Error rate requested against an empty reference (N = 0)."""


class ScorerError(VisemeDecodeError):
    pass


class ScorerTransportError(ScorerError):
    """The external scorer process is unreachable, dead, or timed out."""


class ScorerProtocolError(ScorerError):
    """The external scorer replied with something malformed; payload kept for logs."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload
