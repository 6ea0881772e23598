"""Exception hierarchy shared by every g2pstack module."""


class G2PStackError(Exception):
    """Base class for all toolkit errors."""


class UsageError(G2PStackError):
    """Bad flags, unknown config keys or an unknown subcommand."""


class ArgumentError(G2PStackError, ValueError):
    """An operation was called with arguments outside its contract."""


class InventoryError(G2PStackError):
    """A phoneme inventory violates its invariants."""


class LexiconParseError(G2PStackError):
    def __init__(self, path, line_no, message, symbol=None):
        self.path = str(path)
        self.line_no = line_no
        self.symbol = symbol
        super().__init__(f"{self.path}:{line_no}: {message}")


class AlignmentError(G2PStackError):
    def __init__(self, word, message):
        self.word = word
        super().__init__(f"cannot align '{word}': {message}")


class PairingError(G2PStackError):
    """Two variants' entries cannot be paired position by position."""


class TrainingError(G2PStackError):
    def __init__(self, message, fold=None):
        self.fold = fold
        if fold is not None:
            message = f"fold {fold}: {message}"
        super().__init__(message)


class ScoringError(G2PStackError):
    def __init__(self, word, message):
        self.word = word
        super().__init__(f"'{word}': {message}")


class ModelFormatError(G2PStackError):
    """A serialized model or rule file cannot be read back."""


class LeakageError(G2PStackError):
    """A combiner was trained on a prediction made by a model that saw the word."""
