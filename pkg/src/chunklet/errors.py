"""Exception types shared across the package."""


class ChunkletError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(ChunkletError):
    """Malformed input file: bad bracketing, bad columns, bad checksum."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = path
            if line is not None:
                prefix += f":{line}"
            prefix += ": "
        super().__init__(prefix + message)


class VocabularyError(ChunkletError):
    """Symbol outside the declared tagset/labelset, or a reserved symbol."""


class DepthBoundError(ChunkletError):
    """Tree too deep for the structural-tag encoding."""

    def __init__(self, leaf_index: int, depth: int, bound: int):
        self.leaf_index = leaf_index
        self.depth = depth
        self.bound = bound
        super().__init__(
            f"leaf {leaf_index} sits at depth {depth}, encoding supports at most {bound}"
        )


class UnknownFutureError(ChunkletError):
    """Conditional probability requested for a tag outside the trained inventory."""


class NotTrainedError(ChunkletError):
    """Operation needs a trained model."""
