"""Exception hierarchy for the codec, metrics and optimizer."""


class GifError(Exception):
    """Base class for every error raised by gifdec."""


# --- decoding ---------------------------------------------------------------

class BadMagic(GifError):
    pass


class TruncatedFile(GifError):
    pass


class CorruptLzwStream(GifError):
    pass


class OversizedIndex(GifError):
    """A decoded index (or transparent index) does not fit the active color table."""


class MalformedBlock(GifError):
    """Unknown block introducer or otherwise unparseable container structure."""


# --- encoding / construction ------------------------------------------------

class InvariantViolation(GifError, ValueError):
    pass


class IndexOutOfRange(GifError, ValueError):
    pass


# --- color metric -----------------------------------------------------------

class EmptyTable(GifError, ValueError):
    pass


class AllEntriesExcluded(GifError, ValueError):
    pass


# --- decimation -------------------------------------------------------------

class NoFreeTransparentSlot(GifError):
    pass


# --- quality ----------------------------------------------------------------

class GeometryMismatch(GifError, ValueError):
    pass


class FrameCountMismatch(GifError, ValueError):
    pass
