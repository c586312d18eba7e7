"""Exception hierarchy for posmap"""


class PosmapError(Exception):
    """Base exception for every posmap failure"""
    pass


class LinalgError(PosmapError):
    """Shape, finiteness or Hermiticity violation in matrix algebra"""
    pass


class MapError(PosmapError):
    """Invalid elementary operator or catalog parameters"""
    pass


class StateError(PosmapError):
    """Bipartite state invariant violation (shape, hermitian, trace, PSD)"""
    pass


class ChannelError(PosmapError):
    """Kraus family that is not a (trace-nonincreasing) channel"""
    pass


class DocumentError(PosmapError):
    """Malformed or inconsistent matrix document"""
    pass
