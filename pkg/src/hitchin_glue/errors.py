"""Exception hierarchy shared by all modules."""


class HitchinGlueError(Exception):
    """Base class for every error raised by the package."""


class InvalidConfig(HitchinGlueError, ValueError):
    pass


class NonConvergence(HitchinGlueError, RuntimeError):
    pass


class WrongRank(HitchinGlueError, ValueError):
    pass


class DomainError(HitchinGlueError, ValueError):
    pass


class NotDecayed(HitchinGlueError, ValueError):
    pass


class BelowGrid(HitchinGlueError, ValueError):
    pass


class IndexOutOfRange(HitchinGlueError, IndexError):
    pass


class PartitionError(HitchinGlueError, ValueError):
    """A cluster partition violates one of its invariants."""


class ZeroRadius(HitchinGlueError, ValueError):
    pass


class MissingTodaSolution(HitchinGlueError, KeyError):
    pass


class OriginSingularity(HitchinGlueError, ValueError):
    pass


class StencilOutOfDomain(HitchinGlueError, ValueError):
    pass


class AmbiguousClustering(HitchinGlueError, ValueError):
    pass


class QuadratureTooCoarse(HitchinGlueError, ValueError):
    pass


class DegenerateFit(HitchinGlueError, ValueError):
    pass


class GridTooCoarse(HitchinGlueError, ValueError):
    pass


class BoundarySupport(HitchinGlueError, ValueError):
    pass


class CacheCorrupt(HitchinGlueError, ValueError):
    pass
