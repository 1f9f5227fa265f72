"""Exception hierarchy shared by all pipeline stages."""


class QCError(Exception):
    """Base class for every error raised by bottleqc."""


class UnsupportedFormat(QCError):
    pass


class CorruptData(QCError):
    pass


class RoiOutOfBounds(QCError):
    pass


class ImageTooSmall(QCError):
    pass


class DimensionMismatch(QCError):
    pass


class ZeroReference(QCError):
    pass


class EmptyDescriptorList(QCError):
    pass


class TooFewMatches(QCError):
    pass


class DegenerateConfiguration(QCError):
    pass


class SingularHomography(QCError):
    pass


class TooFewSamples(QCError):
    pass


class SingleClassTrainingSet(QCError):
    pass


class SingleClassDataset(QCError):
    pass


class VersionMismatch(QCError):
    pass


class CorruptModel(QCError):
    pass


class EmptyCounts(QCError):
    pass


class UndefinedRate(QCError):
    pass


class TooFewImages(QCError):
    pass


class DegenerateTimeSpan(QCError):
    pass


class MagnitudeOutOfRange(QCError):
    pass


class IoError(QCError, OSError):
    pass


class ImageNotFound(QCError, FileNotFoundError):
    pass
