"""Exception hierarchy.

Every error raised by the library derives from :class:`IonMirrorError`, and
most also derive from the builtin they most resemble so that callers using
``except ValueError`` keep working.
"""


class IonMirrorError(Exception):
    pass


class InvalidDimension(IonMirrorError, ValueError):
    pass


class UnknownAxis(IonMirrorError, KeyError):
    def __str__(self):  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class MissingAxis(IonMirrorError, ValueError):
    pass


class UnknownLevel(IonMirrorError, ValueError):
    pass


class CutoffExceeded(IonMirrorError, ValueError):
    pass


class NormZero(IonMirrorError, ValueError):
    pass


class NormDrift(IonMirrorError, ArithmeticError):
    pass


class NotHermitian(IonMirrorError, ValueError):
    pass


class SpaceMismatch(IonMirrorError, ValueError):
    pass


class WrongElectronicDim(IonMirrorError, ValueError):
    pass


class ZeroDetuning(IonMirrorError, ZeroDivisionError):
    pass


class DegenerateEtas(IonMirrorError, ValueError):
    pass


class AxisMismatch(IonMirrorError, ValueError):
    pass


class EigFailure(IonMirrorError, ArithmeticError):
    pass


class StepTooLarge(IonMirrorError, ValueError):
    pass


class ProbeNotGround(IonMirrorError, ValueError):
    pass


class NotParityEigenstate(IonMirrorError, ValueError):
    pass


class AnticommutationFailure(IonMirrorError, ValueError):
    pass


class RatioTooSmall(IonMirrorError, ValueError):
    pass


class ConfigInvalid(IonMirrorError, ValueError):
    pass


class ThresholdFailed(IonMirrorError):
    pass
