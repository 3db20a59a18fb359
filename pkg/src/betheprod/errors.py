"""Exception hierarchy shared by all evaluators.

Every error carries a short ``code`` string; the CLI serializes it into
reports so that batch runs can be filtered without parsing messages.
"""


class BetheError(Exception):
    code = "error"
    exit_status = 3


class ZeroDenominator(BetheError):
    code = "zero_denominator"


class PoleHit(BetheError):
    code = "pole_hit"


class DegenerateRoots(BetheError):
    code = "degenerate_roots"


class IllConditioned(BetheError):
    code = "ill_conditioned"


class TooLarge(BetheError):
    code = "too_large"


class SeriesDiverges(BetheError):
    code = "series_diverges"


class OffShell(BetheError):
    code = "off_shell"


class NoConvergence(BetheError):
    """Newton iteration ran out of budget.

    The best iterate is attached as ``state`` so callers can inspect it.
    """

    code = "no_convergence"

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class JacobianSingular(BetheError):
    code = "jacobian_singular"


class ContourInvalid(BetheError):
    code = "contour_invalid"


class BranchCutCrossing(BetheError):
    code = "branch_cut_crossing"

    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class LogSingularity(BetheError):
    code = "log_singularity"


class ConfigInvalid(BetheError):
    code = "config_invalid"
    exit_status = 2


class OffShellWarning(UserWarning):
    """Scalar product requested for rapidities that do not solve the Bethe equations."""
