"""Exception types shared across the package."""


class IbgsgError(Exception):
    """Base class for all package errors."""


class ScenarioValidationError(IbgsgError):
    """A scenario file or override violates the schema or an invariant.

    ``path`` points at the offending field, dotted (``pll.k_i``).
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ModelInapplicableError(IbgsgError):
    """The delta-power-frequency reduction does not exist (i_q = 0 fault-on)."""


class UnsupportedInjectionError(IbgsgError):
    """Sine-form coefficients requested for an injection with cos(phi_I) != 0."""


class NoPrefaultEquilibriumError(IbgsgError):
    """The pre-fault network and injection admit no q-axis voltage root."""


class BeyondUepError(IbgsgError):
    """The post-jump angle lands outside the potential well [delta_1, delta_2]."""

    def __init__(self, delta_post, side):
        self.delta_post = delta_post
        self.side = side  # "left" or "right"
        super().__init__(
            f"post-jump angle {delta_post:.6g} is beyond the {side} UEP; instant LOS"
        )


class EquilibriumVerificationError(IbgsgError):
    """Closed-form equilibrium disagrees with the bisection verifier."""


class IntegrationBlowUpError(IbgsgError):
    """The integrator produced a non-finite state.

    ``t_last`` is the last time with a finite state; ``result`` carries the
    truncated simulation output when available.
    """

    def __init__(self, t_last, result=None):
        self.t_last = t_last
        self.result = result
        super().__init__(f"integration blew up; last valid time t = {t_last:.6g} s")
