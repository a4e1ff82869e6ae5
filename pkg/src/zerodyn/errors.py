"""Exception types raised across the package."""


class ZerodynError(Exception):
    """Base class for all errors raised by zerodyn."""


# --- phase space -----------------------------------------------------------

class BrokenPairing(ZerodynError):
    """The conjugation pairing is not an involution or q/p/sign data violate it."""


class NonRealFixedPoint(ZerodynError):
    """An index fixed by the pairing carries a non-real coordinate or momentum."""


class NonPositiveMomentum(ZerodynError):
    """A determinant model requires Re p > 0 for every momentum."""


class DegenerateMomenta(ZerodynError):
    """Two momenta coincide, so the characteristic-model coupling matrix blows up."""


class ZeroMomentum(ZerodynError):
    """Inverse dispersion is undefined at p = 0."""


class NonPositiveLambda(ZerodynError):
    """Boost factors must be positive."""


# --- models ----------------------------------------------------------------

class InvalidPoint(ZerodynError):
    """The phase point fails validation for the given model."""


class NotFactorizable(ZerodynError):
    """Per-factor evaluation requested for a model that does not factorize."""


class NumericalOverflow(ZerodynError):
    """Evaluation overflowed even after row rescaling."""


# --- root finding ----------------------------------------------------------

class NonFiniteValue(ZerodynError):
    """The scanned function returned NaN or infinity."""


class NoConvergence(ZerodynError):
    """An iterative solve failed to converge within its iteration budget."""


class WindowTooSmall(ZerodynError):
    """A root sits within one scan cell of the window edge; widen the window."""


# --- tracker ---------------------------------------------------------------

class CountChangeNot2(ZerodynError):
    """Root count changed by something other than 2 across one bracket; shrink dt."""


# --- Cauchy inversion ------------------------------------------------------

class AmbiguousBranch(ZerodynError):
    """Several inequivalent phase points reproduce the same initial data."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class ZeroSeparation(ZerodynError):
    """Closed-form inversion needs distinct positions."""


class ZeroQ12(ZerodynError):
    """Initial data sit exactly on a creation/annihilation event."""


class BranchPoint(ZerodynError):
    """Initial data sit exactly on a branch point of the inverse map."""


class VanishingDenominator(ZerodynError):
    """The implicit acceleration formula divides by a vanishing gradient sum."""


# --- oracles ---------------------------------------------------------------

class DegenerateData(ZerodynError):
    """Closed-form trajectory undefined for this initial separation."""


class SingularConfiguration(ZerodynError):
    """Conjugate-momentum map is singular at this configuration."""


class CoincidentPositions(ZerodynError):
    """Lax-type matrices need pairwise distinct positions."""


class RSPoleAtGamma(ZerodynError):
    """A position difference hit the coupling-length pole of the velocity matrix."""


class EventInWindow(ZerodynError):
    """Asymptotic probes overlap a creation/annihilation event."""


class BoundaryCase(ZerodynError):
    """Data sit exactly on a regime boundary; classification refused."""


class DomainError(ZerodynError):
    """Input lies outside the formula's domain of validity."""


# --- CLI -------------------------------------------------------------------

class ConfigError(ZerodynError):
    """A run configuration is malformed."""
