"""Exception types raised across the package.

Grouped loosely by where they originate: tensor hypothesis checks, geometry
construction, meshing/solving, and the estimate/scan layer.  Everything
derives from PlatelabError so callers can catch broadly.
"""


class PlatelabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PlatelabError):
    """Configuration file is malformed or semantically invalid."""


# -- tensor hypotheses -------------------------------------------------------

class NonElliptic(PlatelabError):
    """Quadratic form on symmetric matrices is not positive definite."""


class DegenerateLeadingCoefficient(PlatelabError):
    """Leading symbol coefficient vanishes; the quartic degenerates."""


class InvalidJump(PlatelabError):
    """Inclusion contrast fits neither the stiff nor the soft regime."""


# -- geometry ----------------------------------------------------------------

class EmptyInterior(PlatelabError):
    """Requested interior envelope or scan lattice is empty."""


class RegionOutsideDomain(PlatelabError):
    """A disc or region required to sit inside the domain does not."""


class GeometryViolation(PlatelabError):
    """A constructed object escapes the domain (chain discs, covers)."""


class VertexQuery(PlatelabError):
    """Cone membership queried at the cone vertex itself."""


class EmptyCover(PlatelabError):
    """Square cover of a region produced no squares."""


class RhoTooLarge(PlatelabError):
    """Scale parameter exceeds the admissible ceiling rho*."""


# -- meshing and solving -----------------------------------------------------

class MeshFailure(PlatelabError):
    """Mesh generator could not reach the required element quality."""


class SolveFailure(PlatelabError):
    """Linear solve failed or its residual check did not pass."""


class IncompatibleLoad(PlatelabError):
    """Boundary couple field does not annihilate the affine kernel."""


# -- estimates and scans -----------------------------------------------------

class ZeroWorkGap(PlatelabError):
    """Work gap vanishes; relative quantities are undefined."""


class WrongSign(PlatelabError):
    """Measured work gap contradicts the declared contrast sign."""


class MissingCalibration(PlatelabError):
    """Theorem-form constants requested before any calibration run."""


class DegenerateFamily(PlatelabError):
    """Too few or too-degenerate experiments to calibrate constants."""


class InfeasibleFit(PlatelabError):
    """No admissible interpolation exponent fits the sample triples."""


class DegenerateScan(PlatelabError):
    """Scan produced too few usable samples to fit anything."""


class ZeroSolution(PlatelabError):
    """Reference solution energy is zero; ratios are undefined."""
