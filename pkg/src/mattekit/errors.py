class MatteKitError(Exception):
    """Base class for errors raised by mattekit."""


class DimensionError(MatteKitError, ValueError):
    """Raster shapes that must agree do not."""


class PNGError(MatteKitError, ValueError):
    """A file could not be decoded as a supported PNG."""


class NotPNGError(PNGError):
    pass


class UnsupportedPNGError(PNGError):
    """Valid PNG, but a bit depth or colour type we do not read."""


class ConfigError(MatteKitError, ValueError):
    pass
