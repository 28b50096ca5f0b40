"""Exception hierarchy shared by all johnforge modules."""


class JohnforgeError(Exception):
    """Base class for every error raised by this package."""

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class ParameterError(JohnforgeError, ValueError):
    """An argument is outside its admissible range."""


class EmptyMaskError(JohnforgeError):
    """Rasterization produced no occupied pixel."""


class GeometryError(JohnforgeError):
    """A set or region does not fit the bounding box as required."""


class ConnectivityError(JohnforgeError):
    """Two required parts of a domain are not connected at grid resolution."""


class ConstructionError(JohnforgeError):
    """The slit/graph construction could not be completed."""

    def __init__(self, message, layer=None):
        super().__init__(message)
        self.layer = layer

    def to_dict(self):
        out = super().to_dict()
        if self.layer is not None:
            out["layer"] = self.layer
        return out


class WitnessInapplicableError(JohnforgeError):
    """The positive-area witness needs a set of non-negligible area."""
