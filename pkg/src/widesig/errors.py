"""Exception hierarchy shared across the package."""


class WidesigError(Exception):
    """Base class for all package errors."""


class ParameterError(WidesigError):
    """An argument is outside its documented range."""


class EmptyInputError(WidesigError):
    """Input buffer too short to produce any output."""


class ProfileError(WidesigError):
    """Band layout profile fails validation or is infeasible."""


class GeometryMismatchError(WidesigError):
    """Grid/mask/record geometries disagree."""


class SigmfError(WidesigError):
    """Base class for SigMF read/write failures."""


class DatatypeError(SigmfError):
    """Record datatype is not the supported ci16_le."""


class TruncatedDataError(SigmfError):
    """Data file length is not a whole number of complex int16 samples."""


class MetadataError(SigmfError):
    """Metadata file is missing, unparseable, or structurally invalid."""
