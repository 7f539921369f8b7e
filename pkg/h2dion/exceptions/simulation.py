class H2DionException(RuntimeError):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class ConfigurationException(H2DionException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class NumericalFailureException(H2DionException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class GridException(NumericalFailureException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class RepresentationException(NumericalFailureException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class SymmetryException(NumericalFailureException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class CalibrationBracketException(NumericalFailureException):
    def __init__(self, message, r: float = None):
        self.message = message
        self.r = r
        super().__init__(self.message)


class CalibrationConvergenceException(NumericalFailureException):
    def __init__(self, message, r: float = None):
        self.message = message
        self.r = r
        super().__init__(self.message)


class RelaxationException(NumericalFailureException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class NaNDetectedException(NumericalFailureException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class AliasingException(NumericalFailureException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class ArtifactIOException(H2DionException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class ProvenanceException(ArtifactIOException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class InvalidDataFileException(ArtifactIOException):
    def __init__(self, message):
        self.message = message
        super().__init__(self.message)
