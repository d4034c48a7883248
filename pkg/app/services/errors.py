class KernelDomainError(Exception):
    pass


class SingularityError(KernelDomainError):
    pass


class InternalError(Exception):
    pass


class AccuracyError(Exception):
    def __init__(self, message: str, result=None):
        self.message = message
        self.result = result  # best available IntegralResult
        super().__init__(message)


class CurveDefinitionError(Exception):
    pass


class ClassificationError(Exception):
    def __init__(self, message: str, classification=None):
        self.message = message
        self.classification = classification
        super().__init__(message)


class CoverageError(Exception):
    def __init__(self, message: str, required_y: float):
        self.message = message
        self.required_y = required_y
        super().__init__(f"{message} (required Y = {required_y!r})")


class DataFormatError(Exception):
    def __init__(self, message: str, line_number: int = None, path=None):
        self.message = message
        self.line_number = line_number
        self.path = path
        location = f"{path}:{line_number}" if path else f"line {line_number}"
        super().__init__(f"{location}: {message}" if line_number is not None else message)


class ConfigurationNotFound(Exception):
    pass


class ConfigurationValidationError(Exception):
    pass


class VerificationFailed(Exception):
    def __init__(self, failed_suites):
        self.failed_suites = list(failed_suites)
        super().__init__(f"Verification failed: {', '.join(self.failed_suites)}")
