class UniverseError(Exception):
    """Базовое исключение для всех ошибок конструкций"""


class InvalidTypeError(UniverseError):
    pass


class TypeMismatchError(UniverseError):
    pass


class LevelError(UniverseError):
    pass


class GraphError(UniverseError):
    pass


class GraphCheckError(GraphError):
    def __init__(self, name, violations):
        self.violations = list(violations)
        details = "; ".join(str(v) for v in self.violations)
        super().__init__(f"граф '{name}' не прошел проверку: {details}")


class EvaluationError(UniverseError):
    pass


class ConditionUndecidableError(EvaluationError):
    pass


class NotRelationalError(UniverseError):
    pass


class WitnessError(EvaluationError):
    pass


class ContinuumError(UniverseError):
    pass


class NotATreeError(ContinuumError):
    pass


class SyntaxParseError(UniverseError):
    pass


class GraphFormatError(UniverseError):
    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
