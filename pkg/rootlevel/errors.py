"""
Jerarquía de errores de rootlevel.

Cada error lleva un ``detail`` legible y el código de salida que usa la CLI.
"""


class RootLevelError(Exception):
    """Error base. ``detail`` describe el problema para el usuario."""

    exit_code = 1

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


class ConfigError(RootLevelError):
    """Clave desconocida, valor inválido o entrada obligatoria ausente."""

    exit_code = 2


class DataError(RootLevelError):
    """Datos de entrada ilegibles o inconsistentes."""

    exit_code = 3


class VolumeLoadError(DataError):
    pass


class SeedError(DataError):
    pass


class InsufficientSamplesError(DataError):
    pass


class MaxIterationsError(RootLevelError):
    """Solo se lanza con ``--strict`` cuando se alcanza ``max_iters``."""

    exit_code = 4


class BookkeepingError(AssertionError):
    """Fallo interno en la contabilidad de etiquetas/histogramas."""
