# Parámetros publicados por conjunto de datos: b y ν; t=1 y k=100 en todos.
# La yuca se segmentó con G_h lleno desde el inicio.
PRESETS = {
    "maize-clay-1": {"b": 10, "nu": 1.0},
    "cassava-berger": {"b": 10, "nu": 1.0, "explore_incrementally": False},
    "soybean-clay": {"b": 10, "nu": 1.2},
    "maize-clay-2": {"b": 20, "s": 20, "nu": 1.5},
    "maize-turface": {"b": 10, "nu": 1.05},
}

COMMON = {"t": 1, "k": 100}


def preset_values(name: str) -> dict:
    """
    Devuelve los valores de un preset.

    Raises:
        KeyError: si el preset no existe
    """
    values = dict(COMMON)
    values.update(PRESETS[name])
    return values
