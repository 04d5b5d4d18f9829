"""
Archivos de configuración ``clave = valor``.

Ejemplo de configuración de ejecución::

    # maize, dataset 1
    volume-dir = data/maize1
    init-dir   = data/maize1_init
    b  = 10
    nu = 1.0
    root-band = 90, 255

Ejemplo de fantasma::

    dims  = 64, 64, 64
    mu1 = 80
    mu2 = 160
    tube = 32,32,4:4  32,32,60:3
    tube = 32,32,30:3  55,40,50:2
    granules = 20
    granule-rim = true

Guiones y guiones bajos son equivalentes en las claves; ``#`` inicia un
comentario.
"""

import logging
from pathlib import Path
from typing import Dict, List, Tuple

from rootlevel.errors import ConfigError
from rootlevel.models.config import RunConfig, build
from rootlevel.models.phantom_spec import GranuleSpec, PhantomSpec, TubeSpec

logger = logging.getLogger(__name__)

RUN_KEYS = frozenset(RunConfig.model_fields) - {"verbosity"}
TUPLE_KEYS = frozenset({"dims", "root_band"})

PHANTOM_KEYS = frozenset({"dims", "depth", "mu1", "sigma1", "mu2", "sigma2", "seed", "tube"})
GRANULE_KEYS = {
    "granules": "count",
    "granule_radius": "radius_range",
    "granule_mu": "mu",
    "granule_sigma": "sigma",
    "granule_rim": "rim",
    "granule_rim_mu": "rim_mu",
    "granule_rim_width": "rim_width",
}
REPEATABLE = frozenset({"tube", "granule"})


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def read_key_values(path) -> List[Tuple[int, str, str]]:
    """
    Lee las líneas ``clave = valor`` de un archivo.

    Returns:
        List[Tuple[int, str, str]]: (número de línea, clave normalizada, valor)

    Raises:
        ConfigError: archivo ilegible o línea sin ``=``
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"no se puede leer el archivo de configuración {path}: {exc}") from exc
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path.name}:{lineno}: se esperaba 'clave = valor', se leyó {raw.strip()!r}")
        entries.append((lineno, normalize_key(key), value.strip()))
    return entries


def split_tuple(value: str) -> List[str]:
    return [part.strip() for part in value.replace(" ", ",").split(",") if part.strip()]


def parse_point(token: str, where: str) -> Tuple[Tuple[float, float, float], float]:
    """``x,y,z:r`` → ((x, y, z), r)."""
    coords, sep, radius = token.partition(":")
    parts = coords.split(",")
    try:
        if not sep or len(parts) != 3:
            raise ValueError
        return (float(parts[0]), float(parts[1]), float(parts[2])), float(radius)
    except ValueError:
        raise ConfigError(f"{where}: punto inválido {token!r}, formato x,y,z:r") from None


def _collect(entries, known, path) -> Dict[str, object]:
    values: Dict[str, object] = {}
    seen: Dict[str, int] = {}
    for lineno, key, value in entries:
        where = f"{Path(path).name}:{lineno}"
        if key not in known:
            raise ConfigError(f"{where}: clave desconocida '{key}'")
        if key in REPEATABLE:
            values.setdefault(key, []).append((where, value))
            continue
        if key in seen:
            logger.warning("%s: '%s' repetida (línea %d); se usa el último valor", where, key, seen[key])
        seen[key] = lineno
        values[key] = split_tuple(value) if key in TUPLE_KEYS else value
    return values


def load_run_file(path) -> Dict[str, object]:
    """
    Valores de un archivo de ejecución, sin validar todavía como RunConfig.

    Raises:
        ConfigError: clave desconocida (nombrando clave y línea)
    """
    values = _collect(read_key_values(path), RUN_KEYS, path)
    logger.debug("Configuración %s: %s", path, sorted(values))
    return values


def load_phantom_spec(path) -> PhantomSpec:
    """
    Lee un PhantomSpec. ``tube`` y ``granule`` son repetibles.

    Raises:
        ConfigError: clave desconocida, punto mal formado o valores inválidos
    """
    known = PHANTOM_KEYS | set(GRANULE_KEYS) | {"granule"}
    raw = _collect(read_key_values(path), known, path)

    spec: Dict[str, object] = {}
    granule: Dict[str, object] = {}
    for key, value in raw.items():
        if key == "tube":
            tubes = []
            for where, text in value:
                points = [parse_point(token, where) for token in text.split()]
                if not points:
                    raise ConfigError(f"{where}: tubo sin puntos")
                tubes.append(build(TubeSpec, points=[p for p, _ in points], radii=[r for _, r in points]))
            spec["tubes"] = tubes
        elif key == "granule":
            points = [parse_point(text, where) for where, text in value]
            granule["centers"] = [p for p, _ in points]
            granule["radii"] = [r for _, r in points]
        elif key == "granule_radius":
            granule["radius_range"] = split_tuple(value)
        elif key in GRANULE_KEYS:
            granule[GRANULE_KEYS[key]] = value
        else:
            spec[key] = value
    if granule:
        spec["granules"] = build(GranuleSpec, **granule)
    if "dims" not in spec:
        raise ConfigError(f"{Path(path).name}: falta la clave obligatoria 'dims'")
    return build(PhantomSpec, **spec)
