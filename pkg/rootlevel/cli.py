"""
Ejecución por lotes: configuración → volumen + semillas → motor → máscaras y métricas.

Prioridad de la configuración (de menor a mayor): preset, archivo
``--config`` y opciones de la línea de órdenes.

Códigos de salida: 0 éxito, 2 configuración, 3 datos, 4 ``--strict`` con
``max_iters`` alcanzado.
"""

import argparse
import csv
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from rootlevel import engine
from rootlevel.config_file import load_phantom_spec, load_run_file, split_tuple
from rootlevel.errors import ConfigError, DataError, MaxIterationsError, RootLevelError
from rootlevel.models.config import RunConfig, build
from rootlevel.models.metrics import METRICS_HEADER, IterationMetrics
from rootlevel.models.presets import PRESETS, preset_values
from rootlevel.phantom import dice, generate, sample_marks
from rootlevel.postproc import filter_components
from rootlevel.seeding import SeedSet, embed_marks, load_marked_slices
from rootlevel.volume import Volume, load_raw, load_slice_stack, write_mask_stack

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"
SUMMARY_FILE = "summary.txt"
OCCUPANCY_FILE = "occupancy.png"
CHECKPOINT_DIR = "checkpoints"
CHECKPOINT_PATTERN = "labels_{:05d}.raw"


class RunReport(BaseModel):
    """Resumen de una ejecución; se escribe en summary.txt."""

    iterations: int
    converged: bool
    foreground_voxels: int
    components: int
    components_removed: int
    removed_voxels: int
    seeds: int
    seeds_dropped: int
    wall_time_s: float
    dice: Optional[float] = None

    def lines(self) -> List[str]:
        rows = [
            f"iterations: {self.iterations}",
            f"converged: {str(self.converged).lower()}",
            f"foreground_voxels: {self.foreground_voxels}",
            f"components: {self.components}",
            f"components_removed: {self.components_removed}",
            f"removed_voxels: {self.removed_voxels}",
            f"seeds: {self.seeds}",
            f"seeds_dropped: {self.seeds_dropped}",
            f"wall_time_s: {self.wall_time_s:.3f}",
        ]
        if self.dice is not None:
            rows.append(f"dice: {self.dice:.6f}")
        return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootlevel",
        description="Segmentación de raíces en volúmenes de TC por conjuntos de nivel en banda estrecha",
    )
    inputs = parser.add_argument_group("entrada")
    inputs.add_argument("--config", type=Path, help="Archivo 'clave = valor' con la configuración")
    inputs.add_argument("--preset", choices=sorted(PRESETS), help="Parámetros publicados de un conjunto de datos")
    inputs.add_argument("--volume-dir", type=Path, help="Carpeta con la pila de cortes PNG/TIFF")
    inputs.add_argument("--raw", type=Path, help="Volumen crudo little-endian sin cabecera")
    inputs.add_argument("--dims", help="Dimensiones X,Y,Z del volumen crudo")
    inputs.add_argument("--depth", type=int, choices=(8, 16), help="Bits por vóxel del volumen crudo")
    inputs.add_argument("--pitch-um", type=float, help="Arista del vóxel en micrómetros")
    inputs.add_argument("--init-dir", type=Path, help="Carpeta con los cortes init_<eje>_<índice>.png")
    inputs.add_argument("--phantom", type=Path, help="Especificación de fantasma sintético")
    inputs.add_argument("--seed-stride", type=int, help="Modo fantasma: marcar uno de cada N vóxeles de raíz")
    inputs.add_argument("--seed-slices", type=int, help="Modo fantasma: número de cortes Z marcados")

    params = parser.add_argument_group("motor")
    params.add_argument("--b", type=int, help="Ancho de banda")
    params.add_argument("--nu", type=float, help="Peso de suavidad ν")
    params.add_argument("--s", type=int, help="Arista de cubo de la rejilla")
    params.add_argument("--t", type=int, help="Máximo count(x) de un vóxel activo")
    params.add_argument("--k", type=int, help="Terminar cuando |C_a| < k")
    params.add_argument("--dt-step", type=float, help="Paso temporal")
    params.add_argument("--g-min", type=int, help="Nivel de gris mínimo")
    params.add_argument("--root-band", help="Intervalo LO,HI de grises permitido en la raíz")
    params.add_argument("--max-iters", type=int, help="Tope de iteraciones")
    params.add_argument("--history-scale", type=int, help="Arista de G_h como múltiplo de s")
    params.add_argument(
        "--no-explore", dest="explore_incrementally", action="store_false", default=None,
        help="Etiquetar todo el volumen como Ω₁ desde el inicio",
    )

    output = parser.add_argument_group("salida")
    output.add_argument("--out", type=Path, help="Carpeta de salida")
    output.add_argument("--workers", type=int, help="Hilos de cálculo")
    output.add_argument("--strict", action="store_true", default=None, help="Salir con 4 si se alcanza max_iters")
    output.add_argument("--checkpoint", type=int, help="Volcar etiquetas cada N iteraciones")
    output.add_argument("--plot", action="store_true", default=None, help="Dibujar occupancy.png")
    output.add_argument("-v", "--verbose", action="count", default=0)
    output.add_argument("-q", "--quiet", action="count", default=0)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    Combina preset, archivo y opciones en un RunConfig validado.

    Raises:
        ConfigError: preset desconocido, clave desconocida o valores inválidos
    """
    values: Dict[str, object] = {}
    file_values = load_run_file(args.config) if args.config else {}

    preset = args.preset or file_values.get("preset")
    if preset:
        try:
            values.update(preset_values(preset))
        except KeyError:
            raise ConfigError(f"preset desconocido '{preset}'; disponibles: {', '.join(sorted(PRESETS))}") from None
    values.update(file_values)

    flags = {k: v for k, v in vars(args).items() if k not in ("config", "verbose", "quiet") and v is not None}
    for key in ("dims", "root_band"):
        if key in flags:
            flags[key] = split_tuple(flags[key])
    values.update(flags)
    values["verbosity"] = args.verbose - args.quiet
    return build(RunConfig, **values)


def setup_logging(verbosity: int) -> None:
    level = logging.DEBUG if verbosity > 0 else logging.WARNING if verbosity < 0 else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(name)s - %(message)s")
    logging.getLogger("rootlevel").setLevel(level)


def load_inputs(cfg: RunConfig):
    """
    Carga volumen y semillas; en modo fantasma también la verdad terreno.

    Returns:
        (Volume, SeedSet, Optional[np.ndarray])
    """
    engine_cfg = cfg.engine()
    truth = None
    if cfg.phantom is not None:
        volume, truth = generate(load_phantom_spec(cfg.phantom))
        if cfg.init_dir is not None:
            marks = load_marked_slices(cfg.init_dir, volume)
        else:
            marks = sample_marks(truth, cfg.seed_slices, cfg.seed_stride)
    else:
        if cfg.volume_dir is not None:
            volume = load_slice_stack(cfg.volume_dir, cfg.pitch_um)
        else:
            volume = load_raw(cfg.raw, cfg.dims, cfg.depth, cfg.pitch_um)
        marks = load_marked_slices(cfg.init_dir, volume)
    seeds = embed_marks(marks, volume, engine_cfg)
    return volume, seeds, truth


def write_metrics(metrics: Sequence[IterationMetrics], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for row in metrics:
            writer.writerow(row.csv_row())


def _checkpoint_writer(cfg: RunConfig):
    if not cfg.checkpoint:
        return None
    directory = cfg.out / CHECKPOINT_DIR
    directory.mkdir(parents=True, exist_ok=True)

    def on_iteration(state: engine.EngineState, row: IterationMetrics) -> None:
        if row.iteration % cfg.checkpoint == 0:
            path = directory / CHECKPOINT_PATTERN.format(row.iteration)
            path.write_bytes(state.phi.labels.tobytes(order="C"))
            logger.debug("Checkpoint %s", path)

    return on_iteration


def run_batch(cfg: RunConfig) -> RunReport:
    """
    Ejecuta una segmentación completa y escribe sus salidas en ``cfg.out``.

    Raises:
        ConfigError, DataError: entradas inválidas
        MaxIterationsError: con ``strict`` si no se alcanzó |C_a| < k (las
            salidas se escriben igualmente)
    """
    started = time.perf_counter()
    volume, seeds, truth = load_inputs(cfg)
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"no se puede crear la carpeta de salida {cfg.out}: {exc}") from exc

    result = engine.run(volume, seeds, cfg.engine(), workers=cfg.workers, on_iteration=_checkpoint_writer(cfg))
    filtered = filter_components(result.labels, seeds)
    foreground = filtered.foreground

    try:
        write_mask_stack(foreground, cfg.out)
        write_metrics(result.metrics, cfg.out / METRICS_FILE)
        if cfg.plot:
            from rootlevel.plotting import plot_occupancy

            plot_occupancy(result.metrics, cfg.out / OCCUPANCY_FILE)
    except OSError as exc:
        raise DataError(f"error al escribir en {cfg.out}: {exc}") from exc

    report = RunReport(
        iterations=result.iterations,
        converged=result.converged,
        foreground_voxels=int(np.count_nonzero(foreground)),
        components=int(filtered.components),
        components_removed=len(filtered.removed),
        removed_voxels=int(filtered.removed_voxels),
        seeds=len(seeds),
        seeds_dropped=int(seeds.dropped),
        wall_time_s=time.perf_counter() - started,
        dice=float(dice(foreground, truth)) if truth is not None else None,
    )
    (cfg.out / SUMMARY_FILE).write_text("\n".join(report.lines()) + "\n", encoding="utf-8")

    if not result.converged and cfg.strict:
        raise MaxIterationsError(f"se alcanzó max_iters={cfg.max_iters} sin converger")
    return report


def print_summary(report: RunReport, out: Path) -> None:
    status = "✅" if report.converged else "⚠️"
    print(f"{status} Segmentación terminada en {report.iterations} iteraciones")
    print(f"🌱 Vóxeles de raíz: {report.foreground_voxels} ({report.components_removed} componentes eliminadas)")
    if report.dice is not None:
        print(f"🎯 Dice frente a la verdad terreno: {report.dice:.4f}")
    print(f"📁 Resultados en {out}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose - args.quiet)
    try:
        cfg = resolve_config(args)
        report = run_batch(cfg)
    except RootLevelError as exc:
        print(f"❌ {exc.detail}", file=sys.stderr)
        return exc.exit_code
    print_summary(report, cfg.out)
    return 0
