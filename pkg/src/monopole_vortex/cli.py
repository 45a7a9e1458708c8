"""Command-line interface: ``monopole-vortex {gauge,chern,spectrum,vortex,scan}``.

Output is CSV (header row, LF line endings) or a single JSON document, with
every number written to 12 significant digits.  Exit codes: 0 success,
2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .errors import MonopoleError
from .gauge_field import (GAUGE_OFF, GaugeProfile, LaserModePair, chern_analytic,
                          chern_quadrature, f_profile, scalar_w)
from .latitude_spectrum import LatitudeGrid, assemble, eigen_lowest, sector_make
from .phase_analysis import classify_phase, default_m_range, sector_scan
from .vortex_analysis import bloch_to_vortex, find_zeros, ground_pair, superpose

log = logging.getLogger("monopole_vortex")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
SIG_DIGITS = 12


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    profile: GaugeProfile
    m_N: Optional[int] = None
    chi: Optional[float] = None
    alpha: Optional[float] = None
    n_cells: int = 2048
    n_modes: int = 4
    quadrature_n: int = 1000
    resolution: int = 256
    samples: int = 181
    m_range: Optional[tuple] = None
    output: Optional[str] = None
    csv_output: Optional[str] = None
    fmt: str = "csv"


# -- serialization ------------------------------------------------------------


def fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if x == 0.0:
        x = 0.0
    return f"{x:.{SIG_DIGITS}g}"


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(fmt_number(x))
    return obj


def to_json(obj) -> str:
    return json.dumps(_json_ready(obj), indent=2) + "\n"


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt_number(v) for v in row])
    return buf.getvalue()


def _records_csv(records: List[Dict[str, Any]]) -> str:
    header = list(records[0].keys()) if records else []
    return to_csv(header, [[r[k] for k in header] for r in records])


def _emit(text: str, path: Optional[str], stdout) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _modes_info(profile: GaugeProfile) -> Dict[str, Any]:
    if not profile.enabled:
        return {"gauge_off": True}
    return {"l1": profile.modes.l1, "l2": profile.modes.l2}


# -- subcommands --------------------------------------------------------------


def cmd_gauge(cfg: RunConfig, stdout) -> int:
    prof = cfg.profile
    theta = np.linspace(0.0, math.pi, cfg.samples)
    f = np.atleast_1d(f_profile(prof, theta))
    shift = f - prof.f0
    w = np.atleast_1d(scalar_w(prof, theta))
    records = [{"theta": t, "f": fv, "a_phi_north": s, "a_phi_south": -s, "w_r0sq": wv}
               for t, fv, s, wv in zip(theta, f, shift, w)]
    text = to_json(records) if cfg.fmt == "json" else _records_csv(records)
    _emit(text, cfg.output, stdout)
    return EXIT_OK


def cmd_chern(cfg: RunConfig, stdout) -> int:
    exact = chern_analytic(cfg.profile)
    quad = chern_quadrature(cfg.profile, cfg.quadrature_n)
    record = dict(_modes_info(cfg.profile), cn_analytic=exact, cn_quadrature=quad,
                  abs_error=abs(quad - exact), quadrature_n=cfg.quadrature_n)
    text = to_json(record) if cfg.fmt == "json" else _records_csv([record])
    _emit(text, cfg.output, stdout)
    return EXIT_OK


def _curves_csv(grid, modes) -> str:
    header = ["z"] + [f"theta_{j}" for j in range(len(modes))]
    cols = [grid.nodes] + [m.theta_values for m in modes]
    return to_csv(header, list(zip(*cols)))


def cmd_spectrum(cfg: RunConfig, stdout) -> int:
    prof = cfg.profile
    sector = sector_make(prof.chern, cfg.m_N)
    grid = LatitudeGrid(cfg.n_cells)
    modes = eigen_lowest(assemble(prof, sector, grid), cfg.n_modes)
    if cfg.fmt == "csv":
        _emit(_curves_csv(grid, modes), cfg.output, stdout)
    else:
        record = dict(_modes_info(prof),
                      sector={"m_N": sector.m_N, "m_S": sector.m_S, "cn": sector.cn},
                      n_cells=cfg.n_cells,
                      eigenvalues=[m.lam for m in modes])
        _emit(to_json(record), cfg.output, stdout)
    if cfg.csv_output:
        _emit(_curves_csv(grid, modes), cfg.csv_output, stdout)
    return EXIT_OK


def _vortex_dict(v) -> Dict[str, Any]:
    return {"theta": v.theta, "phi": v.phi, "winding": v.winding,
            "residual_modulus": v.residual_modulus, "at_pole": v.at_pole}


def cmd_vortex(cfg: RunConfig, stdout) -> int:
    grid = LatitudeGrid(cfg.n_cells)
    mode_n, mode_s = ground_pair(cfg.profile, grid)
    state = superpose(mode_n, mode_s, cfg.chi, cfg.alpha)
    vortex = bloch_to_vortex(state)
    found = find_zeros(state, cfg.resolution)
    nearest = min(found, key=lambda r: _arc(r.unit_vector(), vortex.unit_vector()))
    record = dict(_modes_info(cfg.profile), chi=cfg.chi, alpha=cfg.alpha,
                  vortex=_vortex_dict(vortex),
                  grid_search=_vortex_dict(nearest),
                  discrepancy=_arc(nearest.unit_vector(), vortex.unit_vector()),
                  grid_cell=math.pi / cfg.resolution,
                  zeros_found=len(found),
                  total_winding=sum(r.winding for r in found))
    if cfg.fmt == "json":
        text = to_json(record)
    else:
        flat = {k: v for k, v in record.items() if not isinstance(v, dict)}
        for key in ("vortex", "grid_search"):
            flat.update({f"{key}_{k}": v for k, v in record[key].items()})
        text = _records_csv([flat])
    _emit(text, cfg.output, stdout)
    return EXIT_OK


def _arc(u, v) -> float:
    return math.acos(min(1.0, max(-1.0, float(np.dot(u, v)))))


def cmd_scan(cfg: RunConfig, stdout) -> int:
    grid = LatitudeGrid(cfg.n_cells)
    table = sector_scan(cfg.profile, grid, cfg.m_range)
    if all(r.failed for r in table.rows):
        log.error("every sector failed")
        return EXIT_NUMERIC
    report = classify_phase(table)
    rows = [{"m_N": r.sector.m_N, "m_S": r.sector.m_S, "lambda0": r.lambda0,
             "gap": r.gap, "failed": r.failed} for r in table.rows]
    if cfg.fmt == "csv":
        text = _records_csv(rows)
    else:
        text = to_json({
            **_modes_info(cfg.profile),
            "cn": report.cn,
            "n_cells": cfg.n_cells,
            "rows": rows,
            "report": {
                "phase_label": report.phase_label,
                "winning_sectors": [list(s) for s in report.winning_sectors],
                "degenerate_pairs": [[list(a), list(b)] for a, b in report.degenerate_pairs],
                "order_parameter": {f"{k[0]},{k[1]}": list(v)
                                    for k, v in sorted(report.order_parameters.items())},
                "note": report.note,
            },
        })
    _emit(text, cfg.output, stdout)
    return EXIT_OK


COMMANDS = {"gauge": cmd_gauge, "chern": cmd_chern, "spectrum": cmd_spectrum,
            "vortex": cmd_vortex, "scan": cmd_scan}


# -- argument handling --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--l1", type=int, help="first Laguerre index")
    common.add_argument("--l2", type=int, help="second Laguerre index (l2 > l1 >= 0)")
    common.add_argument("--gauge-off", action="store_true",
                        help="switch the gauge off (f = 0, W = 0; Legendre limit)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    common.add_argument("--output", "-o", help="write the main output to this path")
    common.add_argument("--verbose", "-v", action="store_true")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--n-cells", type=int, default=2048)

    parser = argparse.ArgumentParser(
        prog="monopole-vortex",
        description="Artificial monopole on a sphere: potentials, Chern numbers, "
                    "latitude spectra, vortices and symmetry breaking. Angles in radians.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gauge", parents=[common], help="f, A_N, A_S and W on a theta grid")
    p.add_argument("--samples", type=int, default=181)

    p = sub.add_parser("chern", parents=[common], help="Chern number, exact and by quadrature")
    p.add_argument("--quadrature-n", type=int, default=1000)

    p = sub.add_parser("spectrum", parents=[common, grid], help="latitude eigenpairs of a sector")
    p.add_argument("--mn", type=int, help="north winding m_N (m_S = CN - m_N)")
    p.add_argument("--modes", type=int, default=4, help="number of eigenpairs")
    p.add_argument("--csv-output", help="also write the Theta curves as CSV here")

    p = sub.add_parser("vortex", parents=[common, grid], help="vortex of a CN = 1 superposition")
    p.add_argument("--chi", type=float, help="Bloch polar angle in [0, pi]")
    p.add_argument("--alpha", type=float, help="Bloch azimuth")
    p.add_argument("--resolution", type=int, default=256)

    p = sub.add_parser("scan", parents=[common, grid], help="ground level of each sector")
    p.add_argument("--m-min", type=int)
    p.add_argument("--m-max", type=int)
    return parser


_DEFAULT_FORMAT = {"gauge": "csv", "chern": "json", "spectrum": "json",
                   "vortex": "json", "scan": "json"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cmd = args.subcommand
    if args.gauge_off:
        if args.l1 is not None or args.l2 is not None:
            raise ConfigError("--gauge-off cannot be combined with --l1/--l2")
        profile = GAUGE_OFF
    else:
        if args.l1 is None or args.l2 is None:
            raise ConfigError("--l1 and --l2 are required unless --gauge-off is given")
        try:
            profile = GaugeProfile(LaserModePair(args.l1, args.l2))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
    cfg = RunConfig(cmd, profile, output=args.output,
                    fmt=args.fmt or _DEFAULT_FORMAT[cmd])

    if hasattr(args, "n_cells"):
        if args.n_cells < 4 or args.n_cells % 2:
            raise ConfigError("--n-cells must be an even integer >= 4")
        cfg.n_cells = args.n_cells
    if cmd == "gauge":
        if args.samples < 2:
            raise ConfigError("--samples must be >= 2")
        cfg.samples = args.samples
    elif cmd == "chern":
        if args.quadrature_n < 8:
            raise ConfigError("--quadrature-n must be >= 8")
        cfg.quadrature_n = args.quadrature_n
    elif cmd == "spectrum":
        if args.mn is None:
            raise ConfigError("--mn is required")
        if not 1 <= args.modes <= cfg.n_cells:
            raise ConfigError("--modes must lie in [1, n_cells]")
        cfg.m_N, cfg.n_modes, cfg.csv_output = args.mn, args.modes, args.csv_output
    elif cmd == "vortex":
        if profile.chern != 1:
            raise ConfigError(f"vortex needs CN = 1, got CN = {profile.chern}")
        if args.chi is None or args.alpha is None:
            raise ConfigError("--chi and --alpha are required")
        if not (0.0 <= args.chi <= math.pi) or not math.isfinite(args.alpha):
            raise ConfigError("--chi must lie in [0, pi] and --alpha must be finite")
        if args.resolution < 64:
            raise ConfigError("--resolution must be >= 64")
        cfg.chi, cfg.alpha, cfg.resolution = args.chi, args.alpha, args.resolution
    elif cmd == "scan":
        lo, hi = default_m_range(profile.chern)
        lo = lo if args.m_min is None else args.m_min
        hi = hi if args.m_max is None else args.m_max
        if lo > min(0, profile.chern) or hi < max(0, profile.chern):
            raise ConfigError(f"m range [{lo}, {hi}] must contain [0, {profile.chern}]")
        cfg.m_range = (lo, hi)
    return cfg


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=stderr)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        stderr.write(f"monopole-vortex {args.subcommand}: error: {exc}\n")
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.subcommand](cfg, stdout)
    except MonopoleError as exc:
        stderr.write(f"monopole-vortex {args.subcommand}: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
