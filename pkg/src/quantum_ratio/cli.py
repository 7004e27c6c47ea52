"""Command-line front end: ``qratio <command> [options]``.

Exit status: 0 success, 1 configuration or usage error, 2 numerical or regime failure.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT_SEED, ScenarioConfig
from .core import (
    ENERGY_UNITS,
    HBAR,
    LENGTH_UNITS,
    TIME_UNITS,
    Thresholds,
    classify,
    default_catalog,
    parse_quantity,
    quantum_ratio,
)
from .decoherence import TimescaleSet, validate_regime
from .errors import AliasingError, CatalogError, ConfigError, DomainError, IntegrationError, RegimeError
from .interferometry import (
    GratingSpec,
    PointSource,
    lau_sources,
    self_image_check,
    talbot_carpet,
    talbot_lau_scan,
    talbot_length,
)
from .presets import SG_PRESETS, DOUBLING_TIME_REFERENCE, REFERENCE_SIZE, QUANTUM_RATIO_ROWS, TALBOT_PRESETS
from .report import _plain, csv_text, provenance
from .sterngerlach import (
    DensityMatrix2,
    SpinHalfState,
    classical_sg_ensemble,
    fixed_orientation,
    isotropic_orientations,
    large_spin_coefficients,
    quantum_screen_image,
    run_sg_mixed,
    run_sg_pure,
    spike_analysis,
)
from .tunneling import BarrierSpec, rectangle_transmission, transfer_matrix_transmission, wkb_transmission
from .wavepacket import doubling_time

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# -- value parsing -------------------------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text: str) -> float:
    """Arithmetic over numbers and ``pi`` (e.g. ``pi/4``, ``3*pi/2``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ConfigError(f"cannot evaluate {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot evaluate {text!r}: {exc}") from exc


def _quantity(text: str, units, default_unit=None) -> float:
    try:
        return parse_quantity(text, units, default_unit)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


class Params:
    """Typed access to ``cfg.params`` with documented defaults."""

    def __init__(self, cfg: ScenarioConfig):
        self.raw = cfg.params

    def get(self, key, default=None):
        return self.raw.get(key, default)

    def number(self, key, default):
        v = self.raw.get(key)
        return default if v is None else parse_number(v)

    def integer(self, key, default):
        v = self.raw.get(key)
        if v is None:
            return default
        x = parse_number(v)
        if x != int(x):
            raise ConfigError(f"{key} must be an integer, got {v!r}")
        return int(x)

    def length(self, key, default):
        v = self.raw.get(key)
        return default if v is None else _quantity(v, LENGTH_UNITS, "m")

    def time(self, key, default):
        v = self.raw.get(key)
        return default if v is None else _quantity(v, TIME_UNITS, "s")


# -- output --------------------------------------------------------------------------------


def _hash_config(cfg: ScenarioConfig) -> dict:
    # threads and the output path never change results
    d = asdict(cfg)
    d.pop("threads")
    d.pop("out")
    return d


def _emit(cfg: ScenarioConfig, columns, rows, summary: dict, out_stream) -> None:
    if cfg.format == "json":
        body = {"command": cfg.command, "result": _plain(summary), "provenance": provenance(_hash_config(cfg))}
        text = json.dumps(body, sort_keys=True, indent=2) + "\n"
    else:
        text = csv_text(columns, rows, config=_hash_config(cfg))
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        out_stream.write(text)


def _particle(cfg: ScenarioConfig, default: str):
    name = cfg.particle or default
    try:
        return default_catalog()[name]
    except (KeyError, CatalogError) as exc:
        raise ConfigError(f"unknown particle {name!r}") from exc


# -- commands --------------------------------------------------------------------------------


def cmd_qratio(cfg, out):
    p = Params(cfg)
    part = _particle(cfg, "Ag")
    r_q = p.length("rq", part.r_q)
    if r_q is None:
        raise ConfigError(f"particle {part.name} has no catalog r_q; pass --rq")
    l_0 = p.length("l0", part.size_l0)
    th = Thresholds(p.number("hi", 10.0), p.number("lo", 1.0))
    qr = quantum_ratio(r_q, l_0)
    cls = classify(qr, th)
    q_text = "inf" if qr.infinite else qr.q
    log_q = "inf" if qr.infinite else qr.log10()
    row = [part.name, r_q, l_0, q_text, log_q, cls.regime.value]
    summary = {"particle": part.name, **qr.as_dict(), "classification": cls.as_dict()}
    _emit(cfg, ["particle", "r_q_m", "l_0_m", "q", "log10_q", "class"], [row], summary, out)


def cmd_diffusion(cfg, out):
    p = Params(cfg)
    size = p.length("size", REFERENCE_SIZE)
    names = _list(p.get("particles", ",".join(DOUBLING_TIME_REFERENCE)))
    cat = default_catalog()
    rows, items = [], []
    for n in names:
        if n not in cat:
            raise ConfigError(f"unknown particle {n!r}")
        part = cat[n]
        t = doubling_time(part.mass, size)
        ref = DOUBLING_TIME_REFERENCE.get(n) if size == REFERENCE_SIZE else None
        ratio = t / ref if ref else None
        rows.append([n, part.mass, size, t, "" if ref is None else ref, "" if ratio is None else ratio])
        items.append({"particle": n, "mass": part.mass, "doubling_time": t, "reference": ref, "ratio": ratio})
    cols = ["particle", "mass_kg", "initial_size_m", "doubling_time_s", "reference_s", "ratio"]
    _emit(cfg, cols, rows, {"size": size, "size_convention": "size = 2 std", "rows": items}, out)


def _sg_setup(cfg):
    p = Params(cfg)
    name = p.get("preset", "Ag")
    if name not in SG_PRESETS:
        raise ConfigError(f"unknown SG preset {name!r}; known: {sorted(SG_PRESETS)}")
    return p, SG_PRESETS[name]()


def cmd_sg(cfg, out):
    p, pre = _sg_setup(cfg)
    mode = p.get("mode", "pure")
    theta = p.number("theta", math.pi / 2)
    phi = p.number("phi", 0.0)
    n_bins = p.integer("bins", 512)
    f, packet = pre.field, pre.packet
    l_0 = pre.particle.size_l0
    if mode == "classical":
        orient = p.get("orientation", "isotropic")
        sampler = isotropic_orientations if orient == "isotropic" else fixed_orientation(theta, phi)
        if orient not in ("isotropic", "fixed"):
            raise ConfigError(f"orientation must be isotropic or fixed, got {orient!r}")
        f.check_validity()
        img = classical_sg_ensemble(f, packet, sampler, p.integer("samples", 100_000), cfg.seed, n_bins)
        summary = {"mode": mode, "orientation": orient, "samples": p.integer("samples", 100_000), "preset": pre.name,
                   "band_centers": img.band_centers, "band_widths": img.band_widths, "band_weights": img.band_weights}
    elif mode in ("pure", "mixed"):
        s = SpinHalfState(theta, phi)
        if mode == "pure":
            rep = run_sg_pure(f, packet, s, l_0)
        else:
            gamma = p.number("gamma", 0.0)
            if not 0.0 <= gamma <= 1.0:
                raise ConfigError(f"gamma must lie in [0, 1], got {gamma}")
            base = s.density_matrix()
            rho = DensityMatrix2(base.r11, gamma * base.r12, gamma * base.r21, base.r22)
            rep = run_sg_mixed(f, packet, rho, l_0)
        img = quantum_screen_image(f, packet, tuple(rep["weights"]), n_bins)
        summary = {"mode": mode, "preset": pre.name, "derivation": pre.derivation, **rep.to_dict()}
    else:
        raise ConfigError(f"mode must be pure, mixed or classical, got {mode!r}")
    _emit(cfg, ["z_m", "weight"], img.rows(), summary, out)


def cmd_spin_spike(cfg, out):
    p = Params(cfg)
    ns = [int(parse_number(v)) for v in _list(p.get("N", "10,2000"))]
    thetas = [parse_number(v) for v in _list(p.get("theta", "pi/2,pi/4"))]
    rows, items = [], []
    for n in ns:
        for th in thetas:
            try:
                dist = large_spin_coefficients(n, th)
            except DomainError as exc:
                raise ConfigError(str(exc)) from exc
            w = dist.weights
            for k in range(n + 1):
                rows.append([n, th, k, float(dist.sz[k]), k / n, float(w[k])])
            item = {"N": n, "theta": th, "raw_total_minus_1": dist.raw_total - 1.0}
            if n >= 2:
                a = spike_analysis(dist)
                item.update(mean_x=a.mean_x, std_x=a.std_x, x0=a.x0, std_sqrt_n=a.std_x * math.sqrt(n),
                            sz_over_s=a.sz_over_s, gaussian_tv=a.gaussian_tv_error)
            items.append(item)
    _emit(cfg, ["N", "theta", "k", "sz", "x", "weight"], rows, {"distributions": items}, out)


def _talbot_setup(cfg):
    p = Params(cfg)
    name = p.get("preset", "C70")
    if name not in TALBOT_PRESETS:
        raise ConfigError(f"unknown Talbot preset {name!r}; known: {sorted(TALBOT_PRESETS)}")
    pre = TALBOT_PRESETS[name](
        speed=p.number("speed", 100.0),
        period=p.length("period", 1e-6),
        n_slits=p.integer("slits", 100),
        l1=p.length("l1", 1.0),
    )
    return p, pre


def cmd_talbot(cfg, out):
    p, pre = _talbot_setup(cfg)
    order = p.number("order", 2.0)
    n_grid = p.integer("grid", 2**14)
    g = GratingSpec(pre.grating.period, p.number("open_fraction", 0.5), pre.grating.n_slits)
    geo = pre.geometry(order)
    res = self_image_check(PointSource(), g, geo, n_grid)
    lt = talbot_length(g.period, geo.wavelength)
    steps = p.integer("carpet_steps", 16)
    dists = [geo.l2 * (i + 1) / steps for i in range(steps)]
    x, carpet = talbot_carpet(g, geo, dists, n_grid, n_bins=p.integer("carpet_bins", 256)) if steps > 0 else ([], [])
    summary = {
        "particle": pre.particle.name, "wavelength": geo.wavelength, "talbot_length": lt, "l1": geo.l1, "l2": geo.l2,
        "m1": geo.m1, "m2": geo.m2, "order": order, "correlation": res.correlation, "best_shift": res.best_shift,
        "period_at_g3": res.period_at_g3, "best_shift_over_period": res.best_shift / res.period_at_g3,
        "carpet_distances": dists, "carpet_x_g2": list(x),
    }
    # carpet matrix: one row per distance, one column per transverse bin
    columns = ["z_m"] + [f"bin_{i}" for i in range(len(x))]
    rows = [[z, *row.tolist()] for z, row in zip(dists, carpet)]
    _emit(cfg, columns, rows, summary, out)
    if cfg.out and cfg.format == "csv":
        sidecar = {"result": _plain(summary), "provenance": provenance(_hash_config(cfg))}
        Path(cfg.out + ".json").write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def cmd_talbot_lau(cfg, out):
    p, pre = _talbot_setup(cfg)
    geo = pre.geometry(p.number("order", 2.0))
    g2 = pre.grating
    g3 = GratingSpec(geo.m2 * g2.period * p.number("g3_period_factor", 1.0), p.number("open3", 0.5), g2.n_slits)
    n_shift = p.integer("shifts", 16)
    shifts = np.arange(n_shift) * g3.period / n_shift
    sources = lau_sources(geo, g2.period, p.integer("sources", 20))
    scan = talbot_lau_scan(sources, g2, g3, geo, shifts, p.integer("grid", 2**14), threads=cfg.threads)
    if scan.flagged:
        print(f"warning: G3 period is {scan.period_mismatch:.1%} off M2*d", file=sys.stderr)
    summary = {"visibility": scan.visibility, "period_mismatch": scan.period_mismatch, "flagged": scan.flagged,
               "sources": len(sources), "l2": geo.l2, "g3_period": g3.period}
    _emit(cfg, ["shift_m", "transmission"], scan.rows(), summary, out)


def parse_barrier(text: str, e_ref: float, mass: float) -> tuple[BarrierSpec, float]:
    """``rect:V0=2E,w=0.5nm`` | ``rect:V0=2eV,kw=10`` | ``parabola:V0=2E,a=1nm``.

    ``V0`` is an energy or a multiple of the reference energy (suffix ``E``);
    ``kw`` fixes the width through kappa*w at the reference energy.
    """
    try:
        kind, spec = text.split(":", 1)
        fields = dict(item.split("=", 1) for item in _list(spec))
    except ValueError as exc:
        raise ConfigError(f"cannot parse barrier {text!r}") from exc
    v_text = fields.get("V0")
    if v_text is None:
        raise ConfigError("barrier needs V0")
    v0 = parse_number(v_text[:-1] or "1") * e_ref if v_text.endswith("E") else _quantity(v_text, ENERGY_UNITS)
    if not v0 > 0:
        raise ConfigError("V0 must be positive")
    if kind == "rect":
        if "kw" in fields:
            if not v0 > e_ref:
                raise ConfigError("kw needs V0 above the reference energy")
            w = parse_number(fields["kw"]) * HBAR / math.sqrt(2.0 * mass * (v0 - e_ref))
        elif "w" in fields:
            w = _quantity(fields["w"], LENGTH_UNITS, "m")
        else:
            raise ConfigError("rect barrier needs w or kw")
        return BarrierSpec.rectangle(v0, w), v0
    if kind == "parabola":
        a = _quantity(fields.get("a", ""), LENGTH_UNITS, "m") if "a" in fields else None
        if a is None:
            raise ConfigError("parabola barrier needs a")
        return BarrierSpec.smooth(lambda z: v0 * (1.0 - (z / a) ** 2), a), v0
    raise ConfigError(f"unknown barrier kind {kind!r}; use rect or parabola")


def cmd_tunnel(cfg, out):
    p = Params(cfg)
    part = _particle(cfg, "electron")
    e_ref = _quantity(p.get("energy", "1eV"), ENERGY_UNITS)
    barrier, v0 = parse_barrier(p.get("barrier", "rect:V0=2E,kw=10"), e_ref, part.mass)
    n = p.integer("points", 100)
    e_min = _quantity(p.get("e_min"), ENERGY_UNITS) if p.get("e_min") else 0.01 * v0
    e_max = _quantity(p.get("e_max"), ENERGY_UNITS) if p.get("e_max") else 1.5 * v0
    if not 0 < e_min < e_max or n < 1:
        raise ConfigError("need 0 < e_min < e_max and points >= 1")
    exact_barrier = barrier if barrier.is_piecewise else barrier.staircase(p.integer("stairs", 400))
    vmax = barrier.max_height()
    rows, worst = [], 0.0
    for e in np.linspace(e_min, e_max, n).tolist():
        ex = transfer_matrix_transmission(exact_barrier, e, part.mass)
        err = abs(ex.transmission + ex.reflection - 1.0)
        worst = max(worst, err)
        row = [e, e / v0, ex.transmission, ex.reflection, err, ex.log_transmission]
        if e < vmax:
            wk = wkb_transmission(barrier, e, part.mass)
            row += [wk.transmission, wk.log_transmission, wk.log_transmission / ex.log_transmission - 1.0]
        else:
            row += ["", "", ""]
        rows.append(row)
    summary = {"particle": part.name, "v0": v0, "points": n, "max_unitarity_error": worst,
               "wkb_label": "WKB, no prefactor"}
    if len(barrier.segments or ()) == 1 and barrier.segments[0][0] == 0.0:
        w = barrier.segments[0][1]
        summary["closed_form_max_log_error"] = max(
            abs(r[5] - rectangle_transmission(v0, w, r[0], part.mass)) for r in rows
        )
    cols = ["E_J", "E_over_V0", "T_exact", "R_exact", "unitarity_error", "lnT_exact", "T_wkb", "lnT_wkb",
            "ln_ratio_minus_1"]
    _emit(cfg, cols, rows, summary, out)
    if worst > 1e-10:
        raise IntegrationError(f"transfer-matrix unitarity violated: max |T + R - 1| = {worst:.3g}")


def cmd_regime(cfg, out):
    p = Params(cfg)
    ts = TimescaleSet(
        p.time("tau_dec", 1e-13), p.time("tau_trans", 1e-4), p.time("tau_diff", 1e-2), p.time("tau_diss", 1.0)
    )
    rep = validate_regime(ts, p.length("a", 1e-8), p.length("lambda_env", 1e-6), p.length("separation", 2e-4),
                          p.number("strictness", 10.0))
    d = rep.as_dict()
    rows = [[c["label"], c["inequality"], c["lhs"], c["rhs"], c["margin"], c["pass"], c["note"]] for c in d["checks"]]
    _emit(cfg, ["label", "inequality", "lhs", "rhs", "margin", "pass", "note"], rows, d, out)
    if not rep.ok:
        raise RegimeError("regime hierarchy violated: " + "; ".join(c.note for c in rep.failed()))


def cmd_paper_tables(cfg, out):
    outdir = Path(cfg.out or "paper_tables")
    outdir.mkdir(parents=True, exist_ok=True)
    h = _hash_config(cfg)
    cat = default_catalog()
    files = {}

    t1 = []
    for name, ref in DOUBLING_TIME_REFERENCE.items():
        t = doubling_time(cat[name].mass, REFERENCE_SIZE)
        t1.append([name, cat[name].mass, t, ref, t / ref])
    files["doubling_times.csv"] = csv_text(["particle", "mass_kg", "doubling_time_s", "reference_s", "ratio"], t1, h)

    t5 = []
    for name in QUANTUM_RATIO_ROWS:
        part = cat[name]
        qr = quantum_ratio(part.r_q, part.size_l0)
        t5.append([name, part.mass, part.size_l0, part.r_q, qr.q, part.q_reference,
                   qr.log10() - math.log10(part.q_reference)])
    files["quantum_ratios.csv"] = csv_text(["particle", "mass_kg", "l_0_m", "r_q_m", "q", "q_reference", "log10_diff"], t5, h)

    for fname, n in (("spin_distribution_n10.csv", 10), ("spin_distribution_n2000.csv", 2000)):
        rows = []
        for th in (math.pi / 2, math.pi / 4):
            dist = large_spin_coefficients(n, th)
            w = dist.weights
            rows.extend([th, float(dist.sz[k]), float(w[k])] for k in range(n + 1))
        files[fname] = csv_text(["theta", "sz", "weight"], rows, h)

    for fname, text in files.items():
        (outdir / fname).write_text(text, encoding="utf-8")
    out.write("\n".join(str(outdir / f) for f in files) + "\n")


COMMANDS = {
    "qratio": cmd_qratio,
    "diffusion": cmd_diffusion,
    "sg": cmd_sg,
    "spin-spike": cmd_spin_spike,
    "talbot": cmd_talbot,
    "talbot-lau": cmd_talbot_lau,
    "tunnel": cmd_tunnel,
    "regime": cmd_regime,
    "paper-tables": cmd_paper_tables,
}

_HELP = {
    "qratio": "quantum ratio and classification for one particle",
    "diffusion": "free-packet doubling times over the catalog",
    "sg": "Stern-Gerlach screen image: pure, mixed or classical",
    "spin-spike": "large-spin S_z distributions",
    "talbot": "self-image check and Talbot carpet",
    "talbot-lau": "G3 shift scan and visibility",
    "tunnel": "energy scan: exact transfer matrix vs WKB",
    "regime": "decoherence timescale hierarchy report",
    "paper-tables": "regenerate the reference doubling times, quantum ratios and spin distributions",
}

# (flag, help); all values are strings parsed by the command
_FLAGS = {
    "qratio": [("--rq", "fluctuation range, e.g. 0.2mm (default: catalog value)"),
               ("--l0", "body size, e.g. 1.44A (default: catalog value)"),
               ("--hi", "Quantum threshold (10)"), ("--lo", "Classical threshold (1)")],
    "diffusion": [("--size", "initial size = 2 std (1um)"),
                  ("--particles", "comma-separated catalog names")],
    "sg": [("--preset", "field preset (Ag)"), ("--mode", "pure | mixed | classical"),
           ("--theta", "spin polar angle, e.g. pi/2"), ("--phi", "spin azimuth"),
           ("--gamma", "mixed mode coherence factor in [0, 1] (0)"), ("--bins", "screen bins (512)"),
           ("--samples", "classical samples (100000)"), ("--orientation", "isotropic | fixed")],
    "spin-spike": [("--N", "comma-separated N = 2S values (10,2000)"),
                   ("--theta", "comma-separated angles (pi/2,pi/4)")],
    "talbot": [("--preset", "C70"), ("--speed", "beam speed m/s (100)"), ("--period", "grating period (1um)"),
               ("--slits", "number of slits (100)"), ("--l1", "source to G2 (1m)"),
               ("--open-fraction", "open fraction (0.5)"), ("--order", "2 = revival, 1 = half shift"),
               ("--grid", "grid size (16384)"), ("--carpet-steps", "carpet rows (16)"),
               ("--carpet-bins", "carpet columns (256)")],
    "talbot-lau": [("--preset", "C70"), ("--speed", "beam speed m/s (100)"), ("--period", "G2 period (1um)"),
                   ("--slits", "number of slits (100)"), ("--l1", "G1 to G2 (1m)"), ("--order", "(2)"),
                   ("--open3", "G3 open fraction (0.5)"), ("--g3-period-factor", "G3 period / (M2 d) (1)"),
                   ("--shifts", "scan points per period (16)"), ("--sources", "incoherent sources (20)"),
                   ("--grid", "grid size (16384)")],
    "tunnel": [("--barrier", "rect:V0=2E,w=0.5nm | rect:V0=2E,kw=10 | parabola:V0=2E,a=1nm"),
               ("--energy", "reference energy E (1eV)"), ("--points", "scan points (100)"),
               ("--e-min", "scan start (0.01 V0)"), ("--e-max", "scan end (1.5 V0)"),
               ("--stairs", "staircase segments for smooth barriers (400)")],
    "regime": [("--tau-dec", "(1e-13 s)"), ("--tau-trans", "(1e-4 s)"), ("--tau-diff", "(1e-2 s)"),
               ("--tau-diss", "(1 s)"), ("--a", "branch width (10nm)"), ("--lambda-env", "(1um)"),
               ("--separation", "(0.2mm)"), ("--strictness", "factor standing for >> (10)")],
    "paper-tables": [],
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI scenario file; flags override it")
    common.add_argument("--out", help="output file (paper-tables: directory)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--threads", type=int, help="worker threads for independent scan points")
    common.add_argument("--particle", help="catalog particle name")

    parser = _Parser(prog="qratio", description="Quantum ratio calculations and scenario simulations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=_HELP[name], description=_HELP[name])
        for flag, help_text in _FLAGS[name]:
            sp.add_argument(flag, dest="p_" + flag[2:].replace("-", "_"), help=help_text)
    return parser


def _config_from_args(ns) -> ScenarioConfig:
    params = {k[2:]: v for k, v in vars(ns).items() if k.startswith("p_")}
    base = ScenarioConfig.load(ns.config) if ns.config else ScenarioConfig(ns.command)
    if base.command != ns.command:
        raise ConfigError(f"config file is for {base.command!r}, not {ns.command!r}")
    return base.merged(params=params, particle=ns.particle, out=ns.out, seed=ns.seed, format=ns.format,
                       threads=ns.threads)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("a command is required")
        cfg = _config_from_args(ns)
        COMMANDS[cfg.command](cfg, out)
    except (ConfigError, CatalogError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RegimeError, IntegrationError, AliasingError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())
