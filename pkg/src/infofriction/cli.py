"""Batch experiment driver.

    infofriction <bounds|simulate|stencil|optimize|scaling> <config.ini>

Exit status: 0 success, 2 configuration/input error, 3 a checked property failed.
``INFOFRICTION_WORKERS`` sets the Monte-Carlo worker count; nothing else is read
from the environment. Output rows follow grid order, never execution order.
"""
from __future__ import annotations

import argparse
import itertools
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds as B
from .channel import BLOCK_ERROR_COLUMNS, ChannelParams, estimate_block_error, q_function
from .codes import STRATEGIES, PlacedCoder, make_coder
from .computation import (
    ACCOUNTING_COLUMNS, bitmeters_in_region, bitmeters_of_trace, read_trace, validate_trace,
    write_csv, write_trace,
)
from .config import ConfigError, ExperimentConfig, Section, load_coder_description, load_config
from .geometry import ParseError, read_circuit, validate_circuit, write_circuit
from .stencil import Stencil, best_origin, partition
from .svg import render_stencil_svg

EXIT_OK, EXIT_CONFIG, EXIT_PROPERTY = 0, 2, 3


class PropertyFailure(AssertionError):
    pass


@dataclass
class RunResult:
    outputs: list[Path] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


def _write(path: Path, columns, rows, result: RunResult) -> None:
    try:
        write_csv(path, columns, rows)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None
    result.outputs.append(path)


def _write_text(path: Path, text: str, result: RunResult) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None
    result.outputs.append(path)


# -- bounds ----------------------------------------------------------------------

BOUNDS_COLUMNS = ("theorem", "k", "n", "eps", "p_ch", "lambda", "mu", "condition_ok",
                  "bound_bitmeters", "bound_joules")
THEOREMS = ("decoding", "encoding", "near_capacity")


def run_bounds(cfg: ExperimentConfig) -> RunResult:
    sec = cfg.section("bounds")
    theorems = sec.list("theorems", "decoding")
    for t in theorems:
        if t not in THEOREMS:
            raise ConfigError(f"[bounds] unknown theorem {t!r}; choose from {THEOREMS}")
    ks = sec.grid("k", kind=int)
    ps = sec.grid("p_ch")
    lams = sec.grid("lambda")
    mus = sec.grid("mu")
    rows = []
    for t in theorems:
        if t == "near_capacity":
            grid = itertools.product(ks, sec.grid("n"), [None], ps, lams, mus)
        else:
            grid = itertools.product(ks, [None], sec.grid("eps"), ps, lams, mus)
        for k, n, eps, p, lam, mu in grid:
            try:
                if t == "near_capacity":
                    rep = B.near_capacity_bm_lb(k, n, p, lam)
                elif t == "decoding":
                    rep = B.decoding_bm_lb(k, eps, p, lam)
                else:
                    rep = B.encoding_bm_lb(k, eps, p, lam)
            except ValueError as exc:
                raise ConfigError(f"[bounds] {t}: {exc}") from None
            rows.append({"theorem": t, "k": k, "n": n, "eps": eps, "p_ch": p, "lambda": lam,
                         "mu": mu, "condition_ok": rep.condition_ok,
                         "bound_bitmeters": rep.bound_value, "bound_joules": rep.joules(mu)})
    result = RunResult()
    _write(cfg.experiment.path("output"), BOUNDS_COLUMNS, rows, result)
    return result


# -- simulate --------------------------------------------------------------------

SIMULATE_COLUMNS = (("coder", "family", "k", "n", "placement", "lambda") + BLOCK_ERROR_COLUMNS
                    + ("measured_decoder_bitmeters", "measured_encoder_bitmeters", "condition_ok",
                       "bound_decoding_bitmeters", "bound_encoding_bitmeters", "bound_holds"))


def _coder_sections(cfg: ExperimentConfig) -> list[Section]:
    secs = cfg.sections_with_prefix("coder.")
    for p in cfg.experiment.list("coder_files"):
        path = Path(p)
        secs.append(load_coder_description(path if path.is_absolute() else cfg.path.parent / path))
    if not secs:
        raise ConfigError("simulate needs at least one [coder.NAME] section or coder_files entry")
    return secs


def _channel_p(sec: Section) -> float:
    if sec.has("p_ch"):
        p = sec.get("p_ch", kind=float)
    elif sec.has("p_t"):
        try:
            p = ChannelParams(sec.get("zeta", 1.0, float), sec.get("sigma2", 1.0, float),
                              sec.get("p_t", kind=float), sec.get("w", 1.0, float)).p_ch
        except ValueError as exc:
            raise ConfigError(f"[{sec.name}] {exc}") from None
    else:
        raise ConfigError(f"[{sec.name}] needs p_ch or P_T")
    if not 0 < p < 0.5:
        raise ConfigError(f"[{sec.name}] p_ch must lie in (0, 1/2), got {p}")
    return p


def _build_coder(sec: Section):
    extra = {key: sec.get(key, kind=int) for key in ("dv", "dc", "max_iter") if sec.has(key)}
    try:
        return make_coder(sec.get("family"), sec.get("k", kind=int) if sec.has("k") else None,
                          sec.get("n", kind=int) if sec.has("n") else None,
                          sec.get("seed", 0, int), **extra)
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}] {exc}") from None


def _bound_at(k: int, eps_upper: float, p: float, lam: float):
    if not 0 < eps_upper < 0.1:
        return False, None, None
    dec = B.decoding_bm_lb(k, eps_upper, p, lam)
    enc = B.encoding_bm_lb(k, eps_upper, p, lam)
    return dec.condition_ok, dec.bound_value, enc.bound_value


def run_simulate(cfg: ExperimentConfig) -> RunResult:
    exp = cfg.experiment
    trials = exp.get("trials", kind=int)
    if trials < 1:
        raise ConfigError("[experiment] trials must be positive")
    emit_dir = exp.path("emit_dir", required=False)
    result = RunResult()
    rows = []
    for sec in _coder_sections(cfg):
        name = sec.name.split(".", 1)[1]
        coder = _build_coder(sec)
        p = _channel_p(sec)
        lam = sec.get("lambda", exp.get("lambda", 1.0, float), float)
        budget = sec.get("budget", 20000, int)
        strategies = sec.list("placement", "row")
        for strategy in strategies:
            if strategy not in STRATEGIES:
                raise ConfigError(f"[{sec.name}] unknown placement {strategy!r}; choose from {STRATEGIES}")
            placed = PlacedCoder.build(coder, strategy, lam, sec.get("seed", 0, int), budget)
            est = estimate_block_error(coder, p, trials, cfg.seed, placed.decoder_circuit)
            enc_bm = placed.encoder_bitmeters()
            ok, dec_lb, enc_lb = _bound_at(coder.k, est.wilson[1], p, lam)
            holds = None
            if ok:
                holds = est.mean_decoder_bitmeters >= dec_lb and enc_bm >= enc_lb
                if not holds:
                    result.failures.append(f"{name}/{strategy}: measured bit-meters below lower bound")
            row = {"coder": name, "family": coder.family, "k": coder.k, "n": coder.n,
                   "placement": strategy, "lambda": lam, **est.row(),
                   "measured_decoder_bitmeters": est.mean_decoder_bitmeters,
                   "measured_encoder_bitmeters": enc_bm, "condition_ok": ok,
                   "bound_decoding_bitmeters": dec_lb, "bound_encoding_bitmeters": enc_lb,
                   "bound_holds": holds}
            rows.append(row)
            if emit_dir is not None:
                stem = emit_dir / f"{name}_{strategy}"
                for which, circ, trace in (
                        ("encoder", placed.encoder_circuit, coder.encoder_reference_trace()),
                        ("decoder", placed.decoder_circuit, coder.decoder_reference_trace())):
                    try:
                        stem.parent.mkdir(parents=True, exist_ok=True)
                        write_circuit(circ, f"{stem}_{which}.circuit")
                        write_trace(trace, f"{stem}_{which}.trace")
                    except OSError as exc:
                        raise ConfigError(f"cannot write {stem}: {exc}") from None
                    result.outputs += [Path(f"{stem}_{which}.circuit"), Path(f"{stem}_{which}.trace")]
    _write(exp.path("output"), SIMULATE_COLUMNS, rows, result)
    return result


# -- stencil ---------------------------------------------------------------------

STENCIL_COLUMNS = ("origin_x", "origin_y", "covered", "k", "eta", "a", "bound_k_times_(1-2eta)^2")
STENCIL_REGION_COLUMNS = ("a", "eta", "cell_col", "cell_row", "k_inside", "n_i", "member_nodes",
                          "region_bitmeters")


def run_stencil(cfg: ExperimentConfig) -> RunResult:
    sec = cfg.section("stencil")
    circuit = read_circuit(sec.path("circuit"))
    problems = validate_circuit(circuit)
    if problems:
        raise ConfigError(f"{sec.path('circuit')}: invalid circuit: {'; '.join(problems)}")
    trace = None
    trace_path = sec.path("trace", required=False)
    if trace_path is not None:
        trace = read_trace(trace_path)
        bad = validate_trace(circuit, trace)
        if bad:
            raise ConfigError(f"{trace_path}: {'; '.join(bad)}")
    role = sec.get("bitnode_role", "output")
    k = circuit.count(role)
    result = RunResult()
    rows, region_rows = [], []
    first = None
    for a, eta in itertools.product(sec.grid("a"), sec.grid("eta")):
        try:
            origin, covered = best_origin(circuit, a, eta, role)
            st = Stencil(a, eta, origin)
        except ValueError as exc:
            raise ConfigError(f"[stencil] {exc}") from None
        floor = k * (1 - 2 * eta) ** 2
        if covered < floor:
            result.failures.append(f"a={a} eta={eta}: coverage {covered} below {floor}")
        rows.append({"origin_x": st.origin[0], "origin_y": st.origin[1], "covered": covered,
                     "k": k, "eta": eta, "a": a, "bound_k_times_(1-2eta)^2": floor})
        part = partition(circuit, st, role)
        for cell in part.cells:
            region_rows.append({
                "a": a, "eta": eta, "cell_col": cell.index[0], "cell_row": cell.index[1],
                "k_inside": cell.k_inside, "n_i": cell.n_i,
                "member_nodes": len(cell.region.member_node_ids),
                "region_bitmeters": None if trace is None else bitmeters_in_region(circuit, trace, cell.region)})
        if first is None:
            first = st
    _write(cfg.experiment.path("output"), STENCIL_COLUMNS, rows, result)
    regions_out = sec.path("regions_output", required=False)
    if regions_out is not None:
        _write(regions_out, STENCIL_REGION_COLUMNS, region_rows, result)
    if trace is not None and sec.path("accounting_output", required=False) is not None:
        total = bitmeters_of_trace(circuit, trace)
        acc = [{"trace_id": trace.input_id or "trace", "total_bitmeters": total, "region_id": i,
                "region_bitmeters": r["region_bitmeters"]}
               for i, r in enumerate(r for r in region_rows if r["a"] == first.a and r["eta"] == first.eta)]
        _write(sec.path("accounting_output"), ACCOUNTING_COLUMNS, acc, result)
    svg_path = sec.path("svg", required=False)
    if svg_path is not None:
        _write_text(svg_path, render_stencil_svg(circuit, first), result)
    return result


# -- optimize --------------------------------------------------------------------

OPTIMIZE_COLUMNS = ("eps", "beta", "mu", "R", "W", "L_bits", "P_T_star", "energy_per_bit",
                    "golden_P_T", "rel_gap", "p_ch_at_optimum")


def _beta(sec: Section) -> tuple[float, float, float]:
    zeta = sec.get("zeta", 1.0, float)
    sigma2 = sec.get("sigma2", 1.0, float)
    beta = sec.get("beta", B.default_beta(zeta, sigma2), float)
    if not beta > 0:
        raise ConfigError(f"[{sec.name}] beta must be positive")
    return beta, zeta, sigma2


def _optimum(eps, beta, mu, R, W, sec_name: str):
    try:
        return B.optimal_transmit_power(eps, beta, mu, R, W)
    except ArithmeticError as exc:
        raise PropertyFailure(str(exc)) from None
    except ValueError as exc:
        raise ConfigError(f"[{sec_name}] {exc}") from None


def run_optimize(cfg: ExperimentConfig) -> RunResult:
    sec = cfg.section("optimize")
    beta, zeta, sigma2 = _beta(sec)
    rows = []
    for eps, mu, R, W in itertools.product(sec.grid("eps"), sec.grid("mu"), sec.grid("r"),
                                           sec.grid("w", "1")):
        opt = _optimum(eps, beta, mu, R, W, sec.name)
        rows.append({"eps": eps, "beta": beta, "mu": mu, "R": R, "W": W,
                     "L_bits": math.log2(1 / (10 * eps)), "P_T_star": opt.P_T,
                     "energy_per_bit": opt.value, "golden_P_T": opt.golden_P_T, "rel_gap": opt.rel_gap,
                     "p_ch_at_optimum": q_function(math.sqrt(zeta * opt.P_T / sigma2))})
    result = RunResult()
    _write(cfg.experiment.path("output"), OPTIMIZE_COLUMNS, rows, result)
    return result


# -- scaling ---------------------------------------------------------------------

SCALING_COLUMNS = ("fit", "x_variable", "points", "slope", "expected", "tolerance", "pass",
                   "intercept", "max_residual")


def _fit(name: str, x, y, x_label: str, expected: float, tol: float, result: RunResult) -> dict:
    try:
        f = B.fit_loglog_slope(x, y)
    except ValueError as exc:
        raise ConfigError(f"[scaling] {name}: {exc}") from None
    ok = abs(f.slope - expected) <= tol
    if not ok:
        result.failures.append(f"{name}: slope {f.slope:.6f} outside {expected} +- {tol}")
    return {"fit": name, "x_variable": x_label, "points": f.points, "slope": f.slope,
            "expected": expected, "tolerance": tol, "pass": ok, "intercept": f.intercept,
            "max_residual": f.max_residual}


def run_scaling(cfg: ExperimentConfig) -> RunResult:
    sec = cfg.section("scaling")
    tol = sec.get("tolerance", 0.02, float)
    k = sec.get("k", kind=int)
    p = sec.get("p_ch", kind=float)
    lam = sec.get("lambda", 1.0, float)
    fits = sec.list("fits", "decoding, energy, near_capacity")
    result = RunResult()
    rows = []
    if "decoding" in fits or "energy" in fits:
        eps = sec.grid("eps")
        L = [math.log2(1 / (10 * e)) for e in eps]
    if "decoding" in fits:
        ys = []
        for e in eps:
            try:
                rep = B.decoding_bm_lb(k, e, p, lam)
            except ValueError as exc:
                raise ConfigError(f"[scaling] {exc}") from None
            if not rep.condition_ok:
                raise ConfigError(f"[scaling] condition fails at eps={e}, p_ch={p}; no bound to fit")
            ys.append(rep.bound_value)
        rows.append(_fit("decoding", L, ys, "log2(1/(10 eps))", 0.5, tol, result))
    if "energy" in fits:
        beta, _, _ = _beta(sec)
        mu, R, W = sec.get("mu", kind=float), sec.get("r", kind=float), sec.get("w", 1.0, float)
        ys = [_optimum(e, beta, mu, R, W, sec.name).value for e in eps]
        rows.append(_fit("energy", L, ys, "log2(1/(10 eps))", 1 / 3, tol, result))
    if "near_capacity" in fits:
        ns = sec.grid("n")
        ys = []
        for n in ns:
            try:
                rep = B.near_capacity_bm_lb(k, n, p, lam)
            except ValueError as exc:
                raise ConfigError(f"[scaling] {exc}") from None
            if not rep.condition_ok:
                raise ConfigError(f"[scaling] condition fails at n={n}, p_ch={p}; no bound to fit")
            ys.append(rep.bound_value)
        rows.append(_fit("near_capacity", [math.log2(n) for n in ns], ys, "log2 n", 0.5, tol, result))
    unknown = set(fits) - {"decoding", "energy", "near_capacity"}
    if unknown:
        raise ConfigError(f"[scaling] unknown fits {sorted(unknown)}")
    _write(cfg.experiment.path("output"), SCALING_COLUMNS, rows, result)
    return result


# -- entry point -----------------------------------------------------------------

COMMANDS = {"bounds": run_bounds, "simulate": run_simulate, "stencil": run_stencil,
            "optimize": run_optimize, "scaling": run_scaling}


def run(command: str, config_path: str | Path) -> RunResult:
    return COMMANDS[command](load_config(config_path))


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="infofriction", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("config", help="INI experiment config")
    args = ap.parse_args(argv)
    try:
        result = run(args.command, args.config)
    except (ConfigError, ParseError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PropertyFailure as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    for path in result.outputs:
        print(f"wrote {path}")
    if result.failures:
        for f in result.failures:
            print(f"property failure: {f}", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
