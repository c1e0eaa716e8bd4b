"""Dispatch parsed scenarios to the engines and tabulate the results."""
from __future__ import annotations

import numpy as np

from . import __version__, policy
from . import freeparticle as fp
from . import meter as mt
from .config import ScenarioConfig
from .errors import OrthogonalPostselection, ScenarioError, WeakTensionError
from .hilbert import DensityOperator, evolve
from .output import OutputTable
from .tension import logical_tension, orthogonal_pair_tension_difference, qubit_tension_consistency
from .weak import (
    action_profile,
    conditional,
    max_overlap_probability,
    mixed_response_bound_check,
    reconstruct_wavefunction,
    reconstructed_state,
    weak_value,
)


def run(config: ScenarioConfig) -> OutputTable:
    try:
        table = _RUNNERS[config.kind](config)
    except WeakTensionError as exc:
        raise ScenarioError(config.name, exc) from exc
    table.metadata.update(
        scenario=config.name,
        kind=config.kind,
        config_hash=config.config_hash,
        numeric_policy=policy.current().as_dict(),
        tool_version=__version__,
    )
    return table


def _run_triple(cfg: ScenarioConfig) -> OutputTable:
    i, f, obs = cfg.states["i"], cfg.states["f"], cfg.observable
    dist = conditional(i, f, obs)
    profile = action_profile(dist)
    rows = []
    meta = {}
    for m, state in enumerate(obs.eigenbasis):
        p = dist.values[m]
        report = logical_tension(i, state, f)
        rows.append([m, obs.eigenvalues[m], p.real, p.imag, abs(p), profile.actions[m],
                     bool(profile.defined_mask[m]), report.tension, report.magnitude_class.value,
                     report.degenerate])
        if obs.dim == 2 and not report.degenerate:
            try:
                record = qubit_tension_consistency(i, state, f)
                meta[f"half_area_{m}"] = record.half_area
                meta[f"tension_area_match_{m}"] = record.match
            except WeakTensionError:
                meta[f"half_area_{m}"] = None
    wv = weak_value(i, f, obs)
    meta.update(
        weak_value_re=wv.real,
        weak_value_im=wv.imag,
        base_probability=dist.base_probability,
        max_overlap_probability=max_overlap_probability(dist),
        sum_re=dist.total().real,
        sum_im=dist.total().imag,
    )
    columns = ["m", "eigenvalue", "re_p", "im_p", "abs_p", "action", "action_defined",
               "tension", "class", "degenerate"]
    return OutputTable(columns, rows, meta)


def _run_response(cfg: ScenarioConfig) -> OutputTable:
    initial = cfg.density if cfg.density is not None else cfg.states["i"]
    curve = mixed_response_bound_check(initial, cfg.states["f"], cfg.observable, cfg.parameters["phis"])
    rows = [[phi, pred, direct, bool(ok)]
            for phi, pred, direct, ok in zip(curve.phis, curve.predicted, curve.direct, curve.satisfied)]
    meta = {
        "preparation": "mixed" if isinstance(initial, DensityOperator) else "pure",
        "max_abs_deviation": curve.max_deviation,
        "all_satisfied": bool(np.all(curve.satisfied)),
    }
    return OutputTable(["phi", "predicted", "direct", "satisfied"], rows, meta)


def _run_tension_sweep(cfg: ScenarioConfig) -> OutputTable:
    i, f, obs = cfg.states["i"], cfg.states["f"], cfg.observable
    m0, m1 = obs.eigenbasis
    rows = []
    for phi in cfg.parameters["phis"]:
        rotated = evolve(i, obs, phi)
        s0 = logical_tension(rotated, m0, f)
        s1 = logical_tension(rotated, m1, f)
        try:
            p = conditional(rotated, f, obs).values
        except OrthogonalPostselection:
            p = np.full(2, np.nan)
        rows.append([phi, s0.tension, s1.tension, orthogonal_pair_tension_difference(rotated, f, obs),
                     p[0].real, p[1].real, s0.magnitude_class.value, s1.magnitude_class.value,
                     s0.degenerate or s1.degenerate])
    columns = ["phi", "tension_0", "tension_1", "difference", "re_p0", "re_p1", "class_0", "class_1",
               "degenerate"]
    return OutputTable(columns, rows, {})


def _run_cv(cfg: ScenarioConfig) -> OutputTable:
    prm = cfg.parameters
    s = fp.build_scenario(prm["mass"], prm["tau"], prm["hbar"], prm["x_max"], prm["n"])
    density = fp.weak_density(s, s.x)
    curve = fp.action_curve(s)
    dp = fp.momentum_difference(s, s.x)
    rows = [[x, p.real, p.imag, abs(p), sw, su, d]
            for x, p, sw, su, d in zip(s.x, density, curve.wrapped, curve.unwrapped, dp)]
    grid = fp.grid_weak_density(s)
    meta = {
        "dx": s.dx,
        "chirp_rate": s.chirp_rate,
        "grid_ratio_max_error": float(np.max(np.abs(grid / density - 1))),
        "max_momentum_residual": float(np.max(np.abs(fp.momentum_difference_numeric(s, curve) - dp))),
    }
    columns = ["x", "re_p", "im_p", "abs_p", "S_wrapped", "S_unwrapped", "dP"]
    return OutputTable(columns, rows, meta)


def _run_montecarlo(cfg: ScenarioConfig) -> OutputTable:
    i, f, obs = cfg.states["i"], cfg.states["f"], cfg.observable
    prm = cfg.parameters
    meter = mt.MeterModel(tuple(str(k) for k in range(len(prm["w"]))), prm["w"], prm["eps"])
    oracle = weak_value(i, f, obs)
    rows = []
    for rep in range(prm["replications"]):
        seed = prm["seed"] + rep
        counts = mt.simulate_trials(i, f, obs, meter, prm["n"], seed)
        real = mt.estimate_real_weak_value(counts, meter)
        imag = mt.estimate_imag_weak_value(i, f, obs, prm["delta_phi"], prm["n"], seed)
        for quantity, est, ref in (("re_weak_value", real, oracle.real), ("im_weak_value", imag, oracle.imag)):
            rows.append([cfg.name, rep, quantity, est.estimate, est.std_error, ref, est.z_score(ref),
                         est.n_total, est.n_postselected])
    within = sum(1 for row in rows if abs(row[6]) <= 3)
    columns = ["scenario", "replication", "quantity", "estimate", "std_error", "oracle", "z_score",
               "n_total", "n_postselected"]
    return OutputTable(columns, rows, {"within_3_sigma": within, "estimates": len(rows)})


def _run_reconstruct(cfg: ScenarioConfig) -> OutputTable:
    i, obs = cfg.states["i"], cfg.observable
    raw = reconstruct_wavefunction(i, obs)
    state = reconstructed_state(raw, obs)
    true = obs.vectors.conj().T @ i.amplitudes
    aligned = obs.vectors.conj().T @ state.amplitudes
    overlap = np.vdot(aligned, true)
    if abs(overlap) > 0:
        aligned = aligned * overlap / abs(overlap)
    rows = [[m, raw[m].real, raw[m].imag, aligned[m].real, aligned[m].imag, true[m].real, true[m].imag]
            for m in range(obs.dim)]
    fidelity = float(abs(np.vdot(state.amplitudes, i.amplitudes)) ** 2)
    columns = ["m", "re_weak", "im_weak", "re_reconstructed", "im_reconstructed", "re_true", "im_true"]
    return OutputTable(columns, rows, {"fidelity": fidelity})


_RUNNERS = {
    "triple": _run_triple,
    "response_sweep": _run_response,
    "tension_sweep": _run_tension_sweep,
    "cv": _run_cv,
    "montecarlo": _run_montecarlo,
    "reconstruct": _run_reconstruct,
}
