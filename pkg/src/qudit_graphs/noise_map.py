"""Chip-level noise study of physical (L3) and logical (crazy6) MBQC.

One experiment: the fusion stage prepares GHZ8 (with distinguishability
epsilon), then each photon's measurement mesh applies the local
graph-preparation unitary followed by the rotation into its measurement
basis.  Every photon has a six-MZI triangular mesh, two phase shifters per
MZI, so 48 shifters in total.  Runs are post-selected on the projection and
MBQC outcomes; the output fidelity is read from the two outcomes of the
output photon that distinguish the ideal output from its orthogonal state.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core.states import apply_unitary
from .device import (
    NoiseConfig, compile_measurement_mesh, default_calibrations, fusion_postselect, ghz8_config,
    mesh_from_shifter_phases, mesh_shifter_phases, mesh_to_unitary, run_noisy_trials,
)
from .mbqc import GATES, INPUT_STATES, RX_ANGLES, basis_from_vector, logical_basis, xy_basis
from .recipes import named_recipes, photon_program

GATE_SET = ("I", "X", "RX(pi/2)", "RX(-pi/2)")
INPUT_SET = ("0", "1", "+", "-", "+i", "-i")
SIGMA_SWEEP = tuple(round(0.01 * k, 2) for k in range(11))


def _pair_basis(b_first, b_second):
    return np.kron(b_first, b_second)


@dataclass
class ChipExperiment:
    """Per-photon mesh unitaries plus the detector pattern to post-select on.

    ``keep[p]`` is the accepted output port of photon p, except for the
    output photon where ``good``/``bad`` are the two ports compared.
    """

    meshes: list
    keep: dict
    out_photon: int
    good: int
    bad: int


def _z_port(outcomes):
    return 2 * outcomes[0] + outcomes[1]


def build_experiment(encoding, gate, psi_in):
    """Compile the four photon meshes for one gate and one input state."""
    alpha = RX_ANGLES[gate]
    psi_out = GATES[gate] @ psi_in
    if encoding == "physical":
        rec = named_recipes()["L3"]
        us, proj = photon_program(rec)
        # L3 order (4, 3, 1): chip 4 input, chip 3 angle, chip 1 output
        b_in = basis_from_vector(np.conj(psi_in))
        bases = [
            _pair_basis(basis_from_vector(psi_out), np.eye(2)),     # A: chip 1 output, chip 2 Z
            _pair_basis(xy_basis(alpha), b_in),                      # B: chip 3 angle, chip 4 input
            np.eye(4), np.eye(4),                                    # C, D: Z projections
        ]
        keep = {1: 0, 2: _z_port((proj[5], proj[6])), 3: _z_port((proj[7], proj[8]))}
        good, bad = 2 * 0 + proj[2], 2 * 1 + proj[2]
        out_photon = 0
    elif encoding == "logical":
        rec = named_recipes()["crazy6"]
        us, proj = photon_program(rec)
        out_basis = logical_basis("PROJ_L", psi_out)
        bases = [
            logical_basis("PROJ_L", np.conj(psi_in)),   # A: input column
            logical_basis("XY_L", alpha),               # B: middle column
            out_basis,                                  # C: output column
            np.eye(4),                                  # D: Z projections
        ]
        keep = {0: 0, 1: 0, 3: _z_port((proj[7], proj[8]))}
        good, bad = 0, 1
        out_photon = 2
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    meshes = [compile_measurement_mesh(np.asarray(b).conj().T @ u) for b, u in zip(bases, us)]
    return ChipExperiment(meshes, keep, out_photon, good, bad)


@lru_cache(maxsize=8)
def _seed_state(epsilon):
    state, _ = fusion_postselect(ghz8_config(), epsilon)
    return state


def run_experiment(exp: ChipExperiment, epsilon=0.0, shifter_phases=None):
    """Post-selected output fidelity, optionally with perturbed shifter phases."""
    state = _seed_state(float(epsilon))
    us = []
    for p, mesh in enumerate(exp.meshes):
        if shifter_phases is not None:
            mesh = mesh_from_shifter_phases(mesh, shifter_phases[12 * p: 12 * (p + 1)])
        us.append(mesh_to_unitary(mesh))
    if state.ndim == 1:
        # the seed is sparse (GHZ), so sum product states over its support
        amp = 0
        for idx in np.flatnonzero(np.abs(state) > 1e-14):
            i, j, k, l = np.unravel_index(idx, (4, 4, 4, 4))
            amp = amp + state[idx] * np.einsum("a,b,c,d->abcd", us[0][:, i], us[1][:, j], us[2][:, k], us[3][:, l])
        probs = np.abs(amp) ** 2
    else:
        for p, u in enumerate(us):
            state = apply_unitary(state, u, [2 * p, 2 * p + 1])
        probs = np.real(np.diag(state)).reshape(4, 4, 4, 4)
    idx = [exp.keep.get(p, slice(None)) for p in range(4)]
    sub = probs[tuple(idx)]
    good, bad = float(sub[exp.good]), float(sub[exp.bad])
    if good + bad < 1e-14:
        raise ValueError("no post-selected events")
    return good / (good + bad)


def ideal_phases(exp: ChipExperiment):
    return np.concatenate([mesh_shifter_phases(m) for m in exp.meshes])


def experiment_set(encoding):
    return [build_experiment(encoding, g, INPUT_STATES[s]) for g in GATE_SET for s in INPUT_SET]


def average_infidelity(encoding, noise: NoiseConfig, cals=None):
    """Mean infidelity over the gate/input set, each averaged over noisy trials.

    Every trial draws one voltage set per configuration, so a trial value is
    the mean infidelity across all configurations under independent noise.
    """
    exps = experiment_set(encoding)
    cals = cals or default_calibrations(48)
    phases = [ideal_phases(e) for e in exps]

    seeds = np.random.SeedSequence(noise.seed).spawn(len(exps))
    per_config = []
    for e, ph, ss in zip(exps, phases, seeds):
        sub = NoiseConfig(noise.sigma_v, noise.epsilon, noise.trials, int(ss.generate_state(1)[0]))
        if noise.sigma_v == 0:
            f = run_experiment(e, noise.epsilon)
            per_config.append(np.full(noise.trials, 1 - f))
            continue
        res = run_noisy_trials(lambda tp, nz, e=e: 1 - run_experiment(e, nz.epsilon, tp), sub, ph, cals)
        per_config.append(res["values"])
    values = np.mean(np.vstack(per_config), axis=0)
    n = len(values)
    half = float(1.96 * np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return {"encoding": encoding, "sigma_v": noise.sigma_v, "epsilon": noise.epsilon,
            "mean": float(values.mean()), "ci95": half, "trials": n}


def noise_map(sigmas=SIGMA_SWEEP, epsilons=(0.0, 0.05, 0.1, 0.15, 0.2), trials=500, seed=42):
    """Infidelity vs voltage noise (epsilon = 0) and vs distinguishability (sigma = 0)."""
    rows = []
    for s in sigmas:
        for enc in ("physical", "logical"):
            rows.append(("voltage", *_row(average_infidelity(enc, NoiseConfig(s, 0.0, trials, seed)))))
    for eps in epsilons:
        for enc in ("physical", "logical"):
            rows.append(("distinguishability", *_row(average_infidelity(enc, NoiseConfig(0.0, eps, trials, seed)))))
    return rows


def _row(r):
    level = r["sigma_v"] if r["epsilon"] == 0 else r["epsilon"]
    return r["encoding"], float(level), r["mean"], r["ci95"]
