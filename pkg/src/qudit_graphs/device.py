"""Software model of the four-photon qudit chip.

Photons A and B come from source module 1, C and D from module 2.  Every
photon is a qudit in d spatial modes (d = 4 gives two qubits per photon via
``|m> -> |m_1 m_0>`` in binary).  The entangling stage has one MZI per mode
index between B and C and one between A and D; post-selection keeps events
with one photon per qudit.

MZI convention (inputs ordered (B_j, C_j) or (A_j, D_j))::

    T(phi) = 1/2 [[e^{i phi} - 1, i (e^{i phi} + 1)],
                  [i (e^{i phi} + 1), 1 - e^{i phi}]]

so phase 0 swaps the two photons' mode j (up to i) and phase pi leaves
them in place (up to -1 / +1).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, curve_fit
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core.fock import run_postselected

D = 4
SWAP_PHASE = 0.0
BAR_PHASE = np.pi


# qudit encoding -----------------------------------------------------------------

def qudit_to_qubits(value, d=D):
    k = int(np.log2(d))
    if not 0 <= value < d:
        raise ValueError(f"qudit value {value} out of range for d={d}")
    return tuple(int(b) for b in format(value, f"0{k}b"))


def qubits_to_qudit(bits):
    return int("".join(str(int(b)) for b in bits), 2)


def build_qudit_bell(pumps, d=D):
    """Two-photon state sum_i a_i |i i> from the pumped sources of one module.

    ``pumps`` maps source index (0..d-1) to a complex amplitude; a real
    number is read as a phase.  Returns a vector over two qudits (d^2 entries,
    equivalently 2 log2 d qubits).
    """
    if not pumps:
        raise ValueError("at least one source must be pumped")
    psi = np.zeros(d * d, dtype=complex)
    for i, a in pumps.items():
        if not 0 <= i < d:
            raise ValueError(f"source {i} not in module of dimension {d}")
        psi[i * d + i] = np.exp(1j * a) if np.isrealobj(a) else a
    return psi / np.linalg.norm(psi)


def mzi_transfer(phi):
    e = np.exp(1j * phi)
    return 0.5 * np.array([[e - 1, 1j * (e + 1)], [1j * (e + 1), 1 - e]])


@dataclass
class ChipConfig:
    """Pump amplitudes per module, entangling-gate phases and measurement unitaries.

    ``bc_phases[j]`` / ``ad_phases[j]`` are the MZI phases on mode j of the
    B-C and A-D gates.  The named phases EP1..EP4 set blocks of these: EP1
    covers the upper half of the B-C modes and EP2 the lower half, EP3 and
    EP4 do the same for A-D.
    """

    module1: dict
    module2: dict
    bc_phases: list = field(default_factory=lambda: [BAR_PHASE] * D)
    ad_phases: list = field(default_factory=lambda: [BAR_PHASE] * D)
    measurements: list | None = None
    d: int = D

    @classmethod
    def from_named_phases(cls, module1, module2, ep1, ep2, ep3=BAR_PHASE, ep4=BAR_PHASE, d=D):
        h = d // 2
        return cls(module1, module2, [ep2] * h + [ep1] * h, [ep4] * h + [ep3] * h, d=d)

    def __post_init__(self):
        for name in ("bc_phases", "ad_phases"):
            if len(getattr(self, name)) != self.d:
                raise ValueError(f"{name} needs one phase per mode")
        if self.measurements is not None:
            for u in self.measurements:
                u = np.asarray(u)
                if not np.allclose(u.conj().T @ u, np.eye(self.d), atol=1e-10):
                    raise ValueError("measurement unitaries must be unitary")


def ghz8_config():
    """Both modules pump S1 and S4; EP1 swaps, EP2 is the identity."""
    return ChipConfig.from_named_phases({0: 0.0, 3: 0.0}, {0: 0.0, 3: 0.0}, SWAP_PHASE, BAR_PHASE)


def ghz_config(d):
    """Two-dimensional analogue on ``d`` modes: pump the first and last source."""
    return ChipConfig.from_named_phases({0: 0.0, d - 1: 0.0}, {0: 0.0, d - 1: 0.0},
                                        SWAP_PHASE, BAR_PHASE, d=d) if d > 2 else ChipConfig(
        {0: 0.0, 1: 0.0}, {0: 0.0, 1: 0.0}, [BAR_PHASE, SWAP_PHASE], [BAR_PHASE, BAR_PHASE], d=2)


FOUR_P_FOUR_D_PUMPS = (
    {0: 0.0, 1: 0.0, 2: -np.pi / 4, 3: np.pi / 2},
    {0: 0.0, 1: np.pi / 2, 2: 0.0, 3: -np.pi / 4},
)


def four_p_four_d_config():
    """All sources pumped; B-C swaps modes 1 and 2 only."""
    m1, m2 = FOUR_P_FOUR_D_PUMPS
    bc = [BAR_PHASE, SWAP_PHASE, SWAP_PHASE, BAR_PHASE]
    return ChipConfig(dict(m1), dict(m2), bc, [BAR_PHASE] * 4)


# fusion ------------------------------------------------------------------------

def _gate_branches(b, c, phases):
    """(direct, exchange) amplitudes and output modes for photons in modes b, c."""
    tb, tc = mzi_transfer(phases[b]), mzi_transfer(phases[c])
    direct = ((b, c), tb[0, 0] * tc[1, 1])
    exchange = ((c, b), tb[1, 0] * tc[0, 1])
    return direct, exchange


def fusion_branches(config: ChipConfig):
    """Unnormalised post-selected output per label branch.

    Photons A and B carry one internal label and C and D another, so the
    four (B-C, A-D) x (direct, exchange) branches end in orthogonal label
    states.  Returns a (4, d^4) array of qudit-ordered (A, B, C, D) vectors.
    """
    d = config.d
    m1 = build_qudit_bell(config.module1, d)
    m2 = build_qudit_bell(config.module2, d)
    out = np.zeros((2, 2, d**4), dtype=complex)
    for a in range(d):
        for c in range(d):
            amp = m1[a * d + a] * m2[c * d + c]
            if amp == 0:
                continue
            # photon A in mode a with D in mode c, B in mode a with C in mode c
            for i, ((xb, xc), tbc) in enumerate(_gate_branches(a, c, config.bc_phases)):
                for j, ((xa, xd), tad) in enumerate(_gate_branches(a, c, config.ad_phases)):
                    w = amp * tbc * tad
                    if w == 0:
                        continue
                    out[i, j, ((xa * d + xb) * d + xc) * d + xd] += w
    return out.reshape(4, -1)


def fusion_postselect(config: ChipConfig, epsilon=0.0):
    """Post-selected four-qudit state and success probability.

    With ``epsilon = 0`` returns a normalised vector; otherwise the density
    operator (1 - eps) |psi><psi| + eps sum_b |psi_b><psi_b| (normalised),
    where the second term has no interference between differently labelled
    photons.
    """
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    br = fusion_branches(config)
    psi = br.sum(axis=0)
    if epsilon == 0:
        p = float(np.vdot(psi, psi).real)
        if p < 1e-12:
            raise ValueError("post-selected mass is zero for this configuration")
        return psi / np.sqrt(p), p
    rho = (1 - epsilon) * np.outer(psi, psi.conj()) + epsilon * np.einsum("bi,bj->ij", br, br.conj())
    p = float(np.trace(rho).real)
    if p < 1e-12:
        raise ValueError("post-selected mass is zero for this configuration")
    return rho / p, p


def fusion_network(config: ChipConfig):
    """Mode unitary for the Fock oracle: modes A0..Ad-1, B.., C.., D.."""
    d = config.d
    u = np.eye(4 * d, dtype=complex)
    for j in range(d):
        for (p, q), phases in (((d + j, 2 * d + j), config.bc_phases), ((j, 3 * d + j), config.ad_phases)):
            t = mzi_transfer(phases[j])
            u[np.ix_([p, q], [p, q])] = t
    return u


def fusion_oracle(config: ChipConfig, epsilon=None):
    """Same post-selection through the permanent-based Fock simulator."""
    d = config.d
    m1 = build_qudit_bell(config.module1, d)
    m2 = build_qudit_bell(config.module2, d)
    terms = []
    for a in range(d):
        for c in range(d):
            amp = m1[a * d + a] * m2[c * d + c]
            if amp != 0:
                terms.append((amp, (a, d + a, 2 * d + c, 3 * d + c)))
    groups = [list(range(k * d, (k + 1) * d)) for k in range(4)]
    labels = (0, 0, 1, 1)
    return run_postselected(fusion_network(config), terms, groups, labels=labels,
                            epsilon=0.0 if epsilon is None else epsilon)


# measurement meshes ----------------------------------------------------------

def mesh_mzi(theta, phi):
    """Tunable beamsplitter [[e^{i phi} cos t, -sin t], [e^{i phi} sin t, cos t]]."""
    return np.array([[np.exp(1j * phi) * np.cos(theta), -np.sin(theta)],
                     [np.exp(1j * phi) * np.sin(theta), np.cos(theta)]])


@dataclass
class MeshPhases:
    """Triangular mesh: MZIs as (mode j, theta, phi) on modes (j, j+1), plus output phases."""

    d: int
    mzis: list
    output: np.ndarray


def compile_measurement_mesh(target):
    """Reck-style triangular decomposition of a d x d unitary."""
    u = np.array(target, dtype=complex)
    d = u.shape[0]
    if u.shape != (d, d) or not np.allclose(u.conj().T @ u, np.eye(d), atol=1e-10):
        raise ValueError("target must be unitary")
    mzis = []
    for i in range(d - 1, 0, -1):
        for j in range(i):
            a, b = u[i, j], u[i, j + 1]
            if abs(a) < 1e-15:
                theta, phi = 0.0, 0.0
            elif abs(b) < 1e-15:
                theta, phi = np.pi / 2, 0.0
            else:
                theta = float(np.arctan2(abs(a), abs(b)))
                phi = float(np.angle(a) - np.angle(b))
            t = mesh_mzi(theta, phi)
            u[:, [j, j + 1]] = u[:, [j, j + 1]] @ t.conj().T
            mzis.append((j, theta, phi))
    return MeshPhases(d, mzis, np.angle(np.diag(u)))


def mesh_to_unitary(mesh: MeshPhases):
    u = np.eye(mesh.d, dtype=complex)
    for j, theta, phi in mesh.mzis:
        u[j:j + 2] = mesh_mzi(theta, phi) @ u[j:j + 2]
    return np.exp(1j * np.asarray(mesh.output))[:, None] * u


def measurement_unitary(basis):
    """Mesh unitary routing basis column k to output port k."""
    b = np.asarray(basis, dtype=complex)
    return b.conj().T


def mesh_shifter_phases(mesh: MeshPhases):
    """Physical phases per MZI: internal 2 theta, then external phi (mod 2 pi)."""
    out = []
    for _, theta, phi in mesh.mzis:
        out += [(2 * theta) % (2 * np.pi), phi % (2 * np.pi)]
    return np.asarray(out)


def mesh_from_shifter_phases(template: MeshPhases, phases):
    phases = np.asarray(phases)
    mzis = [(j, phases[2 * k] / 2, phases[2 * k + 1]) for k, (j, _, _) in enumerate(template.mzis)]
    return MeshPhases(template.d, mzis, template.output)


# phase shifter calibration ---------------------------------------------------

@dataclass(frozen=True)
class PhaseShifterCal:
    rho0: float
    rho1: float
    rho2: float
    omega: float
    phi0: float
    v_max: float = 6.0

    def power(self, v):
        v = np.asarray(v, dtype=float)
        return self.rho0 * v + self.rho1 * v**2 + self.rho2 * v**3

    def current(self, v):
        v = np.asarray(v, dtype=float)
        return self.rho0 + self.rho1 * v + self.rho2 * v**2

    def phase_range(self):
        return float(phase_from_voltage(self, 0.0)), float(phase_from_voltage(self, self.v_max))


def phase_from_voltage(cal: PhaseShifterCal, v):
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or np.any(v > cal.v_max):
        raise ValueError(f"voltage outside [0, {cal.v_max}] V")
    out = -cal.phi0 + cal.omega * cal.power(v)
    return float(out) if out.ndim == 0 else out


def voltage_from_phase(cal: PhaseShifterCal, phi, wrap=True):
    """Smallest voltage in [0, v_max] giving ``phi`` (modulo 2 pi if ``wrap``)."""
    lo, hi = cal.phase_range()
    if hi - lo < 2 * np.pi - 1e-12:
        warnings.warn("phase shifter cannot reach a full 2 pi range", RuntimeWarning)
    target = phi
    if wrap:
        target = lo + (phi - lo) % (2 * np.pi)
    if not lo - 1e-12 <= target <= hi + 1e-12:
        raise ValueError(f"phase {phi:.6g} not reachable in [0, {cal.v_max}] V")
    if abs(target - lo) < 1e-15:
        return 0.0
    f = lambda v: phase_from_voltage(cal, v) - target
    return float(brentq(f, 0.0, cal.v_max, xtol=1e-14, rtol=1e-15))


def default_calibrations(count=48, seed=2021):
    """Synthetic heaters near 500 Ohm with mildly non-Ohmic I-V curves."""
    rng = np.random.default_rng(seed)
    cals = []
    for _ in range(count):
        r = 500 * (1 + 0.05 * rng.standard_normal())
        cals.append(PhaseShifterCal(
            rho0=float(1e-5 * rng.random()),
            rho1=float(1 / r),
            rho2=float(-2e-5 * (1 + 0.1 * rng.standard_normal())),
            omega=float(2 * np.pi / 0.045 * (1 + 0.05 * rng.standard_normal())),
            phi0=float(rng.uniform(0, 2 * np.pi)),
        ))
    return cals


def fringe_model(p, a, b, omega, phi0):
    return (b + a) - a * np.cos(omega * p - phi0)


class PhaseShifterCalibrator(BaseEstimator):
    """Fit the I-V curve and the optical fringe of one phase shifter.

    ``fit(V, power, iv=(V, I))``: the I-V samples give rho_0..rho_2, the
    fringe against electrical power P = V I(V) gives A, B, omega and phi_0.
    ``predict(V)`` returns the phase.
    """

    def __init__(self, n_grid=2000, min_points=8):
        self.n_grid = n_grid
        self.min_points = min_points

    def fit(self, X, y, iv=None):
        v = np.asarray(X, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if len(v) < self.min_points:
            raise ValueError(f"need at least {self.min_points} fringe points")
        if iv is None:
            raise ValueError("current-voltage samples are required")
        vi, ii = (np.asarray(a, dtype=float) for a in iv)
        self.rho_ = np.polynomial.polynomial.polyfit(vi, ii, 2)
        p = v * np.polynomial.polynomial.polyval(v, self.rho_)
        span = p.max() - p.min()
        if span <= 0:
            raise ValueError("fringe samples span no power range")
        # coarse scan over omega, linear in the other parameters
        grid = np.linspace(2 * np.pi / span, 40 * np.pi / span, self.n_grid)
        best = None
        for w in grid:
            m = np.column_stack([np.ones_like(p), np.cos(w * p), np.sin(w * p)])
            coef, res, *_ = np.linalg.lstsq(m, y, rcond=None)
            r = float(np.sum((m @ coef - y) ** 2))
            if best is None or r < best[0]:
                best = (r, w, coef)
        _, w, (c0, cc, cs) = best
        a0 = np.hypot(cc, cs)
        phi = np.arctan2(-cs, -cc)
        try:
            popt, _ = curve_fit(fringe_model, p, y, p0=[a0, c0 - a0, w, phi], maxfev=20000,
                                xtol=1e-15, ftol=1e-15, gtol=1e-15)
        except RuntimeError as exc:
            raise RuntimeError("fringe fit did not converge") from exc
        a, b, omega, phi0 = popt
        if a < 0:
            a, phi0 = -a, phi0 + np.pi
            b = b - 2 * a
        if omega * span < 2 * np.pi * (1 - 1e-6):
            raise ValueError("fringe samples span less than one period")
        self.amplitude_, self.offset_ = float(a), float(b)
        self.omega_, self.phi0_ = float(omega), float(phi0 % (2 * np.pi))
        return self

    @property
    def visibility_(self):
        check_is_fitted(self, "omega_")
        return self.amplitude_ / (self.amplitude_ + self.offset_)

    def calibration(self, v_max=6.0):
        check_is_fitted(self, "omega_")
        r0, r1, r2 = (float(c) for c in self.rho_)
        return PhaseShifterCal(r0, r1, r2, self.omega_, self.phi0_, v_max)

    def predict(self, X):
        return phase_from_voltage(self.calibration(), np.asarray(X, dtype=float))


def fit_calibration(fringe, iv, v_max=6.0):
    """Fit ``(V, optical power)`` fringe samples and ``(V, I)`` samples."""
    v, power = fringe
    return PhaseShifterCalibrator().fit(v, power, iv=iv).calibration(v_max)


def synthetic_fringe(cal: PhaseShifterCal, v, visibility=0.99, peak=1.0):
    """Optical power P_opt(V) for a calibrated shifter inside a test MZI."""
    a = peak * visibility / (1 + visibility)
    b = a * (1 - visibility) / visibility
    return fringe_model(cal.power(v), a, b, cal.omega, cal.phi0)


# noise Monte Carlo ---------------------------------------------------------------

@dataclass
class NoiseConfig:
    sigma_v: float = 0.0
    epsilon: float = 0.0
    trials: int = 500
    seed: int = 42

    def __post_init__(self):
        if self.sigma_v < 0:
            raise ValueError("sigma_v must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")


@lru_cache(maxsize=65536)
def _cached_voltage(cal, phi):
    return voltage_from_phase(cal, phi)


def ideal_voltages(phases, cals):
    return np.array([_cached_voltage(cal, float(phi)) for phi, cal in zip(phases, cals)])


def noisy_phases(phases, cals, sigma_v, rng, volts=None):
    """Map ideal phases to voltages, add Gaussian noise, map back.

    ``volts`` caches the ideal voltages across trials.
    """
    phases = np.asarray(phases, dtype=float)
    v = ideal_voltages(phases, cals) if volts is None else volts
    if sigma_v == 0:
        return phases.copy()
    vmax = np.array([c.v_max for c in cals[:len(v)]])
    v_noisy = np.clip(v + sigma_v * rng.standard_normal(len(v)), 0.0, vmax)
    omega = np.array([c.omega for c in cals[:len(v)]])
    r = np.array([(c.rho0, c.rho1, c.rho2) for c in cals[:len(v)]])
    power = lambda x: r[:, 0] * x + r[:, 1] * x**2 + r[:, 2] * x**3
    return phases + omega * (power(v_noisy) - power(v))


def run_noisy_trials(experiment, noise: NoiseConfig, phases=None, cals=None):
    """Average ``experiment`` over independent noisy trials.

    ``experiment(trial_phases, noise)`` returns a scalar (for example a
    fidelity); ``trial_phases`` is None without a phase list.  Each trial uses
    its own child seed, so results do not depend on execution order.
    Failures (zero post-selected mass) are counted, not raised.
    """
    seeds = np.random.SeedSequence(noise.seed).spawn(noise.trials)
    if phases is not None and cals is None:
        cals = default_calibrations(len(phases))
    volts = ideal_voltages(phases, cals) if phases is not None else None
    values, failures = [], 0
    for ss in seeds:
        rng = np.random.default_rng(ss)
        trial = None
        if phases is not None:
            trial = noisy_phases(phases, cals, noise.sigma_v, rng, volts)
        try:
            values.append(float(experiment(trial, noise)))
        except (ValueError, ZeroDivisionError):
            failures += 1
    values = np.asarray(values)
    n = len(values)
    mean = float(np.mean(values)) if n else float("nan")
    half = float(1.96 * np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return {"mean": mean, "ci95": half, "trials": noise.trials, "failures": failures,
            "values": values}
