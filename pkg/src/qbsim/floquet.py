"""Stroboscopic analysis: quasienergies, bound states, asymptotic energy.

The one-period operator U_T is unitary, so its eigendecomposition is taken
through a complex Schur factorization (which for a normal matrix is the
eigendecomposition with rigorously orthonormal vectors, also inside
quasi-degenerate clusters of the folded bath band).  Quasienergies are
folded into the zone (-omega_T/2, omega_T/2].

At zero detuning the symmetric/antisymmetric sectors decouple and
``resonant_spectrum`` assembles the same spectrum from two blocks of half
the dimension, which is considerably faster for parameter sweeps.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg as sla

from .dynamics import SegmentPropagators, build_sector_hamiltonian
from .environment import LatticeEnvironment
from .errors import NotAnEigenpairError
from .model import BasisIndex, ProtocolSchedule, SystemParams

__all__ = [
    "BandSupport",
    "QuasienergySpectrum",
    "FloquetMode",
    "EnergyDecomposition",
    "fold_quasienergy",
    "circular_distance",
    "one_period_operator",
    "quasienergy_spectrum",
    "resonant_spectrum",
    "compute_spectrum",
    "identify_fbs",
    "floquet_mode",
    "fbs_floquet_modes",
    "asymptotic_energy",
    "decompose_energy_terms",
]


def fold_quasienergy(eps, omega_T: float):
    """Map quasienergies into the zone (-omega_T/2, omega_T/2]."""
    e = np.mod(np.asarray(eps, dtype=float) + 0.5 * omega_T, omega_T) - 0.5 * omega_T
    e = np.where(e == -0.5 * omega_T, 0.5 * omega_T, e)
    return float(e) if np.ndim(eps) == 0 else e


def circular_distance(e1, e2, omega_T: float):
    """Distance between quasienergies on the zone circle."""
    d = np.abs(np.mod(np.asarray(e1) - np.asarray(e2) + 0.5 * omega_T, omega_T)
               - 0.5 * omega_T)
    return float(d) if np.ndim(d) == 0 else d


@dataclass(frozen=True)
class BandSupport:
    """Folded image of the bath band [lo, hi] on the quasienergy circle."""

    lo: float
    hi: float
    omega_T: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def covers_zone(self) -> bool:
        return self.width >= self.omega_T

    def distance(self, eps):
        """Circle distance from eps to the folded band (0 inside)."""
        if self.covers_zone:
            out = np.zeros_like(np.asarray(eps, dtype=float))
            return float(out) if np.ndim(eps) == 0 else out
        x = np.mod(np.asarray(eps, dtype=float) - self.lo, self.omega_T)
        out = np.where(x <= self.width, 0.0,
                       np.minimum(x - self.width, self.omega_T - x))
        return float(out) if np.ndim(eps) == 0 else out


@dataclass
class QuasienergySpectrum:
    """Full eigensystem of one drive period, sorted by quasienergy."""

    quasienergies: np.ndarray  # (d,)
    modes: np.ndarray          # (d, d), column j belongs to quasienergies[j]
    system_weights: np.ndarray
    omega_T: float
    band: BandSupport
    fbs_indices: np.ndarray | None = None

    @property
    def dimension(self) -> int:
        return self.quasienergies.size


def one_period_operator(
    params: SystemParams,
    env: LatticeEnvironment,
    schedule: ProtocolSchedule,
    props: SegmentPropagators | None = None,
) -> np.ndarray:
    """U_T = U(tau_d; f=1) U(tau_s; f=0) U(tau_c; f=1)."""
    if props is None:
        props = SegmentPropagators(params, env)
    cache: dict = {}
    u = None
    for dur, f in schedule.segments():
        key = (f, dur)
        if key not in cache:
            cache[key] = props.materialize(f, dur)
        u = cache[key] if u is None else cache[key] @ u
    return u


def _spectrum_from_unitary(u_t, schedule, env):
    t_mat, q_mat = sla.schur(u_t, output="complex")
    lam = np.diag(t_mat)
    eps = fold_quasienergy(-np.angle(lam) / schedule.period, schedule.omega_T)
    order = np.argsort(eps, kind="stable")
    eps = eps[order]
    vecs = q_mat[:, order]
    weights = np.abs(vecs[0]) ** 2 + np.abs(vecs[1]) ** 2
    lo, hi = env.band_edges
    band = BandSupport(lo=fold_quasienergy(lo, schedule.omega_T),
                       hi=fold_quasienergy(lo, schedule.omega_T) + (hi - lo),
                       omega_T=schedule.omega_T)
    return QuasienergySpectrum(quasienergies=eps, modes=vecs,
                               system_weights=weights,
                               omega_T=schedule.omega_T, band=band)


def quasienergy_spectrum(
    u_t: np.ndarray, schedule: ProtocolSchedule, env: LatticeEnvironment
) -> QuasienergySpectrum:
    """Eigendecompose a one-period operator (any detuning)."""
    return _spectrum_from_unitary(u_t, schedule, env)


def resonant_spectrum(
    params: SystemParams,
    env: LatticeEnvironment,
    schedule: ProtocolSchedule,
) -> QuasienergySpectrum:
    """Spectrum assembled from the two decoupled sectors at zero detuning."""
    if params.delta != 0.0:
        raise ValueError("resonant_spectrum requires zero detuning")
    nm = env.n_modes
    d = 2 + 2 * nm
    eps_all = []
    vec_blocks = []
    for sector in (+1, -1):
        mats = {}
        for f in (1.0, 0.0):
            w, v = np.linalg.eigh(build_sector_hamiltonian(params, env, f, sector))
            mats[f] = (w, v)
        u = None
        for dur, f in schedule.segments():
            w, v = mats[f]
            step = (v * np.exp(-1j * w * dur)) @ v.T
            u = step if u is None else step @ u
        t_mat, q_mat = sla.schur(u, output="complex")
        lam = np.diag(t_mat)
        eps = fold_quasienergy(-np.angle(lam) / schedule.period, schedule.omega_T)
        s = 1.0 / math.sqrt(2.0)
        full = np.zeros((d, q_mat.shape[1]), dtype=complex)
        full[0] = s * q_mat[0]
        full[1] = sector * s * q_mat[0]
        full[2:2 + nm] = s * q_mat[1:]
        full[2 + nm:] = sector * s * q_mat[1:]
        eps_all.append(eps)
        vec_blocks.append(full)
    eps = np.concatenate(eps_all)
    vecs = np.concatenate(vec_blocks, axis=1)
    order = np.argsort(eps, kind="stable")
    eps = eps[order]
    vecs = vecs[:, order]
    weights = np.abs(vecs[0]) ** 2 + np.abs(vecs[1]) ** 2
    lo, hi = env.band_edges
    band = BandSupport(lo=fold_quasienergy(lo, schedule.omega_T),
                       hi=fold_quasienergy(lo, schedule.omega_T) + (hi - lo),
                       omega_T=schedule.omega_T)
    return QuasienergySpectrum(quasienergies=eps, modes=vecs,
                               system_weights=weights,
                               omega_T=schedule.omega_T, band=band)


def compute_spectrum(
    params: SystemParams,
    env: LatticeEnvironment,
    schedule: ProtocolSchedule,
    weight_threshold: float = 0.05,
    gap_tolerance: float | None = None,
    props: SegmentPropagators | None = None,
) -> QuasienergySpectrum:
    """Spectrum with FBS classification, taking the fast path when resonant."""
    if params.delta == 0.0 and props is None:
        spec = resonant_spectrum(params, env, schedule)
    else:
        u_t = one_period_operator(params, env, schedule, props=props)
        spec = quasienergy_spectrum(u_t, schedule, env)
    idx = identify_fbs(spec, weight_threshold=weight_threshold,
                       gap_tolerance=gap_tolerance)
    return replace(spec, fbs_indices=idx)


def identify_fbs(
    spectrum: QuasienergySpectrum,
    weight_threshold: float = 0.05,
    gap_tolerance: float | None = None,
) -> np.ndarray:
    """Indices of Floquet bound states.

    A mode qualifies when its system weight reaches ``weight_threshold``
    and its quasienergy is separated from the folded bath band by more
    than ``gap_tolerance`` (default: three mean folded-band level spacings).
    """
    band = spectrum.band
    if gap_tolerance is None:
        n_bath = max(spectrum.dimension - 2, 1)
        arc = min(band.width, spectrum.omega_T)
        gap_tolerance = 3.0 * arc / n_bath
    dist = band.distance(spectrum.quasienergies)
    mask = (spectrum.system_weights >= weight_threshold) & (dist > gap_tolerance)
    return np.flatnonzero(mask)


@dataclass
class FloquetMode:
    """Periodic part phi(t) = e^{+i eps t} U_t phi(0), sampled over one period.

    ``offsets`` holds n_samples times j*T/n_samples (T excluded); the
    closure residual ||phi(T) - phi(0)|| is stored at construction.
    """

    epsilon: float
    phi0: np.ndarray
    offsets: np.ndarray
    states: np.ndarray  # (n_samples, d)
    period: float
    omega_0: float
    closure_error: float

    @property
    def battery_amplitudes(self) -> np.ndarray:
        return self.states[:, BasisIndex.BATTERY]

    def offset_index(self, t) -> np.ndarray:
        """Grid index of t mod T on the sampled offsets (must align)."""
        n = self.offsets.size
        step = self.period / n
        k = np.rint(np.mod(np.asarray(t, dtype=float), self.period) / step)
        misfit = np.abs(np.mod(np.asarray(t, dtype=float), self.period) - k * step)
        if np.any(misfit > 1e-8 * self.period):
            raise ValueError("sample times do not align with the mode's "
                             "period sampling")
        return np.asarray(k, dtype=int) % n


def floquet_mode(
    params: SystemParams,
    env: LatticeEnvironment,
    schedule: ProtocolSchedule,
    phi0: np.ndarray,
    epsilon: float,
    n_samples: int = 96,
    props: SegmentPropagators | None = None,
    residual_tol: float = 1e-6,
) -> FloquetMode:
    """Sample the periodic Floquet mode built on an eigenvector of U_T."""
    if props is None:
        props = SegmentPropagators(params, env)
    T = schedule.period
    phi0 = np.asarray(phi0, dtype=complex)
    lam = np.exp(-1j * epsilon * T)
    end = props.advance(phi0.copy(), schedule, 0.0, T)
    residual = float(np.linalg.norm(end - lam * phi0))
    if residual > residual_tol:
        raise NotAnEigenpairError(residual=residual, tol=residual_tol)
    offsets = np.arange(n_samples) * (T / n_samples)
    states = np.empty((n_samples, phi0.size), dtype=complex)
    raw = phi0.copy()
    prev = 0.0
    for j, s in enumerate(offsets):
        if s > prev:
            raw = props.advance(raw, schedule, prev, s)
            prev = s
        states[j] = np.exp(1j * epsilon * s) * raw
    # ||phi(T) - phi(0)|| coincides with the eigenpair residual
    return FloquetMode(epsilon=float(epsilon), phi0=phi0, offsets=offsets,
                       states=states, period=T, omega_0=params.omega_0,
                       closure_error=residual)


def fbs_floquet_modes(
    params: SystemParams,
    env: LatticeEnvironment,
    schedule: ProtocolSchedule,
    spectrum: QuasienergySpectrum,
    n_samples: int = 96,
    props: SegmentPropagators | None = None,
) -> list[FloquetMode]:
    """FloquetMode objects for every classified bound state of a spectrum."""
    if spectrum.fbs_indices is None:
        raise ValueError("spectrum has no FBS classification; "
                         "run identify_fbs/compute_spectrum first")
    if props is None:
        props = SegmentPropagators(params, env)
    return [
        floquet_mode(params, env, schedule, spectrum.modes[:, j],
                     spectrum.quasienergies[j], n_samples=n_samples, props=props)
        for j in spectrum.fbs_indices
    ]


def _mode_battery_terms(modes, initial, ts):
    """c_j and c_j e^{-i eps_j t} <battery|phi_j(t mod T)> for each mode."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    amps = np.empty((len(modes), ts.size), dtype=complex)
    coeffs = np.empty(len(modes), dtype=complex)
    for j, mode in enumerate(modes):
        c = np.vdot(mode.states[0], initial)
        coeffs[j] = c
        idx = mode.offset_index(ts)
        amps[j] = c * np.exp(-1j * mode.epsilon * ts) * mode.battery_amplitudes[idx]
    return coeffs, amps


def asymptotic_energy(modes: list[FloquetMode], initial: np.ndarray, ts):
    """Long-time battery energy carried by the bound states.

    E(t) = omega_0 * |sum_j c_j e^{-i eps_j t} <battery|phi_j(t)>|^2 with
    c_j the initial-state overlaps; an empty mode list gives zero (complete
    discharge into the band).
    """
    ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    if not modes:
        out = np.zeros(ts_arr.size)
        return float(out[0]) if np.ndim(ts) == 0 else out
    _, amps = _mode_battery_terms(modes, initial, ts_arr)
    e = modes[0].omega_0 * np.abs(amps.sum(axis=0)) ** 2
    return float(e[0]) if np.ndim(ts) == 0 else e


@dataclass
class EnergyDecomposition:
    """Bound-state energy split into diagonal and interference parts.

    ``diagonal``/``interference`` are the weighted contributions and sum to
    ``total`` (the asymptotic energy); ``elements`` are the unweighted
    periodic matrix elements <phi_j(t)|battery occupation|phi_j(t)>.
    """

    times: np.ndarray
    diagonal: np.ndarray       # (M, n_t)
    interference: np.ndarray   # (n_t,)
    total: np.ndarray
    elements: np.ndarray       # (M, n_t)
    coefficients: np.ndarray   # (M,)


def decompose_energy_terms(modes: list[FloquetMode], initial: np.ndarray, ts
                           ) -> EnergyDecomposition:
    """Split the asymptotic energy into j=j' and j!=j' contributions."""
    ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    if not modes:
        z = np.zeros(ts_arr.size)
        return EnergyDecomposition(times=ts_arr, diagonal=np.zeros((0, ts_arr.size)),
                                   interference=z, total=z.copy(),
                                   elements=np.zeros((0, ts_arr.size)),
                                   coefficients=np.zeros(0, dtype=complex))
    coeffs, amps = _mode_battery_terms(modes, initial, ts_arr)
    omega_0 = modes[0].omega_0
    diagonal = omega_0 * np.abs(amps) ** 2
    total = omega_0 * np.abs(amps.sum(axis=0)) ** 2
    interference = total - diagonal.sum(axis=0)
    elements = np.empty((len(modes), ts_arr.size))
    for j, mode in enumerate(modes):
        idx = mode.offset_index(ts_arr)
        elements[j] = np.abs(mode.battery_amplitudes[idx]) ** 2
    return EnergyDecomposition(times=ts_arr, diagonal=diagonal,
                               interference=interference, total=total,
                               elements=elements, coefficients=coeffs)
