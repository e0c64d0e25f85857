"""Per-pulse Monte Carlo of the homodyne measurement chain.

Every laser pulse yields one quadrature sample.  The chain is: entangled-pair
source, relative phase on the second arm, recombination on a beamsplitter,
propagation and detection losses on the bright output port, then an additive
electronic-noise contribution in the detector.  Sampling is chunked and
deterministically seeded so that runs are bit-reproducible regardless of how
chunks are scheduled.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .gaussian import (
    Matrix,
    SourceSpec,
    apply_transform,
    beamsplitter,
    mode_block,
    phase_rotation,
    source_covariance,
)

#: Pulses handled per RNG stream; part of the reproducibility contract.
DEFAULT_CHUNK_SIZE = 65536

#: Detector noise floor 11 dB below the shot-noise level.
DEFAULT_ELECTRONIC_NOISE_VAR = 10.0 ** -1.1

_CSV_HEADER = "index,lo_phase_rad,value"

# RNG stream tags keep the fast sampler, the joint oracle and the shot-noise
# scan statistically independent even under a shared seed.
_STREAM_FAST = 0
_STREAM_JOINT = 1
_STREAM_SHOT_NOISE = 2

_BLOCKED_ARMS = ("none", "a", "b", "signal")


@dataclass(frozen=True)
class DetectorModel:
    """Efficiencies and noise of the pulsed homodyne detector.

    Defaults describe the reference apparatus: transmission from source to
    detector, homodyne mode overlap (entering squared), photodiode quantum
    efficiency, an electronic noise floor 11 dB below shot noise, and the
    local-oscillator energy at which that floor was calibrated.
    """

    eta_transmission: float = 0.93
    eta_homodyne: float = 0.88
    eta_detector: float = 0.945
    electronic_noise_var: float = DEFAULT_ELECTRONIC_NOISE_VAR
    lo_photons_per_pulse: float = 2.5e8

    def __post_init__(self) -> None:
        for name in ("eta_transmission", "eta_homodyne", "eta_detector"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        if self.electronic_noise_var < 0.0:
            raise ValueError(
                f"electronic noise variance must be >= 0, got {self.electronic_noise_var}"
            )
        if self.lo_photons_per_pulse <= 0.0:
            raise ValueError(
                f"local-oscillator level must be > 0, got {self.lo_photons_per_pulse}"
            )

    @property
    def efficiency(self) -> float:
        """Overall detection efficiency: transmission * overlap^2 * quantum efficiency."""
        return self.eta_transmission * self.eta_homodyne**2 * self.eta_detector

    def to_dict(self) -> dict:
        return {
            "eta_transmission": self.eta_transmission,
            "eta_homodyne": self.eta_homodyne,
            "eta_detector": self.eta_detector,
            "electronic_noise_var": self.electronic_noise_var,
            "lo_photons_per_pulse": self.lo_photons_per_pulse,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DetectorModel":
        return cls(**data)


@dataclass(frozen=True)
class PhaseSchedule:
    """Per-pulse local-oscillator phase program.

    Either a constant phase or a linear ramp; the ramp excludes its endpoint,
    so ``linear_ramp(0, 4 pi, n)`` covers [0, 4 pi) uniformly.
    """

    kind: str
    n_pulses: int
    phi: float = 0.0
    phi_start: float = 0.0
    phi_end: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "linear_ramp"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.n_pulses < 0:
            raise ValueError(f"pulse count must be >= 0, got {self.n_pulses}")

    @classmethod
    def constant(cls, phi: float, n_pulses: int) -> "PhaseSchedule":
        return cls(kind="constant", n_pulses=n_pulses, phi=phi)

    @classmethod
    def linear_ramp(cls, phi_start: float, phi_end: float, n_pulses: int) -> "PhaseSchedule":
        return cls(
            kind="linear_ramp", n_pulses=n_pulses, phi_start=phi_start, phi_end=phi_end
        )

    def __len__(self) -> int:
        return self.n_pulses

    def values(self) -> NDArray[np.float64]:
        """Materialize the per-pulse phase array."""
        if self.kind == "constant":
            return np.full(self.n_pulses, float(self.phi))
        step = (self.phi_end - self.phi_start) / max(self.n_pulses, 1)
        return self.phi_start + step * np.arange(self.n_pulses)

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "n_pulses": self.n_pulses, "phi": self.phi}
        return {
            "kind": "linear_ramp",
            "n_pulses": self.n_pulses,
            "phi_start": self.phi_start,
            "phi_end": self.phi_end,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseSchedule":
        return cls(**data)


@dataclass(frozen=True)
class RunConfig:
    """Full description of one simulated measurement run."""

    source: SourceSpec
    detector: DetectorModel
    schedule: PhaseSchedule
    theta: float = 0.0
    beamsplitter_r: float = 0.5
    seed: int = 0
    blocked_arm: str = "none"

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta):
            raise ValueError(f"relative phase must be finite, got {self.theta}")
        if not 0.0 < self.beamsplitter_r < 1.0:
            raise ValueError(
                f"beamsplitter reflectivity must lie in (0, 1), got {self.beamsplitter_r}"
            )
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.blocked_arm not in _BLOCKED_ARMS:
            raise ValueError(
                f"blocked_arm must be one of {_BLOCKED_ARMS}, got {self.blocked_arm!r}"
            )

    def to_dict(self) -> dict:
        source = {"kind": self.source.kind}
        if self.source.kind == "pure_nopa":
            source["r"] = self.source.r
        else:
            source["v"] = self.source.v
            source["k"] = self.source.k
        return {
            "source": source,
            "detector": self.detector.to_dict(),
            "schedule": self.schedule.to_dict(),
            "theta": self.theta,
            "beamsplitter_r": self.beamsplitter_r,
            "seed": self.seed,
            "blocked_arm": self.blocked_arm,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(
            source=SourceSpec(**data["source"]),
            detector=DetectorModel.from_dict(data["detector"]),
            schedule=PhaseSchedule.from_dict(data["schedule"]),
            theta=data["theta"],
            beamsplitter_r=data["beamsplitter_r"],
            seed=data["seed"],
            blocked_arm=data["blocked_arm"],
        )


@dataclass(frozen=True)
class PulseRecord:
    """One homodyne outcome: pulse index, LO phase, measured quadrature value."""

    index: int
    lo_phase: float
    value: float


@dataclass(frozen=True, eq=False)
class PulseTrain:
    """Columnar sequence of pulse records."""

    index: NDArray[np.int64]
    lo_phase: NDArray[np.float64]
    value: NDArray[np.float64]

    def __len__(self) -> int:
        return len(self.value)

    def __getitem__(self, i: int) -> PulseRecord:
        return PulseRecord(
            index=int(self.index[i]),
            lo_phase=float(self.lo_phase[i]),
            value=float(self.value[i]),
        )


def _input_covariance(config: RunConfig) -> Matrix:
    """Two-mode covariance entering the beamsplitter, after any blocking."""
    gamma = source_covariance(config.source)
    if config.blocked_arm == "a":
        out = np.eye(4)
        out[2:, 2:] = mode_block(gamma, 1)
        return out
    if config.blocked_arm == "b":
        out = np.eye(4)
        out[:2, :2] = mode_block(gamma, 0)
        return out
    if config.blocked_arm == "signal":
        return np.eye(4)
    return gamma


def detected_covariance(config: RunConfig) -> Matrix:
    """2x2 covariance of the measured output port after recombination and loss.

    Electronic noise is not included; it enters additively in
    :func:`detected_variance`.
    """
    chain = beamsplitter(config.beamsplitter_r) @ phase_rotation(config.theta, mode=1)
    gamma = apply_transform(chain, _input_covariance(config))
    eta = config.detector.efficiency
    return eta * mode_block(gamma, 0) + (1.0 - eta) * np.eye(2)


def detected_variance(config: RunConfig, lo_phase):
    """Analytic variance of the homodyne outcome at the given LO phase(s).

    Accepts a scalar or an array of phases; electronic noise is included.
    """
    g = detected_covariance(config)
    phi = np.asarray(lo_phase, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    var = c * c * g[0, 0] + 2.0 * c * s * g[0, 1] + s * s * g[1, 1]
    var = var + config.detector.electronic_noise_var
    if var.ndim == 0:
        return float(var)
    return var


def _chunk_rng(seed: int, stream: int, chunk_index: int) -> np.random.Generator:
    # The whole entropy tuple is hashed, so streams and chunks never collide.
    return np.random.default_rng((seed, stream, chunk_index))


def sample_pulses(config: RunConfig, chunk_size: int = DEFAULT_CHUNK_SIZE) -> PulseTrain:
    """Draw one homodyne outcome per scheduled pulse.

    Each outcome is a zero-mean Gaussian draw with the analytic detected
    variance at that pulse's LO phase.  The stream is partitioned into chunks
    of ``chunk_size`` pulses, each seeded from (seed, chunk index), so the
    result is bit-identical however the chunks are executed; reproducing a
    run therefore requires the seed and the chunk size.

    Parameters
    ----------
    config : RunConfig
        Run description; ``config.schedule`` fixes the pulse count.
    chunk_size : int
        Pulses per RNG stream.

    Returns
    -------
    PulseTrain
    """
    if chunk_size < 1:
        raise ValueError(f"chunk size must be >= 1, got {chunk_size}")
    n = len(config.schedule)
    if n == 0:
        raise ValueError("empty schedule: nothing to sample")
    phases = config.schedule.values()
    std = np.sqrt(detected_variance(config, phases))
    values = np.empty(n)
    for chunk_index, start in enumerate(range(0, n, chunk_size)):
        stop = min(start + chunk_size, n)
        rng = _chunk_rng(config.seed, _STREAM_FAST, chunk_index)
        values[start:stop] = std[start:stop] * rng.standard_normal(stop - start)
    return PulseTrain(index=np.arange(n, dtype=np.int64), lo_phase=phases, value=values)


def sample_pulses_joint(
    config: RunConfig, chunk_size: int = DEFAULT_CHUNK_SIZE
) -> PulseTrain:
    """Brute-force sampler used as an independent cross-check of :func:`sample_pulses`.

    Instead of collapsing the chain to a single variance, every pulse draws
    the full four-dimensional quadrature vector of the source, pushes it
    through the phase shift and the beamsplitter explicitly, projects the
    bright port onto the LO phase, and applies loss as a literal vacuum
    admixture plus electronic noise.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk size must be >= 1, got {chunk_size}")
    n = len(config.schedule)
    if n == 0:
        raise ValueError("empty schedule: nothing to sample")
    phases = config.schedule.values()
    chol = np.linalg.cholesky(_input_covariance(config))
    chain = beamsplitter(config.beamsplitter_r) @ phase_rotation(config.theta, mode=1)
    # rows producing the measured port's (X, P) from the 4 source normals
    port_rows = (chain @ chol)[0:2, :]
    eta = config.detector.efficiency
    noise_std = math.sqrt(config.detector.electronic_noise_var)
    values = np.empty(n)
    for chunk_index, start in enumerate(range(0, n, chunk_size)):
        stop = min(start + chunk_size, n)
        m = stop - start
        rng = _chunk_rng(config.seed, _STREAM_JOINT, chunk_index)
        z = rng.standard_normal((4, m))
        x_port, p_port = port_rows @ z
        c, s = np.cos(phases[start:stop]), np.sin(phases[start:stop])
        projected = c * x_port + s * p_port
        vacuum = rng.standard_normal(m)
        electronic = rng.standard_normal(m)
        values[start:stop] = (
            math.sqrt(eta) * projected
            + math.sqrt(1.0 - eta) * vacuum
            + noise_std * electronic
        )
    return PulseTrain(index=np.arange(n, dtype=np.int64), lo_phase=phases, value=values)


def block_variance_trace(
    train: PulseTrain, block_size: int = 2500
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Unbiased sample variance over consecutive non-overlapping blocks.

    Returns (mean LO phase per block, variance per block).  A trailing
    partial block is discarded.
    """
    if block_size < 2:
        raise ValueError(f"block size must be >= 2, got {block_size}")
    n_blocks = len(train) // block_size
    if n_blocks == 0:
        raise ValueError(
            f"need at least one full block of {block_size} pulses, got {len(train)}"
        )
    used = n_blocks * block_size
    phases = train.lo_phase[:used].reshape(n_blocks, block_size).mean(axis=1)
    variances = train.value[:used].reshape(n_blocks, block_size).var(axis=1, ddof=1)
    return phases, variances


def theta_scan(
    config: RunConfig, thetas
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Noise-ellipse extremes of the detected port as the relative phase is swept.

    For each theta the detected 2x2 covariance is diagonalized analytically;
    returns (thetas, min variance, max variance, LO phase of the minimum,
    modulo pi).  Electronic noise is included in the extremes.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    v_min = np.empty_like(thetas)
    v_max = np.empty_like(thetas)
    phi_min = np.empty_like(thetas)
    noise = config.detector.electronic_noise_var
    for i, theta in enumerate(thetas):
        g = detected_covariance(replace(config, theta=float(theta)))
        mean = 0.5 * (g[0, 0] + g[1, 1])
        half = math.hypot(0.5 * (g[0, 0] - g[1, 1]), g[0, 1])
        v_min[i] = mean - half + noise
        v_max[i] = mean + half + noise
        # orientation of the major axis; minor axis is pi/2 away
        phi_major = 0.5 * math.atan2(2.0 * g[0, 1], g[0, 0] - g[1, 1])
        phi_min[i] = (phi_major + math.pi / 2.0) % math.pi
    return thetas, v_min, v_max, phi_min


def shot_noise_linearity_scan(
    detector: DetectorModel,
    lo_levels,
    pulses_per_level: int,
    seed: int,
    gain_per_photon: float = 1e-8,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Simulated raw-unit variance of a blocked-signal run versus LO pulse energy.

    The raw model is variance = gain * lo_photons + electronic offset, with
    the offset fixed by the detector's noise floor at its calibration LO
    level; a zero level is the dark measurement.  ``gain_per_photon`` sets
    the arbitrary raw-unit scale.

    Returns (levels, sample variances), one variance per level from
    ``pulses_per_level`` Gaussian draws.
    """
    levels = np.atleast_1d(np.asarray(lo_levels, dtype=float))
    if levels.size == 0:
        raise ValueError("need at least one local-oscillator level")
    if np.any(levels < 0.0):
        raise ValueError("local-oscillator levels must be >= 0")
    if pulses_per_level < 2:
        raise ValueError(f"need at least 2 pulses per level, got {pulses_per_level}")
    dark_var = (
        detector.electronic_noise_var * gain_per_photon * detector.lo_photons_per_pulse
    )
    variances = np.empty_like(levels)
    for i, level in enumerate(levels):
        true_var = gain_per_photon * level + dark_var
        rng = _chunk_rng(seed, _STREAM_SHOT_NOISE, i)
        samples = math.sqrt(true_var) * rng.standard_normal(pulses_per_level)
        variances[i] = samples.var(ddof=1)
    return levels, variances


def write_records(
    train: PulseTrain,
    csv_path: str | Path,
    config: RunConfig | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Path:
    """Write a pulse train as CSV, plus a JSON metadata sidecar when given a config.

    The sidecar lands next to the CSV with extension ``.json`` and records
    everything needed to regenerate the stream bit-for-bit.
    """
    csv_path = Path(csv_path)
    table = np.column_stack([train.index, train.lo_phase, train.value])
    np.savetxt(
        csv_path, table, fmt="%d,%.17g,%.17g", header=_CSV_HEADER, comments=""
    )
    if config is not None:
        meta = {
            "format": _CSV_HEADER,
            "n_pulses": len(train),
            "chunk_size": chunk_size,
            "config": config.to_dict(),
        }
        sidecar = csv_path.with_suffix(".json")
        sidecar.write_text(json.dumps(meta, indent=2) + "\n")
    return csv_path


def read_records(csv_path: str | Path) -> PulseTrain:
    """Read a pulse-train CSV written by :func:`write_records`.

    Malformed input raises ValueError naming the first offending line.
    """
    csv_path = Path(csv_path)
    with open(csv_path) as fh:
        first = fh.readline().strip()
        if first != _CSV_HEADER:
            raise ValueError(
                f"{csv_path.name} line 1: expected header {_CSV_HEADER!r}, got {first!r}"
            )
        try:
            with warnings.catch_warnings():
                # empty input is reported explicitly below, not as a warning
                warnings.simplefilter("ignore", UserWarning)
                table = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError:
            fh.seek(0)
            for lineno, line in enumerate(fh, start=1):
                if lineno == 1:
                    continue
                parts = line.strip().split(",")
                if len(parts) != 3:
                    raise ValueError(
                        f"{csv_path.name} line {lineno}: expected 3 fields, got {len(parts)}"
                    ) from None
                try:
                    [float(p) for p in parts]
                except ValueError:
                    raise ValueError(
                        f"{csv_path.name} line {lineno}: non-numeric field in {line.strip()!r}"
                    ) from None
            raise
    if table.size == 0:
        raise ValueError(f"{csv_path.name}: no records")
    return PulseTrain(
        index=table[:, 0].astype(np.int64),
        lo_phase=table[:, 1].copy(),
        value=table[:, 2].copy(),
    )


def read_metadata(csv_path: str | Path) -> dict:
    """Load the JSON sidecar belonging to a records CSV."""
    sidecar = Path(csv_path).with_suffix(".json")
    return json.loads(sidecar.read_text())
