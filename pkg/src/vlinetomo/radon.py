"""Radon transform machinery: forward projector, offset derivative, and
filtered backprojection.

Convention: the angle parameter is the direction of the line NORMAL
psi = (cos a, sin a); R h(psi, s) integrates h over the line
{x : x . psi = s}.  Transform fields (which are constant along ray
directions inside semi-infinite strips outside the r2 disc) are projected
as a grid-sampled chord part plus closed-form strip-tail integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .fields import Grid2D, ScalarField, TransformField
from .operators import bilinear

FULL_TURN = 2.0 * np.pi


@dataclass(frozen=True)
class Sinogram:
    """Radon-domain samples on a uniform (angle, offset) lattice.

    values has shape (ncomp, n_angles, n_offsets); the offset lattice is
    s_j = (j - (n_offsets - 1)/2) * ds, symmetric about 0.
    """

    values: np.ndarray
    angle0: float
    dangle: float
    ds: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 2:
            values = values[None]
        if values.ndim != 3 or values.shape[0] not in (1, 2):
            raise ConfigError(f"sinogram values have bad shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ConfigError("sinogram contains non-finite samples")
        if self.ds <= 0 or self.dangle <= 0:
            raise ConfigError("sinogram lattice spacings must be positive")
        object.__setattr__(self, "values", values)

    @property
    def ncomp(self):
        return self.values.shape[0]

    @property
    def n_angles(self):
        return self.values.shape[1]

    @property
    def n_offsets(self):
        return self.values.shape[2]

    def angles(self):
        return self.angle0 + self.dangle * np.arange(self.n_angles)

    def offsets(self):
        n = self.n_offsets
        return (np.arange(n) - (n - 1) / 2.0) * self.ds

    @property
    def full_range(self):
        """True when the angle lattice covers the full circle."""
        return self.n_angles * self.dangle > np.pi * 1.5

    def component(self, k):
        return self.values[k]


def _lattice(grid, n_angles, n_offsets, full):
    if n_angles < 1 or n_offsets < 2:
        raise ConfigError("need at least 1 angle and 2 offsets")
    dangle = (FULL_TURN if full else np.pi) / n_angles
    ds = 2.0 * grid.r2 / (n_offsets - 1)
    return dangle, ds


def _chord_integrals(grid, values, psi, offsets, rmax, step):
    """Line integrals over the chords |x| <= rmax for one angle."""
    s = offsets
    half = np.sqrt(np.maximum(rmax * rmax - s * s, 0.0))
    n = max(1, int(np.ceil(2.0 * rmax / step)))
    mid = (np.arange(n) + 0.5) / n  # fractions of the chord length
    dt = 2.0 * half / n
    t = -half[:, None] + (2.0 * half)[:, None] * mid[None, :]
    px = s[:, None] * psi[0] - t * psi[1]
    py = s[:, None] * psi[1] + t * psi[0]
    vals = bilinear(grid, values, px, py)
    return vals.sum(axis=1) * dt


def radon_forward(h: ScalarField, n_angles, n_offsets, full=False,
                  step=None) -> Sinogram:
    """Radon transform of a scalar field compactly supported in the r1 disc."""
    grid = h.grid
    dangle, ds = _lattice(grid, n_angles, n_offsets, full)
    step = grid.h / 2.0 if step is None else step
    offsets = (np.arange(n_offsets) - (n_offsets - 1) / 2.0) * ds
    out = np.zeros((1, n_angles, n_offsets))
    for k in range(n_angles):
        a = dangle * k
        psi = np.array([np.cos(a), np.sin(a)])
        out[0, k] = _chord_integrals(grid, h.values, psi, offsets,
                                     grid.r1, step)
    return Sinogram(out, 0.0, dangle, ds)


def _strip_profiles(grid, values, dirs, ring, n_sigma):
    """Sample the constant strip values on the ring of radius ``ring``.

    For strip direction d, the profile at transverse coordinate sigma is
    read at q = sigma * perp(d) - sqrt(ring^2 - sigma^2) * d, the point of
    the ring on the far (vertex) side of the strip.
    """
    sig = (np.arange(n_sigma) + 0.5) / n_sigma  # (0, 1)
    sigma = -grid.r1 + 2.0 * grid.r1 * sig
    dsig = 2.0 * grid.r1 / n_sigma
    profiles = []
    back = np.sqrt(np.maximum(ring * ring - sigma * sigma, 0.0))
    for d in dirs:
        qx = -sigma * d[1] - back * d[0]
        qy = sigma * d[0] - back * d[1]
        profiles.append(bilinear(grid, values, qx, qy))
    return sigma, dsig, profiles


def radon_transform_field(tf: TransformField, dirs, n_angles, n_offsets,
                          full=True, step=None, n_sigma=None) -> Sinogram:
    """Radon transform of strip-extended transform data.

    The chord part integrates the grid samples over |x| <= r2 + 2h; the
    strip tails beyond that ring are constant along their ray direction,
    so each tail reduces to a 1-D integral of the ring profile against a
    (smoothed) indicator of the half-plane cut by the line.  Lines nearly
    parallel to a strip direction (|psi . d| < 1e-9) get no tail; those
    angles are singular for the downstream inversion and are discarded
    there anyway.
    """
    grid = tf.grid
    dangle, ds = _lattice(grid, n_angles, n_offsets, full)
    step = grid.h / 2.0 if step is None else step
    n_sigma = 4 * grid.nx if n_sigma is None else n_sigma
    ring = grid.r2 + 2.0 * grid.h
    offsets = (np.arange(n_offsets) - (n_offsets - 1) / 2.0) * ds
    out = np.zeros((tf.ncomp, n_angles, n_offsets))
    for c in range(tf.ncomp):
        values = tf.component(c)
        sigma, dsig, profiles = _strip_profiles(grid, values, dirs, ring,
                                                n_sigma)
        back = np.sqrt(np.maximum(ring * ring - sigma * sigma, 0.0))
        for k in range(n_angles):
            a = dangle * k
            psi = np.array([np.cos(a), np.sin(a)])
            row = _chord_integrals(grid, values, psi, offsets, ring, step)
            for d, prof in zip(dirs, profiles):
                alpha = psi[0] * d[0] + psi[1] * d[1]
                if abs(alpha) < 1e-9:
                    continue
                alphap = -psi[0] * d[1] + psi[1] * d[0]  # psi . perp(d)
                # offset at which the line meets the ring at this sigma
                phi = alphap * sigma - alpha * back
                if alpha > 0:
                    w = np.clip((phi[None, :] - offsets[:, None]) / ds + 0.5,
                                0.0, 1.0)
                else:
                    w = np.clip((offsets[:, None] - phi[None, :]) / ds + 0.5,
                                0.0, 1.0)
                row = row + (w @ prof) * (dsig / abs(alpha))
            out[c, k] = row
    return Sinogram(out, 0.0, dangle, ds)


def sinogram_dds(sg: Sinogram) -> Sinogram:
    """Central-difference d/ds per angle."""
    vals = np.gradient(sg.values, sg.ds, axis=2)
    return Sinogram(vals, sg.angle0, sg.dangle, sg.ds)


def _ramp_filter(rows, ds, window):
    n = rows.shape[-1]
    npad = 1
    while npad < 2 * n:
        npad *= 2
    freqs = np.fft.rfftfreq(npad, d=ds)
    filt = np.abs(freqs)
    if window == "hann":
        filt = filt * (0.5 + 0.5 * np.cos(np.pi * freqs / freqs[-1]))
    elif window is not None:
        raise ConfigError(f"unknown FBP window {window!r}")
    spec = np.fft.rfft(rows, n=npad, axis=-1) * filt
    return np.fft.irfft(spec, n=npad, axis=-1)[..., :n]


def fbp_inverse(sg: Sinogram, grid: Grid2D, window=None) -> ScalarField:
    """Filtered backprojection of a single-component sinogram onto a grid.

    Ramp (Ram-Lak) filter in the frequency domain with zero-padding to the
    next power of two; backprojection by linear interpolation in offset.
    """
    if sg.ncomp != 1:
        raise ConfigError("fbp_inverse needs a single-component sinogram")
    if sg.n_angles < 16:
        raise ConfigError("fbp_inverse needs at least 16 angles")
    rows = _ramp_filter(sg.values[0], sg.ds, window)
    offsets = sg.offsets()
    xx, yy = grid.mesh()
    acc = np.zeros((grid.nx, grid.ny))
    for k, a in enumerate(sg.angles()):
        s = xx * np.cos(a) + yy * np.sin(a)
        acc += np.interp(s, offsets, rows[k], left=0.0, right=0.0)
    scale = sg.dangle * (0.5 if sg.full_range else 1.0)
    return ScalarField(grid, acc * scale)
