"""2-D dual-tree complex wavelet transform with six oriented subbands.

Two real separable wavelet transforms (trees "a" and "b", offset a quarter
sample from level 2 on) are carried interleaved in a single array; the 2x2
polyphase quads of each filtered plane combine into two complex subbands per
filter pair, six per level. Level 1 uses an odd-length biorthogonal pair
and works on the non-decimated planes; deeper levels use even-length
quarter-shift filters whose analysis stage is an exact isometry (including
the symmetric boundary extension), so synthesis is its adjoint.

Subbands are stored in the direction order LH, HH, HL, HLbar, HHbar, LHbar.
A direction's singularity interval is the range of edge-normal angles it
responds to, measured on the grid compass (0 deg = up / decreasing rows,
90 deg = right / increasing columns, mod 180).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class SubbandDirection:
    label: str
    orientation_deg: float
    interval_deg: tuple

    def contains(self, angle_deg: float) -> bool:
        lo, hi = self.interval_deg
        return lo <= angle_deg <= hi


DIRECTIONS = (
    SubbandDirection("LH", -15.0, (60.0, 90.0)),
    SubbandDirection("HH", -45.0, (30.0, 60.0)),
    SubbandDirection("HL", -75.0, (0.0, 30.0)),
    SubbandDirection("HLbar", 75.0, (-30.0, 0.0)),
    SubbandDirection("HHbar", 45.0, (-60.0, -30.0)),
    SubbandDirection("LHbar", 15.0, (-90.0, -60.0)),
)

LABELS = tuple(d.label for d in DIRECTIONS)


def direction(label: str) -> SubbandDirection:
    for d in DIRECTIONS:
        if d.label == label:
            return d
    raise KeyError(f"unknown subband label {label!r}")


# ---------------------------------------------------------------------------
# Filter bank: Antonini 9/7 biorthogonal pair for level 1, Kingsbury 14-tap
# quarter-shift filters below. Both sets are published constants; the 9/7
# inverse filters are the partner filters with alternating signs, the
# quarter-shift synthesis filters are the time-reversed analysis filters
# (the stage is orthonormal).
# ---------------------------------------------------------------------------

_H1O = np.array(
    [0.0456358815571251, -0.0287717631142493, -0.2956358815571280,
     0.5575435262285023, -0.2956358815571233, -0.0287717631142531,
     0.0456358815571261])
_H0O = np.array(
    [0.0267487574108101, -0.0168641184428747, -0.0782232665289905,
     0.2668641184428729, 0.6029490182363593, 0.2668641184428769,
     -0.0782232665289884, -0.0168641184428753, 0.0267487574108096])
_G1O = _H0O.copy()
_G1O[1::2] *= -1.0
_G0O = _H1O.copy()
_G0O[0::2] *= -1.0

_QSHIFT_LO = np.array(
    [0.0032531427636532, -0.0038832119991585, 0.0346603468448535,
     -0.0388728012688278, -0.1172038876991153, 0.2752953846688820,
     0.7561456438925225, 0.5688104207121227, 0.0118660920337970,
     -0.1067118046866654, 0.0238253847949203, 0.0170252238815540,
     -0.0054394759372741, -0.0045568956284755])
_H0B = _QSHIFT_LO.copy()
_H0A = _H0B[::-1].copy()
_H1A = _QSHIFT_LO.copy()
_H1A[(len(_QSHIFT_LO) // 2 + 1) % 2 :: 2] *= -1.0
_H1B = _H1A[::-1].copy()

# Decimation phases of the two trees inside the quarter-shift stage
# (selected for exact PR of the adjoint synthesis and one-quadrant spectra;
# see the phase-calibration test).
_PHASE_A = 14
_PHASE_B = 15
_SWAP_OUT = False


@dataclass(frozen=True)
class FilterBank:
    h0o: np.ndarray
    h1o: np.ndarray
    g0o: np.ndarray
    g1o: np.ndarray
    h0a: np.ndarray
    h0b: np.ndarray
    h1a: np.ndarray
    h1b: np.ndarray
    g0a: np.ndarray
    g0b: np.ndarray
    g1a: np.ndarray
    g1b: np.ndarray


DEFAULT_BANK = FilterBank(
    h0o=_H0O, h1o=_H1O, g0o=_G0O, g1o=_G1O,
    h0a=_H0A, h0b=_H0B, h1a=_H1A, h1b=_H1B,
    g0a=_H0A[::-1].copy(), g0b=_H0B[::-1].copy(),
    g1a=_H1A[::-1].copy(), g1b=_H1B[::-1].copy(),
)


@dataclass(frozen=True)
class SubbandPyramid:
    """Complex detail grids per level (arrays of shape (m, m, 6)) plus the
    final interleaved lowpass plane. Level j grids have side size/2^j."""

    highpasses: tuple
    lowpass: np.ndarray
    size: int

    @property
    def levels(self) -> int:
        return len(self.highpasses)

    def band(self, label: str, level: int) -> np.ndarray:
        """Complex subband for a direction label at a 1-based level."""
        if not 1 <= level <= self.levels:
            raise ValueError(f"level {level} outside 1..{self.levels}")
        return self.highpasses[level - 1][:, :, LABELS.index(label)]


def _colfilter(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    return ndimage.convolve1d(x, h, axis=0, mode="reflect")


def _rowfilter(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    return ndimage.convolve1d(x, h, axis=1, mode="reflect")


def _ext_indices(r: int, pad: int) -> np.ndarray:
    idx = np.arange(-pad, r + pad)
    period = 2 * r
    idx = np.mod(idx, period)
    return np.where(idx >= r, period - 1 - idx, idx)


def _coldfilt(x: np.ndarray, ha: np.ndarray, hb: np.ndarray) -> np.ndarray:
    """Decimating quarter-shift stage along axis 0 (rows halve)."""
    r = x.shape[0]
    if r % 4:
        raise ValueError("quarter-shift stage needs row count divisible by 4")
    m = len(ha)
    xe = x[_ext_indices(r, m)]
    rows = r // 4
    za = np.zeros((rows,) + x.shape[1:])
    zb = np.zeros_like(za)
    for j in range(m):
        sa = m + _PHASE_A - 2 * j
        zb_start = m + _PHASE_B - 2 * j
        za += ha[j] * xe[sa : sa + 4 * rows : 4]
        zb += hb[j] * xe[zb_start : zb_start + 4 * rows : 4]
    y = np.zeros((r // 2,) + x.shape[1:])
    if _SWAP_OUT:
        za, zb = zb, za
    y[0::2] = za
    y[1::2] = zb
    return y


def _coldfilt_adjoint(y: np.ndarray, ha: np.ndarray, hb: np.ndarray) -> np.ndarray:
    """Exact adjoint of :func:`_coldfilt`; the synthesis stage."""
    r = y.shape[0] * 2
    m = len(ha)
    rows = r // 4
    za, zb = y[0::2], y[1::2]
    if _SWAP_OUT:
        za, zb = zb, za
    acc = np.zeros((r + 2 * m,) + y.shape[1:])
    for j in range(m):
        sa = m + _PHASE_A - 2 * j
        sb = m + _PHASE_B - 2 * j
        acc[sa : sa + 4 * rows : 4] += ha[j] * za
        acc[sb : sb + 4 * rows : 4] += hb[j] * zb
    out = np.zeros((r,) + y.shape[1:])
    np.add.at(out, _ext_indices(r, m), acc)
    return out


def _rowdfilt(x, ha, hb):
    return _coldfilt(x.swapaxes(0, 1), ha, hb).swapaxes(0, 1)


def _rowdfilt_adjoint(y, ha, hb):
    return _coldfilt_adjoint(y.swapaxes(0, 1), ha, hb).swapaxes(0, 1)


def _q2c(y: np.ndarray):
    a, b = y[0::2, 0::2], y[0::2, 1::2]
    c, d = y[1::2, 0::2], y[1::2, 1::2]
    p = (a + 1j * b) / np.sqrt(2.0)
    q = (d - 1j * c) / np.sqrt(2.0)
    return p - q, p + q


def _c2q(z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
    p = (z1 + z2) / np.sqrt(2.0)
    q = (z2 - z1) / np.sqrt(2.0)
    out = np.zeros((z1.shape[0] * 2, z1.shape[1] * 2))
    out[0::2, 0::2] = p.real
    out[0::2, 1::2] = p.imag
    out[1::2, 0::2] = -q.imag
    out[1::2, 1::2] = q.real
    return out


# Internal packing order of the three q2c pairs -> Table-1 label slots.
# pairs: horiz = (col h1, row h0), vert = (col h0, row h1), diag = (col h1,
# row h1); the permutation is pinned by the directional-selectivity test.
_PAIR_TO_LABEL = {
    ("horiz", 0): "HL",
    ("horiz", 1): "HLbar",
    ("vert", 0): "LH",
    ("vert", 1): "LHbar",
    ("diag", 0): "HHbar",
    ("diag", 1): "HH",
}


def _pack(horiz, vert, diag) -> np.ndarray:
    pairs = {"horiz": horiz, "vert": vert, "diag": diag}
    m = horiz[0].shape[0]
    out = np.zeros((m, m, 6), complex)
    for (name, idx), label in _PAIR_TO_LABEL.items():
        out[:, :, LABELS.index(label)] = pairs[name][idx]
    return out


def _unpack(grid):
    pairs = {}
    for (name, idx), label in _PAIR_TO_LABEL.items():
        pairs[(name, idx)] = grid[:, :, LABELS.index(label)]
    return (
        (pairs[("horiz", 0)], pairs[("horiz", 1)]),
        (pairs[("vert", 0)], pairs[("vert", 1)]),
        (pairs[("diag", 0)], pairs[("diag", 1)]),
    )


def dtcwt_forward(image, levels: int, bank: FilterBank = DEFAULT_BANK) -> SubbandPyramid:
    """Decompose a square power-of-two image into ``levels`` detail levels."""
    x = np.asarray(image.data if hasattr(image, "data") else image, float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("expected a square image")
    n = x.shape[0]
    if n & (n - 1) or n < 2:
        raise ValueError("image side must be a power of two")
    max_levels = int(np.log2(n)) - 1
    if not 1 <= levels <= max_levels:
        raise ValueError(f"levels must be in 1..{max_levels} for size {n}")

    highpasses = []
    lo = _colfilter(x, bank.h0o)
    hi = _colfilter(x, bank.h1o)
    lolo = _rowfilter(lo, bank.h0o)
    # The level-1 tree pair is conjugate to the quarter-shift levels, so the
    # two quad combinations of the single-highpass planes swap roles; the
    # double-highpass plane conjugates twice and keeps its order.
    horiz = _q2c(_rowfilter(hi, bank.h0o))[::-1]
    vert = _q2c(_rowfilter(lo, bank.h1o))[::-1]
    diag = _q2c(_rowfilter(hi, bank.h1o))
    highpasses.append(_pack(horiz, vert, diag))

    for _ in range(1, levels):
        lo = _coldfilt(lolo, bank.h0a, bank.h0b)
        hi = _coldfilt(lolo, bank.h1a, bank.h1b)
        lolo = _rowdfilt(lo, bank.h0a, bank.h0b)
        horiz = _q2c(_rowdfilt(hi, bank.h0a, bank.h0b))
        vert = _q2c(_rowdfilt(lo, bank.h1a, bank.h1b))
        diag = _q2c(_rowdfilt(hi, bank.h1a, bank.h1b))
        highpasses.append(_pack(horiz, vert, diag))

    return SubbandPyramid(tuple(highpasses), lolo, n)


def dtcwt_inverse(pyr: SubbandPyramid, bank: FilterBank = DEFAULT_BANK) -> np.ndarray:
    """Reconstruct the image; composes with the forward to identity."""
    z = np.asarray(pyr.lowpass, float)
    for level in range(pyr.levels, 1, -1):
        horiz, vert, diag = _unpack(pyr.highpasses[level - 1])
        lh = _c2q(*horiz)
        hl = _c2q(*vert)
        hh = _c2q(*diag)
        lo = _rowdfilt_adjoint(z, bank.h0a, bank.h0b) + _rowdfilt_adjoint(
            hl, bank.h1a, bank.h1b
        )
        hi = _rowdfilt_adjoint(lh, bank.h0a, bank.h0b) + _rowdfilt_adjoint(
            hh, bank.h1a, bank.h1b
        )
        z = _coldfilt_adjoint(lo, bank.h0a, bank.h0b) + _coldfilt_adjoint(
            hi, bank.h1a, bank.h1b
        )
    horiz, vert, diag = _unpack(pyr.highpasses[0])
    lh = _c2q(*horiz[::-1])
    hl = _c2q(*vert[::-1])
    hh = _c2q(*diag)
    y1 = _colfilter(z, bank.g0o) + _colfilter(lh, bank.g1o)
    y2 = _colfilter(hl, bank.g0o) + _colfilter(hh, bank.g1o)
    return _rowfilter(y1, bank.g0o) + _rowfilter(y2, bank.g1o)


def normalize_subband(pyr: SubbandPyramid, d: SubbandDirection | str, level: int):
    """Magnitudes scaled by the subband's global maximum (all-zero safe)."""
    label = d if isinstance(d, str) else d.label
    mag = np.abs(pyr.band(label, level))
    peak = mag.max()
    return mag / peak if peak > 0 else mag


def threshold_subband(c_prime: np.ndarray, t: float) -> np.ndarray:
    """Indicator of normalized magnitude >= t."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    return np.asarray(c_prime) >= t
