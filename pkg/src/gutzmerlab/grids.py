"""Grid and quadrature plumbing shared by the transform modules.

Conventions used throughout the package:

* 1-D sample grids are uniform symmetric in the FFT sense: N points
  x_m = (m - N/2) h on [-L, L), h = 2L/N.  Differences of grid points stay
  on the lattice (needed by the twisted-convolution quadrature) and the
  plain Riemann sum  sum f(x_m) h  is superalgebraic for smooth decaying
  integrands and exact for one period of trigonometric sums.

* The lambda grid is uniform with spacing  dl = A / nodes_per_A  and extends
  margin_nodes past |lambda| = A; nodes inside the central puncture
  |lambda| < lam_min are dropped (the |lambda|^n Plancherel density
  suppresses their contribution).  The matching central window half-length
  is T = pi / dl, which makes e^{i lambda t} sums over the t-grid exactly
  orthogonal across lambda nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss


def fft_grid(n: int, half_extent: float) -> np.ndarray:
    """Uniform symmetric grid (m - n/2) h on [-half_extent, half_extent)."""
    h = 2.0 * half_extent / n
    return (np.arange(n) - n // 2) * h


_leg_cache: dict = {}


def _leggauss_cached(n: int):
    if n not in _leg_cache:
        _leg_cache[n] = leggauss(n)
    return _leg_cache[n]


def gauss_legendre_on(a: float, b: float, n: int):
    """Gauss-Legendre nodes/weights transplanted to [a, b]."""
    x, w = _leggauss_cached(n)
    return (x + 1.0) * (b - a) / 2.0 + a, w * (b - a) / 2.0


_tail_cache: dict = {}


def laguerre_tail_mass(m: int, d: int, S: float) -> float:
    """Mass of the orthonormal Laguerre function ell_m^d outside [0, S]:

        integral_S^inf  (m!/(m+d)!) L_m^d(s)^2 s^d e^{-s} ds  in [0, 1].

    This is the radial mass of a special Hermite mode with indices
    (min, min+d) beyond generalized radius s = |lam| r^2 / 2 = S; the
    mode-fit rule compares it against fit_tol.  Cached.
    """
    key = (m, d, round(float(S), 6))
    if key in _tail_cache:
        return _tail_cache[key]
    tp = 4.0 * m + 2.0 * d + 2.0
    hi = max(tp, S) + 60.0 + 10.0 * np.sqrt(tp)
    s, w = gauss_legendre_on(S, hi, 400)
    # orthonormal recurrence on ell_m(s) = sqrt(m!/(m+d)!) L_m^d(s) s^{d/2} e^{-s/2}
    from math import lgamma

    log0 = 0.5 * (d * np.log(np.maximum(s, 1e-300)) - lgamma(d + 1)) - 0.5 * s
    l0 = np.exp(np.maximum(log0, -700.0))
    l0[log0 < -700.0] = 0.0
    if m == 0:
        vals = l0
    else:
        l1 = (d + 1.0 - s) * l0 / np.sqrt(d + 1.0)
        lm1, lm = l0, l1
        for j in range(1, m):
            lp = ((2.0 * j + d + 1.0 - s) * lm - np.sqrt(j * (j + d)) * lm1) / np.sqrt(
                (j + 1.0) * (j + 1.0 + d)
            )
            lm1, lm = lm, lp
        vals = lm
    out = float(np.sum(vals * vals * w))
    _tail_cache[key] = out
    return out


@dataclass
class QuadratureSpec:
    """Resolution knobs for every discretised transform and sum.

    The defaults target n=1 desk scale: 48^2 spatial grid, 96 central nodes,
    33-node lambda grid (node count 2*(nodes_per_A+margin_nodes)+1 before the
    central puncture removes |lambda| < lam_min).
    """

    n: int = 1
    nx: int = 48
    lx: float = 11.0
    nt: int = 96
    nodes_per_A: int = 13
    margin_nodes: int = 3
    lam_min: float = 0.05
    kmax: int = 16
    beta_cap: int = 64          # free-index cap (4 * kmax) in Hermite-Laguerre expansions
    fit_frac: float = 0.95     # usable fraction of grid extent / Nyquist band
    fit_tol: float = 1e-9      # admissible mode tail mass outside the usable box
    decay_tol: float = 1e-3     # edge decay required of "Schwartz" grid data
    shell_tol: float = 1e-6     # orbital quadrature shell-truncation target
    pad_factor: float = 1.5     # orbital evaluation domain relative to lx

    def xu_grid(self) -> np.ndarray:
        return fft_grid(self.nx, self.lx)

    @property
    def hx(self) -> float:
        return 2.0 * self.lx / self.nx

    def lambda_grid(self, A: float):
        """(lambda nodes, spacing dl, d-mu weights) for band radius A.

        dl = A/nodes_per_A puts lambda = +-A exactly on the grid.  Weights
        carry d mu(lambda) = (2 pi)^{-n-1} |lambda|^n dl.
        """
        if A <= 0:
            raise ValueError("band radius A must be positive")
        dl = A / self.nodes_per_A
        jmax = self.nodes_per_A + self.margin_nodes
        lam = np.arange(-jmax, jmax + 1) * dl
        lam = lam[np.abs(lam) >= self.lam_min - 1e-12]
        wmu = (2.0 * np.pi) ** (-self.n - 1) * np.abs(lam) ** self.n * dl
        return lam, dl, wmu

    def t_half_window(self, dl: float) -> float:
        return np.pi / dl

    def t_grid(self, dl: float) -> np.ndarray:
        return fft_grid(self.nt, self.t_half_window(dl))

    # ---- mode-fit rules -------------------------------------------------
    def _fit_radii(self, lam: float):
        """Generalized-radius cutoffs (spatial, momentum) at scale lam.

        Spatial: s = |lam| r^2/2 at r = fit_frac * lx (inscribed circle of
        the box).  Momentum: the ordinary Fourier transform of a special
        Hermite mode is again one at dual scale, radius omega = (|lam|/2) r,
        so the cutoff at fit_frac of the Nyquist band is s = 2 omega^2/|lam|.
        """
        al = abs(lam)
        s_space = al * (self.fit_frac * self.lx) ** 2 / 2.0
        s_mom = 2.0 * (self.fit_frac * np.pi / self.hx) ** 2 / al
        return s_space, s_mom

    def pair_fits(self, a: int, k: int, lam: float) -> bool:
        """Does the grid resolve the special Hermite mode with indices (a, k)?

        The mode's radial profile is the orthonormal Laguerre function with
        (m, d) = (min(a,k), |a-k|); both its spatial and momentum tail masses
        must stay below fit_tol.  Per-index turning-point tests are *wrong*
        here: diagonal modes (a = k) are radially sqrt(2) wider.
        """
        s_space, s_mom = self._fit_radii(lam)
        m, d = min(a, k), abs(a - k)
        return (laguerre_tail_mass(m, d, s_space) <= self.fit_tol
                and laguerre_tail_mass(m, d, s_mom) <= self.fit_tol)

    def max_fit_degree(self, lam: float) -> int:
        """Largest projection level k whose radial mode phi_k the grid
        resolves (the diagonal pair (k, k))."""
        m = -1
        while m < 200 and self.pair_fits(m + 1, m + 1, lam):
            m += 1
        return m

    def max_radial_level(self, lam: float) -> int:
        """Largest k admitting any mode (a = 0 column): the populable level."""
        m = -1
        while m < 400 and self.pair_fits(0, m + 1, lam):
            m += 1
        return m

    def acap_for_k(self, k: int, lam: float, cap: int) -> int:
        """Largest admissible free index a <= cap for projection level k."""
        a = -1
        while a < cap and self.pair_fits(a + 1, k, lam):
            a += 1
        return a

    def mode_fits(self, deg: int, lam: float) -> bool:
        return self.pair_fits(0, deg, lam)


def thread_count() -> int:
    """Parallelism cap, from GUTZMERLAB_THREADS (default 1 = serial)."""
    import os

    raw = os.environ.get("GUTZMERLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
