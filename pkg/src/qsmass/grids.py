"""Discretizations of radial graphs over S^{n-1}.

Both grids sample the embedding on a *fine* grid with half the cell spacing:
odd fine rows in theta are cell centres (the quadrature nodes), even rows
are cell faces, rows 0 and 2*n_theta are the poles.  Everything geometric
(tangents, metrics, normals, second fundamental form) is obtained by
central differences of the Minkowski position vector on this fine grid.

The Laplace-Beltrami operator is a finite-volume divergence of face
fluxes, so ``sum(w * L f) == 0`` to round-off and ``L 1 == 0`` exactly.
"""
from __future__ import annotations

import math

import numpy as np

from .hyperbolic import lorentz_dot


def sphere_area(m: int) -> float:
    """Area of the unit sphere S^m."""
    return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def _orient(w, X, k):
    """Normalize the Lorentz-orthogonal vector w and point it away from o."""
    norm = np.sqrt(lorentz_dot(w, w))
    w = w / norm[..., None]
    # outward: positive pairing with d/dr, i.e. t-component of the radial frame
    x = X[..., :-1]
    kt = np.maximum(k * X[..., -1], 1.0)
    kr = np.arccosh(kt)
    Y = x / np.linalg.norm(x, axis=-1, keepdims=True)
    radial = np.concatenate([np.cosh(kr)[..., None] * Y, np.sinh(kr)[..., None]], axis=-1)
    sign = np.sign(lorentz_dot(w, radial))
    sign[sign == 0] = 1.0
    return w * sign[..., None]


def lorentz_complement(rows):
    """Vector Lorentz-orthogonal to the last-axis rows of ``rows`` (shape (..., m, m+1))."""
    m1 = rows.shape[-1]
    w = np.empty(rows.shape[:-2] + (m1,))
    for i in range(m1):
        cols = [c for c in range(m1) if c != i]
        w[..., i] = (-1) ** i * np.linalg.det(rows[..., cols])
    w[..., -1] *= -1.0
    return w


class AxisymmetricGrid:
    """Surfaces of revolution about the e_1 axis, any n >= 3.

    Positions are stored in the reduced meridian plane ``(a, b, t)`` where the
    full vector is ``(a, b z, t)`` with ``z`` on S^{n-2}.  Inner products of
    reduced vectors equal the full ones, so the hyperbolic formulas apply
    unchanged.
    """

    mode = "axisymmetric"

    def __init__(self, n: int, n_theta: int):
        if n < 3:
            raise ValueError("n must be >= 3")
        if n_theta < 4:
            raise ValueError("n_theta must be >= 4")
        self.n = n
        self.n_theta = n_theta
        self.dtheta = math.pi / n_theta
        self.omega = sphere_area(n - 2)
        p = np.arange(2 * n_theta + 1)
        self.theta_fine = p * self.dtheta / 2
        self.theta = self.theta_fine[1::2]
        self.shape = (n_theta,)
        # exact round-sphere cell volumes over midpoint values; ell/sin(theta) is smooth,
        # so this keeps the pole cells consistent for every n
        gx, gw = np.polynomial.legendre.leggauss(32)
        lo = self.theta_fine[0:-1:2]
        nodes = lo[:, None] + (gx[None, :] + 1) * self.dtheta / 2
        exact = (np.sin(nodes) ** (n - 2)) @ gw * self.dtheta / 2
        self.volume_factor = exact / (np.sin(self.theta) ** (n - 2) * self.dtheta)
        # cell average of 1/ell against the volume, relative to its midpoint value
        inv = (np.sin(nodes) ** (n - 3)) @ gw * self.dtheta / 2
        self.inverse_factor = inv / exact * np.sin(self.theta)

    # -- sampling -----------------------------------------------------------
    def fine_directions(self):
        th = self.theta_fine
        return np.stack([np.cos(th), np.sin(th)], axis=-1)

    def profile_angles(self):
        return self.theta_fine, np.zeros_like(self.theta_fine)

    def centers(self, A):
        return A[1::2]

    @staticmethod
    def _reflect(A):
        B = A.copy()
        B[..., 1] *= -1.0
        return B

    def pad(self, A):
        return np.concatenate([self._reflect(A[1:2]), A, self._reflect(A[-2:-1])], axis=0)

    # -- differential geometry -----------------------------------------------
    def tangents(self, Xf):
        Xp = self.pad(Xf)
        return ((Xp[2:] - Xp[:-2]) / self.dtheta,)

    def normals(self, Xf, k):
        (Xt,) = self.tangents(Xf)
        w = lorentz_complement(np.stack([Xf, Xt], axis=-2))
        return _orient(w, Xf, k)

    def metric(self, Xf):
        """Per-fine-point ``(g_thth, ell)`` with ell the rotation radius."""
        (Xt,) = self.tangents(Xf)
        return lorentz_dot(Xt, Xt), np.abs(Xf[..., 1])

    def metric_centers(self, Xf):
        E, ell = self.metric(Xf)
        E, ell = self.centers(E), self.centers(ell)
        g = np.zeros(self.shape + (self.n - 1, self.n - 1))
        g[..., 0, 0] = E
        for a in range(1, self.n - 1):
            g[..., a, a] = ell**2  # round metric on S^{n-2} in orthonormal angular units
        return g

    def shape_fd(self, Xf, Nf):
        """Principal curvatures and shape operator at centres from the embedding."""
        h = self.dtheta / 2
        Xp = self.pad(Xf)
        Xtt = (Xp[2:] - 2 * Xf + Xp[:-2]) / h**2
        (Xt,) = self.tangents(Xf)
        E = lorentz_dot(Xt, Xt)
        lam_mer = -lorentz_dot(Xtt, Nf) / E
        lam_rot = self.centers(Nf[..., 1]) / self.centers(Xf[..., 1])
        lam_mer = self.centers(lam_mer)
        lam = np.concatenate(
            [lam_mer[:, None], np.repeat(lam_rot[:, None], self.n - 2, axis=1)], axis=1
        )
        A = np.zeros(self.shape + (self.n - 1, self.n - 1))
        idx = np.arange(self.n - 1)
        A[:, idx, idx] = lam
        return lam, A

    def area_weights(self, Xf):
        E, ell = self.metric(Xf)
        E, ell = self.centers(E), self.centers(ell)
        return self.omega * ell ** (self.n - 2) * np.sqrt(E) * self.dtheta * self.volume_factor

    def operator(self, Xf, weights):
        return AxisymmetricLaplacian(self, Xf, weights)

    # -- conversions ----------------------------------------------------------
    def to_full(self, V):
        """Reduced (a, b, t) vectors to R^{n,1}, with b placed along e_2."""
        out = np.zeros(V.shape[:-1] + (self.n + 1,))
        out[..., 0] = V[..., 0]
        out[..., 1] = V[..., 1]
        out[..., -1] = V[..., -1]
        return out

    def reduce_covector(self, zeta):
        """Pairing with a full vector after averaging over the rotation orbit."""
        zeta = np.asarray(zeta, dtype=float)
        return np.array([zeta[0], 0.0, zeta[-1]])

    def orbit_average_vector(self, V):
        """Integral of a reduced vector field over orbits, as a full vector."""
        out = np.zeros(V.shape[:-1] + (self.n + 1,))
        out[..., 0] = V[..., 0]
        out[..., -1] = V[..., -1]
        return out

    def orbit_samples(self, zeta):
        """Values c = z . zeta_perp spanning the orbit's range (pointwise checks are affine in c)."""
        zeta = np.asarray(zeta, dtype=float)
        s = np.linalg.norm(zeta[1:-1])
        return np.array([-s, 0.0, s])


class AxisymmetricLaplacian:
    def __init__(self, grid: AxisymmetricGrid, Xf, weights):
        self.grid = grid
        self.w = weights
        h = grid.dtheta
        Xc = grid.centers(Xf)
        Xt_face = (Xc[1:] - Xc[:-1]) / h
        ell = np.abs(Xf[2:-1:2, 1])
        E = lorentz_dot(Xt_face, Xt_face)
        self.c = grid.omega * ell ** (grid.n - 2) / np.sqrt(E) / h

    def divergence(self, f):
        flux = self.c * (f[1:] - f[:-1])
        div = np.zeros_like(f)
        div[:-1] += flux
        div[1:] -= flux
        return div

    def __call__(self, f):
        return self.divergence(f) / self.w

    def apply_vector(self, V):
        return np.stack([self(V[..., i]) for i in range(V.shape[-1])], axis=-1)

    def stiffness(self):
        """|diagonal| of the operator; eigenvalues lie in [-2 max, 0]."""
        d = np.zeros(self.grid.shape)
        d[:-1] += self.c
        d[1:] += self.c
        return d / self.w

    def filtered(self, div):
        return div


class LatLongGrid:
    """Full latitude-longitude grid on S^2 (n = 3).

    Directions are ``(cos th, sin th cos ph, sin th sin ph)``, so theta is
    measured from the e_1 axis exactly as in :class:`AxisymmetricGrid`.
    """

    mode = "full2sphere"

    def __init__(self, n_theta: int, n_phi: int, polar_filter: bool = True):
        if n_theta < 4 or n_phi < 8 or n_phi % 4:
            raise ValueError("need n_theta >= 4 and n_phi a multiple of 4 (>= 8)")
        self.n = 3
        self.n_theta = n_theta
        self.n_phi = n_phi
        self.dtheta = math.pi / n_theta
        self.dphi = 2 * math.pi / n_phi
        self.polar_filter = polar_filter
        self.theta_fine = np.arange(2 * n_theta + 1) * self.dtheta / 2
        self.phi_fine = np.arange(2 * n_phi) * self.dphi / 2
        self.theta = self.theta_fine[1::2]
        self.phi = self.phi_fine[0::2]
        self.shape = (n_theta, n_phi)

    def fine_directions(self):
        th, ph = np.meshgrid(self.theta_fine, self.phi_fine, indexing="ij")
        return np.stack([np.cos(th), np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph)], axis=-1)

    def profile_angles(self):
        return np.meshgrid(self.theta_fine, self.phi_fine, indexing="ij")

    def centers(self, A):
        return A[1::2, 0::2]

    def pad(self, A):
        half = self.n_phi  # pi in fine phi steps
        top = np.roll(A[1:2], -half, axis=1)
        bot = np.roll(A[-2:-1], -half, axis=1)
        return np.concatenate([top, A, bot], axis=0)

    def tangents(self, Xf):
        Xp = self.pad(Xf)
        Xt = (Xp[2:] - Xp[:-2]) / self.dtheta
        Xph = (np.roll(Xf, -1, axis=1) - np.roll(Xf, 1, axis=1)) / self.dphi
        return Xt, Xph

    def normals(self, Xf, k):
        Xt, Xph = self.tangents(Xf)
        T2 = Xph.copy()
        quarter = self.n_phi // 2  # pi/2 in fine phi steps
        for row in (0, -1):
            T2[row] = np.roll(Xt[row], -quarter, axis=0)
        w = lorentz_complement(np.stack([Xf, Xt, T2], axis=-2))
        return _orient(w, Xf, k)

    def metric(self, Xf):
        Xt, Xph = self.tangents(Xf)
        return lorentz_dot(Xt, Xt), lorentz_dot(Xt, Xph), lorentz_dot(Xph, Xph)

    def metric_centers(self, Xf):
        E, F, G = (self.centers(a) for a in self.metric(Xf))
        g = np.empty(self.shape + (2, 2))
        g[..., 0, 0], g[..., 0, 1], g[..., 1, 0], g[..., 1, 1] = E, F, F, G
        return g

    def shape_fd(self, Xf, Nf):
        ht, hp = self.dtheta / 2, self.dphi / 2
        Xp = self.pad(Xf)
        Xtt = (Xp[2:] - 2 * Xf + Xp[:-2]) / ht**2
        Xpp = (np.roll(Xf, -1, axis=1) - 2 * Xf + np.roll(Xf, 1, axis=1)) / hp**2
        up, dn = Xp[2:], Xp[:-2]
        Xtp = (
            np.roll(up, -1, axis=1) - np.roll(up, 1, axis=1) - np.roll(dn, -1, axis=1) + np.roll(dn, 1, axis=1)
        ) / (4 * ht * hp)
        c = self.centers
        N = c(Nf)
        h = np.empty(self.shape + (2, 2))
        h[..., 0, 0] = -lorentz_dot(c(Xtt), N)
        h[..., 0, 1] = h[..., 1, 0] = -lorentz_dot(c(Xtp), N)
        h[..., 1, 1] = -lorentz_dot(c(Xpp), N)
        g = self.metric_centers(Xf)
        A = np.linalg.solve(g, h)
        lam = principal_from_matrix(A)
        return lam, A

    def area_weights(self, Xf):
        E, F, G = (self.centers(a) for a in self.metric(Xf))
        return np.sqrt(E * G - F * F) * self.dtheta * self.dphi

    def operator(self, Xf, weights):
        return LatLongLaplacian(self, Xf, weights)

    def to_full(self, V):
        return V

    def reduce_covector(self, zeta):
        return np.asarray(zeta, dtype=float)

    def orbit_average_vector(self, V):
        return V

    def orbit_samples(self, zeta):
        return np.array([0.0])


def principal_from_matrix(A):
    """Eigenvalues of 2x2 self-adjoint-w.r.t.-g matrices, ascending."""
    tr = A[..., 0, 0] + A[..., 1, 1]
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    disc = np.sqrt(np.maximum(tr * tr / 4 - det, 0.0))
    return np.stack([tr / 2 - disc, tr / 2 + disc], axis=-1)


class LatLongLaplacian:
    def __init__(self, grid: LatLongGrid, Xf, weights):
        self.grid = grid
        self.w = weights
        E, F, G = grid.metric(Xf)
        sq = np.sqrt(np.maximum(E * G - F * F, 0.0))

        def S(sl):
            s = sq[sl]
            return G[sl] / s, -F[sl] / s, E[sl] / s

        # theta faces (interior rows only; pole faces carry no flux)
        self.tt, self.tp, _ = S((slice(2, -1, 2), slice(0, None, 2)))
        # phi faces
        _, self.pt, self.pp = S((slice(1, None, 2), slice(1, None, 2)))
        self._filter_cut = None
        if grid.polar_filter:
            self._filter_cut = self._cutoffs(Xf)

    def _cutoffs(self, Xf):
        g = self.grid
        E, _, G = (g.centers(a) for a in g.metric(Xf))
        ratio = np.sqrt(G).min(axis=1) * g.dphi / (np.sqrt(E).max(axis=1) * g.dtheta)
        cut = np.full(g.n_theta, g.n_phi // 2 + 1)
        small = ratio < 1.0
        cut[small] = np.maximum(1, np.floor(2 * np.arcsin(ratio[small]) / g.dphi)).astype(int)
        return cut

    def divergence(self, f):
        g = self.grid
        dt, dp = g.dtheta, g.dphi
        half = g.n_phi // 2
        fpc = (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * dp)
        Ft = dp * (self.tt * (f[1:] - f[:-1]) / dt + self.tp * 0.5 * (fpc[1:] + fpc[:-1]))
        fpad = np.concatenate([np.roll(f[:1], -half, axis=1), f, np.roll(f[-1:], -half, axis=1)])
        ftc = (fpad[2:] - fpad[:-2]) / (2 * dt)
        Fp = dt * (
            self.pp * (np.roll(f, -1, axis=1) - f) / dp + self.pt * 0.5 * (ftc + np.roll(ftc, -1, axis=1))
        )
        div = Fp - np.roll(Fp, 1, axis=1)
        div[:-1] += Ft
        div[1:] -= Ft
        return div

    def __call__(self, f):
        return self.divergence(f) / self.w

    def apply_vector(self, V):
        return np.stack([self(V[..., i]) for i in range(V.shape[-1])], axis=-1)

    def filtered(self, div):
        """Drop azimuthal wavenumbers that the theta spacing cannot resolve near the poles."""
        if self._filter_cut is None:
            return div
        cut = self._filter_cut
        rows = np.nonzero(cut <= self.grid.n_phi // 2)[0]
        if rows.size == 0:
            return div
        out = div.copy()
        spec = np.fft.rfft(div[rows], axis=1)
        m = np.arange(spec.shape[1])
        spec[m[None, :] > cut[rows, None]] = 0.0
        out[rows] = np.fft.irfft(spec, n=self.grid.n_phi, axis=1)
        return out

    def stiffness(self):
        g = self.grid
        dt, dp = g.dtheta, g.dphi
        dth = np.zeros(g.shape)
        dth[:-1] += self.tt * dp / dt
        dth[1:] += self.tt * dp / dt
        dph = (self.pp + np.roll(self.pp, 1, axis=1)) * dt / dp
        if self._filter_cut is not None:
            dph = np.minimum(dph, 2 * dth)
        return (dth + dph) / self.w
