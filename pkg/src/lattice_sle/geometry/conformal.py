"""Conformal maps: rectangle -> upper half-plane (Jacobi sn), strip and
normalised half-plane maps used by the martingale observables."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ..errors import ParameterError, SingularEvaluationError
from .lattices import corner_id

AGM_TOL = 1e-12
_THETA_TERMS = 40

# corners of [0, r] x [0, 1] in counterclockwise order
CCW = ("bl", "br", "tr", "tl")
# rotating [0, r] x [0, 1] onto [0, 1/r] x [0, 1] relabels the corners
_ROTATE = {"bl": "tl", "br": "bl", "tr": "br", "tl": "tr"}


@dataclass(frozen=True)
class ConformalMap:
    evaluation: Callable
    derivative: Callable
    domain_tag: str
    params: dict = field(default_factory=dict)

    def __call__(self, z):
        return self.evaluation(z)


def agm(a: float, b: float, tol: float = AGM_TOL) -> float:
    for _ in range(100):
        if abs(a - b) <= tol * abs(a):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return 0.5 * (a + b)


def ellipk(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus k (not m=k^2)."""
    kp = np.sqrt(max(0.0, (1.0 - k) * (1.0 + k)))
    return np.pi / (2.0 * agm(1.0, kp))


def _kk(u):
    # k = 1/sqrt(1+e^{-2u}), k' = 1/sqrt(1+e^{2u}) keeps both accurate
    k = 1.0 / np.sqrt(1.0 + np.exp(-2.0 * u))
    kp = 1.0 / np.sqrt(1.0 + np.exp(2.0 * u))
    return k, kp


def modulus_from_ratio(ratio: float):
    """Solve K(k')/K(k) = ratio for (k, k') by root-finding on AGM values."""
    def f(u):
        k, kp = _kk(u)
        return np.pi / (2 * agm(1.0, k)) / (np.pi / (2 * agm(1.0, kp))) - ratio
    u = brentq(f, -40.0, 40.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=400)
    return _kk(u)


def _thetas(v, q):
    """Jacobi theta functions theta_1..theta_4 at complex v, nome q."""
    v = np.asarray(v, dtype=complex)
    n = np.arange(_THETA_TERMS, dtype=float)
    shape = v.shape
    vv = v.reshape(-1, 1)
    half = q ** ((n + 0.5) ** 2)
    sq = q ** (n[1:] ** 2)
    sgn = (-1.0) ** n
    th1 = 2 * np.sum(sgn * half * np.sin((2 * n + 1) * vv), axis=1)
    th2 = 2 * np.sum(half * np.cos((2 * n + 1) * vv), axis=1)
    th3 = 1 + 2 * np.sum(sq * np.cos(2 * n[1:] * vv), axis=1)
    th4 = 1 + 2 * np.sum(sgn[1:] * sq * np.cos(2 * n[1:] * vv), axis=1)
    return (th1.reshape(shape), th2.reshape(shape), th3.reshape(shape), th4.reshape(shape))


class JacobiElliptic:
    """sn, cn, dn for complex argument via theta quotients."""

    def __init__(self, k: float, kp: float):
        self.k, self.kp = k, kp
        self.K = np.pi / (2 * agm(1.0, kp))
        self.Kp = np.pi / (2 * agm(1.0, k))
        self.q = np.exp(-np.pi * self.Kp / self.K)
        _, t2, t3, t4 = _thetas(np.zeros(1), self.q)
        self.t2, self.t3, self.t4 = float(t2[0].real), float(t3[0].real), float(t4[0].real)

    def sncndn(self, u):
        v = np.pi * np.asarray(u, dtype=complex) / (2 * self.K)
        th1, th2, th3, th4 = _thetas(v, self.q)
        sn = (self.t3 / self.t2) * th1 / th4
        cn = (self.t4 / self.t2) * th2 / th4
        dn = (self.t4 / self.t3) * th3 / th4
        return sn, cn, dn


def rect_to_halfplane(aspect: float, a_corner="tl", b_corner="br") -> ConformalMap:
    """Conformal map of [0,aspect] x [0,1] onto the upper half-plane, a -> 0, b -> inf.

    The map is sn composed with a real Moebius map; the scale is fixed so the
    two remaining corners have images with product of moduli 1.
    """
    if not (0.1 <= aspect <= 10.0):
        raise ParameterError(f"aspect {aspect} outside [0.1, 10]")
    a_corner, b_corner = corner_id(a_corner), corner_id(b_corner)
    if a_corner == b_corner:
        raise ParameterError("a_corner and b_corner must differ")
    if aspect < 1.0:
        inner = rect_to_halfplane(1.0 / aspect, _ROTATE[a_corner], _ROTATE[b_corner])
        r = aspect

        def ev(z):
            return inner.evaluation(-1j * (np.asarray(z, dtype=complex) - r) / r)

        def der(z):
            return inner.derivative(-1j * (np.asarray(z, dtype=complex) - r) / r) * (-1j / r)

        corners = {c: inner.params["corner_images"][_ROTATE[c]] for c in CCW}
        return ConformalMap(ev, der, "rectangle->halfplane",
                            {"aspect": aspect, "a": a_corner, "b": b_corner,
                             "corner_images": corners, "k": inner.params["k"]})
    r = float(aspect)
    k, kp = modulus_from_ratio(2.0 / r)
    jac = JacobiElliptic(k, kp)
    scale = 2 * jac.K / r
    pre = {"bl": -1.0, "br": 1.0, "tr": 1.0 / k, "tl": -1.0 / k}
    sa, sb = pre[a_corner], pre[b_corner]
    others = [c for c in CCW if c not in (a_corner, b_corner)]
    raw = [(pre[c] - sa) / (pre[c] - sb) for c in others]
    lam = 1.0 / np.sqrt(abs(raw[0] * raw[1]))
    if lam * (sa - sb) < 0:
        lam = -lam

    def moebius(s):
        return lam * (s - sa) / (s - sb)

    def ev(z):
        zeta = (np.asarray(z, dtype=complex) - r / 2) * scale
        sn, _, _ = jac.sncndn(zeta)
        return moebius(sn)

    def der(z):
        zeta = (np.asarray(z, dtype=complex) - r / 2) * scale
        sn, cn, dn = jac.sncndn(zeta)
        return lam * (sa - sb) / (sn - sb) ** 2 * cn * dn * scale

    corners = {c: (np.inf if c == b_corner else float(np.real(moebius(pre[c])))) for c in CCW}
    return ConformalMap(ev, der, "rectangle->halfplane",
                        {"aspect": r, "a": a_corner, "b": b_corner, "corner_images": corners,
                         "k": k, "K": jac.K, "Kp": jac.Kp})


def corner_cross_ratio(aspect: float, a_corner="tl") -> float:
    """u = x/(x-y) for corners a, x, b, y counterclockwise with a -> 0, b -> inf.

    This is the Cardy modulus for crossing between the arcs [a,x] and [b,y].
    """
    a_corner = corner_id(a_corner)
    i = CCW.index(a_corner)
    x, b, y = CCW[(i + 1) % 4], CCW[(i + 2) % 4], CCW[(i + 3) % 4]
    m = rect_to_halfplane(aspect, a_corner, b)
    img = m.params["corner_images"]
    return img[x] / (img[x] - img[y])


def sc_cross_ratio_oracle(aspect: float, a_corner="tl") -> float:
    """Independent Schwarz-Christoffel check of ``corner_cross_ratio``.

    Prevertices (0, s, 1, inf) for a rectangle; the side-length ratio is
    matched by quadrature of |f'| = |w(w-s)(w-1)|^{-1/2}.
    """
    import warnings

    from scipy.integrate import IntegrationWarning, quad

    def sides(s):
        # endpoint singularities handled by algebraic quadrature weights
        l1 = quad(lambda w: 1.0 / np.sqrt(1.0 - w), 0, s, weight="alg", wvar=(-0.5, -0.5),
                  epsabs=1e-15, epsrel=1e-14, limit=200)[0]
        l2 = quad(lambda w: 1.0 / np.sqrt(w), s, 1, weight="alg", wvar=(-0.5, -0.5),
                  epsabs=1e-15, epsrel=1e-14, limit=200)[0]
        return l1, l2

    # sides [0,s] and [s,1] are consecutive edges of the rectangle
    def g(x):
        s = 1.0 / (1.0 + np.exp(-x))
        l1, l2 = sides(s)
        return np.log(l1 / l2)

    a_corner = corner_id(a_corner)
    i = CCW.index(a_corner)
    # the sides from a: [a,x] then [x,b]; horizontal sides have length aspect
    first_horizontal = a_corner in ("bl", "tr")
    target = aspect if first_horizontal else 1.0 / aspect
    with warnings.catch_warnings():
        # the bracket ends are deliberately extreme
        warnings.simplefilter("ignore", IntegrationWarning)
        x = brentq(lambda x: g(x) - np.log(target), -30, 30, xtol=1e-14)
    s = 1.0 / (1.0 + np.exp(-x))
    # prevertices a=0, x=s, b=1, y=inf  ->  send a to 0 and b to inf: w -> w/(1-w)
    X = s / (1 - s)
    # y = inf maps to -1
    return X / (X + 1.0)


def halfplane_to_strip() -> ConformalMap:
    """Phi(z) = log(z)/pi: sends 0 -> -inf, inf -> +inf, onto the strip 0 < Im < 1."""
    return ConformalMap(lambda z: np.log(np.asarray(z, dtype=complex)) / np.pi,
                        phi_prime, "halfplane->strip")


def _check_upper(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise SingularEvaluationError("evaluation point must lie in the open upper half-plane")
    return z


def phi_prime(z):
    """Phi'(z) = 1/(pi z) for the strip map with a = 0, b = inf."""
    z = _check_upper(z)
    out = 1.0 / (np.pi * z)
    return out if out.ndim else complex(out)


def psi_prime(z, b_image=np.inf):
    """Psi' for the half-plane self-map sending a = 0 to inf and b to 0.

    Psi(z) = (z - b)/(sign(b) z) for finite b, Psi(z) = -1/z when b = inf.
    """
    z = _check_upper(z)
    if np.isinf(b_image):
        out = 1.0 / z ** 2
    else:
        if b_image == 0:
            raise SingularEvaluationError("b must differ from a = 0")
        out = abs(b_image) / z ** 2
    return out if out.ndim else complex(out)


def halfplane_normalized(b_image=np.inf) -> ConformalMap:
    if np.isinf(b_image):
        return ConformalMap(lambda z: -1.0 / np.asarray(z, dtype=complex),
                            lambda z: psi_prime(z), "halfplane->halfplane-normalized")
    sgn = np.sign(b_image)
    return ConformalMap(lambda z: (np.asarray(z, dtype=complex) - b_image) / (sgn * np.asarray(z)),
                        lambda z: psi_prime(z, b_image), "halfplane->halfplane-normalized",
                        {"b": b_image})


def domain_to_halfplane(domain) -> ConformalMap:
    """Map a rectangle lattice domain to H with its marked corners at 0 and inf."""
    from .lattices import continuum_rectangle, local_coords
    x0, y0, w, h = continuum_rectangle(domain)
    ac, bc = domain.extra["corners"]
    inner = rect_to_halfplane(w / h, ac, bc)
    lat = domain.lattice

    def to_unit(z):
        return (local_coords(domain, z) - complex(x0, y0)) / h

    rot = np.exp(-1j * lat.orientation)
    return ConformalMap(lambda z: inner.evaluation(to_unit(z)),
                        lambda z: inner.derivative(to_unit(z)) * rot / h,
                        "rectangle->halfplane", dict(inner.params, rect=(x0, y0, w, h)))
