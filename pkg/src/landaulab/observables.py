"""Densities, probability currents, OAM densities, and expectation values.

The gauge-invariant probability current of a state in the symmetric gauge
splits into a canonical (paramagnetic) and a gauge (diamagnetic) piece; for
an eigenstate both are purely azimuthal:

    j_can_phi   = (1/m_e) (m/r) rho(r)
    j_gauge_phi = (1/m_e) (r / (2 l_B^2)) rho(r)

with rho(r) = R(r)^2 / (2 pi).  The matching OAM densities (z-components,
per unit area) are l_can = m rho, l_gauge = (r^2/(2 l_B^2)) rho, and the
mechanical density l_mech = l_can + l_gauge = m_e (r x j)_z.  The potential
OAM density is l_pot = -l_gauge.

Every closed-form expectation value has a quadrature twin computed by the
radial engine in this module, so the identities can be cross-validated
rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .states import LandauState

__all__ = [
    "QuadratureSpec",
    "integrate_radial",
    "density",
    "CurrentDecomposition",
    "current_decomposition",
    "OAMDecomposition",
    "oam_decomposition",
    "expect_closed_form",
    "expect_quadrature",
    "expect_table",
    "AngularVelocity",
    "angular_velocity",
    "bohmian_angular_velocity",
    "bohmian_density_average",
    "FieldGrid",
    "field_grid",
    "oam_grid",
    "save_density_figure",
    "save_current_figure",
    "save_oam_figure",
]

QUADRATURE_SCHEMES = ("adaptive-simpson", "gauss-legendre-mapped")
EXPECTATION_KINDS = ("l_can", "l_gauge", "l_mech", "r2", "inv_r2", "norm")

_SIMPSON_RTOL = 1e-11
_SIMPSON_ATOL = 1e-13
_SIMPSON_MAX_DEPTH = 26
_GL_ORDER = 12


@dataclass(frozen=True)
class QuadratureSpec:
    """Radial integration window and scheme.

    r_max truncates [0, inf); the default keeps the integrand at r_max below
    1e-14 of its peak even for the ground state, whose Gaussian tail is the
    slowest to die relative to its turning radius.  n_points is the panel
    count: initial panels for the adaptive scheme, fixed panels for the
    mapped Gauss-Legendre scheme.
    """

    r_max: float
    n_points: int = 64
    scheme: str = "adaptive-simpson"

    def __post_init__(self):
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if self.n_points < 1:
            raise ValueError(f"n_points must be >= 1, got {self.n_points}")
        if self.scheme not in QUADRATURE_SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {QUADRATURE_SCHEMES}")

    @classmethod
    def for_state(cls, state: LandauState, scheme: str = "adaptive-simpson",
                  n_points: int = 64) -> "QuadratureSpec":
        l_B = state.units.magnetic_length
        return cls(r_max=3.0 * state.turning_radius + 8.0 * l_B,
                   n_points=n_points, scheme=scheme)


@lru_cache(maxsize=8)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def _gauss_legendre_mapped(f, a, b, panels, order=_GL_ORDER):
    """Composite Gauss-Legendre on [a, b] mapped panel by panel.

    Supports stacked integrands: f may return shape (..., n_nodes); the
    node axis is contracted with the weights.
    """
    nodes, weights = _leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return np.asarray(f(x), dtype=float) @ w


def _adaptive_simpson(f, a, b, rtol=_SIMPSON_RTOL, atol=_SIMPSON_ATOL,
                      initial_panels=64, max_depth=_SIMPSON_MAX_DEPTH):
    """Locally adaptive Simpson with Richardson correction.

    The worklist of unconverged intervals is processed as arrays, so f is
    always called on batches of points and must be vectorized.
    """
    span = float(b - a)
    edges = np.linspace(a, b, initial_panels + 1)
    left, right = edges[:-1], edges[1:]
    mid = 0.5 * (left + right)
    fl = np.asarray(f(left), dtype=float)
    fm = np.asarray(f(mid), dtype=float)
    fr = np.asarray(f(right), dtype=float)
    s = (right - left) / 6.0 * (fl + 4.0 * fm + fr)
    depth = np.zeros(left.size, dtype=np.int64)

    result = 0.0
    total = float(s.sum())
    while left.size:
        lm = 0.5 * (left + mid)
        rm = 0.5 * (mid + right)
        flm = np.asarray(f(lm), dtype=float)
        frm = np.asarray(f(rm), dtype=float)
        sl = (mid - left) / 6.0 * (fl + 4.0 * flm + fm)
        sr = (right - mid) / 6.0 * (fm + 4.0 * frm + fr)
        s2 = sl + sr
        err = (s2 - s) / 15.0
        tol = np.maximum(atol, rtol * abs(total)) * (right - left) / span
        done = (np.abs(err) <= tol) | (depth >= max_depth)
        result += float((s2 + err)[done].sum())
        keep = ~done
        if not keep.any():
            break
        left = np.concatenate([left[keep], mid[keep]])
        new_mid = np.concatenate([lm[keep], rm[keep]])
        right = np.concatenate([mid[keep], right[keep]])
        fl, fm, fr = (
            np.concatenate([fl[keep], fm[keep]]),
            np.concatenate([flm[keep], frm[keep]]),
            np.concatenate([fm[keep], fr[keep]]),
        )
        mid = new_mid
        s = np.concatenate([sl[keep], sr[keep]])
        depth = np.concatenate([depth[keep] + 1, depth[keep] + 1])
        total = result + float(s.sum())
    return result


def integrate_radial(f, spec: QuadratureSpec):
    """Integrate a vectorized radial function over [0, spec.r_max]."""
    if spec.scheme == "adaptive-simpson":
        return _adaptive_simpson(f, 0.0, spec.r_max, initial_panels=spec.n_points)
    return _gauss_legendre_mapped(f, 0.0, spec.r_max, panels=spec.n_points)


# ---------------------------------------------------------------------------
# local densities
# ---------------------------------------------------------------------------

def density(state: LandauState, r):
    """Probability density rho(r) = R(r)^2 / (2 pi); integrates to 1 over d^2r."""
    R = state.radial(r)
    return R * R / (2.0 * math.pi)


@dataclass(frozen=True)
class CurrentDecomposition:
    """Azimuthal current components sampled on a radial grid.

    The radial and z components vanish identically for eigenstates, so only
    the phi components are carried.  j_total_phi = j_can_phi + j_gauge_phi
    holds pointwise by construction.
    """

    r: np.ndarray
    j_can_phi: np.ndarray
    j_gauge_phi: np.ndarray
    j_total_phi: np.ndarray


def current_decomposition(state: LandauState, r) -> CurrentDecomposition:
    """Canonical, gauge, and total azimuthal current at radius r.

    At r = 0 with m != 0 the canonical piece is returned as exactly 0: the
    density vanishes as r^{2|m|}, faster than the 1/r factor diverges, so 0
    is the continuous limit.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rho = density(state, r)
    inv_mass = 1.0 / state.units.mass
    with np.errstate(divide="ignore", invalid="ignore"):
        j_can = inv_mass * state.m * rho / r
    j_can = np.where(r > 0.0, j_can, 0.0)
    j_gauge = inv_mass * r / (2.0 * state.units.magnetic_length**2) * rho
    return CurrentDecomposition(r=r, j_can_phi=j_can, j_gauge_phi=j_gauge,
                                j_total_phi=j_can + j_gauge)


@dataclass(frozen=True)
class OAMDecomposition:
    """z-component OAM densities per unit area on a radial grid."""

    r: np.ndarray
    l_can: np.ndarray
    l_gauge: np.ndarray
    l_mech: np.ndarray

    @property
    def l_pot(self) -> np.ndarray:
        """Potential OAM density, the negative of the gauge density."""
        return -self.l_gauge


def oam_decomposition(state: LandauState, r) -> OAMDecomposition:
    """Canonical, gauge, and mechanical OAM densities at radius r.

    Satisfies l_mech = l_can + l_gauge pointwise and equals m_e r j_total_phi.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rho = density(state, r)
    l_can = state.m * rho
    l_gauge = r**2 / (2.0 * state.units.magnetic_length**2) * rho
    return OAMDecomposition(r=r, l_can=l_can, l_gauge=l_gauge, l_mech=l_can + l_gauge)


# ---------------------------------------------------------------------------
# expectation values
# ---------------------------------------------------------------------------

def expect_closed_form(state: LandauState) -> dict[str, float]:
    """Closed-form expectation values in the state (n, m).

    <l_can> = m, <l_gauge> = 2n+1-m, <l_pot> = -(2n+1-m), <l_mech> = 2n+1,
    <r_c^2> = (2n+1) l_B^2, and <R^2> = (2n-2m+1) l_B^2, where r_c is the
    orbit radius and R the distance of the orbit center from the origin.
    """
    n = state.landau_index
    m = state.m
    lb2 = state.units.magnetic_length**2
    return {
        "l_can": float(m),
        "l_gauge": float(2 * n + 1 - m),
        "l_pot": float(-(2 * n + 1 - m)),
        "l_mech": float(2 * n + 1),
        "rc2": (2 * n + 1) * lb2,
        "R2": (2 * n - 2 * m + 1) * lb2,
    }


def _expect_integrand(state: LandauState, which: str):
    lb2 = state.units.magnetic_length**2
    m = state.m

    def base(r):
        R = state.radial(r)
        return R * R

    if which == "norm":
        return lambda r: base(r) * r
    if which == "l_can":
        return lambda r: m * base(r) * r
    if which == "l_gauge":
        return lambda r: base(r) * r**3 / (2.0 * lb2)
    if which == "l_mech":
        return lambda r: base(r) * r * (m + r**2 / (2.0 * lb2))
    if which == "r2":
        return lambda r: base(r) * r**3
    if which == "inv_r2":
        def integrand(r):
            with np.errstate(divide="ignore", invalid="ignore"):
                g = base(r) / r
            return np.where(r > 0.0, g, 0.0)
        return integrand
    raise ValueError(f"unknown expectation kind {which!r}, expected one of {EXPECTATION_KINDS}")


def expect_quadrature(state: LandauState, which: str,
                      spec: QuadratureSpec | None = None) -> float:
    """Expectation value by direct radial quadrature over the plane.

    `which` is one of l_can, l_gauge, l_mech, r2, inv_r2, norm.  inv_r2
    means <1/r^2> and requires m != 0 (the integral diverges for m = 0).
    """
    if which == "inv_r2" and state.m == 0:
        raise ValueError("<1/r^2> diverges for m = 0 states")
    if spec is None:
        spec = QuadratureSpec.for_state(state)
    return float(integrate_radial(_expect_integrand(state, which), spec))


def expect_table(state: LandauState, spec: QuadratureSpec | None = None) -> dict:
    """Closed form vs quadrature for every validated expectation value.

    <r_c^2> comes from the energy relation (1/2) m_e omega_c^2 <r_c^2> = E,
    i.e. <r_c^2> = l_B^2 <l_mech>; <R^2> comes from combining <r^2> =
    <r_c^2> + <R^2> with the orbit-center relation <r_c^2> - <R^2> =
    2 l_B^2 <l_can>, giving <R^2> = (<r^2> - 2 l_B^2 <l_can>)/2.  Both
    therefore have genuine quadrature routes through local densities.
    """
    if spec is None:
        spec = QuadratureSpec.for_state(state)
    lb2 = state.units.magnetic_length**2
    closed = expect_closed_form(state)
    quad = {k: expect_quadrature(state, k, spec) for k in ("norm", "l_can", "l_gauge", "l_mech", "r2")}

    rows = {}

    def add(name, closed_value, quad_value):
        if closed_value == 0.0:
            rel = abs(quad_value)
        else:
            rel = abs(quad_value - closed_value) / abs(closed_value)
        rows[name] = {"closed": closed_value, "quadrature": quad_value, "rel_err": rel}

    add("norm", 1.0, quad["norm"])
    add("l_can", closed["l_can"], quad["l_can"])
    add("l_gauge", closed["l_gauge"], quad["l_gauge"])
    add("l_mech", closed["l_mech"], quad["l_mech"])
    add("rc2", closed["rc2"], lb2 * quad["l_mech"])
    add("R2", closed["R2"], 0.5 * (quad["r2"] - 2.0 * lb2 * quad["l_can"]))
    if state.m != 0:
        inv = expect_quadrature(state, "inv_r2", spec)
        add("inv_r2", 1.0 / (2.0 * lb2 * abs(state.m)), inv)
    return rows


# ---------------------------------------------------------------------------
# angular velocity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngularVelocity:
    """Mean rotation rate split into its canonical and gauge contributions.

    The gauge current always contributes the Larmor frequency; the canonical
    current contributes sign(m) times the Larmor frequency and nothing for
    m = 0, where it vanishes identically.  The total lands on one of the
    three classes {0, omega_L, omega_c}.
    """

    canonical: float
    gauge: float

    @property
    def total(self) -> float:
        return self.canonical + self.gauge


def angular_velocity(state: LandauState) -> AngularVelocity:
    larmor = state.units.larmor
    if state.m > 0:
        canonical = larmor
    elif state.m < 0:
        canonical = -larmor
    else:
        canonical = 0.0
    return AngularVelocity(canonical=canonical, gauge=larmor)


def bohmian_angular_velocity(state: LandauState, r):
    """Local rotation rate omega(r) = j_total_phi / (r rho).

    Equals (1/m_e)(m/r^2 + 1/(2 l_B^2)); diverges at r -> 0 for m != 0.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    inv_mass = 1.0 / state.units.mass
    with np.errstate(divide="ignore"):
        omega = inv_mass * (state.m / r**2 + 1.0 / (2.0 * state.units.magnetic_length**2))
    return omega


def bohmian_density_average(state: LandauState, spec: QuadratureSpec | None = None) -> float:
    """Density-weighted mean of omega(r) over the plane.

    By axial symmetry this also equals the average over any half-plane
    bounded by a line through the origin, which is what the knife-edge
    rotation estimate is checked against.  For m = 0 the canonical term
    vanishes identically and the average is exactly the Larmor frequency.
    """
    inv_mass = 1.0 / state.units.mass
    gauge_term = inv_mass / (2.0 * state.units.magnetic_length**2)
    if state.m == 0:
        return gauge_term
    if spec is None:
        spec = QuadratureSpec.for_state(state)
    norm = expect_quadrature(state, "norm", spec)
    inv_r2 = expect_quadrature(state, "inv_r2", spec)
    return (inv_mass * state.m * inv_r2 + gauge_term * norm) / norm


# ---------------------------------------------------------------------------
# sampled fields
# ---------------------------------------------------------------------------

@dataclass
class FieldGrid:
    """Scalar/vector fields sampled on a Cartesian grid.

    Coordinates are 1D arrays in units of l_B; each field has shape
    (len(x), len(y)) with fields[name][i, j] the value at (x[i], y[j]).
    CSV export writes one row per grid point, x-major, with the column
    order fixed as X, Y, then the field names in insertion order.
    """

    x: np.ndarray
    y: np.ndarray
    fields: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    @property
    def cell_area(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))

    def column_names(self) -> list[str]:
        return ["X", "Y"] + list(self.fields)

    def to_csv(self, path) -> None:
        names = list(self.fields)
        arrays = [self.fields[k] for k in names]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(self.column_names()) + "\n")
            for i, xi in enumerate(self.x):
                for j, yj in enumerate(self.y):
                    row = [repr(float(xi)), repr(float(yj))]
                    row += [repr(float(a[i, j])) for a in arrays]
                    fh.write(",".join(row) + "\n")


def _default_extent(state: LandauState) -> float:
    return state.turning_radius + 5.0 * state.units.magnetic_length


def field_grid(state: LandauState, extent: float | None = None, n: int = 201) -> FieldGrid:
    """Sample rho and the three current fields on a square Cartesian grid.

    Components are Cartesian projections of the azimuthal currents:
    jx = -j_phi sin(phi), jy = j_phi cos(phi).
    """
    if extent is None:
        extent = _default_extent(state)
    if extent <= 0 or n < 2:
        raise ValueError("grid extent and resolution must be positive")
    x = np.linspace(-extent, extent, n)
    y = np.linspace(-extent, extent, n)
    X, Y = np.meshgrid(x, y, indexing="ij")
    R = np.hypot(X, Y)
    with np.errstate(invalid="ignore"):
        cos_phi = np.where(R > 0, X / R, 1.0)
        sin_phi = np.where(R > 0, Y / R, 0.0)
    cd = current_decomposition(state, R.ravel())
    rho = density(state, R)
    parts = {
        "can": cd.j_can_phi.reshape(R.shape),
        "gauge": cd.j_gauge_phi.reshape(R.shape),
        "tot": cd.j_total_phi.reshape(R.shape),
    }
    fields = {"rho": rho}
    for name, j_phi in parts.items():
        fields[f"jx_{name}"] = -j_phi * sin_phi
        fields[f"jy_{name}"] = j_phi * cos_phi
    meta = {"n_r": state.n_r, "m": state.m, "extent": float(extent), "n": int(n),
            "quantity": "density+currents"}
    return FieldGrid(x=x, y=y, fields=fields, meta=meta)


def oam_grid(state: LandauState, extent: float | None = None, n: int = 201) -> FieldGrid:
    """Sample the OAM densities (canonical, gauge, potential, mechanical)."""
    if extent is None:
        extent = _default_extent(state)
    if extent <= 0 or n < 2:
        raise ValueError("grid extent and resolution must be positive")
    x = np.linspace(-extent, extent, n)
    y = np.linspace(-extent, extent, n)
    X, Y = np.meshgrid(x, y, indexing="ij")
    R = np.hypot(X, Y)
    od = oam_decomposition(state, R.ravel())
    shape = R.shape
    fields = {
        "l_can": od.l_can.reshape(shape),
        "l_gauge": od.l_gauge.reshape(shape),
        "l_pot": (-od.l_gauge).reshape(shape),
        "l_mech": od.l_mech.reshape(shape),
    }
    meta = {"n_r": state.n_r, "m": state.m, "extent": float(extent), "n": int(n),
            "quantity": "oam-densities"}
    return FieldGrid(x=x, y=y, fields=fields, meta=meta)


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_density_figure(grid: FieldGrid, path) -> None:
    """Grayscale density map (bright = high density)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    extent = [grid.x[0], grid.x[-1], grid.y[0], grid.y[-1]]
    ax.imshow(grid.fields["rho"].T, origin="lower", extent=extent, cmap="gray")
    ax.set_xlabel("x / l_B")
    ax.set_ylabel("y / l_B")
    ax.set_title(f"density  n_r={grid.meta.get('n_r')}, m={grid.meta.get('m')}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_current_figure(grid: FieldGrid, path, arrow_stride: int | None = None) -> None:
    """Three panels: canonical, gauge, and total current over the density."""
    plt = _pyplot()
    fig, axes = plt.subplots(1, 3, figsize=(13, 4.4))
    extent = [grid.x[0], grid.x[-1], grid.y[0], grid.y[-1]]
    if arrow_stride is None:
        arrow_stride = max(1, len(grid.x) // 24)
    sl = slice(arrow_stride // 2, None, arrow_stride)
    X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
    for ax, name, title in zip(axes, ("can", "gauge", "tot"),
                               ("canonical current", "gauge current", "total current")):
        ax.imshow(grid.fields["rho"].T, origin="lower", extent=extent, cmap="gray")
        ax.quiver(X[sl, sl], Y[sl, sl],
                  grid.fields[f"jx_{name}"][sl, sl], grid.fields[f"jy_{name}"][sl, sl],
                  color="red", pivot="mid")
        ax.set_title(title)
        ax.set_xlabel("x / l_B")
    axes[0].set_ylabel("y / l_B")
    fig.suptitle(f"n_r={grid.meta.get('n_r')}, m={grid.meta.get('m')}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_oam_figure(grid: FieldGrid, path) -> None:
    """Three panels: canonical, -potential (= gauge), and mechanical OAM density."""
    plt = _pyplot()
    fig, axes = plt.subplots(1, 3, figsize=(13, 4.4))
    extent = [grid.x[0], grid.x[-1], grid.y[0], grid.y[-1]]
    scale = max(abs(grid.fields["l_mech"]).max(), abs(grid.fields["l_can"]).max()) or 1.0
    for ax, name, title in zip(axes, ("l_can", "l_gauge", "l_mech"),
                               ("canonical OAM", "(-1) x potential OAM", "mechanical OAM")):
        im = ax.imshow(grid.fields[name].T, origin="lower", extent=extent,
                       cmap="RdBu_r", vmin=-scale, vmax=scale)
        ax.set_title(title)
        ax.set_xlabel("x / l_B")
    axes[0].set_ylabel("y / l_B")
    fig.colorbar(im, ax=axes, shrink=0.8)
    fig.suptitle(f"n_r={grid.meta.get('n_r')}, m={grid.meta.get('m')}")
    fig.savefig(path, dpi=150)
    plt.close(fig)
