"""Fourier analysis of torus grids and the folded series on the sphere.

Coefficients follow the integral convention

    c_n = (2 pi)^-2 * integral over T^2 of f(x) exp(-i <n, x>) dx,

approximated by the plain DFT of an equispaced grid starting at -pi in both
angles; the approximation is exact (up to rounding) for trigonometric
polynomials below the Nyquist bound of the grid. Grids produced by the
doubling construction carry the coefficient symmetry

    c_n = (-1)^{n1} c_{M(n)},   M(n1, n2) = (n1, -n2),

which is what allows the series to be folded onto the half domain Z x N0 and
pushed down to the sphere.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .geometry import dfs_coord, dfs_coord_inverse

__all__ = [
    "CoefficientTable",
    "FoldedCoefficientTable",
    "SpectralSet",
    "compute_coefficients",
    "partial_sum_torus",
    "partial_sum_grid",
    "basis_e",
    "basis_b",
    "weighted_inner_product",
    "quadrature_rule",
    "gram_matrix",
    "dfs_fourier_sum",
    "fold_coefficients",
    "unfold_coefficients",
    "coeff_io_write",
    "coeff_io_read",
]

COEFF_MAGIC = b"DFSC"
COEFF_VERSION = 1

#: direct point-evaluation is chunked to keep peak memory bounded
_CHUNK = 1 << 21


def _alternating(n):
    """(-1)**n for integer arrays, as floats."""
    return np.where(np.asarray(n) % 2 == 0, 1.0, -1.0)


@dataclass
class CoefficientTable:
    """Centered table of Fourier coefficients.

    ``values[j, k]`` is c_(n1, n2) with n2 = j - N2//2 and n1 = k - N1//2, so
    the index ranges are n1 in [-N1/2, N1/2) and n2 in [-N2/2, N2/2).
    """

    values: np.ndarray
    normalization: str = "integral"
    source_bmc: bool = False

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=complex)
        if self.values.ndim != 2:
            raise ValueError("coefficient table must be a 2-d array")
        n2, n1 = self.values.shape
        if n1 % 2 or n2 % 2:
            raise ValueError(f"coefficient table dimensions must be even, got {n2} x {n1}")

    @property
    def n1_values(self):
        n1 = self.values.shape[1]
        return np.arange(-(n1 // 2), n1 // 2)

    @property
    def n2_values(self):
        n2 = self.values.shape[0]
        return np.arange(-(n2 // 2), n2 // 2)

    @property
    def max_degree(self):
        """Largest h such that the full square |n1|, |n2| <= h is stored."""
        return min(self.values.shape[0] // 2 - 1, self.values.shape[1] // 2 - 1)

    def coeff(self, n1, n2):
        """Coefficient c_(n1, n2); indices may be arrays."""
        n1 = np.asarray(n1)
        n2 = np.asarray(n2)
        N2, N1 = self.values.shape
        if np.any(n1 < -(N1 // 2)) or np.any(n1 >= N1 // 2) or np.any(n2 < -(N2 // 2)) or np.any(n2 >= N2 // 2):
            raise ValueError("spectral index outside the table range")
        return self.values[n2 + N2 // 2, n1 + N1 // 2]

    def symmetry_violation(self):
        """Max |c_n - (-1)^{n1} c_{M(n)}| relative to the largest coefficient.

        The reflection is taken modulo the table size, so the Nyquist row
        pairs with itself; the relative scale is global because individual
        coefficients may be exactly zero.
        """
        N2 = self.values.shape[0]
        rows = (-(self.n2_values) + N2 // 2) % N2
        reflected = self.values[rows, :]
        resid = np.abs(self.values - _alternating(self.n1_values)[None, :] * reflected)
        scale = np.max(np.abs(self.values))
        return float(np.max(resid) / scale) if scale > 0 else 0.0

    def conjugate_symmetry_violation(self):
        """Max |c_{-n} - conj(c_n)| relative to the largest coefficient."""
        N2, N1 = self.values.shape
        rows = (-(self.n2_values) + N2 // 2) % N2
        cols = (-(self.n1_values) + N1 // 2) % N1
        reflected = self.values[np.ix_(rows, cols)]
        resid = np.abs(reflected - np.conj(self.values))
        scale = np.max(np.abs(self.values))
        return float(np.max(resid) / scale) if scale > 0 else 0.0


@dataclass
class FoldedCoefficientTable:
    """Half-domain coefficients, rows n2 = 0 .. N2/2 inclusive.

    The last row holds the self-paired Nyquist coefficients so that unfolding
    reproduces the symmetrized full table bit-exactly.
    """

    values: np.ndarray
    normalization: str = "integral"

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=complex)
        if self.values.ndim != 2 or self.values.shape[1] % 2:
            raise ValueError("folded table must be 2-d with an even number of columns")

    @property
    def n1_values(self):
        n1 = self.values.shape[1]
        return np.arange(-(n1 // 2), n1 // 2)

    @property
    def n2_values(self):
        return np.arange(self.values.shape[0])


@dataclass(frozen=True)
class SpectralSet:
    """Finite truncation set over Z^2 (or Z x N0 when ``half`` is set).

    ``rectangle``: max(|n1|, |n2|) <= degree.
    ``ball``: |n|_p <= degree with p given by ``norm`` ("l1" or "l2").
    Membership uses exact integer arithmetic.
    """

    shape: str
    degree: int
    norm: str = "l2"
    half: bool = False

    def __post_init__(self):
        if self.shape not in ("rectangle", "ball"):
            raise ValueError(f"unknown truncation shape {self.shape!r}")
        if self.norm not in ("l1", "l2"):
            raise ValueError(f"unknown ball norm {self.norm!r}")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")

    def contains(self, n1, n2):
        n1 = np.asarray(n1, dtype=np.int64)
        n2 = np.asarray(n2, dtype=np.int64)
        if self.shape == "rectangle":
            inside = (np.abs(n1) <= self.degree) & (np.abs(n2) <= self.degree)
        elif self.norm == "l1":
            inside = np.abs(n1) + np.abs(n2) <= self.degree
        else:
            inside = n1 * n1 + n2 * n2 <= self.degree * self.degree
        if self.half:
            inside = inside & (n2 >= 0)
        return inside

    def members(self):
        """All member indices as (n1, n2) integer arrays."""
        h = self.degree
        lo2 = 0 if self.half else -h
        n1, n2 = np.meshgrid(np.arange(-h, h + 1), np.arange(lo2, h + 1), indexing="ij")
        keep = self.contains(n1, n2)
        return n1[keep], n2[keep]

    @property
    def size(self):
        return int(np.count_nonzero(self.contains(*np.meshgrid(
            np.arange(-self.degree, self.degree + 1),
            np.arange(0 if self.half else -self.degree, self.degree + 1),
            indexing="ij"))))

    def symmetrized(self):
        """The union with its reflection M(n1, n2) = (n1, -n2).

        Rectangles and balls are reflection-symmetric, so this is simply the
        full-domain set of the same shape and degree.
        """
        return SpectralSet(self.shape, self.degree, self.norm, half=False)


def compute_coefficients(grid):
    """Fourier coefficients of a torus grid under the integral convention.

    Computed with a single 2-d FFT; the factor (-1)^{n1+n2} accounts for the
    grid origin at (-pi, -pi).
    """
    N2, N1 = grid.values.shape
    table = np.fft.fftshift(np.fft.fft2(grid.values)) / (N1 * N2)
    n1 = np.arange(-(N1 // 2), N1 // 2)
    n2 = np.arange(-(N2 // 2), N2 // 2)
    table *= _alternating(n2)[:, None] * _alternating(n1)[None, :]
    return CoefficientTable(table, source_bmc=grid.bmc)


def _require_within_table(table, omega):
    if omega.degree > min(table.values.shape[0] // 2 - 1, table.values.shape[1] // 2 - 1):
        raise ValueError(
            f"truncation degree {omega.degree} exceeds the table range "
            f"(max usable degree {table.max_degree})"
        )


def partial_sum_torus(table, omega, lam, theta):
    """Evaluate the partial Fourier sum over a full-domain set at torus points.

    Direct summation sum_{n in omega} c_n exp(i <n, x>); ``omega=None`` sums
    the whole table. Use :func:`partial_sum_grid` for grid-aligned evaluation
    via the inverse FFT.
    """
    if omega is None:
        G1, G2 = np.meshgrid(table.n1_values, table.n2_values)
        n1, n2 = G1.ravel(), G2.ravel()
    else:
        if omega.half:
            raise ValueError("partial_sum_torus expects a full-domain spectral set")
        _require_within_table(table, omega)
        n1, n2 = omega.members()
    coeffs = table.coeff(n1, n2)
    lam = np.asarray(lam, dtype=float)
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(np.broadcast(lam, theta).shape, dtype=complex)
    flat_l = np.broadcast_to(lam, out.shape).ravel()
    flat_t = np.broadcast_to(theta, out.shape).ravel()
    flat = out.ravel()
    step = max(1, _CHUNK // max(1, len(n1)))
    for s in range(0, flat.size, step):
        sl = slice(s, s + step)
        phase = np.exp(1j * (np.outer(flat_l[sl], n1) + np.outer(flat_t[sl], n2)))
        flat[sl] = phase @ coeffs
    return out if out.shape else complex(flat[0])


def partial_sum_grid(table, omega, n_theta, n_lambda):
    """Partial Fourier sum evaluated on an equispaced torus grid via inverse FFT.

    The truncation block must fit below the Nyquist bound of the target grid
    (``omega=None`` synthesizes the whole table; the target must then be at
    least as large as the table). Agrees with :func:`partial_sum_torus` at the
    grid points to rounding.
    """
    N2, N1 = table.values.shape
    if omega is None:
        if n_theta < N2 or n_lambda < N1:
            raise ValueError("target grid is smaller than the coefficient table")
        n1 = table.n1_values
        n2 = table.n2_values
        block = table.values.copy()
    else:
        if omega.half:
            raise ValueError("partial_sum_grid expects a full-domain spectral set")
        _require_within_table(table, omega)
        h = omega.degree
        if 2 * h + 1 > n_theta or 2 * h + 1 > n_lambda:
            raise ValueError(
                f"target grid {n_theta} x {n_lambda} cannot hold degree-{h} content"
            )
        n1 = np.arange(-h, h + 1)
        n2 = np.arange(-h, h + 1)
        block = table.values[np.ix_(n2 + N2 // 2, n1 + N1 // 2)].copy()
        block[~omega.contains(*np.meshgrid(n1, n2, indexing="xy"))] = 0.0
    block *= _alternating(n2)[:, None] * _alternating(n1)[None, :]
    spec = np.zeros((n_theta, n_lambda), dtype=complex)
    spec[np.ix_(n2 % n_theta, n1 % n_lambda)] = block
    from .grids import TorusGrid

    return TorusGrid(np.fft.ifft2(spec) * (n_theta * n_lambda))


def basis_e(n1, n2, lam, theta):
    """Folded exponential on the torus.

    exp(i <n, x>) + (-1)^{n1} exp(i <M(n), x>) for n2 > 0, and exp(i n1 x1)
    for n2 = 0. Glide-reflection invariant for n2 > 0 and for even n1; the
    n2 = 0, odd-n1 members pick up a factor -1 under the glide reflection
    (their coefficients vanish for any doubled grid).
    """
    if n2 < 0:
        raise ValueError("basis index requires n2 >= 0")
    lam = np.asarray(lam, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if n2 == 0:
        return np.exp(1j * n1 * lam) * np.ones_like(theta)
    return np.exp(1j * (n1 * lam + n2 * theta)) + _alternating(n1) * np.exp(
        1j * (n1 * lam - n2 * theta)
    )


def basis_b(n1, n2, points):
    """Folded basis pushed down to the sphere: e_n composed with the inverse transform."""
    lam, theta = dfs_coord_inverse(points)
    return basis_e(n1, n2, lam, theta)


def quadrature_rule(n_quad):
    """Nodes and weights for the weighted spherical inner product.

    Longitude: n_quad equispaced nodes on [-pi, pi) (the periodic trapezoidal
    rule). Colatitude: n_quad midpoint nodes on (0, pi); the open rule avoids
    the pole rows, where push-down basis functions are discontinuous and a
    closed endpoint rule would pick up O(1/n_quad) spurious contributions.
    """
    if n_quad < 4:
        raise ValueError("n_quad must be at least 4")
    lam = -np.pi + 2.0 * np.pi * np.arange(n_quad) / n_quad
    theta = (np.arange(n_quad) + 0.5) * np.pi / n_quad
    weight = (2.0 * np.pi / n_quad) * (np.pi / n_quad)
    return lam, theta, weight


def _sample_on_quadrature(f, lam, theta):
    L, T = np.meshgrid(lam, theta)
    return np.asarray(f(dfs_coord(L, T)), dtype=complex)


def weighted_inner_product(f, g, n_quad=512):
    """Inner product of spherical functions in the weighted L2 space.

    Approximates the integral of f conj(g) (1 - xi3^2)^(-1/2) over the sphere,
    which in (lambda, theta) coordinates is the unweighted integral of
    (f o phi)(g o phi)* over [-pi, pi) x [0, pi]: the colatitude weight cancels
    the sine of the surface measure.
    """
    lam, theta, w = quadrature_rule(n_quad)
    F = _sample_on_quadrature(f, lam, theta)
    G = _sample_on_quadrature(g, lam, theta)
    return complex(np.sum(F * np.conj(G)) * w)


def gram_matrix(functions, n_quad=512):
    """Gram matrix of spherical functions under the weighted inner product.

    Each function is sampled once on the shared quadrature grid, so this is
    the economical way to compute all pairwise inner products.
    """
    lam, theta, w = quadrature_rule(n_quad)
    rows = [np.ravel(_sample_on_quadrature(f, lam, theta)) for f in functions]
    A = np.array(rows)
    return (A * w) @ A.conj().T


def dfs_fourier_sum(table, omega, points):
    """Partial sum of the folded series at sphere points.

    sum over n in omega (a half-domain set) of c_n b_n(xi), with coefficients
    read from a full coefficient table. By the coefficient symmetry of BMC
    grids this equals the torus partial sum over the symmetrized set evaluated
    at the inverse coordinates.
    """
    if not omega.half:
        raise ValueError("dfs_fourier_sum expects a half-domain spectral set")
    _require_within_table(table, omega)
    n1, n2 = omega.members()
    coeffs = table.coeff(n1, n2)
    lam, theta = dfs_coord_inverse(points)
    out = np.zeros(np.broadcast(lam, theta).shape, dtype=complex)
    flat_l = np.broadcast_to(lam, out.shape).ravel()
    flat_t = np.broadcast_to(theta, out.shape).ravel()
    flat = out.ravel()
    sgn = _alternating(n1)
    pos = n2 > 0
    step = max(1, _CHUNK // max(1, len(n1)))
    for s in range(0, flat.size, step):
        sl = slice(s, s + step)
        phase = np.exp(1j * (np.outer(flat_l[sl], n1) + np.outer(flat_t[sl], n2)))
        mirror = np.exp(1j * (np.outer(flat_l[sl], n1) - np.outer(flat_t[sl], n2)))
        flat[sl] = phase @ coeffs + (mirror[:, pos] * sgn[pos]) @ coeffs[pos]
    return out if out.shape else complex(flat[0])


def fold_coefficients(table, tol=1e-8):
    """Project a full table onto the half domain, enforcing the symmetry exactly.

    Rows n2 and -n2 are averaged as (c_n + (-1)^{n1} c_{M(n)}) / 2; the n2 = 0
    row and the Nyquist row are averaged with themselves, which zeroes their
    odd-n1 entries. Raises if the relative asymmetry exceeds ``tol`` (the
    source grid was not BMC).
    """
    violation = table.symmetry_violation()
    if violation > tol:
        raise ValueError(
            f"coefficient symmetry violated (relative asymmetry {violation:.3e} > {tol:.1e}); "
            "source grid is not block-mirror-centrosymmetric"
        )
    N2, N1 = table.values.shape
    sgn = _alternating(table.n1_values)[None, :]
    rows = (-(table.n2_values) + N2 // 2) % N2
    symmetrized = 0.5 * (table.values + sgn * table.values[rows, :])
    half = np.empty((N2 // 2 + 1, N1), dtype=complex)
    half[: N2 // 2] = symmetrized[N2 // 2:]        # n2 = 0 .. N2/2 - 1
    half[N2 // 2] = symmetrized[0]                 # self-paired Nyquist row
    return FoldedCoefficientTable(half, normalization=table.normalization)


def unfold_coefficients(folded):
    """Rebuild the symmetrized full table from its half-domain fold."""
    n_half, N1 = folded.values.shape
    N2 = 2 * (n_half - 1)
    sgn = _alternating(folded.n1_values)[None, :]
    full = np.empty((N2, N1), dtype=complex)
    full[N2 // 2:] = folded.values[: N2 // 2]
    full[0] = folded.values[N2 // 2]
    for n2 in range(1, N2 // 2):
        full[N2 // 2 - n2] = sgn * folded.values[n2]
    return CoefficientTable(full, normalization=folded.normalization, source_bmc=True)


def coeff_io_write(table, path):
    """Write a coefficient table in the DFSC binary layout.

    Layout: magic ``DFSC``, version u32 LE, the half-open index ranges as four
    signed 64-bit ints (n1 start/stop, n2 start/stop), normalization tag u8
    (0 = integral convention), then row-major complex values (rows ordered by
    ascending n2) as little-endian float64 pairs.
    """
    n1 = table.n1_values
    n2 = table.n2_values
    tag = 0 if table.normalization == "integral" else 255
    header = COEFF_MAGIC + struct.pack(
        "<IqqqqB", COEFF_VERSION, int(n1[0]), int(n1[-1]) + 1, int(n2[0]), int(n2[-1]) + 1, tag
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(table.values, dtype="<c16").tobytes())


def coeff_io_read(path):
    """Read a coefficient table written by :func:`coeff_io_write`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    head_len = 4 + struct.calcsize("<IqqqqB")
    if len(raw) < head_len or raw[:4] != COEFF_MAGIC:
        raise ValueError("malformed coefficient file header")
    version, n1_lo, n1_hi, n2_lo, n2_hi, tag = struct.unpack("<IqqqqB", raw[4:head_len])
    if version != COEFF_VERSION:
        raise ValueError(f"unsupported coefficient file version {version}")
    N1, N2 = n1_hi - n1_lo, n2_hi - n2_lo
    if N1 <= 0 or N2 <= 0 or n1_lo != -(N1 // 2) or n2_lo != -(N2 // 2) or N1 % 2 or N2 % 2:
        raise ValueError("coefficient index ranges must be centered and even-sized")
    payload = raw[head_len:]
    if len(payload) != N1 * N2 * 16:
        raise ValueError(
            f"truncated or oversized coefficient payload: expected {N1 * N2 * 16} bytes, "
            f"got {len(payload)}"
        )
    values = np.frombuffer(payload, dtype="<c16").reshape(N2, N1)
    norm = "integral" if tag == 0 else "unknown"
    return CoefficientTable(values.astype(complex), normalization=norm)
