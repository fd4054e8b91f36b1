import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from pauli_spectra.discretize import (
    DiscretizeError,
    _forward_hop,
    _hopping_data,
    assemble_pauli,
    assemble_schrodinger,
    export_matrix_market,
    magnetic_length_spacing,
    restrict,
)
from pauli_spectra.fields import Domain, ScalarField2D, constant_field
from pauli_spectra.gauge import gauge_transform, line_integral_gauge, symmetric_gauge

SQUARE = Domain.square((0.0, 0.0), 1.0)
A_ZERO = symmetric_gauge(0.0)
A_TWO = symmetric_gauge(2.0, center=(0.5, 0.5))
B_TWO = constant_field(2.0)

# smooth non-harmonic field for convergence studies (curvature matters:
# affine fields make the two Pauli assemblies coincide exactly)
WAVY = ScalarField2D(
    eval=lambda p: 2.0 + np.sin(2.0 * np.pi * p[..., 0]) * np.cos(np.pi * p[..., 1]),
    sup_bound=3.0, name="wavy")


def _blocks(op):
    sl = op.block_slices()
    return [op.entries[s, s] for s in sl]


def _lowest(M, k, sigma):
    vals = spla.eigsh(M, k=k, sigma=sigma, which="LM", return_eigenvectors=False)
    return np.sort(vals)


def test_laplacian_lowest_modes():
    # Dirichlet Laplacian on the unit square: discrete eigenvalues
    # (4/h^2) sin^2 of the exact modes; lowest three frozen at n=64.
    H = assemble_schrodinger(SQUARE, A_ZERO, 0.0, 64)
    assert H.dimension == 63 * 63
    vals = _lowest(H.entries, 3, sigma=-1.0)
    assert np.allclose(vals, [19.735245534, 49.314341869, 49.314341869],
                       atol=1e-6)
    exact = np.array([2.0, 5.0, 5.0]) * np.pi ** 2
    assert (np.abs(vals - exact) / exact).max() < 1e-3


def test_gershgorin_interval_zero_field():
    H = assemble_schrodinger(SQUARE, A_ZERO, 0.0, 64)
    lo, hi = H.gershgorin_interval()
    h = H.grid.h
    assert lo == 0.0
    assert hi == pytest.approx(8.0 / h ** 2, abs=0.0)


def test_assembly_is_exactly_hermitian():
    A = line_integral_gauge(WAVY)
    H = assemble_schrodinger(SQUARE, A, 3.0, 24)
    d = H.entries - H.entries.getH()
    assert np.abs(d.toarray()).max() == 0.0
    P = assemble_pauli(SQUARE, A, WAVY, 3.0, 24)
    d = P.entries - P.entries.getH()
    assert np.abs(d.toarray()).max() == 0.0


def test_gauge_covariance_exact_link_phases():
    """A -> A + grad(psi) with psi carried conjugates the matrix by
    the diagonal unitary exp(i t psi) exactly, node by node."""
    b, t = 2.0, 30.0
    A = symmetric_gauge(b)
    psi = lambda p: 0.5 * b * p[..., 0] * p[..., 1]
    grad = lambda p: np.stack([0.5 * b * p[..., 1], 0.5 * b * p[..., 0]], axis=-1)
    A_landau = gauge_transform(A, grad, psi=psi)

    P0 = assemble_pauli(SQUARE, A, constant_field(b), t, 32)
    P1 = assemble_pauli(SQUARE, A_landau, constant_field(b), t, 32)
    u = np.exp(1j * t * psi(P0.grid.coords))
    U = sp.diags(np.concatenate([u, u]))
    delta = (P1.entries - U @ P0.entries @ U.getH()).toarray()
    assert np.abs(delta).max() < 1e-10

    lo0 = _lowest(_blocks(P0)[0], 5, sigma=-5.0)
    lo1 = _lowest(_blocks(P1)[0], 5, sigma=-5.0)
    assert np.allclose(lo0, lo1, atol=1e-9)


@pytest.mark.parametrize("method", ["lichnerowicz", "dirac_form"])
def test_spin_flip_conjugation(method):
    # flipping B swaps the blocks up to complex conjugation, exactly
    kw = dict(t=30.0, n=24, method=method)
    Bp = None if method == "dirac_form" else B_TWO
    Bm = None if method == "dirac_form" else constant_field(-2.0)
    P = assemble_pauli(SQUARE, A_TWO, Bp, **kw)
    Pm = assemble_pauli(SQUARE, symmetric_gauge(-2.0, center=(0.5, 0.5)), Bm, **kw)
    up, down = _blocks(P)
    upm, downm = _blocks(Pm)
    assert np.abs((upm - down.conj()).toarray()).max() == 0.0
    assert np.abs((downm - up.conj()).toarray()).max() == 0.0


def test_methods_coincide_for_constant_field():
    # plaquette circulation of a linear potential is the midpoint rule,
    # exact here, so both assemblies produce identical matrices
    lich = assemble_pauli(SQUARE, A_TWO, B_TWO, 30.0, 48, method="lichnerowicz")
    dirc = assemble_pauli(SQUARE, A_TWO, None, 30.0, 48, method="dirac_form")
    delta = lich.entries - dirc.entries
    assert delta.nnz == 0 or np.abs(delta.data).max() == 0.0


def test_zero_field_blocks_are_laplacian():
    P = assemble_pauli(SQUARE, A_ZERO, None, 7.0, 24, method="dirac_form")
    H = assemble_schrodinger(SQUARE, A_ZERO, 0.0, 24)
    for blk in _blocks(P):
        delta = blk - H.entries
        assert delta.nnz == 0 or np.abs(delta.data).max() == 0.0


def test_assembly_methods_agree_under_refinement():
    """Node-sampled B vs plaquette-measured B: lowest ten eigenvalues of
    each spin block agree to O(h^2); halving h should cut the gap by ~4
    (>= 2 is the order-one floor the construction promises)."""
    A = line_integral_gauge(WAVY)
    t = 5.0
    diffs = []
    for n in (16, 32, 64):
        lich = assemble_pauli(SQUARE, A, WAVY, t, n, method="lichnerowicz")
        dirc = assemble_pauli(SQUARE, A, None, t, n, method="dirac_form")
        d = 0.0
        for Ml, Md in zip(_blocks(lich), _blocks(dirc)):
            el = _lowest(Ml, 10, sigma=-10.0)
            ed = _lowest(Md, 10, sigma=-10.0)
            d = max(d, np.abs(el - ed).max())
        diffs.append(d)
    assert diffs[0] < 2e-2                 # measured 9.62e-3
    assert diffs[0] / diffs[1] > 2.0       # measured ratio 3.56
    assert diffs[1] / diffs[2] > 2.0       # measured ratio 3.87


def test_dirac_form_matches_squared_forward_momenta():
    # the quadratic form of the one-sided covariant momenta pi_1 + i pi_2
    # equals the assembled spin-up block on wall-flat test vectors, with an
    # O(h^2) gap; direct squaring is only used here as a cross-check since
    # the product matrix itself is numerically rank-deficient
    t = 10.0
    gaps = []
    for n in (16, 32, 64):
        h, _, _, _, coords, n_active, edges = _hopping_data(SQUARE, A_TWO, t, n)
        F1 = _forward_hop(n_active, *edges[0])
        F2 = _forward_hop(n_active, *edges[1])
        eye = sp.identity(n_active, format="csr")
        Tplus = ((F1 - eye) + 1j * (F2 - eye)) / h
        Q = Tplus.getH() @ Tplus
        P = assemble_pauli(SQUARE, A_TWO, None, t, n, method="dirac_form")
        up = _blocks(P)[0]
        x, y = coords[:, 0], coords[:, 1]
        v = (x * (1.0 - x) * y * (1.0 - y)) ** 3
        gaps.append(abs(np.vdot(v, (Q - up) @ v)) / np.vdot(v, v).real)
    assert gaps[0] / gaps[1] > 3.0         # measured 3.87
    assert gaps[1] / gaps[2] > 3.0         # measured 3.97
    assert gaps[2] < 0.2                   # measured 8.41e-2


def test_restrict_to_full_domain_is_identity():
    P = assemble_pauli(SQUARE, A_TWO, B_TWO, 10.0, 16)
    R = restrict(P, SQUARE)
    assert R.dimension == P.dimension
    delta = R.entries - P.entries
    assert delta.nnz == 0 or np.abs(delta.data).max() == 0.0
    assert R.meta["restricted"] is True


def test_restrict_half_square_rayleigh():
    # Dirichlet restriction of the zero-field operator to [0,1/2]x[0,1]
    # reproduces the half-square ground state 5 pi^2
    H = assemble_schrodinger(SQUARE, A_ZERO, 0.0, 128)
    R = restrict(H, Domain.union_of_squares([(0.0, 0.0, 0.5), (0.0, 0.5, 0.5)]))
    assert R.dimension == 63 * 127
    low = _lowest(R.entries, 1, sigma=-1.0)[0]
    assert abs(low - 5.0 * np.pi ** 2) < 2e-3 * 5.0 * np.pi ** 2


def test_restrict_interlaces_eigenvalues():
    # domain monotonicity: every Dirichlet eigenvalue can only go up
    # when the domain shrinks
    H = assemble_schrodinger(SQUARE, A_ZERO, 0.0, 12)
    R = restrict(H, Domain.union_of_squares([(0.0, 0.0, 0.5), (0.0, 0.5, 0.5)]))
    assert (H.dimension, R.dimension) == (121, 55)
    full = np.linalg.eigvalsh(H.entries.toarray())
    part = np.linalg.eigvalsh(R.entries.toarray())
    assert (part >= full[: part.size] - 1e-9).all()


def test_restrict_pauli_blocks():
    P = assemble_pauli(SQUARE, A_TWO, B_TWO, 10.0, 16)
    R = restrict(P, Domain.union_of_squares([(0.0, 0.0, 0.5), (0.0, 0.5, 0.5)]))
    assert R.meta["block_dims"] == [R.dimension // 2] * 2
    d = R.entries - R.entries.getH()
    assert np.abs(d.toarray()).max() == 0.0


def test_matrix_market_roundtrip(tmp_path):
    A = line_integral_gauge(WAVY)
    H = assemble_schrodinger(SQUARE, A, 3.0, 16)
    path = tmp_path / "operator.mtx"
    export_matrix_market(H, path)
    M = sp.csr_matrix(scipy.io.mmread(path))
    delta = (M - H.entries).toarray()
    assert np.abs(delta).max() < 1e-15
    text = path.read_text()
    assert "hermitian" in text.splitlines()[0]
    assert "method=schrodinger" in text


def test_magnetic_length_spacing_and_warning():
    assert magnetic_length_spacing(0.0, 2.0) == np.inf
    assert magnetic_length_spacing(50.0, 2.0) == pytest.approx(0.0125)
    with pytest.warns(UserWarning, match="magnetic length"):
        assemble_schrodinger(SQUARE, symmetric_gauge(2.0), 100.0, 16)


def test_input_validation():
    with pytest.raises(DiscretizeError, match="n must be"):
        assemble_schrodinger(SQUARE, A_ZERO, 0.0, 4)
    with pytest.raises(DiscretizeError, match="unknown assembly method"):
        assemble_pauli(SQUARE, A_TWO, B_TWO, 1.0, 16, method="dirac")
    with pytest.raises(DiscretizeError, match="requires the field"):
        assemble_pauli(SQUARE, A_TWO, None, 1.0, 16, method="lichnerowicz")
    # grid nodes all fall in the gap between two far-apart tiny squares
    sparse_dom = Domain.union_of_squares([(0.0, 0.0, 1e-3),
                                          (1.0, 1.0, 1e-3)])
    with pytest.raises(DiscretizeError, match="empty active set"):
        assemble_schrodinger(sparse_dom, A_ZERO, 0.0, 8)
    H = assemble_schrodinger(SQUARE, A_ZERO, 0.0, 16)
    with pytest.raises(DiscretizeError, match="empty restriction"):
        restrict(H, Domain.square((5.0, 5.0), 1.0))
