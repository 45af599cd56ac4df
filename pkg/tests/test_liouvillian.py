import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su4lindblad.errors import CapacityError, InvalidParameterError, ShapeError
from su4lindblad.liouvillian import (ModelParams, apply, build_generator, sector_labels,
                                     state_dimension, trace_vector)
from su4lindblad.oracle import OracleModel, to_full, from_full

from conftest import random_state


def test_state_dimension():
    assert state_dimension(2, 3) == 10 * 16
    assert state_dimension(30, 40) == 5456 * 41**2


class TestModelParams:
    def test_negative_rate_is_rejected(self):
        with pytest.raises(InvalidParameterError, match="kappa"):
            ModelParams(N=2, kappa=-1.0)

    def test_bad_counts(self):
        with pytest.raises(InvalidParameterError):
            ModelParams(N=0)
        with pytest.raises(InvalidParameterError):
            ModelParams(N=2, n_max=-1)

    def test_non_finite_coupling(self):
        with pytest.raises(InvalidParameterError):
            ModelParams(N=2, omega=float("inf"))

    def test_replace(self):
        p = ModelParams(N=2, w=1.0)
        assert p.replace(w=3.0).w == 3.0 and p.w == 1.0


def test_matches_oracle_laser_parameters(rng):
    p = ModelParams(N=2, omega=1.0, gamma_decay=5.0, kappa=1.0, w=4.0, n_max=3)
    L = build_generator(p)
    model = OracleModel(p)
    for _ in range(20):
        v = random_state(rng, 2, 3)
        got = to_full(apply(L, v))
        assert np.max(np.abs(got - model.rhs(to_full(v)))) < 1e-10


@settings(max_examples=15, deadline=None)
@given(N=st.integers(1, 3), n_max=st.integers(0, 3), seed=st.integers(0, 2**32 - 1))
def test_matches_oracle_random(N, n_max, seed):
    r = np.random.default_rng(seed)
    p = ModelParams(N=N, delta=r.uniform(-1, 1), omega=r.uniform(0, 2), kappa=r.uniform(0, 5),
                    gamma_decay=r.uniform(0, 5), w=r.uniform(0, 5), dephasing=r.uniform(0, 5),
                    n_max=n_max)
    v = random_state(r, N, n_max)
    want = OracleModel(p).rhs(to_full(v))
    got = apply(build_generator(p), v)
    assert np.max(np.abs(got.data - from_full(want, N, n_max).data)) < 1e-10


def test_trace_preserving():
    p = ModelParams(N=3, delta=0.3, omega=1.1, kappa=0.7, gamma_decay=2.0, w=1.5, dephasing=0.4, n_max=4)
    L = build_generator(p)
    t = trace_vector(L.basis, p.n_max)
    assert np.max(np.abs(t @ L.matrix)) < 1e-12


def test_hermiticity_preserving(rng):
    p = ModelParams(N=3, delta=0.3, omega=1.1, kappa=0.7, gamma_decay=2.0, w=1.5, dephasing=0.4, n_max=3)
    L = build_generator(p)
    v = random_state(rng, 3, 3)
    lhs = apply(L, v.adjoint())
    rhs = apply(L, v).adjoint()
    assert np.max(np.abs(lhs.data - rhs.data)) < 1e-12


def test_zero_parameters_give_zero_generator():
    L = build_generator(ModelParams(N=3, n_max=2))
    assert L.matrix.nnz == 0


def test_detuning_rotates_coherences():
    delta = 0.7
    L = build_generator(ModelParams(N=2, delta=delta))
    d = L.matrix.diagonal()
    want = -2j * delta * L.basis.two_s3 / 2
    assert np.allclose(d, want)
    assert L.matrix.nnz == np.count_nonzero(want)


def test_cavity_decay_of_photon_number():
    p = ModelParams(N=1, kappa=0.8, n_max=4)
    L = build_generator(p)
    v = random_state(np.random.default_rng(3), 1, 4, hermitian=True)
    n_op = np.diag(np.arange(5.0))
    tr = lambda s: np.einsum("imn,nm->", s.data[s.basis.trace_indices], n_op)  # noqa: E731
    # d<n>/dt = -kappa <n> for the truncated damping term (no photons above n_max)
    assert tr(apply(L, v)) == pytest.approx(-0.8 * tr(v))


def test_dephasing_rate_of_single_atom_coherence():
    L = build_generator(ModelParams(N=1, dephasing=0.25))
    t = L.basis
    i = t.lookup(0, 0, 1)  # s = |1><0|
    assert L.matrix[i, i] == pytest.approx(-2 * 0.25)


def test_sector_restriction_matches_full(rng):
    p = ModelParams(N=2, delta=0.2, omega=1.0, kappa=1.0, gamma_decay=0.5, w=0.3, n_max=3)
    full = build_generator(p)
    part = build_generator(p, sectors=[0, -1])
    assert np.array_equal(part.indices, full.restrict([0, -1]).indices)
    assert abs(part.matrix - full.restrict([0, -1]).matrix).max() < 1e-15
    labels = sector_labels(full.basis, 3)
    assert set(labels[part.indices]) == {0, -1}


def test_generator_is_block_diagonal_in_sectors():
    p = ModelParams(N=3, omega=1.0, kappa=1.0, gamma_decay=1.0, w=1.0, dephasing=1.0, n_max=3)
    L = build_generator(p)
    lab = sector_labels(L.basis, 3)[L.indices]
    coo = L.matrix.tocoo()
    assert np.all(lab[coo.row] == lab[coo.col])


def test_restrict_unknown_sector():
    L = build_generator(ModelParams(N=2, kappa=1.0, n_max=1), sectors=[0])
    with pytest.raises(InvalidParameterError):
        L.restrict([1])


def test_capacity_error():
    with pytest.raises(CapacityError):
        build_generator(ModelParams(N=10, kappa=1.0, n_max=10), memory_budget=1000)


def test_apply_shape_mismatch(rng):
    L = build_generator(ModelParams(N=2, kappa=1.0, n_max=2))
    with pytest.raises(ShapeError):
        apply(L, random_state(rng, 2, 3))
    with pytest.raises(ShapeError):
        apply(L, np.zeros(5))


def test_apply_matches_dense(rng):
    L = build_generator(ModelParams(N=2, omega=0.5, kappa=1.0, n_max=2))
    v = random_state(rng, 2, 2)
    assert np.allclose(apply(L, v).flat, L.matrix.toarray() @ v.flat)
