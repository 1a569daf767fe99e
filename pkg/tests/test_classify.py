import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkpca.classify import knn_fit, knn_predict, knn_predict_many
from dkpca.errors import ParameterError


def test_fit_six_points_k6(rng):
    model = knn_fit(rng.normal(size=(6, 3)), list("AABBCC"), k=6)
    assert model.k == 6 and len(model) == 6 and model.dimension == 3


def test_fit_errors():
    with pytest.raises(ParameterError):
        knn_fit(np.zeros((0, 2)), [], k=1)
    with pytest.raises(ParameterError):
        knn_fit(np.zeros((3, 2)), ["a", "b", "c"], k=4)
    with pytest.raises(ParameterError):
        knn_fit(np.zeros((3, 2)), ["a", "b"], k=1)
    with pytest.raises(ParameterError):
        knn_fit(np.zeros((3, 2)), ["a", "b", "c"], k=0)


def test_k1_single_point():
    model = knn_fit([[0.0, 1.0]], ["only"], k=1)
    assert knn_predict(model, [5.0, 5.0]) == "only"


def test_exact_match_k1():
    model = knn_fit([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]], ["a", "b", "c"], k=1)
    assert knn_predict(model, [1.0, 1.0]) == "b"


def test_majority_vote():
    model = knn_fit([[0.0], [0.1], [0.2], [5.0]], ["A", "A", "B", "B"], k=3)
    assert knn_predict(model, [0.05]) == "A"


def test_vote_tie_goes_to_closest_label():
    # A at distance 0.5, B at 0.7
    model = knn_fit([[0.5], [-0.7], [9.0]], ["A", "B", "C"], k=2)
    assert knn_predict(model, [0.0]) == "A"
    model = knn_fit([[0.7], [-0.5], [9.0]], ["A", "B", "C"], k=2)
    assert knn_predict(model, [0.0]) == "B"


def test_full_tie_goes_to_smallest_label():
    model = knn_fit([[1.0], [-1.0]], ["z", "b"], k=2)
    assert knn_predict(model, [0.0]) == "b"


def test_dimension_mismatch():
    model = knn_fit([[0.0, 1.0]], ["a"], k=1)
    with pytest.raises(ParameterError):
        knn_predict(model, [1.0])
    with pytest.raises(ParameterError):
        knn_predict_many(model, [[1.0, 2.0, 3.0]])


def test_batch_matches_single(rng):
    X = rng.normal(size=(40, 5))
    y = rng.choice(list("abc"), size=40).tolist()
    model = knn_fit(X, y, k=5)
    Q = rng.normal(size=(25, 5))
    assert knn_predict_many(model, Q) == [knn_predict(model, q) for q in Q]


def test_self_prediction_k1(rng):
    X = rng.normal(size=(30, 4))
    y = rng.choice(list("abcd"), size=30).tolist()
    model = knn_fit(X, y, k=1)
    assert knn_predict_many(model, X) == y


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_invariant_under_rotation_and_permutation(seed, k):
    rng = np.random.default_rng(seed)
    n, d = 15, 4
    X = rng.normal(size=(n, d))
    y = rng.choice(["s1", "s2", "s3"], size=n).tolist()
    Q = rng.normal(size=(10, d))
    base = knn_predict_many(knn_fit(X, y, k), Q)

    R, _ = np.linalg.qr(rng.normal(size=(d, d)))
    assert knn_predict_many(knn_fit(X @ R, y, k), Q @ R) == base
    assert knn_predict_many(knn_fit(-X, y, k), -Q) == base

    perm = rng.permutation(n)
    assert knn_predict_many(knn_fit(X[perm], [y[i] for i in perm], k), Q) == base
