"""Hypothesis strategies shared across test modules."""
import numpy as np
from hypothesis import strategies as st

from mdimlab.instances import metric_repair


@st.composite
def metric_matrices(draw, min_n=1, max_n=8, quantum=None):
    n = draw(st.integers(min_n, max_n))
    vals = draw(st.lists(st.floats(0.02, 0.9), min_size=n * n, max_size=n * n))
    M = np.array(vals).reshape(n, n)
    if quantum:
        M = np.maximum(np.round(M / quantum), 1) * quantum
    M = np.minimum(M, M.T)
    np.fill_diagonal(M, 0.0)
    return metric_repair(M)


@st.composite
def line_points(draw, min_n=1, max_n=8):
    xs = draw(st.lists(st.integers(0, 40), min_size=min_n, max_size=max_n, unique=True))
    x = np.array(sorted(xs)) / 40.0
    return np.abs(x[:, None] - x[None, :])
