import numpy as np

from pkexplain.attribution import FittedModel
from pkexplain.kernels import BaseKernelSpec, ProductKernelSpec

CONTINUOUS = ("rbf", "laplacian_rbf", "cauchy")


def random_kernel_spec(rng, d, with_categorical=True):
    kinds = list(CONTINUOUS) + (["categorical"] if with_categorical else [])
    feats = []
    for _ in range(d):
        kind = kinds[rng.integers(0, len(kinds))]
        feats.append(BaseKernelSpec(kind, float(rng.uniform(0.5, 2.0))))
    return ProductKernelSpec(tuple(feats))


def random_model(rng, n, d, with_categorical=True, bias=None):
    spec = random_kernel_spec(rng, d, with_categorical)
    X = rng.normal(size=(n, d))
    for j, f in enumerate(spec.per_feature):
        if f.kind == "categorical":
            X[:, j] = rng.integers(0, 3, size=n)
    alpha = rng.normal(size=n) / np.sqrt(n)
    b = float(rng.normal()) if bias is None else bias
    return FittedModel(alpha, X, spec, b)


def random_point(rng, model):
    x = rng.normal(size=model.d)
    for j, f in enumerate(model.kernel.per_feature):
        if f.kind == "categorical":
            x[j] = rng.integers(0, 3)
    return x


def random_two_sample(rng, n, m, d, with_categorical=True, shift=0.0):
    from pkexplain.mmd import TwoSample

    spec = random_kernel_spec(rng, d, with_categorical)
    X = rng.normal(size=(n, d))
    Z = rng.normal(size=(m, d)) + shift
    for j, f in enumerate(spec.per_feature):
        if f.kind == "categorical":
            X[:, j] = rng.integers(0, 3, size=n)
            Z[:, j] = rng.integers(0, 3, size=m)
    return TwoSample(X, Z, spec)
