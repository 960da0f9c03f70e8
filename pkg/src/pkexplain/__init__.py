"""Exact Shapley attributions for product-kernel predictors, MMD and HSIC.

Exports resolve lazily so that entry points can configure the process
(thread caps in particular) before numpy is first imported.
"""

__version__ = "0.1.0"

# public name -> submodule it lives in
_EXPORTS = {
    "PkexError": "errors",
    "InputError": "errors",
    "InvalidSpecError": "errors",
    "InvalidSubsetError": "errors",
    "InsufficientDataError": "errors",
    "ParseError": "errors",
    "SchemaError": "errors",
    "ResourceLimitError": "errors",
    "NumericalError": "errors",
    "ConditioningError": "errors",
    "RankDeficiencyError": "errors",
    "BaseKernelSpec": "kernels",
    "ProductKernelSpec": "kernels",
    "kernel_spec_to_json": "kernels",
    "kernel_spec_from_json": "kernels",
    "eval_product": "kernels",
    "product_gram": "kernels",
    "median_heuristic_bandwidths": "kernels",
    "ShapleyWeights": "esp",
    "EspTable": "esp",
    "shapley_weights": "esp",
    "esp_newton": "esp",
    "esp_stable": "esp",
    "Attribution": "attribution",
    "FittedModel": "attribution",
    "baseline_value": "attribution",
    "value_function": "attribution",
    "explain_instance": "attribution",
    "explain_batch": "attribution",
    "normalized_attribution": "attribution",
    "ValueFunctionHandle": "oracle",
    "shapley_bruteforce": "oracle",
    "TwoSample": "mmd",
    "make_two_sample": "mmd",
    "mmd_sq": "mmd",
    "mmd_value_function": "mmd",
    "explain_mmd": "mmd",
    "HsicInput": "hsic",
    "target_gram": "hsic",
    "hsic": "hsic",
    "hsic_value_function": "hsic",
    "explain_hsic": "hsic",
    "explain_hsic_bivariate": "hsic",
    "CoalitionSample": "baseline",
    "sample_coalitions_paired": "baseline",
    "enumerate_coalitions": "baseline",
    "kernel_shap_regression": "baseline",
    "relative_deviation": "baseline",
    "fit_krr": "model_io",
    "load_table": "model_io",
    "save_model": "model_io",
    "load_model": "model_io",
    "gen_linear": "datagen",
    "gen_nonlinear": "datagen",
    "gen_mmd_pair": "datagen",
    "run_benchmark": "benchmark",
    "write_benchmark_csv": "benchmark",
    "measure_scaling": "benchmark",
    "mmd_sign_pattern": "benchmark",
    # the per-game oracle adapters share a name in their home modules
    "model_value_handle": "attribution:value_handle",
    "mmd_value_handle": "mmd:value_handle",
    "hsic_value_handle": "hsic:value_handle",
}

__all__ = ["__version__", *sorted(_EXPORTS)]


def __getattr__(name):
    target = _EXPORTS.get(name)
    if target is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    module, _, attr = target.partition(":")
    return getattr(importlib.import_module(f".{module}", __name__), attr or name)


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS))
