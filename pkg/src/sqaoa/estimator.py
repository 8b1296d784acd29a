"""scikit-learn style front end for a single problem instance."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import statevector as sv
from ._validation import check_instance, check_int, check_params, check_positive
from .ansatz import AnsatzSpec, apply_ansatz, param_count
from .optimizer import OptimizerConfig, run_full_pipeline


class SQAOASolver(BaseEstimator):
    """Optimize a QAOA-family circuit on one instance.

    ``fit`` runs INTERP-seeded QAOA up to depth ``p`` and then refines the
    chosen ansatz at depth ``p``. ``X`` is anything
    :func:`~sqaoa._validation.check_instance` accepts: an instance, a graph
    file path or a ``(kind, n, seed)`` tuple.

    Fitted attributes end in an underscore: ``params_``, ``energy_``,
    ``fidelity_``, ``qaoa_energy_``, ``qaoa_fidelity_``, ``counter_``.
    """

    def __init__(self, family="sqaoa", p=1, mixers=None, gathered=True, eps=1e-3, delta1=1e-3,
                 delta2=1e-6, method="bfgs", restarts=10, max_outer=20, seed=0):
        self.family = family
        self.p = p
        self.mixers = mixers
        self.gathered = gathered
        self.eps = eps
        self.delta1 = delta1
        self.delta2 = delta2
        self.method = method
        self.restarts = restarts
        self.max_outer = max_outer
        self.seed = seed

    def _spec(self) -> AnsatzSpec:
        return AnsatzSpec(self.family, check_int(self.p, "p", 1), self.mixers, self.gathered)

    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(
            eps=check_positive(self.eps, "eps"),
            delta1=check_positive(self.delta1, "delta1", strict=False),
            delta2=check_positive(self.delta2, "delta2"),
            method=self.method,
            restarts=check_int(self.restarts, "restarts", 1),
            max_outer=check_int(self.max_outer, "max_outer", 1),
            seed=check_int(self.seed, "seed", 0),
        )

    def fit(self, X, y=None):
        inst = check_instance(X)
        spec = self._spec()
        out = run_full_pipeline(inst, spec, self._config())
        best, q = out.refined[-1], out.qaoa[-1]
        self.instance_ = inst
        self.spec_ = spec
        self.params_ = best.best_params
        self.energy_ = best.best_energy
        self.fidelity_ = best.fidelity
        self.qaoa_energy_ = q.best_energy
        self.qaoa_fidelity_ = q.fidelity
        self.counter_ = best.counter
        self.n_features_in_ = inst.n
        return self

    def _state(self, X=None) -> np.ndarray:
        check_is_fitted(self, "params_")
        inst = self.instance_ if X is None else check_instance(X)
        params = check_params(self.params_, param_count(self.spec_, inst))
        return apply_ansatz(self.spec_, inst, params)

    def transform(self, X=None) -> np.ndarray:
        """Bitstring probabilities of the optimized state.

        Passing another instance with the same edge count re-uses the fitted
        angles on it.
        """
        return sv.probabilities(self._state(X))

    def predict(self, X=None) -> np.ndarray:
        """Most probable bitstring as a 0/1 array, entry ``q`` for qubit ``q``."""
        probs = self.transform(X)
        z = int(np.argmax(probs))
        n = int(np.log2(probs.size))
        return np.array([(z >> q) & 1 for q in range(n)], dtype=np.int8)

    def score(self, X=None, y=None) -> float:
        """Approximation ratio ``E / E_opt`` (1 is optimal)."""
        inst = self.instance_ if X is None else check_instance(X)
        e = sv.expectation_diagonal(self._state(X), inst.h_diag)
        return float(e / inst.solution.e_opt)
