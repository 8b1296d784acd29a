"""Training pipeline: INTERP-seeded QAOA, then gradient-gated refinement.

The refinement loop releases per-edge angles (and extra-interaction
coefficients), screens parameters by forward-difference gradients, optimizes
the active subset with everything else frozen, and repeats until the energy
decrease drops below ``delta2``.

Every objective evaluation is attributed to one of three counters:
``f_Q`` (QAOA phase), ``f_G`` (gradient screening), ``f_O`` (refinement).
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import OptimizeWarning, minimize

from . import statevector as sv
from .ansatz import AnsatzSpec, apply_ansatz, embed_qaoa, param_count
from .problems import ProblemInstance

logger = logging.getLogger(__name__)

METHODS = ("nelder-mead", "bfgs", "l-bfgs-b", "fd-gd")


@dataclass(frozen=True)
class OptimizerConfig:
    eps: float = 1e-3
    delta1: float = 1e-3
    delta2: float = 1e-6
    method: str = "bfgs"
    qaoa_method: str | None = None
    maxfev: int | None = None
    xtol: float = 1e-4
    ftol: float = 1e-8
    gtol: float = 1e-3
    restarts: int = 10
    max_outer: int = 20
    seed: int = 0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.delta1 < 0:
            raise ValueError("delta1 must be non-negative")
        if not self.delta2 > 0:
            raise ValueError("delta2 must be positive")
        for m in (self.method, self.qaoa_method):
            if m is not None and m.lower() not in METHODS:
                raise ValueError(f"unknown inner method {m!r}; expected one of {METHODS}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EvalCounter:
    f_Q: int = 0
    f_G: int = 0
    f_O: int = 0

    @property
    def f_S(self) -> int:
        return self.f_Q + self.f_G + self.f_O

    def copy(self) -> "EvalCounter":
        return replace(self)

    def to_dict(self) -> dict:
        return {"f_Q": self.f_Q, "f_G": self.f_G, "f_O": self.f_O, "f_S": self.f_S}


@dataclass
class OptimizationResult:
    spec: AnsatzSpec
    best_params: np.ndarray
    best_energy: float
    fidelity: float
    counter: EvalCounter
    trace: list[float] = field(default_factory=list)
    converged: bool = True


class Objective:
    """Energy of ``spec`` on ``inst``, charging each call to ``counter.<phase>``."""

    def __init__(self, spec: AnsatzSpec, inst: ProblemInstance, counter: EvalCounter, phase: str = "f_Q"):
        self.spec = spec
        self.inst = inst
        self.counter = counter
        self.phase = phase
        self.calls = 0
        self.size = param_count(spec, inst)

    def __call__(self, x) -> float:
        self.calls += 1
        setattr(self.counter, self.phase, getattr(self.counter, self.phase) + 1)
        return sv.expectation_diagonal(apply_ansatz(self.spec, self.inst, x), self.inst.h_diag)


def evaluate(spec: AnsatzSpec, inst: ProblemInstance, params) -> tuple[float, float]:
    """Uncounted ``(energy, fidelity)`` of a parameter vector."""
    psi = apply_ansatz(spec, inst, params)
    return sv.expectation_diagonal(psi, inst.h_diag), sv.fidelity(psi, inst.solution.ground)


def _fd_descent(fun, x0, f0, eps, maxfev, gtol=1e-6):
    x, f = np.array(x0, dtype=float), f0
    nfev, step = 0, 0.1
    while nfev + x.size + 1 <= maxfev:
        g = np.array([(fun(x + eps * e) - f) / eps for e in np.eye(x.size)])
        nfev += x.size
        gn = np.linalg.norm(g)
        if gn < gtol:
            return x, f, True
        # backtracking line search
        while nfev < maxfev:
            cand = x - step * g
            fc = fun(cand)
            nfev += 1
            if fc <= f - 1e-4 * step * gn ** 2:
                x, f = cand, fc
                step *= 2.0
                break
            step *= 0.5
            if step < 1e-10:
                return x, f, True
    return x, f, False


def local_minimize(fun: Callable, x0, cfg: OptimizerConfig, method: str | None = None):
    """Run the configured inner local optimizer; returns ``(x, f, converged)``.

    The returned value never exceeds ``fun(x0)`` (which is evaluated once).
    """
    method = (method or cfg.method).lower()
    x0 = np.asarray(x0, dtype=float)
    f0 = fun(x0)
    if x0.size == 0:
        return x0, f0, True
    maxfev = cfg.maxfev or 200 * x0.size + 200
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", (OptimizeWarning, RuntimeWarning))
        if method == "nelder-mead":
            res = minimize(
                fun, x0, method="Nelder-Mead",
                options={"maxfev": maxfev, "xatol": cfg.xtol, "fatol": cfg.ftol, "adaptive": x0.size > 4},
            )
        elif method == "bfgs":
            res = minimize(fun, x0, method="BFGS", jac="2-point",
                           options={"maxiter": maxfev // (x0.size + 1) + 1, "gtol": cfg.gtol})
        elif method == "l-bfgs-b":
            res = minimize(fun, x0, method="L-BFGS-B",
                           options={"maxfun": maxfev, "ftol": cfg.ftol, "gtol": cfg.gtol})
        elif method == "fd-gd":
            x, f, ok = _fd_descent(fun, x0, f0, cfg.eps, maxfev, cfg.gtol)
            return (x, f, ok) if f <= f0 else (x0, f0, ok)
        else:
            raise ValueError(f"unknown inner method {method!r}")
    if res.fun <= f0:
        return np.asarray(res.x, dtype=float), float(res.fun), bool(res.success)
    return x0, f0, bool(res.success)


def interp_extend(params) -> np.ndarray:
    """INTERP warm start: depth-p ``(gammas, betas)`` to depth p+1.

    Each half is resampled by linear interpolation so that new entry ``i``
    (1-based) is ``((i-1)/p) old[i-1] + ((p-i+1)/p) old[i]`` with
    ``old[0] = old[p+1] = 0``.
    """
    params = np.asarray(params, dtype=float)
    if params.size == 0 or params.size % 2:
        raise ValueError("expected a non-empty (gammas, betas) vector")
    p = params.size // 2

    def resample(old):
        padded = np.concatenate([[0.0], old, [0.0]])
        i = np.arange(1, p + 2)
        return (i - 1) / p * padded[i - 1] + (p - i + 1) / p * padded[i]

    return np.concatenate([resample(params[:p]), resample(params[p:])])


def pad_extend(params) -> np.ndarray:
    """Depth-p vector to depth p+1 with a trailing identity layer."""
    params = np.asarray(params, dtype=float)
    p = params.size // 2
    return np.concatenate([params[:p], [0.0], params[p:], [0.0]])


def optimize_qaoa_interp(inst: ProblemInstance, p_max: int, cfg: OptimizerConfig,
                         counter: EvalCounter | None = None, on_trace: Callable | None = None
                         ) -> list[OptimizationResult]:
    """Layerwise QAOA optimization for depths ``1 .. p_max``.

    Depth 1 takes the best of ``cfg.restarts`` random starts; deeper circuits
    start from the INTERP extension, falling back to the padded extension when
    INTERP does not reach the previous depth's energy. Counters in the returned
    results are cumulative over depths.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    counter = counter if counter is not None else EvalCounter()
    rng = np.random.default_rng([cfg.seed, inst.seed if inst.seed is not None else 0])
    method = cfg.qaoa_method or cfg.method
    results = []
    for p in range(1, p_max + 1):
        spec = AnsatzSpec("qaoa", p)
        obj = Objective(spec, inst, counter, "f_Q")
        ok = True
        if p == 1:
            best = None
            for _ in range(cfg.restarts):
                x0 = np.array([rng.uniform(0.0, np.pi), rng.uniform(-np.pi / 2, np.pi / 2)])
                x, f, conv = local_minimize(obj, x0, cfg, method)
                if best is None or f < best[1]:
                    best = (x, f, conv)
            x, f, ok = best
        else:
            prev = results[-1]
            x, f, ok = local_minimize(obj, interp_extend(prev.best_params), cfg, method)
            if f > prev.best_energy + 1e-9:
                x2, f2, ok2 = local_minimize(obj, pad_extend(prev.best_params), cfg, method)
                if f2 < f:
                    x, f, ok = x2, f2, ok2
        e, fid = evaluate(spec, inst, x)
        if not ok:
            logger.info("QAOA inner optimizer did not converge at p=%d (seed %s)", p, inst.seed)
        results.append(OptimizationResult(spec, x, e, fid, counter.copy(), [e], ok))
        if on_trace:
            on_trace({"depth": p, "phase": "qaoa", "energy": e, **counter.to_dict()})
    return results


def _fd_with_base(obj: Objective, x: np.ndarray, eps: float) -> tuple[np.ndarray, float]:
    f0 = obj(x)
    g = np.empty(x.size)
    for k in range(x.size):
        xk = x.copy()
        xk[k] += eps
        g[k] = (obj(xk) - f0) / eps
    return g, f0


def finite_diff_gradients(inst: ProblemInstance, spec: AnsatzSpec, params, eps: float,
                          counter: EvalCounter | None = None) -> np.ndarray:
    """Forward differences ``(E(x + eps e_k) - E(x)) / eps``; costs ``len(params) + 1`` evaluations (f_G)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    counter = counter if counter is not None else EvalCounter()
    obj = Objective(spec, inst, counter, "f_G")
    g, _ = _fd_with_base(obj, np.asarray(params, dtype=float), eps)
    return g


def select_active_set(gradients, delta1: float) -> np.ndarray:
    """Indices with ``|g| > delta1``."""
    return np.flatnonzero(np.abs(np.asarray(gradients, dtype=float)) > delta1)


def sqaoa_refine(inst: ProblemInstance, spec: AnsatzSpec, init_params, cfg: OptimizerConfig,
                 counter: EvalCounter | None = None, on_trace: Callable | None = None
                 ) -> OptimizationResult:
    """Screen gradients, optimize the active subset, repeat until the gain is below ``delta2``."""
    counter = counter if counter is not None else EvalCounter()
    x = np.array(init_params, dtype=float)
    obj = Objective(spec, inst, counter)
    energy = None
    trace: list[float] = []
    converged = True
    for outer in range(cfg.max_outer):
        obj.phase = "f_G"
        g, f_here = _fd_with_base(obj, x, cfg.eps)
        if energy is None:
            energy = f_here
            trace.append(energy)
        active = select_active_set(g, cfg.delta1)
        if active.size == 0:
            break
        obj.phase = "f_O"
        base = x.copy()

        def sub(y, base=base, active=active):
            z = base.copy()
            z[active] = y
            return obj(z)

        y, f_new, ok = local_minimize(sub, x[active], cfg)
        converged = converged and ok
        decrease = energy - f_new
        if f_new < energy:
            x = base.copy()
            x[active] = y
            energy = f_new
        trace.append(energy)
        if on_trace:
            on_trace({"depth": spec.p, "phase": "refine", "outer": outer, "energy": energy,
                      "active": int(active.size), **counter.to_dict()})
        if decrease < cfg.delta2:
            break
    else:
        converged = False
    e, fid = evaluate(spec, inst, x)
    return OptimizationResult(spec, x, e, fid, counter.copy(), trace, converged)


@dataclass
class PipelineResult:
    qaoa: list[OptimizationResult]
    refined: list[OptimizationResult]
    counters: list[EvalCounter]


def run_full_pipeline(inst: ProblemInstance, spec: AnsatzSpec, cfg: OptimizerConfig,
                      qaoa_results: list[OptimizationResult] | None = None,
                      on_trace: Callable | None = None) -> PipelineResult:
    """QAOA for depths ``1 .. spec.p`` and a refinement of ``spec`` at each depth.

    ``counters[k]`` holds the cost of the refined depth-(k+1) run:
    cumulative QAOA evaluations up to that depth plus that depth's screening
    and refinement evaluations. Precomputed ``qaoa_results`` may be passed to
    share one QAOA run between several ansatz families.
    """
    if qaoa_results is None:
        qaoa_results = optimize_qaoa_interp(inst, spec.p, cfg, on_trace=on_trace)
    if len(qaoa_results) < spec.p:
        raise ValueError(f"need QAOA results up to depth {spec.p}, got {len(qaoa_results)}")
    refined, counters = [], []
    for p in range(1, spec.p + 1):
        q = qaoa_results[p - 1]
        spec_p = spec.with_depth(p)
        counter = EvalCounter(f_Q=q.counter.f_Q)
        if spec.family == "qaoa":
            res = OptimizationResult(spec_p, q.best_params.copy(), q.best_energy, q.fidelity,
                                     counter.copy(), [q.best_energy], q.converged)
        else:
            init = embed_qaoa(spec_p, inst, q.best_params)
            res = sqaoa_refine(inst, spec_p, init, cfg, counter, on_trace)
        refined.append(res)
        counters.append(res.counter)
    return PipelineResult(qaoa_results[: spec.p], refined, counters)
