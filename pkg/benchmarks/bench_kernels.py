"""Compare the compiled and numpy kernels on a full 96 x 96 two-mode loss grid.

    python benchmarks/bench_kernels.py [--repeat N]

Times the batched lossy-moment kernel directly and the whole fig5a sweep with
each backend, and checks that both backends give the same numbers.
"""
import argparse
import timeit

import numpy as np

from opa_metrology import _kernels_py, cluster, kernels
from opa_metrology.analytic import ClusterParams
from opa_metrology.cluster import ClusterScenario, amplified_cluster, nullifier_readout, sweep_cluster_2d
from opa_metrology.epr import loss_grid
from opa_metrology.gaussian import loss_coefficients
from opa_metrology.homodyne import readout_derivative, readout_vector

try:
    from opa_metrology import _kernels_c
except ImportError:
    _kernels_c = None


def kernel_inputs():
    p = ClusterParams(alpha=(0, 1, 2, 0), beta=(1, 2, 0, 3))
    sc = ClusterScenario(p, loss_grid(), modes=(1, 2))
    _, rows = sc.eta_rows()
    amp, noise = loss_coefficients(rows)
    state = amplified_cluster(1, p)
    ro = nullifier_readout(cluster.NULLIFIERS[1], p.theta)
    return state.mean, state.cov, readout_vector(ro, 4), readout_derivative(ro, 4), amp, noise


def sweep_with(impl):
    saved = kernels.lossy_moments
    kernels.lossy_moments = impl.lossy_moments
    try:
        p = ClusterParams(alpha=(0, 1, 2, 0), beta=(1, 2, 0, 3))
        return sweep_cluster_2d(ClusterScenario(p, loss_grid(), modes=(1, 2)))
    finally:
        kernels.lossy_moments = saved


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    impls = [("python", _kernels_py)]
    if _kernels_c is None:
        print("compiled extension not built; timing the numpy kernel only")
    else:
        impls.append(("cython", _kernels_c))

    inputs = kernel_inputs()
    print(f"grid points: {len(inputs[4])}")
    results = {}
    for name, impl in impls:
        t_kernel = best(lambda: impl.lossy_moments(*inputs), args.repeat)
        t_sweep = best(lambda: sweep_with(impl), args.repeat)
        results[name] = (impl.lossy_moments(*inputs), sweep_with(impl))
        print(f"{name:>7}: kernel {t_kernel * 1e3:8.3f} ms   fig5a sweep {t_sweep * 1e3:8.1f} ms")

    if len(results) == 2:
        (kp, sp), (kc, sc) = results["python"], results["cython"]
        kdiff = max(float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1))) for a, b in zip(kp, kc))
        sdiff = max(float(np.nanmax(np.abs(sp[c] - sc[c]) / np.abs(sp[c]))) for c in sp if c.startswith("sigma"))
        print(f"max relative difference: kernel {kdiff:.2e}, sweep {sdiff:.2e}")


if __name__ == "__main__":
    main()
