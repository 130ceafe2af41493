"""Quick end-to-end check of the fpulab Python module.

Build and install first:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/fpulab_py-*.whl
"""

import math

import fpulab_py as fp


def main():
    t = fp.thermo(0.5, 100.0 / 256.0)
    assert abs(t.eta - 1.1812) < 2e-3, t.eta
    print(f"thermo: theta={t.theta:.5f} eta={t.eta:.5f} eta_sc={t.eta_sc:.5f}")

    params = fp.ModelParams(32, 0.5, 12.5)
    state = fp.ChainState.thermal(params, seed=2)
    e0 = state.energy(params)
    assert abs(e0 - 12.5) < 1e-9, e0
    assert abs(sum(state.p)) < 1e-12

    integ = fp.Integrator(0.01, params)
    integ.run(state, 20_000)
    snaps = integ.run(state, 200_000, sample_every=20)
    drift = max(abs(s.energy(params) - e0) / e0 for s in snaps)
    assert drift < 1e-8, drift
    print(f"integrator: {len(snaps)} snapshots, max relative drift {drift:.2e}")

    eta_bar, spread, _ = fp.measure_eta(snaps, 0.2, t.eta)
    assert abs(eta_bar - t.eta) / t.eta < 0.02, eta_bar
    print(f"measured eta {eta_bar:.4f} (spread {spread:.3f})")

    a = snaps[-1].waves(t.eta)
    assert len(a) == 32 and isinstance(a[1], complex)

    quartets = fp.exact_quartets(16)
    assert len(quartets) > 0 and all(len(q) == 4 for q in quartets)
    assert fp.verify_no_3to1(16)[0] == 0
    print(f"resonances: {len(quartets)} exact quartets at N=16")

    model = fp.LinewidthModel(32, 0.5, 12.5)
    tau, ratio = model.correlation_time(8)
    assert tau > 0 and ratio > 1
    print(f"linewidth: tau_8 = {tau:.2f} ({ratio:.1f} periods)")

    h = fp.logistic_lyapunov(1.0, iterations=200_000)
    assert abs(h - math.log(2.0)) < 0.01, h
    print(f"logistic h(1) = {h:.4f}")

    try:
        fp.ModelParams(3, 0.5, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("N = 3 should be rejected")
    print("smoke test passed")


if __name__ == "__main__":
    main()
