"""Smoke test for the holodfs Python extension.

Build and install first:
    pip install --no-build-isolation -e crates/py
"""

import math

import holodfs


def main():
    assert "SR_NHQC_DFS" in holodfs.protocols()

    ideal = holodfs.evaluate("not")
    assert ideal.avg_gate_fidelity > 1 - 1e-9, ideal

    noise = holodfs.Noise(delta=0.05, t2_us=40.0)
    sr = holodfs.evaluate("not", "SR_NHQC_DFS", noise=noise)
    nhqc = holodfs.evaluate("not", "NHQC_DFS", noise=noise)
    assert sr.avg_gate_fidelity > nhqc.avg_gate_fidelity, (sr, nhqc)
    assert sr.trace_defect < 1e-8 and sr.min_choi_eigenvalue > -1e-7

    cnot = holodfs.evaluate("cnot", noise=noise)
    assert 0.9 < cnot.avg_gate_fidelity <= 1.0, cnot

    rot = holodfs.evaluate_rotation(math.pi / 3, 0.4, math.pi)
    assert rot.avg_gate_fidelity > 1 - 1e-9, rot

    report = holodfs.verify("not")
    assert report.all_pass, report
    assert not holodfs.verify("not", "NHQC_DFS").super_robust

    times, pop0, pop1 = holodfs.population_trace("hadamard", points=11)
    assert times[0] == 0.0 and abs(times[-1] - 100.0) < 1e-12
    assert abs(pop0[-1] - 0.5) < 1e-6 and abs(pop1[-1] - 0.5) < 1e-6

    u = holodfs.target_unitary(math.pi / 2, 0.0, math.pi)
    assert abs(abs(u[0][1]) - 1) < 1e-12 and abs(u[0][0]) < 1e-12

    assert abs(holodfs.bessel_j(1, 1.0) - 0.44005058574493355) < 1e-12

    try:
        holodfs.evaluate("cnot", "DG_BARE")
    except ValueError:
        pass
    else:
        raise AssertionError("cnot with DG_BARE should be rejected")

    print(f"ideal NOT      {ideal.avg_gate_fidelity:.12f}")
    print(f"SR  NOT (0.05) {sr.avg_gate_fidelity:.12f}")
    print(f"NHQC NOT (0.05) {nhqc.avg_gate_fidelity:.12f}")
    print(f"SR CNOT (0.05) {cnot.avg_gate_fidelity:.12f}")
    print("smoke test passed")


if __name__ == "__main__":
    main()
