"""Smoke test for the causal_qram extension module.

Build and stage the module first:

    cargo build --release -p causal-qram-py --features extension-module
    cp target/release/libcausal_qram_py.so python/causal_qram.so
    python3 python/smoke_test.py
"""

import cmath
import math
import sys

import causal_qram as cq


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    n = cq.naive_max_qubits(1e-6, 1e-3)
    assert close(n, 8.9e12, 0.02), n

    p = cq.HardwareParams(a=1e-6, d=2)
    r = cq.teleport_hybrid_max_qubits(p, depth_exponent=0)
    assert close(r.max_qubits_total, 9e22, 1e-9), r
    r = cq.qram_max_qubits(cq.HardwareParams(), depth_exponent=0, velocity_source="6000")
    assert close(r.max_qubits_total, 6e6, 1e-9), r
    try:
        cq.teleport_hybrid_max_qubits(cq.HardwareParams(d=1))
    except ValueError as e:
        assert "d=2" in str(e)
    else:
        raise AssertionError("d=1 accepted")

    lr3, _ = cq.lr_velocity(cq.HardwareParams(d=3))
    assert close(lr3, 4 * math.sqrt(3), 1e-12)

    t_sw, t_bs, t_cz, _, _ = cq.gate_times(2 * math.pi, math.pi)
    u = cq.bs_unitary(2 * math.pi, t_sw)
    assert close(abs(u[1][2]) ** 2, 1.0, 1e-9)
    assert close(abs(cq.bs_unitary(2 * math.pi, t_bs)[1][2]) ** 2, 0.5, 1e-9)
    assert abs(cq.cz_unitary(math.pi, t_cz)[3][3] + 1) < 1e-10
    assert cq.cswap_fidelity(2 * math.pi, math.pi) > 1 - 1e-9

    chain = cq.Lattice(1, 16, [1.0])
    assert close(chain.dispersion([math.pi]), 2.0, 1e-12)
    sigma1 = cq.Lattice(1, 4, [1.0]).weyl_commutator_norm({0: 1}, {0: 1j}, 0.0)
    assert close(sigma1, 2 * math.sin(0.5), 1e-12)

    cone = cq.Lattice(1, 400, [1.0]).light_cone()
    assert close(cone.velocity, cone.group_velocity, 0.10), cone.velocity
    assert cone.within_bound

    q = cq.simulate_query("0110", [0, 0, 1, 0])
    assert q.retrieval[0][2] is True and close(q.fidelity, 1.0, 1e-9)
    amp = [cmath.rect(0.5, k) for k in range(4)]
    q = cq.simulate_query("0110", amp)
    assert close(q.fidelity, 1.0, 1e-9)
    min_fid, mismatches = cq.verify_retrieval("10110010")
    assert not mismatches and min_fid > 1 - 1e-9

    suites = cq.verify()
    failed = [name for name, (ok, _) in suites.items() if not ok]
    assert not failed, failed

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
