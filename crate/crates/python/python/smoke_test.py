"""Smoke test for the qubitbath extension. Build it first with `maturin develop`."""

import json
import math

import qubitbath as qb


def main():
    p = qb.ModelParams(4, 10.0)
    assert p.regime == "strong"
    assert abs(p.survival_amplitude(0.0) - 1) < 1e-15
    t1 = p.zero_crossings(3)[0]
    assert abs(p.survival_amplitude(t1)) < 1e-10

    w = qb.InitialSpec.w_state()
    assert abs(qb.closed_form_concurrence(p, w, "pair_w", 0.0) - 0.5) < 1e-15

    pair = qb.InitialSpec.two_qubit(0.0)
    weak = qb.ModelParams(6, 0.1)
    rho = qb.pair_density_matrix(weak, pair, "kl", 3.0)
    c = qb.closed_form_concurrence(weak, pair, "kl", 3.0)
    assert abs(qb.wootters_concurrence(rho) - c) < 1e-9
    assert abs(qb.stationary_concurrence(4, pair, "kj") - 0.25) < 1e-15

    taus, values = qb.concurrence_series(qb.ModelParams(2, 10.0), pair, "kl", 30.0, 30001)
    events = qb.detect_esd(taus, values, "kl")
    assert events and events[-1][1] is None

    edges = qb.steady_graph(5, qb.InitialSpec.two_qubit(-1.0))
    assert max(e[3] for e in edges) == max(e[3] for e in edges if e[0] == 1)

    weak4 = qb.ModelParams(4, 0.1)
    probs = [qb.zeno_survival(weak4, t, round(25 / t)) for t in (5.0, 1.0, 0.1)]
    assert probs[0] < probs[1] < probs[2]
    assert math.isinf(qb.effective_decay_rate(p, t1))

    table = qb.run(json.dumps({"n": 8, "quantities": ["pair_w"], "samples": 3, "tau_max": 1.0}))
    assert table.splitlines()[:2] == ["tau,pair_w", "0.0,0.25"]

    try:
        qb.ModelParams(1, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("n = 1 accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
