"""From a certificate to a guaranteed growth envelope.

A passing certificate yields a growth exponent eta built from the
certificate constant, bounds on the coupling and output moduli, the total
kernel variation, and the initial derivative magnitude.  The energy
M(t) -- the running sup of the weighted half squared distance from the
initial state, floored at one half -- must then stay under M(0) e^{eta t}.
The exponent is deliberately conservative; the point is that the inequality
holds, not that it is tight.
"""

import numpy as np

from delaynet import (
    HistoryFunction,
    IntegratorConfig,
    ProofConstants,
    check_envelope,
    check_quad,
    chua_node,
    integrate,
    lipschitz_certificate,
    make_example,
)


def main():
    model = make_example(3, node=chua_node(), Gamma=np.eye(3), tau=0.01,
                         topology="all-to-all", c=10.0, m=3)
    cert = lipschitz_certificate(model.node.lipschitz_hint, 3, epsilon=0.1)
    quad = check_quad(model.node, cert, box=5.0, budget=2000, seed=0)
    print(f"certificate passed {quad.probes} probes: {quad.passed}")

    history = HistoryFunction.constant(
        [0.1, -0.1, 0.05, 0.2, 0.15, -0.1, -0.15, 0.05, 0.2])
    traj = integrate(model, history,
                     IntegratorConfig(method="rk4", h=2e-3, horizon=5.0))

    constants = ProofConstants.derive(cert, model, traj.states[0], horizon=5.0)
    print(f"delta={constants.delta:.3f} alpha={constants.alpha:.3f} "
          f"beta={constants.beta:.3f} gamma={constants.gamma:.3f} "
          f"K={constants.K:.1f}")
    print(f"growth exponent eta = {constants.eta:.2f}")

    report = check_envelope(traj, constants.eta, cert.P, rel_tol=1e-6)
    print(f"\nenvelope holds at all {report.times.size} samples: "
          f"{report.verdict}")
    print(f"max relative violation: {report.max_rel_violation:.3e}")
    print(f"state-norm bound holds per sample: {report.state_bound_ok}")

    # The bound is astronomically slack away from t = 0, which is exactly
    # what a worst-case exponent should look like on a bounded attractor.
    for k in (0, 1, 10, 100):
        print(f"  t={report.times[k]:.3f}  M={report.M[k]:.4f}  "
              f"log bound={report.log_envelope_bound[k]:.2f}")


if __name__ == "__main__":
    main()
