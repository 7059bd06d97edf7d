"""Quick import-and-evaluate check for the Python extension.

Build and install first:  pip install ./crates/python --no-build-isolation
"""
import math

import mu_entropy_py as mu


def close(a, b, tol=1e-8):
    return abs(a - b) <= tol * (1.0 + abs(b))


def main():
    unit = mu.Polytope.interval(1)
    assert close(mu.vector_mu_entropy(unit, [0.0], 0.0), -4 * math.pi)
    assert close(mu.transition_point(unit), 8 * math.pi)

    square = mu.Polytope.from_vertices([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert square.dim == 2 and close(square.volume, 1.0)

    vee = mu.PLFunction([([-1.0], 0.0), ([1.0], -1.0)])
    tc = mu.TestConfiguration(unit, vee)
    i0, _, b0 = tc.integrals(0.0)
    assert close(i0, 1.0) and close(b0, 2.0)
    m, _, _ = tc.na_entropy(0.0, -1.0)
    assert close(m, -4 * math.pi)
    assert close(tc.norm2(), 1.0 / 48.0)

    fs = mu.ToricMetric(2.0)
    assert close(fs.mu_entropy(-1.0), -2 * math.pi - (1.0 - math.log(2.0)))
    assert close(fs.h_entropy(), -2 * math.pi * math.log(2.0))

    bumpy = mu.ToricMetric(1.0, [0.0, 0.0, 0.05])
    value, f_star, residual = bumpy.critical_momentum(-1.0)
    assert residual < 1e-8 and len(f_star) == len(bumpy.nodes)
    assert value >= mu.vector_mu_entropy(unit, [0.3], -1.0)

    w, limit, upward, drift = mu.ray_trace(1.0, vee, 1.0, -1.0, [0.0, 5.0, 10.0, 20.0])
    assert upward <= 1e-6 and drift <= 1e-6
    assert abs(w[-1] - limit) < 1e-2

    try:
        mu.TestConfiguration(unit, mu.PLFunction([([1.0], 0.0)]))
    except ValueError:
        pass
    else:
        raise AssertionError("positive q accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
