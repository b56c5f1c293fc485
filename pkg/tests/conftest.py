import math

import numpy as np

from zenoband import detector_response

# One line per acceptance criterion, printed in the terminal summary so the
# pass/fail table is visible regardless of output capture.
ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def g2_oracle(band, gamma, mu, n_base=200001, n_ladder=4000):
    """Independent brute-force evaluation of the renormalized form factor.

    Plain trapezoid on a dense grid: a wide base covering the band plus
    logarithmic ladders into the local peak at k = mu.  Deliberately shares
    no code with the adaptive production quadrature.  Accuracy ~1e-6
    relative at the default sampling.
    """
    c, delta = band.center, band.delta
    X = max(80.0 * delta, 2.0 * abs(mu - c) + 20.0 * delta)
    parts = [np.linspace(c - X, c + X, n_base)]
    w = math.pi * float(detector_response(band, mu))
    if w > 0.0:
        d = np.geomspace(1e-3 * w, X, n_ladder)
        parts += [mu + d, mu - d, np.linspace(mu - 2.0 * w, mu + 2.0 * w, 2001)]
    k = np.unique(np.concatenate(parts))
    k = k[(k >= c - X) & (k <= c + X)]
    e = np.asarray(detector_response(band, k))
    f = e / ((mu - k) ** 2 + (math.pi * e) ** 2)
    out = gamma / (2.0 * math.pi) * float(np.trapezoid(f, k))
    if w == 0.0:
        out += gamma / (2.0 * math.pi)  # unresolvable peak degenerates to a delta
    return out
