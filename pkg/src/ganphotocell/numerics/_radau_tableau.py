"""Butcher tableau and error-estimator weights of 3-stage Radau IIA (order 5)."""
import numpy as np

S6 = 6.0 ** 0.5

C = np.array([(4.0 - S6) / 10.0, (4.0 + S6) / 10.0, 1.0])
A_RK = np.array([
    [(88.0 - 7.0 * S6) / 360.0, (296.0 - 169.0 * S6) / 1800.0, (-2.0 + 3.0 * S6) / 225.0],
    [(296.0 + 169.0 * S6) / 1800.0, (88.0 + 7.0 * S6) / 360.0, (-2.0 - 3.0 * S6) / 225.0],
    [(16.0 - S6) / 36.0, (16.0 + S6) / 36.0, 1.0 / 9.0],
])
# real eigenvalue of inv(A_RK); the embedded estimate uses (MU_REAL/h I - J)
MU_REAL = 3.0 + 3.0 ** (2.0 / 3.0) - 3.0 ** (1.0 / 3.0)
E_EST = np.array([-13.0 - 7.0 * S6, -13.0 + 7.0 * S6, -1.0]) / 3.0
