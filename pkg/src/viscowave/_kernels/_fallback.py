"""Pure-numpy stepper kernels, API-identical to the compiled extension.

Both kernels integrate the memory equation per mode after state
augmentation: the convolution integrals y_i(t) = int_0^t e^{-r_i(t-s)}
v(s) ds obey y_i' = v - r_i y_i, which turns each mode into a local
4-component system stepped with the classical fourth-order scheme. The
arrays are laid out so one step advances every mode (and every forcing
signal) with whole-array operations.
"""

from __future__ import annotations

import numpy as np


def volterra_free(lams, v0, w0, b1, b2, r1, r2, T, steps):
    """Integrate the free modes v'' + lam v = lam (b1 y1 + b2 y2).

    lams, v0, w0 are (m,) arrays. Returns (traj, w_final) where traj has
    shape (steps+1, m) with traj[k] = v(k*T/steps).
    """
    lams = np.asarray(lams, dtype=float)
    m = lams.size
    h = T / steps
    v = np.array(v0, dtype=float, copy=True)
    w = np.array(w0, dtype=float, copy=True)
    y1 = np.zeros(m)
    y2 = np.zeros(m)
    traj = np.empty((steps + 1, m))
    traj[0] = v
    for k in range(steps):
        k1v = w
        k1w = lams * (b1 * y1 + b2 * y2 - v)
        k1y1 = v - r1 * y1
        k1y2 = v - r2 * y2

        v2 = v + 0.5 * h * k1v
        w2 = w + 0.5 * h * k1w
        y12 = y1 + 0.5 * h * k1y1
        y22 = y2 + 0.5 * h * k1y2
        k2v = w2
        k2w = lams * (b1 * y12 + b2 * y22 - v2)
        k2y1 = v2 - r1 * y12
        k2y2 = v2 - r2 * y22

        v3 = v + 0.5 * h * k2v
        w3 = w + 0.5 * h * k2w
        y13 = y1 + 0.5 * h * k2y1
        y23 = y2 + 0.5 * h * k2y2
        k3v = w3
        k3w = lams * (b1 * y13 + b2 * y23 - v3)
        k3y1 = v3 - r1 * y13
        k3y2 = v3 - r2 * y23

        v4 = v + h * k3v
        w4 = w + h * k3w
        y14 = y1 + h * k3y1
        y24 = y2 + h * k3y2
        k4v = w4
        k4w = lams * (b1 * y14 + b2 * y24 - v4)
        k4y1 = v4 - r1 * y14
        k4y2 = v4 - r2 * y24

        s = h / 6.0
        v = v + s * (k1v + 2.0 * (k2v + k3v) + k4v)
        w = w + s * (k1w + 2.0 * (k2w + k3w) + k4w)
        y1 = y1 + s * (k1y1 + 2.0 * (k2y1 + k3y1) + k4y1)
        y2 = y2 + s * (k1y2 + 2.0 * (k2y2 + k3y2) + k4y2)
        traj[k + 1] = v
    return traj, w


def forced_modes(lams, cvec, b1, b2, r1, r2, T, steps, f_half, store_traj=False):
    """Integrate the boundary-forced modes from rest for S forcing signals.

    Each mode obeys v'' + lam v - lam (b1 y1 + b2 y2) = c * g(t) with
    g = f - b1 q1 - b2 q2, where q_i' = f - r_i q_i are shared filter
    states of the forcing. f_half has shape (S, 2*steps+1): samples of f
    at every half step. Returns (v_final, w_final, traj) with finals of
    shape (S, m); traj is (steps+1, S, m) when store_traj else None.
    """
    lams = np.asarray(lams, dtype=float)
    f_half = np.atleast_2d(np.asarray(f_half, dtype=float))
    S = f_half.shape[0]
    m = lams.size
    h = T / steps
    v = np.zeros((S, m))
    w = np.zeros((S, m))
    y1 = np.zeros((S, m))
    y2 = np.zeros((S, m))
    q1 = np.zeros(S)
    q2 = np.zeros(S)
    cvec = np.asarray(cvec, dtype=float)
    traj = np.empty((steps + 1, S, m)) if store_traj else None
    if store_traj:
        traj[0] = v
    for k in range(steps):
        f0 = f_half[:, 2 * k]
        fm = f_half[:, 2 * k + 1]
        f1 = f_half[:, 2 * k + 2]

        k1q1 = f0 - r1 * q1
        k1q2 = f0 - r2 * q2
        k2q1 = fm - r1 * (q1 + 0.5 * h * k1q1)
        k2q2 = fm - r2 * (q2 + 0.5 * h * k1q2)
        k3q1 = fm - r1 * (q1 + 0.5 * h * k2q1)
        k3q2 = fm - r2 * (q2 + 0.5 * h * k2q2)
        k4q1 = f1 - r1 * (q1 + h * k3q1)
        k4q2 = f1 - r2 * (q2 + h * k3q2)

        g1 = f0 - b1 * q1 - b2 * q2
        g2 = fm - b1 * (q1 + 0.5 * h * k1q1) - b2 * (q2 + 0.5 * h * k1q2)
        g3 = fm - b1 * (q1 + 0.5 * h * k2q1) - b2 * (q2 + 0.5 * h * k2q2)
        g4 = f1 - b1 * (q1 + h * k3q1) - b2 * (q2 + h * k3q2)

        k1v = w
        k1w = lams * (b1 * y1 + b2 * y2 - v) + np.outer(g1, cvec)
        k1y1 = v - r1 * y1
        k1y2 = v - r2 * y2

        v2 = v + 0.5 * h * k1v
        w2 = w + 0.5 * h * k1w
        y12 = y1 + 0.5 * h * k1y1
        y22 = y2 + 0.5 * h * k1y2
        k2v = w2
        k2w = lams * (b1 * y12 + b2 * y22 - v2) + np.outer(g2, cvec)
        k2y1 = v2 - r1 * y12
        k2y2 = v2 - r2 * y22

        v3 = v + 0.5 * h * k2v
        w3 = w + 0.5 * h * k2w
        y13 = y1 + 0.5 * h * k2y1
        y23 = y2 + 0.5 * h * k2y2
        k3v = w3
        k3w = lams * (b1 * y13 + b2 * y23 - v3) + np.outer(g3, cvec)
        k3y1 = v3 - r1 * y13
        k3y2 = v3 - r2 * y23

        v4 = v + h * k3v
        w4 = w + h * k3w
        y14 = y1 + h * k3y1
        y24 = y2 + h * k3y2
        k4v = w4
        k4w = lams * (b1 * y14 + b2 * y24 - v4) + np.outer(g4, cvec)
        k4y1 = v4 - r1 * y14
        k4y2 = v4 - r2 * y24

        s = h / 6.0
        v = v + s * (k1v + 2.0 * (k2v + k3v) + k4v)
        w = w + s * (k1w + 2.0 * (k2w + k3w) + k4w)
        y1 = y1 + s * (k1y1 + 2.0 * (k2y1 + k3y1) + k4y1)
        y2 = y2 + s * (k1y2 + 2.0 * (k2y2 + k3y2) + k4y2)
        q1 = q1 + s * (k1q1 + 2.0 * (k2q1 + k3q1) + k4q1)
        q2 = q2 + s * (k1q2 + 2.0 * (k2q2 + k3q2) + k4q2)
        if store_traj:
            traj[k + 1] = v
    return v, w, traj
