# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepper kernels.

Same contract as the pure-numpy module: classical fourth-order stepping
of the memory modes after state augmentation. The time loop runs in C
with per-mode inner loops, which removes the per-step array overhead
that dominates the fallback.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def volterra_free(lams, v0, w0, double b1, double b2, double r1, double r2,
                  double T, int steps):
    """Free modes; see the fallback module for the contract."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lam_arr = np.ascontiguousarray(lams, dtype=np.float64)
    cdef int m = lam_arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] traj = np.empty((steps + 1, m), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.array(v0, dtype=np.float64, copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.array(w0, dtype=np.float64, copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y1 = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y2 = np.zeros(m, dtype=np.float64)

    cdef double[::1] lam_v = lam_arr
    cdef double[:, ::1] traj_v = traj
    cdef double[::1] vv = v
    cdef double[::1] wv = w
    cdef double[::1] y1v = y1
    cdef double[::1] y2v = y2

    cdef double h = T / steps
    cdef double hh = 0.5 * h
    cdef double s6 = h / 6.0
    cdef int k, i
    cdef double lam, vi, wi, a1, a2
    cdef double k1v, k1w, k1a, k1b, k2v, k2w, k2a, k2b
    cdef double k3v, k3w, k3a, k3b, k4v, k4w, k4a, k4b
    cdef double v2, w2, a12, a22, v3, w3, a13, a23, v4, w4, a14, a24

    for i in range(m):
        traj_v[0, i] = vv[i]
    for k in range(steps):
        for i in range(m):
            lam = lam_v[i]
            vi = vv[i]; wi = wv[i]; a1 = y1v[i]; a2 = y2v[i]

            k1v = wi
            k1w = lam * (b1 * a1 + b2 * a2 - vi)
            k1a = vi - r1 * a1
            k1b = vi - r2 * a2

            v2 = vi + hh * k1v; w2 = wi + hh * k1w
            a12 = a1 + hh * k1a; a22 = a2 + hh * k1b
            k2v = w2
            k2w = lam * (b1 * a12 + b2 * a22 - v2)
            k2a = v2 - r1 * a12
            k2b = v2 - r2 * a22

            v3 = vi + hh * k2v; w3 = wi + hh * k2w
            a13 = a1 + hh * k2a; a23 = a2 + hh * k2b
            k3v = w3
            k3w = lam * (b1 * a13 + b2 * a23 - v3)
            k3a = v3 - r1 * a13
            k3b = v3 - r2 * a23

            v4 = vi + h * k3v; w4 = wi + h * k3w
            a14 = a1 + h * k3a; a24 = a2 + h * k3b
            k4v = w4
            k4w = lam * (b1 * a14 + b2 * a24 - v4)
            k4a = v4 - r1 * a14
            k4b = v4 - r2 * a24

            vv[i] = vi + s6 * (k1v + 2.0 * (k2v + k3v) + k4v)
            wv[i] = wi + s6 * (k1w + 2.0 * (k2w + k3w) + k4w)
            y1v[i] = a1 + s6 * (k1a + 2.0 * (k2a + k3a) + k4a)
            y2v[i] = a2 + s6 * (k1b + 2.0 * (k2b + k3b) + k4b)
            traj_v[k + 1, i] = vv[i]
    return traj, w


def forced_modes(lams, cvec, double b1, double b2, double r1, double r2,
                 double T, int steps, f_half, store_traj=False):
    """Boundary-forced modes from rest; see the fallback module."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lam_arr = np.ascontiguousarray(lams, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c_arr = np.ascontiguousarray(cvec, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] f_arr = np.ascontiguousarray(
        np.atleast_2d(np.asarray(f_half, dtype=np.float64)))
    cdef int m = lam_arr.shape[0]
    cdef int S = f_arr.shape[0]
    cdef int want_traj = 1 if store_traj else 0

    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.zeros((S, m), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.zeros((S, m), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] y1 = np.zeros((S, m), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] y2 = np.zeros((S, m), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q1 = np.zeros(S, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q2 = np.zeros(S, dtype=np.float64)
    traj_obj = np.empty((steps + 1, S, m), dtype=np.float64) if want_traj else None

    cdef double[::1] lam_v = lam_arr
    cdef double[::1] c_v = c_arr
    cdef double[:, ::1] f_v = f_arr
    cdef double[:, ::1] vv = v
    cdef double[:, ::1] wv = w
    cdef double[:, ::1] y1v = y1
    cdef double[:, ::1] y2v = y2
    cdef double[::1] q1v = q1
    cdef double[::1] q2v = q2
    cdef double[:, :, ::1] traj_v
    if want_traj:
        traj_v = traj_obj

    cdef double h = T / steps
    cdef double hh = 0.5 * h
    cdef double s6 = h / 6.0
    cdef int k, i, s
    cdef double f0, fm, f1
    cdef double k1q1, k1q2, k2q1, k2q2, k3q1, k3q2, k4q1, k4q2
    cdef double g1, g2, g3, g4, qa, qb
    cdef double lam, ci, vi, wi, a1, a2
    cdef double k1v, k1w, k1a, k1b, k2v, k2w, k2a, k2b
    cdef double k3v, k3w, k3a, k3b, k4v, k4w, k4a, k4b
    cdef double v2, w2, a12, a22, v3, w3, a13, a23, v4, w4, a14, a24

    if want_traj:
        for s in range(S):
            for i in range(m):
                traj_v[0, s, i] = 0.0
    for k in range(steps):
        for s in range(S):
            f0 = f_v[s, 2 * k]
            fm = f_v[s, 2 * k + 1]
            f1 = f_v[s, 2 * k + 2]
            qa = q1v[s]; qb = q2v[s]

            k1q1 = f0 - r1 * qa
            k1q2 = f0 - r2 * qb
            k2q1 = fm - r1 * (qa + hh * k1q1)
            k2q2 = fm - r2 * (qb + hh * k1q2)
            k3q1 = fm - r1 * (qa + hh * k2q1)
            k3q2 = fm - r2 * (qb + hh * k2q2)
            k4q1 = f1 - r1 * (qa + h * k3q1)
            k4q2 = f1 - r2 * (qb + h * k3q2)

            g1 = f0 - b1 * qa - b2 * qb
            g2 = fm - b1 * (qa + hh * k1q1) - b2 * (qb + hh * k1q2)
            g3 = fm - b1 * (qa + hh * k2q1) - b2 * (qb + hh * k2q2)
            g4 = f1 - b1 * (qa + h * k3q1) - b2 * (qb + h * k3q2)

            q1v[s] = qa + s6 * (k1q1 + 2.0 * (k2q1 + k3q1) + k4q1)
            q2v[s] = qb + s6 * (k1q2 + 2.0 * (k2q2 + k3q2) + k4q2)

            for i in range(m):
                lam = lam_v[i]
                ci = c_v[i]
                vi = vv[s, i]; wi = wv[s, i]; a1 = y1v[s, i]; a2 = y2v[s, i]

                k1v = wi
                k1w = lam * (b1 * a1 + b2 * a2 - vi) + ci * g1
                k1a = vi - r1 * a1
                k1b = vi - r2 * a2

                v2 = vi + hh * k1v; w2 = wi + hh * k1w
                a12 = a1 + hh * k1a; a22 = a2 + hh * k1b
                k2v = w2
                k2w = lam * (b1 * a12 + b2 * a22 - v2) + ci * g2
                k2a = v2 - r1 * a12
                k2b = v2 - r2 * a22

                v3 = vi + hh * k2v; w3 = wi + hh * k2w
                a13 = a1 + hh * k2a; a23 = a2 + hh * k2b
                k3v = w3
                k3w = lam * (b1 * a13 + b2 * a23 - v3) + ci * g3
                k3a = v3 - r1 * a13
                k3b = v3 - r2 * a23

                v4 = vi + h * k3v; w4 = wi + h * k3w
                a14 = a1 + h * k3a; a24 = a2 + h * k3b
                k4v = w4
                k4w = lam * (b1 * a14 + b2 * a24 - v4) + ci * g4
                k4a = v4 - r1 * a14
                k4b = v4 - r2 * a24

                vv[s, i] = vi + s6 * (k1v + 2.0 * (k2v + k3v) + k4v)
                wv[s, i] = wi + s6 * (k1w + 2.0 * (k2w + k3w) + k4w)
                y1v[s, i] = a1 + s6 * (k1a + 2.0 * (k2a + k3a) + k4a)
                y2v[s, i] = a2 + s6 * (k1b + 2.0 * (k2b + k3b) + k4b)
                if want_traj:
                    traj_v[k + 1, s, i] = vv[s, i]
    return v, w, traj_obj
