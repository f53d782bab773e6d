# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled single-spin-flip Metropolis kernel.

Must stay step-for-step identical to ``_pykernels.run_chain``; the test
suite compares both on the same inputs.
"""

from libc.math cimport exp

ctypedef signed char spin_t


cdef inline double _field(int model, int i, const spin_t[::1] x, const long long[:, ::1] nbr,
                          const double[::1] local, const double[::1] h) noexcept nogil:
    cdef long long acc = 0
    cdef Py_ssize_t d
    cdef long long j
    if model == 1:
        for d in range(nbr.shape[1]):
            j = nbr[i, d]
            if j < 0:
                break
            acc += x[j]
        return <double>acc
    return local[i] + h[i]


def run_chain(int model, spin_t[::1] x, long long[::1] istate, double[::1] fstate,
              double J, double beta,
              const long long[:, ::1] nbr, const double[:, ::1] Jmat, const double[::1] h,
              double[::1] local,
              const long long[::1] sites, const double[::1] u, const double[::1] fac,
              bint cache, spin_t[:, ::1] samples, long long first, long long stride):
    """Advance one chain by ``len(sites)`` proposals; see ``_pykernels.run_chain``."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t steps = sites.shape[0]
    cdef Py_ssize_t n_out = samples.shape[0]
    cdef Py_ssize_t t, k, out = 0, r = 0
    cdef int i
    cdef long long s = istate[0]
    cdef long long s_new = 0
    cdef double e = fstate[0], e_read = fstate[1], e_new, read_new, d
    cdef double coef = -(J / (2.0 * n))
    cdef long long accepted = 0
    cdef spin_t xi

    with nogil:
        for t in range(steps):
            i = <int>sites[t]
            xi = x[i]
            if model == 0:
                s_new = s - 2 * xi
                e_new = coef * <double>(s_new * s_new - n)
            elif model == 1:
                s_new = s - 2 * xi * <long long>_field(1, i, x, nbr, local, h)
                e_new = (-J) * <double>s_new
            else:
                e_new = e + 2.0 * xi * _field(2, i, x, nbr, local, h)
            if not cache:
                e_read = e * fac[r]
                r += 1
            read_new = e_new * fac[r]
            r += 1
            d = read_new - e_read
            if d <= 0 or u[t] < exp(-beta * d):
                x[i] = -xi
                e = e_new
                e_read = read_new
                accepted += 1
                if model == 2:
                    for k in range(n):
                        local[k] -= 2.0 * xi * Jmat[k, i]
                else:
                    s = s_new
            if out < n_out and t >= first and (t - first) % stride == 0:
                for k in range(n):
                    samples[out, k] = x[k]
                out += 1

    istate[0] = s
    fstate[0] = e
    fstate[1] = e_read
    return accepted
