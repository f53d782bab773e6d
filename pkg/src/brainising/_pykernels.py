"""Pure-Python Metropolis kernel, used when the compiled extension is absent.

Semantics (shared with ``_ckernels.run_chain``):

``model`` selects the energy bookkeeping. 0 is Curie-Weiss, with
``istate[0]`` holding the spin sum. 1 is a uniform-J bond model, with
``istate[0]`` holding the bond sum and ``nbr`` the neighbour table. 2 is
dense couplings, with ``local`` holding J @ x.

``fstate`` is ``[exact energy, current noisy read]``. Each proposal ``t``
flips ``sites[t]``. Unless ``cache`` is set, the current state is re-read
first, consuming one noise factor. The proposal then consumes one more.
A proposal is accepted when ``d <= 0 or u[t] < exp(-beta d)``, where ``d``
is the difference of the two noisy reads.

After each step ``t >= first`` with ``(t - first) % stride == 0`` the state
is copied into the next free row of ``samples``.
"""

from math import exp


def run_chain(model, x, istate, fstate, J, beta, nbr, Jmat, h, local, sites, u, fac, cache, samples, first, stride):
    n = x.shape[0]
    n_out = samples.shape[0]
    xs = [int(v) for v in x]
    s = int(istate[0])
    e = float(fstate[0])
    e_read = float(fstate[1])
    coef = -(J / (2.0 * n))
    nbr_l = [[int(j) for j in row if j >= 0] for row in nbr] if model == 1 else None
    loc = [float(v) for v in local] if model == 2 else None
    hl = [float(v) for v in h] if model == 2 else None
    sites_l = sites.tolist()
    u_l = u.tolist()
    fac_l = fac.tolist()
    accepted = 0
    out = 0
    r = 0
    for t in range(len(sites_l)):
        i = sites_l[t]
        xi = xs[i]
        if model == 0:
            s_new = s - 2 * xi
            e_new = coef * float(s_new * s_new - n)
        elif model == 1:
            s_new = s - 2 * xi * sum(xs[j] for j in nbr_l[i])
            e_new = (-J) * float(s_new)
        else:
            e_new = e + 2.0 * xi * (loc[i] + hl[i])
        if not cache:
            e_read = e * fac_l[r]
            r += 1
        read_new = e_new * fac_l[r]
        r += 1
        d = read_new - e_read
        if d <= 0 or u_l[t] < exp(-beta * d):
            xs[i] = -xi
            e = e_new
            e_read = read_new
            accepted += 1
            if model == 2:
                col = Jmat[:, i]
                for k in range(n):
                    loc[k] -= 2.0 * xi * col[k]
            else:
                s = s_new
        if out < n_out and t >= first and (t - first) % stride == 0:
            samples[out, :] = xs
            out += 1
    x[:] = xs
    istate[0] = s
    fstate[0] = e
    fstate[1] = e_read
    if model == 2:
        local[:] = loc
    return accepted
