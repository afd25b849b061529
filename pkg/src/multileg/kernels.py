"""Numeric kernels shared by the solvers.

Everything here is written in the subset of Python/numpy that numba can
compile, and is compiled through :func:`multileg._jit.jit`.  Kernels take
and return plain arrays and integer status codes; the public modules wrap
them in dataclasses and exceptions.

Conventions
-----------
Support state ``s = (alpha_x, alpha_y, z0)``.  Planar unknowns
``x = (u_x, u_y, omega)`` where ``u = R(theta)^-1 pdot0`` is the body-frame
translational velocity.  For a contact at body-frame ``q`` the planar
Jacobian is ``J = [I2 | S q]`` with ``S q = (-q_y, q_x)``, so the body-frame
slip is ``J x + qdot`` and the net wrench is ``sum J^T F``.
"""

import numpy as np

from ._jit import jit

OK = 0
NO_SUPPORT = 1
SINGULAR_SUPPORT = 2
DEGENERATE_TILT = 3
NO_CONVERGENCE = 4
SINGULAR_BALANCE = 5
STALLED = 6

PIVOT_RTOL = 1e-12
CONTACT_TOL = 1e-12


# --------------------------------------------------------------------------
# small dense linear algebra
# --------------------------------------------------------------------------

@jit
def solve_small(A, B):
    """Gaussian elimination with partial pivoting, ``A X = B`` (B is 2-D).

    Returns ``(X, ok)``; ``ok`` is False when a pivot falls below
    ``PIVOT_RTOL * max|A|``.
    """
    n = A.shape[0]
    m = B.shape[1]
    M = A.copy()
    X = B.copy()
    scale = 0.0
    for i in range(n):
        for j in range(n):
            a = abs(A[i, j])
            if a > scale:
                scale = a
    if scale == 0.0 or not np.isfinite(scale):
        return X, False
    thresh = PIVOT_RTOL * scale
    for k in range(n):
        p = k
        best = abs(M[k, k])
        for i in range(k + 1, n):
            a = abs(M[i, k])
            if a > best:
                best = a
                p = i
        if best < thresh:
            return X, False
        if p != k:
            for j in range(n):
                tmp = M[k, j]
                M[k, j] = M[p, j]
                M[p, j] = tmp
            for j in range(m):
                tmp = X[k, j]
                X[k, j] = X[p, j]
                X[p, j] = tmp
        for i in range(k + 1, n):
            f = M[i, k] / M[k, k]
            if f == 0.0:
                continue
            for j in range(k, n):
                M[i, j] -= f * M[k, j]
            for j in range(m):
                X[i, j] -= f * X[k, j]
    for k in range(n - 1, -1, -1):
        for j in range(m):
            acc = X[k, j]
            for i in range(k + 1, n):
                acc -= M[k, i] * X[i, j]
            X[k, j] = acc / M[k, k]
    return X, True


# --------------------------------------------------------------------------
# spring support model
# --------------------------------------------------------------------------

@jit
def foot_heights(q, s):
    n = q.shape[0]
    h = np.empty(n)
    for j in range(n):
        h[j] = -s[0] * q[j, 0] + s[1] * q[j, 1] + q[j, 2] + s[2]
    return h


@jit
def height_scan(qz, K, Mg):
    """Flat-body height giving total spring force ``Mg``.

    Returns ``(z, mask, ok)``; ``mask`` marks the legs compressed at ``z``.
    """
    n = qz.shape[0]
    order = np.argsort(qz)
    mask = np.zeros(n, np.bool_)
    sk = 0.0
    skq = 0.0
    for i in range(n):
        j = order[i]
        sk += K[j]
        skq += K[j] * qz[j]
        z = (-skq - Mg) / sk
        if i == n - 1 or z + qz[order[i + 1]] >= 0.0:
            if not np.isfinite(z):
                return z, mask, False
            for m in range(i + 1):
                mask[order[m]] = True
            return z, mask, True
    return np.nan, mask, False


@jit
def balance_system(q, K, Mg, mask):
    """3x3 system for (alpha_x, alpha_y, z0) with F_z = Mg, M_x = M_y = 0."""
    A = np.zeros((3, 3))
    b = np.zeros((3, 1))
    b[0, 0] = -Mg
    for j in range(q.shape[0]):
        if not mask[j]:
            continue
        k = K[j]
        x = q[j, 0]
        y = q[j, 1]
        z = q[j, 2]
        A[0, 0] += -k * x
        A[0, 1] += k * y
        A[0, 2] += k
        b[0, 0] -= k * z
        A[1, 0] += k * x * y
        A[1, 1] += -k * y * y
        A[1, 2] += -k * y
        b[1, 0] += k * y * z
        A[2, 0] += -k * x * x
        A[2, 1] += k * x * y
        A[2, 2] += k * x
        b[2, 0] -= k * x * z
    return A, b


@jit
def line_search(q, s0, s1, mask, t_max, tol, joins_only):
    """First contact flip along ``s0 + t (s1 - s0)``, ``0 <= t < t_max``.

    Returns ``(t, leg)`` with ``leg = -1`` when nothing flips.  Exact ties go
    to the lowest leg index.
    """
    best_t = np.inf
    best = -1
    for j in range(q.shape[0]):
        h0 = -s0[0] * q[j, 0] + s0[1] * q[j, 1] + q[j, 2] + s0[2]
        h1 = -s1[0] * q[j, 0] + s1[1] * q[j, 1] + q[j, 2] + s1[2]
        dh = h1 - h0
        if mask[j]:
            if joins_only or dh <= 0.0:
                continue
            if np.isfinite(t_max) and h0 + t_max * dh <= tol:
                continue
        else:
            if dh >= 0.0:
                continue
            if np.isfinite(t_max) and h0 + t_max * dh >= -tol:
                continue
        t = -h0 / dh
        if t < 0.0:
            t = 0.0
        if t < best_t:
            best_t = t
            best = j
    return best_t, best


@jit
def tilt_one(px, py):
    d = np.zeros(3)
    r2 = px * px + py * py
    if r2 == 0.0:
        return d, DEGENERATE_TILT
    d[0] = -px
    d[1] = py
    d[2] = -r2
    return d, OK


@jit
def tilt_two(p1x, p1y, p2x, p2y):
    d = np.zeros(3)
    a = p1y - p2y
    b = p2x - p1x
    c = p1y * p2x - p2y * p1x
    ab = np.sqrt(a * a + b * b)
    if ab == 0.0 or c == 0.0:
        return d, DEGENERATE_TILT
    den = abs(c) * ab
    n0 = -c * a / den
    n1 = c * b / den
    d[0] = n0
    d[1] = n1
    d[2] = -(n0 * n0 + n1 * n1) * abs(c) / ab
    return d, OK


@jit
def _degenerate_tilt(q, mask):
    """Tilt for >= 3 contacts that are coincident or collinear in xy."""
    first = -1
    for j in range(q.shape[0]):
        if mask[j]:
            first = j
            break
    far = first
    best = 0.0
    for j in range(q.shape[0]):
        if mask[j]:
            dx = q[j, 0] - q[first, 0]
            dy = q[j, 1] - q[first, 1]
            d2 = dx * dx + dy * dy
            if d2 > best:
                best = d2
                far = j
    if best <= 1e-24:
        return tilt_one(q[first, 0], q[first, 1])
    return tilt_two(q[first, 0], q[first, 1], q[far, 0], q[far, 1])


@jit
def _count(mask):
    c = 0
    for j in range(mask.shape[0]):
        if mask[j]:
            c += 1
    return c


@jit
def support_solve(q, K, Mg, max_events, trace):
    """Contact-state search for the spring support model.

    ``trace`` must have at least ``max_events + 2`` rows; visited states are
    written to it.  Returns ``(s, mask, forces, events, n_trace, status)``.
    """
    n = q.shape[0]
    s = np.zeros(3)
    forces = np.zeros(n)
    z, mask, ok = height_scan(q[:, 2], K, Mg)
    if not ok:
        return s, mask, forces, 0, 0, NO_SUPPORT
    s[2] = z
    trace[0, :] = s
    n_trace = 1
    events = 0
    while True:
        nc = _count(mask)
        status = OK
        d = np.zeros(3)
        if nc >= 3:
            A, b = balance_system(q, K, Mg, mask)
            sol, ok = solve_small(A, b)
            if ok:
                s1 = sol[:, 0].copy()
                t, leg = line_search(q, s, s1, mask, 1.0, CONTACT_TOL, False)
                if leg < 0:
                    s = s1
                    trace[n_trace, :] = s
                    n_trace += 1
                    break
                s = s + t * (s1 - s)
                mask[leg] = not mask[leg]
                events += 1
                trace[n_trace, :] = s
                n_trace += 1
                if events > max_events:
                    return s, mask, forces, events, n_trace, NO_CONVERGENCE
                continue
            d, status = _degenerate_tilt(q, mask)
        elif nc == 2:
            i1 = -1
            i2 = -1
            for j in range(n):
                if mask[j]:
                    if i1 < 0:
                        i1 = j
                    else:
                        i2 = j
            dx = q[i1, 0] - q[i2, 0]
            dy = q[i1, 1] - q[i2, 1]
            if dx * dx + dy * dy <= 1e-24:
                d, status = tilt_one(q[i1, 0], q[i1, 1])
            else:
                d, status = tilt_two(q[i1, 0], q[i1, 1], q[i2, 0], q[i2, 1])
        elif nc == 1:
            i1 = 0
            for j in range(n):
                if mask[j]:
                    i1 = j
            d, status = tilt_one(q[i1, 0], q[i1, 1])
        else:
            return s, mask, forces, events, n_trace, NO_SUPPORT
        if status != OK:
            return s, mask, forces, events, n_trace, status
        t, leg = line_search(q, s, s + d, mask, np.inf, CONTACT_TOL, True)
        if leg < 0:
            return s, mask, forces, events, n_trace, NO_SUPPORT
        s = s + t * d
        mask[leg] = True
        events += 1
        trace[n_trace, :] = s
        n_trace += 1
        if events > max_events:
            return s, mask, forces, events, n_trace, NO_CONVERGENCE
    h = foot_heights(q, s)
    for j in range(n):
        if mask[j]:
            f = -K[j] * h[j]
            if f > 0.0:
                forces[j] = f
            else:
                mask[j] = False
    return s, mask, forces, events, n_trace, OK


# --------------------------------------------------------------------------
# planar balance, viscous-Coulomb (linear)
# --------------------------------------------------------------------------

@jit
def traction_body(mu, Fz, w):
    """Body-frame traction matrices ``-mu Fz (I + w w^T)``, shape (n, 2, 2)."""
    n = mu.shape[0]
    H = np.zeros((n, 2, 2))
    for k in range(n):
        c = -mu[k] * Fz[k]
        H[k, 0, 0] = c * (1.0 + w[k, 0] * w[k, 0])
        H[k, 0, 1] = c * w[k, 0] * w[k, 1]
        H[k, 1, 0] = c * w[k, 1] * w[k, 0]
        H[k, 1, 1] = c * (1.0 + w[k, 1] * w[k, 1])
    return H


@jit
def planar_system(qxy, Hq):
    """Balance matrix ``sum J^T H J`` (3x3) and blocks ``J^T H`` (n, 3, 2)."""
    n = qxy.shape[0]
    M = np.zeros((3, 3))
    B = np.zeros((n, 3, 2))
    J = np.zeros((2, 3))
    J[0, 0] = 1.0
    J[1, 1] = 1.0
    for k in range(n):
        J[0, 2] = -qxy[k, 1]
        J[1, 2] = qxy[k, 0]
        for a in range(3):
            for c in range(2):
                B[k, a, c] = J[0, a] * Hq[k, 0, c] + J[1, a] * Hq[k, 1, c]
        for a in range(3):
            for b in range(3):
                M[a, b] += B[k, a, 0] * J[0, b] + B[k, a, 1] * J[1, b]
    return M, B


@jit
def planar_solve(qxy, qdxy, Hq):
    """Solve the linear planar balance.

    Returns ``(x, C, ok)`` where ``C`` (3, 2n) satisfies ``x = -C qdot_flat``.
    """
    n = qxy.shape[0]
    M, B = planar_system(qxy, Hq)
    rhs = np.zeros((3, 2 * n))
    for k in range(n):
        for a in range(3):
            rhs[a, 2 * k] = B[k, a, 0]
            rhs[a, 2 * k + 1] = B[k, a, 1]
    C, ok = solve_small(M, rhs)
    x = np.zeros(3)
    if not ok:
        return x, C, False
    for a in range(3):
        acc = 0.0
        for k in range(n):
            acc -= C[a, 2 * k] * qdxy[k, 0] + C[a, 2 * k + 1] * qdxy[k, 1]
        x[a] = acc
    return x, C, True


@jit
def planar_forces(x, qxy, qdxy, Hq):
    """Body-frame foot forces ``H (J x + qdot)`` and net wrench."""
    n = qxy.shape[0]
    F = np.zeros((n, 2))
    r = np.zeros(3)
    for k in range(n):
        ux = x[0] - x[2] * qxy[k, 1] + qdxy[k, 0]
        uy = x[1] + x[2] * qxy[k, 0] + qdxy[k, 1]
        fx = Hq[k, 0, 0] * ux + Hq[k, 0, 1] * uy
        fy = Hq[k, 1, 0] * ux + Hq[k, 1, 1] * uy
        F[k, 0] = fx
        F[k, 1] = fy
        r[0] += fx
        r[1] += fy
        r[2] += qxy[k, 0] * fy - qxy[k, 1] * fx
    return F, r


# --------------------------------------------------------------------------
# smoothed Coulomb balance (nonlinear)
# --------------------------------------------------------------------------

@jit
def coulomb_residual(x, qxy, qdxy, muFz, eps, want_jac):
    """Net wrench under the smoothed Coulomb law and its Jacobian in ``x``."""
    r = np.zeros(3)
    Jm = np.zeros((3, 3))
    for k in range(qxy.shape[0]):
        qx = qxy[k, 0]
        qy = qxy[k, 1]
        ux = x[0] - x[2] * qy + qdxy[k, 0]
        uy = x[1] + x[2] * qx + qdxy[k, 1]
        v2 = ux * ux + uy * uy
        v = np.sqrt(v2)
        den = eps + v2
        h = -muFz[k] * (eps + v) / den
        fx = h * ux
        fy = h * uy
        r[0] += fx
        r[1] += fy
        r[2] += qx * fy - qy * fx
        if want_jac:
            g = 0.0
            if v > 0.0:
                g = -muFz[k] * (eps - 2.0 * eps * v - v2) / (den * den) / v
            d00 = h + g * ux * ux
            d01 = g * ux * uy
            d11 = h + g * uy * uy
            # rows of D J, with J = [[1, 0, -qy], [0, 1, qx]]
            a0 = d00
            a1 = d01
            a2 = -d00 * qy + d01 * qx
            b0 = d01
            b1 = d11
            b2 = -d01 * qy + d11 * qx
            Jm[0, 0] += a0
            Jm[0, 1] += a1
            Jm[0, 2] += a2
            Jm[1, 0] += b0
            Jm[1, 1] += b1
            Jm[1, 2] += b2
            Jm[2, 0] += qx * b0 - qy * a0
            Jm[2, 1] += qx * b1 - qy * a1
            Jm[2, 2] += qx * b2 - qy * a2
    return r, Jm


@jit
def _norm3(v):
    return np.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


@jit
def lm_root(x0, qxy, qdxy, muFz, eps, max_iter, step_tol, res_tol):
    """Levenberg-Marquardt root find on :func:`coulomb_residual`.

    Returns ``(x, status, iterations)``.
    """
    x = x0.copy()
    r, Jm = coulomb_residual(x, qxy, qdxy, muFz, eps, True)
    cost = 0.5 * (r[0] * r[0] + r[1] * r[1] + r[2] * r[2])
    lam = 1e-3
    A = np.zeros((3, 3))
    g = np.zeros((3, 1))
    for it in range(max_iter):
        if np.sqrt(2.0 * cost) <= res_tol:
            return x, OK, it
        for a in range(3):
            acc = 0.0
            for i in range(3):
                acc += Jm[i, a] * r[i]
            g[a, 0] = -acc
            for b in range(3):
                acc = 0.0
                for i in range(3):
                    acc += Jm[i, a] * Jm[i, b]
                A[a, b] = acc
        accepted = False
        dx = np.zeros(3)
        while lam < 1e20:
            Ad = A.copy()
            for a in range(3):
                Ad[a, a] += lam * max(A[a, a], 1e-300)
            sol, ok = solve_small(Ad, g)
            if ok:
                for a in range(3):
                    dx[a] = sol[a, 0]
                xn = x + dx
                rn, Jn = coulomb_residual(xn, qxy, qdxy, muFz, eps, True)
                cn = 0.5 * (rn[0] * rn[0] + rn[1] * rn[1] + rn[2] * rn[2])
                if cn < cost:
                    x = xn
                    r = rn
                    Jm = Jn
                    cost = cn
                    lam = max(lam / 3.0, 1e-15)
                    accepted = True
                    break
            lam *= 4.0
        if not accepted:
            break
        if _norm3(dx) <= step_tol * (_norm3(x) + step_tol):
            break
    if np.sqrt(2.0 * cost) <= res_tol:
        return x, OK, max_iter
    return x, STALLED, max_iter


@jit
def coulomb_homotopy(x0, qxy, qdxy, muFz, eps0, shrink, rel_tol, max_stages,
                     max_iter, step_tol, res_tol):
    """Decreasing-epsilon continuation of :func:`lm_root`.

    Returns ``(x, stages, final_eps, status, last_change)``.
    """
    x = x0.copy()
    eps = eps0
    change = np.inf
    have_prev = False
    # changes are relative to the body speed, or to the fastest foot when
    # the body is (nearly) at rest
    vfoot = 0.0
    for k in range(qdxy.shape[0]):
        vfoot = max(vfoot, np.sqrt(qdxy[k, 0] * qdxy[k, 0] + qdxy[k, 1] * qdxy[k, 1]))
    for stage in range(max_stages):
        xn, st, _ = lm_root(x, qxy, qdxy, muFz, eps, max_iter, step_tol, res_tol)
        if st != OK:
            return xn, stage + 1, eps, st, change
        if have_prev:
            diff = _norm3(xn - x)
            scale = max(_norm3(xn), vfoot)
            if diff == 0.0:
                change = 0.0
            elif scale > 0.0:
                change = diff / scale
            else:
                change = np.inf
            if change < rel_tol:
                return xn, stage + 1, eps, OK, change
        x = xn
        have_prev = True
        if stage < max_stages - 1:
            eps *= shrink
    return x, max_stages, eps, NO_CONVERGENCE, change


# --------------------------------------------------------------------------
# whole-trajectory batches
# --------------------------------------------------------------------------

@jit
def _contact_arrays(q, qd, mu, w, mask, forces):
    nc = _count(mask)
    qxy = np.zeros((nc, 2))
    qdxy = np.zeros((nc, 2))
    muc = np.zeros(nc)
    fz = np.zeros(nc)
    wc = np.zeros((nc, 2))
    idx = np.zeros(nc, np.int64)
    c = 0
    for j in range(q.shape[0]):
        if mask[j]:
            qxy[c, 0] = q[j, 0]
            qxy[c, 1] = q[j, 1]
            qdxy[c, 0] = qd[j, 0]
            qdxy[c, 1] = qd[j, 1]
            muc[c] = mu[j]
            fz[c] = forces[j]
            wc[c, 0] = w[j, 0]
            wc[c, 1] = w[j, 1]
            idx[c] = j
            c += 1
    return qxy, qdxy, muc, fz, wc, idx


@jit
def viscous_batch(Q, QD, K, Mg, mu, w, max_events):
    """Support + linear planar solve for every frame independently.

    Returns per-frame support states, contact masks, normal forces, planar
    unknowns ``x``, body-frame foot forces and status codes.
    """
    nf = Q.shape[0]
    n = Q.shape[1]
    S = np.zeros((nf, 3))
    MASK = np.zeros((nf, n), np.bool_)
    FZ = np.zeros((nf, n))
    X = np.zeros((nf, 3))
    FXY = np.zeros((nf, n, 2))
    STATUS = np.zeros(nf, np.int64)
    trace = np.zeros((max_events + 2, 3))
    for f in range(nf):
        q = Q[f]
        s, mask, forces, ev, nt, st = support_solve(q, K, Mg, max_events, trace)
        S[f] = s
        MASK[f] = mask
        FZ[f] = forces
        if st != OK:
            STATUS[f] = st
            continue
        qxy, qdxy, muc, fz, wc, idx = _contact_arrays(q, QD[f], mu, w, mask, forces)
        Hq = traction_body(muc, fz, wc)
        x, C, ok = planar_solve(qxy, qdxy, Hq)
        if not ok:
            STATUS[f] = SINGULAR_BALANCE
            continue
        F, r = planar_forces(x, qxy, qdxy, Hq)
        X[f] = x
        for c in range(idx.shape[0]):
            FXY[f, idx[c], 0] = F[c, 0]
            FXY[f, idx[c], 1] = F[c, 1]
    return S, MASK, FZ, X, FXY, STATUS


@jit
def coulomb_batch(Q, QD, K, Mg, mu, max_events, eps0, shrink, rel_tol,
                  max_stages, max_iter, step_tol, res_rtol):
    """Sequential smoothed-Coulomb solve, hot-started from the previous frame.

    On failure the frame is retried from its viscous-Coulomb solution;
    ``FALLBACK`` records when that happened.
    """
    nf = Q.shape[0]
    n = Q.shape[1]
    S = np.zeros((nf, 3))
    MASK = np.zeros((nf, n), np.bool_)
    FZ = np.zeros((nf, n))
    X = np.zeros((nf, 3))
    FXY = np.zeros((nf, n, 2))
    STATUS = np.zeros(nf, np.int64)
    STAGES = np.zeros(nf, np.int64)
    FALLBACK = np.zeros(nf, np.bool_)
    trace = np.zeros((max_events + 2, 3))
    w0 = np.zeros((n, 2))
    prev = np.zeros(3)
    have_prev = False
    for f in range(nf):
        q = Q[f]
        s, mask, forces, ev, nt, st = support_solve(q, K, Mg, max_events, trace)
        S[f] = s
        MASK[f] = mask
        FZ[f] = forces
        if st != OK:
            STATUS[f] = st
            continue
        qxy, qdxy, muc, fz, wc, idx = _contact_arrays(q, QD[f], mu, w0, mask, forces)
        muFz = muc * fz
        res_tol = res_rtol * np.sum(muFz)
        Hq = traction_body(muc, fz, wc)
        xv, C, ok = planar_solve(qxy, qdxy, Hq)
        if not ok:
            STATUS[f] = SINGULAR_BALANCE
            continue
        x0 = prev if have_prev else xv
        x, stages, eps, st, ch = coulomb_homotopy(
            x0, qxy, qdxy, muFz, eps0, shrink, rel_tol, max_stages,
            max_iter, step_tol, res_tol)
        if st != OK and have_prev:
            FALLBACK[f] = True
            x, stages2, eps, st, ch = coulomb_homotopy(
                xv, qxy, qdxy, muFz, eps0, shrink, rel_tol, max_stages,
                max_iter, step_tol, res_tol)
            stages += stages2
        STAGES[f] = stages
        if st != OK:
            STATUS[f] = st
            continue
        X[f] = x
        prev = x
        have_prev = True
        for c in range(idx.shape[0]):
            ux = x[0] - x[2] * qxy[c, 1] + qdxy[c, 0]
            uy = x[1] + x[2] * qxy[c, 0] + qdxy[c, 1]
            v2 = ux * ux + uy * uy
            h = -muFz[c] * (eps + np.sqrt(v2)) / (eps + v2)
            FXY[f, idx[c], 0] = h * ux
            FXY[f, idx[c], 1] = h * uy
    return S, MASK, FZ, X, FXY, STATUS, STAGES, FALLBACK


# --------------------------------------------------------------------------
# planar pose integration
# --------------------------------------------------------------------------

@jit
def twist_displacement(X, dt):
    """Body-frame displacement ``(dx, dy, dtheta)`` of a constant twist held for ``dt``."""
    nf = X.shape[0]
    D = np.zeros((nf, 3))
    for f in range(nf):
        phi = X[f, 2] * dt
        if abs(phi) < 1e-6:
            # series of sin(phi)/phi and (1 - cos(phi))/phi
            a = 1.0 - phi * phi / 6.0
            b = phi / 2.0 - phi * phi * phi / 24.0
        else:
            a = np.sin(phi) / phi
            b = (1.0 - np.cos(phi)) / phi
        ux = X[f, 0] * dt
        uy = X[f, 1] * dt
        D[f, 0] = a * ux - b * uy
        D[f, 1] = b * ux + a * uy
        D[f, 2] = phi
    return D


@jit
def compose_sequential(pose0, D):
    """Poses after each displacement, starting at ``pose0 = (x, y, theta)``.

    Row ``k`` of the result is the pose before step ``k``; the last row is
    the final pose.
    """
    nf = D.shape[0]
    P = np.zeros((nf + 1, 3))
    P[0] = pose0
    for f in range(nf):
        c = np.cos(P[f, 2])
        s = np.sin(P[f, 2])
        P[f + 1, 0] = P[f, 0] + c * D[f, 0] - s * D[f, 1]
        P[f + 1, 1] = P[f, 1] + s * D[f, 0] + c * D[f, 1]
        P[f + 1, 2] = P[f, 2] + D[f, 2]
    return P
