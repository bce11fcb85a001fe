"""Per-tick numeric kernels: barrier fields, constraint rows, exact 2-D QP.

Everything here operates on packed float64 arrays so the functions compile
under numba's nopython mode (see :mod:`cbfteleop.accel`).

Barrier packing, one row per barrier:

    half-plane      [0, nx, ny, offset, 0, 0, 0]
    superellipsoid  [1, cx, cy, a, b, ea, eb]

A half-plane keeps the vehicle where ``nx*x + ny*y - offset >= 0``. A
superellipsoid keeps it outside the level set
``(|x-cx|/a)**ea + (|y-cy|/b)**eb = 1``.

World packing for clearance queries: ``outer = [xmin, ymin, xmax, ymax]``
and ``rects`` as an ``(k, 4)`` array of the same layout.
"""

import numpy as np

from .accel import njit

HALF_PLANE = 0.0
SUPER_ELLIPSOID = 1.0

# u_ref is returned untouched inside this margin so the force is exactly zero
FEAS_EPS = 1e-12
# feasibility slack applied when comparing enumerated QP candidates
CHECK_EPS = 1e-9

_LOG_CAP = 700.0  # exp() argument cap; keeps far-field powers finite


@njit
def _pow_sat(t, e):
    """t**e for t >= 0; log-space with a saturation cap once e exceeds 50."""
    if e == 0.0:
        return 1.0
    if t == 0.0:
        return 0.0
    if e <= 50.0:
        return t**e
    le = e * np.log(t)
    if le > _LOG_CAP:
        le = _LOG_CAP
    return np.exp(le)


@njit
def barrier_fields(params, qx, qy):
    """Value, gradient and Hessian of every barrier at (qx, qy).

    Returns ``(val[m], grad[m, 2], hess[m, 3])`` with the Hessian packed as
    (xx, xy, yy). The superellipsoid is separable, so the cross term is zero.
    """
    m = params.shape[0]
    val = np.empty(m)
    grad = np.empty((m, 2))
    hess = np.empty((m, 3))
    for i in range(m):
        if params[i, 0] == HALF_PLANE:
            nx = params[i, 1]
            ny = params[i, 2]
            val[i] = nx * qx + ny * qy - params[i, 3]
            grad[i, 0] = nx
            grad[i, 1] = ny
            hess[i, 0] = 0.0
            hess[i, 1] = 0.0
            hess[i, 2] = 0.0
        else:
            a = params[i, 3]
            b = params[i, 4]
            ea = params[i, 5]
            eb = params[i, 6]
            dx = qx - params[i, 1]
            dy = qy - params[i, 2]
            sx = 1.0 if dx > 0.0 else (-1.0 if dx < 0.0 else 0.0)
            sy = 1.0 if dy > 0.0 else (-1.0 if dy < 0.0 else 0.0)
            rx = abs(dx) / a
            ry = abs(dy) / b
            val[i] = _pow_sat(rx, ea) + _pow_sat(ry, eb) - 1.0
            grad[i, 0] = (ea / a) * _pow_sat(rx, ea - 1.0) * sx
            grad[i, 1] = (eb / b) * _pow_sat(ry, eb - 1.0) * sy
            hess[i, 0] = (ea * (ea - 1.0) / (a * a)) * _pow_sat(rx, ea - 2.0)
            hess[i, 1] = 0.0
            hess[i, 2] = (eb * (eb - 1.0) / (b * b)) * _pow_sat(ry, eb - 2.0)
    return val, grad, hess


@njit
def assemble_rows(params, px, py, vx, vy, gain):
    """Second-order barrier constraints as rows ``a·u + c >= 0``.

    For a double integrator ``b_ddot = v'Hv + grad·u``, so the row for each
    barrier is ``a = grad(b)`` and ``c = v'Hv + 2*gain*(grad·v) + gain²*b``.
    """
    val, grad, hess = barrier_fields(params, px, py)
    m = params.shape[0]
    c = np.empty(m)
    for i in range(m):
        vhv = (
            hess[i, 0] * vx * vx
            + 2.0 * hess[i, 1] * vx * vy
            + hess[i, 2] * vy * vy
        )
        bdot = grad[i, 0] * vx + grad[i, 1] * vy
        c[i] = vhv + 2.0 * gain * bdot + gain * gain * val[i]
    return grad, c


@njit
def qp_margins(A, c, ux, uy):
    m = A.shape[0]
    out = np.empty(m)
    for i in range(m):
        out[i] = A[i, 0] * ux + A[i, 1] * uy + c[i]
    return out


@njit
def solve_qp_2d(A, c, ux, uy):
    """argmin ½‖u − u_ref‖² s.t. ``A u + c >= 0`` by active-set enumeration.

    Exact for two decision variables: the optimum is u_ref itself, the
    Euclidean projection onto a single row, or the vertex of a row pair, so
    enumerating all candidate active sets of size 0, 1, 2 and keeping the
    feasible one with the lowest objective solves the QP. Parallel row pairs
    are skipped; their minimizers are covered by the single-row candidates.

    Returns ``(u[2], feasible, act0, act1, n_active)``. When no candidate is
    feasible the caller must fall back to :func:`solve_qp_relaxed`.
    """
    m = A.shape[0]
    u = np.empty(2)

    feasible_ref = True
    for i in range(m):
        if A[i, 0] * ux + A[i, 1] * uy + c[i] < -FEAS_EPS:
            feasible_ref = False
            break
    if feasible_ref:
        u[0] = ux
        u[1] = uy
        return u, True, -1, -1, 0

    best = np.inf
    bx = 0.0
    by = 0.0
    b0 = -1
    b1 = -1
    bn = 0
    found = False

    for i in range(m):
        nn = A[i, 0] * A[i, 0] + A[i, 1] * A[i, 1]
        if nn < 1e-30:
            continue
        t = (A[i, 0] * ux + A[i, 1] * uy + c[i]) / nn
        px = ux - t * A[i, 0]
        py = uy - t * A[i, 1]
        ok = True
        for j in range(m):
            if A[j, 0] * px + A[j, 1] * py + c[j] < -CHECK_EPS:
                ok = False
                break
        if not ok:
            continue
        obj = (px - ux) * (px - ux) + (py - uy) * (py - uy)
        if obj < best:
            best = obj
            bx = px
            by = py
            b0 = i
            b1 = -1
            bn = 1
            found = True

    for i in range(m):
        for j in range(i + 1, m):
            det = A[i, 0] * A[j, 1] - A[i, 1] * A[j, 0]
            ni = np.sqrt(A[i, 0] * A[i, 0] + A[i, 1] * A[i, 1])
            nj = np.sqrt(A[j, 0] * A[j, 0] + A[j, 1] * A[j, 1])
            if ni * nj == 0.0 or abs(det) <= 1e-12 * ni * nj:
                continue
            px = (-c[i] * A[j, 1] + c[j] * A[i, 1]) / det
            py = (-A[i, 0] * c[j] + A[j, 0] * c[i]) / det
            ok = True
            for k in range(m):
                if A[k, 0] * px + A[k, 1] * py + c[k] < -CHECK_EPS:
                    ok = False
                    break
            if not ok:
                continue
            obj = (px - ux) * (px - ux) + (py - uy) * (py - uy)
            if obj < best:
                best = obj
                bx = px
                by = py
                b0 = i
                b1 = j
                bn = 2
                found = True

    u[0] = bx
    u[1] = by
    if not found:
        u[0] = ux
        u[1] = uy
    return u, found, b0, b1, bn


@njit
def solve_qp_relaxed(A, c, ux, uy, slack_weight):
    """Uniformly slack-relaxed QP for the infeasible case.

    Solves ``min ½‖u − u_ref‖² + w·δ²  s.t.  A u + c + δ >= 0, δ >= 0`` by
    golden-section search on δ: partial minimization over u (exact, via
    :func:`solve_qp_2d`) leaves a strictly convex scalar objective, so the
    search converges to the joint optimum.

    Returns ``(u[2], delta)``.
    """
    m = A.shape[0]
    # delta making u_ref itself feasible bounds the optimum
    hi = 0.0
    for i in range(m):
        v = -(A[i, 0] * ux + A[i, 1] * uy + c[i])
        if v > hi:
            hi = v
    lo = 0.0
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    cs = np.empty(m)

    d1 = hi - invphi * (hi - lo)
    d2 = lo + invphi * (hi - lo)

    def_obj1 = -1.0
    def_obj2 = -1.0
    for _ in range(200):
        if def_obj1 < 0.0:
            for i in range(m):
                cs[i] = c[i] + d1
            u1, ok1, _, _, _ = solve_qp_2d(A, cs, ux, uy)
            phi1 = 0.5 * ((u1[0] - ux) ** 2 + (u1[1] - uy) ** 2) if ok1 else np.inf
            def_obj1 = slack_weight * d1 * d1 + phi1
        if def_obj2 < 0.0:
            for i in range(m):
                cs[i] = c[i] + d2
            u2, ok2, _, _, _ = solve_qp_2d(A, cs, ux, uy)
            phi2 = 0.5 * ((u2[0] - ux) ** 2 + (u2[1] - uy) ** 2) if ok2 else np.inf
            def_obj2 = slack_weight * d2 * d2 + phi2
        if hi - lo < 1e-12 * (1.0 + hi):
            break
        if def_obj1 < def_obj2:
            hi = d2
            d2 = d1
            def_obj2 = def_obj1
            d1 = hi - invphi * (hi - lo)
            def_obj1 = -1.0
        else:
            lo = d1
            d1 = d2
            def_obj1 = def_obj2
            d2 = lo + invphi * (hi - lo)
            def_obj2 = -1.0

    delta = 0.5 * (lo + hi)
    for i in range(m):
        cs[i] = c[i] + delta
    u, ok, _, _, _ = solve_qp_2d(A, cs, ux, uy)
    if not ok:
        # numerically on the feasibility edge: nudge delta up until solvable
        bump = 1e-12 + 1e-9 * delta
        for _ in range(60):
            delta += bump
            bump *= 2.0
            for i in range(m):
                cs[i] = c[i] + delta
            u, ok, _, _, _ = solve_qp_2d(A, cs, ux, uy)
            if ok:
                break
    return u, delta


@njit
def filter_tick_rows(A, c, urx, ury, slack_weight):
    """QP + margins for pre-assembled rows.

    Returns ``(u[2], margins[m], act0, act1, n_active, relaxed, delta)``.
    Margins are reported against the unrelaxed rows.
    """
    u, feasible, act0, act1, nact = solve_qp_2d(A, c, urx, ury)
    delta = 0.0
    relaxed = False
    if not feasible:
        u, delta = solve_qp_relaxed(A, c, urx, ury, slack_weight)
        relaxed = True
        act0 = -1
        act1 = -1
        nact = 0
    margins = qp_margins(A, c, u[0], u[1])
    return u, margins, act0, act1, nact, relaxed, delta


@njit
def filter_tick(params, px, py, vx, vy, urx, ury, gain, slack_weight):
    """One safety-filter evaluation: rows, QP, margins."""
    A, c = assemble_rows(params, px, py, vx, vy, gain)
    return filter_tick_rows(A, c, urx, ury, slack_weight)


@njit
def surface_clearances(outer, rects, px, py):
    """Signed clearance from the vehicle *center* to every obstacle surface.

    Obstacle order: the four outer walls (left, right, bottom, top) then the
    inner rectangles. Returns ``(d[m], away[m, 2])`` where ``d`` is the
    distance from the center to the surface (negative once the center passes
    the wall plane or enters a rectangle) and ``away`` is the unit direction
    pointing from the closest surface point toward free space.
    """
    k = rects.shape[0]
    m = 4 + k
    d = np.empty(m)
    away = np.empty((m, 2))

    d[0] = px - outer[0]
    away[0, 0] = 1.0
    away[0, 1] = 0.0
    d[1] = outer[2] - px
    away[1, 0] = -1.0
    away[1, 1] = 0.0
    d[2] = py - outer[1]
    away[2, 0] = 0.0
    away[2, 1] = 1.0
    d[3] = outer[3] - py
    away[3, 0] = 0.0
    away[3, 1] = -1.0

    for i in range(k):
        xmin = rects[i, 0]
        ymin = rects[i, 1]
        xmax = rects[i, 2]
        ymax = rects[i, 3]
        cpx = min(max(px, xmin), xmax)
        cpy = min(max(py, ymin), ymax)
        dx = px - cpx
        dy = py - cpy
        dist = np.sqrt(dx * dx + dy * dy)
        if dist > 0.0:
            d[4 + i] = dist
            away[4 + i, 0] = dx / dist
            away[4 + i, 1] = dy / dist
        else:
            # center inside the rectangle: clearance is minus the depth to
            # the nearest face and "away" points toward that exit
            best = px - xmin
            ax = -1.0
            ay = 0.0
            if xmax - px < best:
                best = xmax - px
                ax = 1.0
                ay = 0.0
            if py - ymin < best:
                best = py - ymin
                ax = 0.0
                ay = -1.0
            if ymax - py < best:
                best = ymax - py
                ax = 0.0
                ay = 1.0
            d[4 + i] = -best
            away[4 + i, 0] = ax
            away[4 + i, 1] = ay
    return d, away


@njit
def max_penetration(outer, rects, px, py, radius):
    """Deepest overlap between the vehicle disk and any obstacle.

    Returns ``(depth, index)``; depth <= 0 means no contact anywhere.
    """
    d, _ = surface_clearances(outer, rects, px, py)
    worst = -np.inf
    idx = -1
    for i in range(d.shape[0]):
        pen = radius - d[i]
        if pen > worst:
            worst = pen
            idx = i
    return worst, idx
