# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: polyline projection and the fixed-gain episode loop.

Every expression mirrors the pure-python implementation term for term
(same association, same libm calls, no fused multiply-adds) so that both
backends produce bit-identical trajectories.  See _pykernels.py and
harness/episode.py for the reference forms.
"""

from libc.math cimport M_PI, INFINITY, atan, ceil, cos, fabs, floor, sin

import numpy as np


cdef inline double _wrap(double a) noexcept nogil:
    return a - 2.0 * M_PI * ceil((a - M_PI) / (2.0 * M_PI))


cdef inline double _clamp(double value, double lo, double hi) noexcept nogil:
    if value > hi:
        return hi
    if value < lo:
        return lo
    return value


cdef inline Py_ssize_t _nearest(
    const double[::1] xs, const double[::1] ys, double x, double y
) noexcept nogil:
    cdef Py_ssize_t i, best = 0
    cdef double dx, dy, d2
    cdef double best_d2 = INFINITY
    for i in range(xs.shape[0]):
        dx = xs[i] - x
        dy = ys[i] - y
        d2 = dx * dx + dy * dy
        if d2 < best_d2:
            best_d2 = d2
            best = i
    return best


def project_polyline(xs, ys, yaws, double x, double y, double yaw):
    """Compiled twin of _pykernels.project_polyline."""
    cdef const double[::1] mx = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] my = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const double[::1] myaw = np.ascontiguousarray(yaws, dtype=np.float64)
    cdef Py_ssize_t i = _nearest(mx, my, x, y)
    cdef double ryaw = myaw[i]
    cdef double rx = x - mx[i]
    cdef double ry = y - my[i]
    cdef double e = ry * cos(ryaw) - rx * sin(ryaw)
    cdef double heading = _wrap(ryaw - yaw)
    return int(i), e, heading


cdef inline double _mu_at(
    const double[:, ::1] grid, double ox, double oy, double cell,
    double mu_high, double x, double y,
) noexcept nogil:
    cdef Py_ssize_t ci = <Py_ssize_t>floor((x - ox) / cell)
    cdef Py_ssize_t cj = <Py_ssize_t>floor((y - oy) / cell)
    if 0 <= ci < grid.shape[0] and 0 <= cj < grid.shape[1]:
        return grid[ci, cj]
    return mu_high


def run_fixed_episode(
    trajectory_xs, trajectory_ys, trajectory_yaws, trajectory_vref,
    grid_array, double ox, double oy, double cell, double mu_high,
    double x0, double y0, double yaw0,
    double k_stanley, double k_speed,
    double wheel_radius, double wheel_base, double dt, double gravity,
    double traction_factor, double v_max, double omega_max,
    int n_previews, double p1, double preview_dt, double delta_max,
    double v_eps, bint basic_lateral,
    double r_dist, double r_ang, double r_speed,
    double goal_tol, int max_steps,
):
    """Roll out one fixed-gain episode.  Returns (reached, columns dict)."""
    cdef const double[::1] txs = np.ascontiguousarray(trajectory_xs, dtype=np.float64)
    cdef const double[::1] tys = np.ascontiguousarray(trajectory_ys, dtype=np.float64)
    cdef const double[::1] tyaws = np.ascontiguousarray(trajectory_yaws, dtype=np.float64)
    cdef const double[::1] tvref = np.ascontiguousarray(trajectory_vref, dtype=np.float64)
    cdef const double[:, ::1] grid = np.ascontiguousarray(grid_array, dtype=np.float64)

    out = {
        name: np.empty(max_steps, dtype=np.float64)
        for name in (
            "e", "dtheta", "dv", "slip_dv", "slip_domega", "omega_r",
            "omega_l", "reward", "x", "y", "yaw", "v", "omega", "mu",
        )
    }
    cdef double[::1] o_e = out["e"]
    cdef double[::1] o_dth = out["dtheta"]
    cdef double[::1] o_dv = out["dv"]
    cdef double[::1] o_sdv = out["slip_dv"]
    cdef double[::1] o_sdw = out["slip_domega"]
    cdef double[::1] o_wr = out["omega_r"]
    cdef double[::1] o_wl = out["omega_l"]
    cdef double[::1] o_r = out["reward"]
    cdef double[::1] o_x = out["x"]
    cdef double[::1] o_y = out["y"]
    cdef double[::1] o_yaw = out["yaw"]
    cdef double[::1] o_v = out["v"]
    cdef double[::1] o_w = out["omega"]
    cdef double[::1] o_mu = out["mu"]

    cdef double x = x0, y = y0, yaw = yaw0, v = 0.0, w = 0.0
    cdef double gx = txs[txs.shape[0] - 1]
    cdef double gy = tys[tys.shape[0] - 1]
    cdef bint reached = False
    cdef Py_ssize_t t, n = 0, i, pi
    cdef int hop
    cdef double e, heading, ryaw, rx, ry
    cdef double veff, term, delta_now, total, weight, delta
    cdef double px, py, pyaw, w_prev, pe, pheading
    cdef double vref_i, alpha, v_cmd, w_cmd, wr, wl
    cdef double mu, vd, wd, cap_v, cap_w, new_v, new_w
    cdef double nx, ny, nyaw, dv_post, reward, dxg, dyg
    cdef bint moving

    # initial projection, carried across steps
    i = _nearest(txs, tys, x, y)
    ryaw = tyaws[i]
    rx = x - txs[i]
    ry = y - tys[i]
    e = ry * cos(ryaw) - rx * sin(ryaw)
    heading = _wrap(ryaw - yaw)

    for t in range(max_steps):
        vref_i = tvref[i]

        # lateral control
        veff = v if v > v_eps else v_eps
        term = heading + atan(k_stanley * -e / veff)
        delta_now = _clamp(term, -delta_max, delta_max)
        if basic_lateral:
            delta = delta_now
        else:
            total = term
            weight = p1
            px = x
            py = y
            pyaw = yaw
            moving = v > 0.0
            w_prev = delta_now / dt
            for hop in range(n_previews):
                if moving:
                    px = px + v * cos(pyaw) * preview_dt
                    py = py + v * sin(pyaw) * preview_dt
                    pyaw = _wrap(pyaw + w_prev * preview_dt)
                pi = _nearest(txs, tys, px, py)
                ryaw = tyaws[pi]
                rx = px - txs[pi]
                ry = py - tys[pi]
                pe = ry * cos(ryaw) - rx * sin(ryaw)
                pheading = _wrap(ryaw - pyaw)
                total = total + weight * (pheading + atan(k_stanley * -pe / veff))
                weight = weight * weight
            delta = _clamp(total, -delta_max, delta_max)

        # longitudinal control and command synthesis
        alpha = k_speed * (vref_i - v)
        v_cmd = v + alpha * dt
        w_cmd = delta / dt
        wr = (2.0 * v_cmd + w_cmd * wheel_base) / (2.0 * wheel_radius)
        wl = (2.0 * v_cmd - w_cmd * wheel_base) / (2.0 * wheel_radius)

        # traction-limited step under the friction at the current pose
        mu = _mu_at(grid, ox, oy, cell, mu_high, x, y)
        vd = (wr + wl) * wheel_radius / 2.0
        wd = (wr - wl) * wheel_radius / wheel_base
        vd = _clamp(vd, -v_max, v_max)
        wd = _clamp(wd, -omega_max, omega_max)
        cap_v = mu * gravity * dt
        cap_w = traction_factor * 2.0 * mu * gravity / wheel_base * dt
        new_v = v + _clamp(vd - v, -cap_v, cap_v)
        new_w = w + _clamp(wd - w, -cap_w, cap_w)
        nx = x + new_v * cos(yaw) * dt
        ny = y + new_v * sin(yaw) * dt
        nyaw = _wrap(yaw + new_w * dt)

        # post-step projection and reward
        i = _nearest(txs, tys, nx, ny)
        ryaw = tyaws[i]
        rx = nx - txs[i]
        ry = ny - tys[i]
        e = ry * cos(ryaw) - rx * sin(ryaw)
        heading = _wrap(ryaw - nyaw)
        dv_post = fabs(tvref[i]) - fabs(new_v)
        reward = (
            r_dist * (e * e)
            + r_ang * (heading * heading)
            + r_speed * (dv_post * dv_post)
        )

        o_e[t] = e
        o_dth[t] = heading
        o_dv[t] = dv_post
        o_sdv[t] = vd - new_v
        o_sdw[t] = wd - new_w
        o_wr[t] = wr
        o_wl[t] = wl
        o_r[t] = reward
        o_x[t] = nx
        o_y[t] = ny
        o_yaw[t] = nyaw
        o_v[t] = new_v
        o_w[t] = new_w
        o_mu[t] = mu

        x = nx
        y = ny
        yaw = nyaw
        v = new_v
        w = new_w
        n = t + 1

        dxg = x - gx
        dyg = y - gy
        if dxg * dxg + dyg * dyg <= goal_tol * goal_tol:
            reached = True
            break

    return reached, {name: arr[:n].copy() for name, arr in out.items()}
