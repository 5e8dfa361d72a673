"""Fused forward+backward training kernels over flat parameter vectors.

Layers follow the single template z_l = s_l * (a_{l-1} @ Wt_l + b_l) with
Wt_l stored input-major (fan_in x fan_out); the scalar s_l is folded into the
small weight/bias arrays so no full-batch array is ever rescaled. The jet
kernel carries value, per-axis first-derivative and per-axis second-derivative
channels stacked along the batch axis, so each layer is one GEMM; derivative
channels share the layer weights and differ only in the sine rule:

    v' = sin(zv),  d'_i = cos(zv) zd_i,  dd'_i = cos(zv) zdd_i - sin(zv) zd_i^2

sin/cos evaluations (the dominant cost on this hardware) are computed once in
the forward pass and reused by the backward pass. Both kernels are compiled
with numba when enabled (GEMMs still route to BLAS inside the jit); the
identical source runs as plain numpy otherwise.

Loss modes for the jet kernel:
    1  gradient supervision   mean_i,b (d_i - G_i)^2
    2  laplacian supervision  mean_b (sum_i dd_i - T)^2
    3  Burgers residual       mean_b (v - T)^2 + mean_b r^2,
                              r = d_t + lam1 v d_x - lam2 dd_x, axes (t, x)
"""

from __future__ import annotations

import numpy as np

from ._accel import maybe_jit


def _fit_core_impl(params, w_off, b_off, widths, scales, x, y):
    n_layers = len(widths) - 1
    acts = [x]
    coss = []
    for l in range(n_layers):
        wt = scales[l] * params[w_off[l] : w_off[l] + widths[l] * widths[l + 1]].reshape(
            widths[l], widths[l + 1]
        )
        b = scales[l] * params[b_off[l] : b_off[l] + widths[l + 1]]
        z = np.dot(acts[l], wt) + b
        if l < n_layers - 1:
            acts.append(np.sin(z))
            coss.append(np.cos(z))
        else:
            diff = z - y
    loss = np.sum(diff * diff) / diff.size
    gz = (2.0 / diff.size) * diff
    grad = np.zeros_like(params)
    for l in range(n_layers - 1, -1, -1):
        wt = params[w_off[l] : w_off[l] + widths[l] * widths[l + 1]].reshape(
            widths[l], widths[l + 1]
        )
        gw = grad[w_off[l] : w_off[l] + widths[l] * widths[l + 1]].reshape(
            widths[l], widths[l + 1]
        )
        gb = grad[b_off[l] : b_off[l] + widths[l + 1]]
        gz_s = scales[l] * gz
        gw += np.dot(acts[l].T, gz_s)
        gb += np.sum(gz_s, axis=0)
        if l > 0:
            gz = np.dot(gz_s, wt.T) * coss[l - 1]
    return loss, grad


def _jet_core_impl(params, w_off, b_off, widths, scales, x, d1_seed, mode, g_t, t_t, lam1, lam2):
    n_layers = len(widths) - 1
    batch = x.shape[0]
    d_in = x.shape[1]
    # value + d first-derivative channels; second-derivative channels only
    # when the loss needs them (laplacian/residual modes)
    n_second = 0 if mode == 1 else d_in
    n_ch = 1 + d_in + n_second

    # channel-stacked state (n_ch*batch, n): every channel shares the layer
    # weights, so the whole state moves through one GEMM per layer
    state = np.zeros((n_ch * batch, d_in))
    state[:batch] = x
    for i in range(d_in):
        for j in range(d_in):
            state[(1 + i) * batch : (2 + i) * batch, j] = d1_seed[i, j]

    acts = [state]
    pres = []
    sins = []
    coss = []
    for l in range(n_layers):
        n_in = widths[l]
        n_out = widths[l + 1]
        wt = scales[l] * params[w_off[l] : w_off[l] + n_in * n_out].reshape(n_in, n_out)
        b = scales[l] * params[b_off[l] : b_off[l] + n_out]
        z = np.dot(acts[l], wt)
        z[:batch] += b
        pres.append(z)
        if l < n_layers - 1:
            cz = np.cos(z[:batch])
            sz = np.sin(z[:batch])
            sins.append(sz)
            coss.append(cz)
            nxt = np.empty((n_ch * batch, n_out))
            nxt[:batch] = sz
            for i in range(d_in):
                d_blk = z[(1 + i) * batch : (2 + i) * batch]
                nxt[(1 + i) * batch : (2 + i) * batch] = cz * d_blk
            for i in range(n_second):
                d_blk = z[(1 + i) * batch : (2 + i) * batch]
                dd_blk = z[(1 + d_in + i) * batch : (2 + d_in + i) * batch]
                nxt[(1 + d_in + i) * batch : (2 + d_in + i) * batch] = (
                    cz * dd_blk - sz * d_blk * d_blk
                )
            acts.append(nxt)

    out = pres[n_layers - 1]
    v = out[:batch, 0]

    g_out = np.zeros((n_ch * batch, 1))
    loss = 0.0
    aux_data = 0.0
    aux_res = 0.0
    g_lam1 = 0.0
    g_lam2 = 0.0
    if mode == 1:
        scale = 1.0 / (batch * d_in)
        for i in range(d_in):
            diff = out[(1 + i) * batch : (2 + i) * batch, 0] - g_t[:, i]
            loss += np.sum(diff * diff) * scale
            g_out[(1 + i) * batch : (2 + i) * batch, 0] = 2.0 * scale * diff
    elif mode == 2:
        lap = np.zeros(batch)
        for i in range(d_in):
            lap += out[(1 + d_in + i) * batch : (2 + d_in + i) * batch, 0]
        diff = lap - t_t
        loss = np.sum(diff * diff) / batch
        for i in range(d_in):
            g_out[(1 + d_in + i) * batch : (2 + d_in + i) * batch, 0] = (2.0 / batch) * diff
    else:
        u_t = out[batch : 2 * batch, 0]
        u_x = out[2 * batch : 3 * batch, 0]
        u_xx = out[(2 + d_in) * batch : (3 + d_in) * batch, 0]
        data_diff = v - t_t
        resid = u_t + lam1 * v * u_x - lam2 * u_xx
        aux_data = np.sum(data_diff * data_diff) / batch
        aux_res = np.sum(resid * resid) / batch
        loss = aux_data + aux_res
        g_out[:batch, 0] = (2.0 / batch) * (data_diff + resid * lam1 * u_x)
        g_out[batch : 2 * batch, 0] = (2.0 / batch) * resid
        g_out[2 * batch : 3 * batch, 0] = (2.0 / batch) * resid * lam1 * v
        g_out[(2 + d_in) * batch : (3 + d_in) * batch, 0] = -(2.0 / batch) * resid * lam2
        g_lam1 = np.sum(2.0 * resid * v * u_x) / batch
        g_lam2 = -np.sum(2.0 * resid * u_xx) / batch

    grad = np.zeros_like(params)
    gz = g_out
    for l in range(n_layers - 1, -1, -1):
        n_in = widths[l]
        n_out = widths[l + 1]
        wt = params[w_off[l] : w_off[l] + n_in * n_out].reshape(n_in, n_out)
        gw = grad[w_off[l] : w_off[l] + n_in * n_out].reshape(n_in, n_out)
        gb = grad[b_off[l] : b_off[l] + n_out]
        gz_s = scales[l] * gz
        gw += np.dot(acts[l].T, gz_s)
        gb += np.sum(gz_s[:batch], axis=0)
        if l > 0:
            ga = np.dot(gz_s, wt.T)
            z_prev = pres[l - 1]
            cz = coss[l - 1]
            sz = sins[l - 1]
            ngz = np.empty((n_ch * batch, n_in))
            gv_blk = ga[:batch] * cz
            for i in range(d_in):
                lo_d, hi_d = (1 + i) * batch, (2 + i) * batch
                zd_blk = z_prev[lo_d:hi_d]
                gad = ga[lo_d:hi_d]
                gv_blk += gad * (-sz * zd_blk)
                ngz[lo_d:hi_d] = gad * cz
            for i in range(n_second):
                lo_d, hi_d = (1 + i) * batch, (2 + i) * batch
                lo_s, hi_s = (1 + d_in + i) * batch, (2 + d_in + i) * batch
                zd_blk = z_prev[lo_d:hi_d]
                zdd_blk = z_prev[lo_s:hi_s]
                gadd = ga[lo_s:hi_s]
                gv_blk += gadd * (-sz * zdd_blk - cz * zd_blk * zd_blk)
                ngz[lo_d:hi_d] += gadd * (-2.0 * sz * zd_blk)
                ngz[lo_s:hi_s] = gadd * cz
            ngz[:batch] = gv_blk
            gz = ngz
    return loss, aux_data, aux_res, g_lam1, g_lam2, grad


fit_core = maybe_jit(_fit_core_impl)
jet_core = maybe_jit(_jet_core_impl)


def fit_forward(params, w_off, b_off, widths, scales, x):
    """Value-only forward pass on the flat parameter layout (plain numpy)."""
    n_layers = len(widths) - 1
    a = x
    for l in range(n_layers):
        wt = params[w_off[l] : w_off[l] + widths[l] * widths[l + 1]].reshape(
            widths[l], widths[l + 1]
        )
        b = params[b_off[l] : b_off[l] + widths[l + 1]]
        z = scales[l] * (a @ wt + b)
        a = np.sin(z) if l < n_layers - 1 else z
    return a
