"""Numba kernels for the event-driven epidemic core.

State layout (all flat numpy arrays, sites as flat indices):
  pos, home          int64[P]   particle position / home site
  infected           uint8[P]
  contaminated       uint8[S]
  inf_list/inf_slot  swap-removable index of infected particles
  cont_list/cont_slot swap-removable index of contaminated sites
  occ_head/next/prev doubly linked occupant list per site
  inf_occ            int64[S]   infected occupants per site
  counts             int64[5]   [n_inf, n_cont, events, peak_inf, traj_n]
  tstate             float64[2] [time, extinction_time (-1 if none)]

Event categories compete as exponential clocks with aggregate rates
(P*1, lam*n_inf, gamma*n_cont); a category is drawn proportionally to its
rate and a uniform member is applied. One call advances up to `chunk`
events and stops early on extinction (no infected particles, no
contaminated sites).
"""

from __future__ import annotations

import numpy as np
from numba import njit

CAT_JUMP = 0
CAT_RECOVERY = 1
CAT_CLEARANCE = 2

STATUS_RAN = 0
STATUS_EXTINCT = 1

NORM_L1 = 0
NORM_LINF = 1


@njit(cache=True, nogil=True, inline="always")
def _torus_dist(a, b, L, d, norm_code):
    acc = 0
    mx = 0
    for _ in range(d):
        ca = a % L
        cb = b % L
        a //= L
        b //= L
        delta = ca - cb
        if delta < 0:
            delta = -delta
        if L - delta < delta:
            delta = L - delta
        acc += delta
        if delta > mx:
            mx = delta
    if norm_code == NORM_LINF:
        return mx
    return acc


@njit(cache=True, nogil=True, inline="always")
def _infect_particle(q, pos, infected, inf_list, inf_slot, inf_occ, counts):
    infected[q] = 1
    inf_list[counts[0]] = q
    inf_slot[q] = counts[0]
    counts[0] += 1
    inf_occ[pos[q]] += 1


@njit(cache=True, nogil=True, inline="always")
def _heal_particle(q, pos, infected, inf_list, inf_slot, inf_occ, counts):
    infected[q] = 0
    slot = inf_slot[q]
    last = inf_list[counts[0] - 1]
    inf_list[slot] = last
    inf_slot[last] = slot
    inf_slot[q] = -1
    counts[0] -= 1
    inf_occ[pos[q]] -= 1


@njit(cache=True, nogil=True, inline="always")
def _contaminate_site(s, contaminated, cont_list, cont_slot, counts):
    contaminated[s] = 1
    cont_list[counts[1]] = s
    cont_slot[s] = counts[1]
    counts[1] += 1


@njit(cache=True, nogil=True, inline="always")
def _clear_site(s, contaminated, cont_list, cont_slot, counts):
    contaminated[s] = 0
    slot = cont_slot[s]
    last = cont_list[counts[1] - 1]
    cont_list[slot] = last
    cont_slot[last] = slot
    cont_slot[s] = -1
    counts[1] -= 1


@njit(cache=True, nogil=True, inline="always")
def _move_particle(p, dest, pos, occ_head, occ_next, occ_prev, inf_occ, infected):
    src = pos[p]
    # unlink from src
    nxt = occ_next[p]
    prv = occ_prev[p]
    if prv == -1:
        occ_head[src] = nxt
    else:
        occ_next[prv] = nxt
    if nxt != -1:
        occ_prev[nxt] = prv
    # link at dest (front)
    head = occ_head[dest]
    occ_next[p] = head
    occ_prev[p] = -1
    if head != -1:
        occ_prev[head] = p
    occ_head[dest] = p
    pos[p] = dest
    if infected[p]:
        inf_occ[src] -= 1
        inf_occ[dest] += 1


@njit(cache=True, nogil=True)
def advance(
    chunk,
    pos,
    home,
    infected,
    inf_list,
    inf_slot,
    contaminated,
    cont_list,
    cont_slot,
    occ_head,
    occ_next,
    occ_prev,
    inf_occ,
    counts,
    tstate,
    places,
    moves_scratch,
    last_event,
    traj_t,
    traj_inf,
    traj_cont,
    rec_every,
    L,
    d,
    k,
    norm_code,
    lam,
    gamma,
    gamma_finite,
    site_only,
    rng,
):
    n_p = pos.shape[0]
    for _ in range(chunk):
        if counts[0] == 0 and counts[1] == 0:
            return STATUS_EXTINCT
        rec_rate = lam * counts[0]
        clr_rate = gamma * counts[1] if gamma_finite else 0.0
        total = n_p + rec_rate + clr_rate
        tstate[0] += rng.exponential(1.0 / total)
        u = rng.random() * total
        if u < n_p:
            # JUMP
            p = rng.integers(0, n_p)
            src = pos[p]
            h = home[p]
            n_moves = 0
            for axis in range(d):
                place = places[axis]
                c = (src // place) % L
                for step in range(2):
                    nc = (c + 1) % L if step == 0 else (c - 1) % L
                    nb = src + (nc - c) * place
                    if _torus_dist(nb, h, L, d, norm_code) <= k:
                        moves_scratch[n_moves] = nb
                        n_moves += 1
            dest = moves_scratch[rng.integers(0, n_moves)]
            _move_particle(p, dest, pos, occ_head, occ_next, occ_prev, inf_occ, infected)
            if infected[p]:
                if gamma_finite and contaminated[dest] == 0:
                    _contaminate_site(dest, contaminated, cont_list, cont_slot, counts)
                if not site_only:
                    q = occ_head[dest]
                    while q != -1:
                        if q != p and infected[q] == 0:
                            _infect_particle(q, pos, infected, inf_list, inf_slot, inf_occ, counts)
                        q = occ_next[q]
            else:
                hit = contaminated[dest] == 1
                if not hit and not site_only and inf_occ[dest] > 0:
                    hit = True
                if hit:
                    _infect_particle(p, pos, infected, inf_list, inf_slot, inf_occ, counts)
            last_event[0] = CAT_JUMP
            last_event[1] = p
            last_event[2] = src
            last_event[3] = dest
        elif u < n_p + rec_rate:
            # RECOVERY; no immediate re-infection by site or co-located particles
            q = inf_list[rng.integers(0, counts[0])]
            _heal_particle(q, pos, infected, inf_list, inf_slot, inf_occ, counts)
            last_event[0] = CAT_RECOVERY
            last_event[1] = q
            last_event[2] = pos[q]
            last_event[3] = -1
        else:
            # CLEARANCE; no immediate re-contamination by infected occupants
            s = cont_list[rng.integers(0, counts[1])]
            _clear_site(s, contaminated, cont_list, cont_slot, counts)
            last_event[0] = CAT_CLEARANCE
            last_event[1] = -1
            last_event[2] = s
            last_event[3] = -1
        counts[2] += 1
        if counts[0] > counts[3]:
            counts[3] = counts[0]
        if rec_every > 0 and counts[2] % rec_every == 0 and counts[4] < traj_t.shape[0]:
            traj_t[counts[4]] = tstate[0]
            traj_inf[counts[4]] = counts[0]
            traj_cont[counts[4]] = counts[1]
            counts[4] += 1
        if counts[0] == 0 and counts[1] == 0:
            tstate[1] = tstate[0]
            return STATUS_EXTINCT
    return STATUS_RAN
