"""Compiled inner loops: interface extraction, component labelling, heat-bath updates.

Face grids are dense uint8/int32 arrays indexed [Z, Y, X] where
Z = z2 + 2H + 2, Y = y2 + 2m + 2, X = x2 + 2n + 2 for doubled coordinates
(x2, y2, z2).  Padded spin arrays carry one exterior layer on every side; the
padded cell (r, q, p) sits at grid position (2r + 1, 2q + 1, 2p + 1).
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _cells_of(Z, Y, X):
    """Padded indices of the two cells bounding the face at grid (Z, Y, X)."""
    if Z % 2 == 0:
        r0 = Z // 2 - 1
        q = (Y - 1) // 2
        p = (X - 1) // 2
        return r0, q, p, r0 + 1, q, p
    if Y % 2 == 0:
        r = (Z - 1) // 2
        q0 = Y // 2 - 1
        p = (X - 1) // 2
        return r, q0, p, r, q0 + 1, p
    r = (Z - 1) // 2
    q = (Y - 1) // 2
    p0 = X // 2 - 1
    return r, q, p0, r, q, p0 + 1


@njit(cache=True, inline="always")
def _normal(Z, Y, X):
    if Z % 2 == 0:
        return 2
    if Y % 2 == 0:
        return 1
    return 0


@njit(cache=True)
def _face_present(pad, Z, Y, X):
    r0, q0, p0, r1, q1, p1 = _cells_of(Z, Y, X)
    if r0 < 0 or q0 < 0 or p0 < 0:
        return False
    if r1 >= pad.shape[0] or q1 >= pad.shape[1] or p1 >= pad.shape[2]:
        return False
    return pad[r0, q0, p0] != pad[r1, q1, p1]


@njit(cache=True, inline="always")
def _inside(pad, r, q, p):
    return 1 <= r <= pad.shape[0] - 2 and 1 <= q <= pad.shape[1] - 2 and 1 <= p <= pad.shape[2] - 2


@njit(cache=True)
def _in_box_face(pad, Z, Y, X):
    r0, q0, p0, r1, q1, p1 = _cells_of(Z, Y, X)
    return _inside(pad, r0, q0, p0) or _inside(pad, r1, q1, p1)


@njit(cache=True)
def _seed_stack(pad, stack):
    """Push the height-0 faces above the exterior ring; returns the stack length."""
    GY = 2 * pad.shape[1] + 1
    GX = 2 * pad.shape[2] + 1
    Z0 = pad.shape[0]  # grid index of z2 = 0
    top = 0
    for Y in range(1, GY, 2):
        for X in range(1, GX, 2):
            if Y == 1 or Y == GY - 2 or X == 1 or X == GX - 2:
                stack[top, 0] = Z0
                stack[top, 1] = Y
                stack[top, 2] = X
                top += 1
    return top


@njit(cache=True)
def bfs_interface(pad, offs, counts, visited, stamp, stack):
    """Mark with `stamp` every face star-connected to the exterior ring within F(sigma).

    Returns the number of marked faces (the ring included).
    """
    GZ, GY, GX = visited.shape
    top = _seed_stack(pad, stack)
    for t in range(top):
        visited[stack[t, 0], stack[t, 1], stack[t, 2]] = stamp
    total = top
    while top > 0:
        top -= 1
        Z = stack[top, 0]
        Y = stack[top, 1]
        X = stack[top, 2]
        a = _normal(Z, Y, X)
        for t in range(counts[a]):
            X2 = X + offs[a, t, 0]
            Y2 = Y + offs[a, t, 1]
            Z2 = Z + offs[a, t, 2]
            if Z2 < 0 or Y2 < 0 or X2 < 0 or Z2 >= GZ or Y2 >= GY or X2 >= GX:
                continue
            if visited[Z2, Y2, X2] == stamp:
                continue
            if not _face_present(pad, Z2, Y2, X2):
                continue
            visited[Z2, Y2, X2] = stamp
            stack[top, 0] = Z2
            stack[top, 1] = Y2
            stack[top, 2] = X2
            top += 1
            total += 1
    return total


@njit(cache=True)
def extract_faces(pad, offs, counts):
    """Interface faces of a padded configuration, as grid indices, plus a truncation flag."""
    GZ = 2 * pad.shape[0] + 1
    GY = 2 * pad.shape[1] + 1
    GX = 2 * pad.shape[2] + 1
    visited = np.zeros((GZ, GY, GX), dtype=np.int32)
    stack = np.empty((GZ * GY * GX // 2 + 16, 3), dtype=np.int64)
    bfs_interface(pad, offs, counts, visited, 1, stack)
    n = 0
    for Z in range(GZ):
        for Y in range(GY):
            for X in range(GX):
                if visited[Z, Y, X] == 1 and _in_box_face(pad, Z, Y, X):
                    n += 1
    out = np.empty((n, 3), dtype=np.int64)
    touched = False
    i = 0
    for Z in range(GZ):
        for Y in range(GY):
            for X in range(GX):
                if visited[Z, Y, X] == 1 and _in_box_face(pad, Z, Y, X):
                    out[i, 0] = X
                    out[i, 1] = Y
                    out[i, 2] = Z
                    i += 1
                    # faces reaching the top or bottom of the box
                    if Z <= 3 or Z >= GZ - 4:
                        touched = True
    return out, touched


@njit(cache=True)
def face_mask_from_spins(pad):
    """Dense mask of all faces between differing spins (the set F(sigma))."""
    GZ = 2 * pad.shape[0] + 1
    GY = 2 * pad.shape[1] + 1
    GX = 2 * pad.shape[2] + 1
    mask = np.zeros((GZ, GY, GX), dtype=np.uint8)
    for Z in range(GZ):
        for Y in range(GY):
            for X in range(GX):
                odd = (Z & 1) + (Y & 1) + (X & 1)
                if odd == 2 and _face_present(pad, Z, Y, X):
                    mask[Z, Y, X] = 1
    return mask


@njit(cache=True)
def box_face_mask(pad):
    """Dense mask of faces bounding at least one interior cell of a padded array."""
    GZ = 2 * pad.shape[0] + 1
    GY = 2 * pad.shape[1] + 1
    GX = 2 * pad.shape[2] + 1
    mask = np.zeros((GZ, GY, GX), dtype=np.uint8)
    for Z in range(GZ):
        for Y in range(GY):
            for X in range(GX):
                if (Z & 1) + (Y & 1) + (X & 1) == 2 and _in_box_face(pad, Z, Y, X):
                    mask[Z, Y, X] = 1
    return mask


@njit(cache=True)
def label_face_components(mask, offs, counts):
    """Star-connected components of a dense face mask, labelled 1, 2, ... in scan order."""
    GZ, GY, GX = mask.shape
    labels = np.zeros((GZ, GY, GX), dtype=np.int32)
    stack = np.empty((GZ * GY * GX // 2 + 16, 3), dtype=np.int64)
    nxt = 0
    for Z0 in range(GZ):
        for Y0 in range(GY):
            for X0 in range(GX):
                if mask[Z0, Y0, X0] == 0 or labels[Z0, Y0, X0] != 0:
                    continue
                nxt += 1
                labels[Z0, Y0, X0] = nxt
                top = 1
                stack[0, 0] = Z0
                stack[0, 1] = Y0
                stack[0, 2] = X0
                while top > 0:
                    top -= 1
                    Z = stack[top, 0]
                    Y = stack[top, 1]
                    X = stack[top, 2]
                    a = _normal(Z, Y, X)
                    for t in range(counts[a]):
                        X2 = X + offs[a, t, 0]
                        Y2 = Y + offs[a, t, 1]
                        Z2 = Z + offs[a, t, 2]
                        if Z2 < 0 or Y2 < 0 or X2 < 0 or Z2 >= GZ or Y2 >= GY or X2 >= GX:
                            continue
                        if mask[Z2, Y2, X2] == 0 or labels[Z2, Y2, X2] != 0:
                            continue
                        labels[Z2, Y2, X2] = nxt
                        stack[top, 0] = Z2
                        stack[top, 1] = Y2
                        stack[top, 2] = X2
                        top += 1
    return labels


@njit(cache=True)
def label_plane_complement(blocked):
    """Components of the complement of a projected set in the plane.

    `blocked` is indexed [Y, X] over doubled planar coordinates.  Nodes are faces
    (both odd) and edges (one odd); vertices are skipped.  A face and an edge are
    linked when the edge bounds the face.  Label 1 is the component touching the
    grid border (the unbounded one); finite components get 2, 3, ... in scan order.
    Blocked nodes and vertices get 0.
    """
    GY, GX = blocked.shape
    labels = np.zeros((GY, GX), dtype=np.int32)
    stack = np.empty((GY * GX + 16, 2), dtype=np.int64)
    top = 0
    for Y in range(GY):
        for X in range(GX):
            if Y == 0 or X == 0 or Y == GY - 1 or X == GX - 1:
                if (Y & 1) + (X & 1) == 0 or blocked[Y, X]:
                    continue
                labels[Y, X] = 1
                stack[top, 0] = Y
                stack[top, 1] = X
                top += 1
    nxt = 1
    Ys = 0
    Xs = 0
    while True:
        while top > 0:
            top -= 1
            Y = stack[top, 0]
            X = stack[top, 1]
            for d in range(4):
                Y2 = Y
                X2 = X
                if d == 0:
                    Y2 = Y + 1
                elif d == 1:
                    Y2 = Y - 1
                elif d == 2:
                    X2 = X + 1
                else:
                    X2 = X - 1
                if Y2 < 0 or X2 < 0 or Y2 >= GY or X2 >= GX:
                    continue
                if (Y2 & 1) + (X2 & 1) == 0:
                    continue
                if blocked[Y2, X2] or labels[Y2, X2] != 0:
                    continue
                labels[Y2, X2] = labels[Y, X]
                stack[top, 0] = Y2
                stack[top, 1] = X2
                top += 1
        # next unlabelled free node starts a new finite component
        found = False
        while Ys < GY:
            while Xs < GX:
                if (Ys & 1) + (Xs & 1) > 0 and not blocked[Ys, Xs] and labels[Ys, Xs] == 0:
                    found = True
                    break
                Xs += 1
            if found:
                break
            Ys += 1
            Xs = 0
        if not found:
            break
        nxt += 1
        labels[Ys, Xs] = nxt
        stack[0, 0] = Ys
        stack[0, 1] = Xs
        top = 1
    return labels


@njit(cache=True)
def heat_bath_updates(pad, p_plus, sites, uniforms, allowed):
    """Heat-bath updates at cells allowed[sites[t]]; returns the number of spin changes.

    `allowed` holds flat indices into the interior (unpadded) spin array.
    """
    ny = pad.shape[1] - 2
    nx = pad.shape[2] - 2
    changes = 0
    for t in range(sites.shape[0]):
        flat = allowed[sites[t]]
        k = flat // (ny * nx) + 1
        rem = flat % (ny * nx)
        j = rem // nx + 1
        i = rem % nx + 1
        field = (
            pad[k - 1, j, i] + pad[k + 1, j, i] + pad[k, j - 1, i] + pad[k, j + 1, i] + pad[k, j, i - 1] + pad[k, j, i + 1]
        )
        new = np.int8(1) if uniforms[t] < p_plus[(field + 6) // 2] else np.int8(-1)
        if new != pad[k, j, i]:
            pad[k, j, i] = new
            changes += 1
    return changes


@njit(cache=True)
def heat_bath_histogram(pad, p_plus, sites, uniforms, thin, hist, code):
    """Heat-bath updates recording the configuration code every `thin` updates."""
    ny = pad.shape[1] - 2
    nx = pad.shape[2] - 2
    for t in range(sites.shape[0]):
        flat = sites[t]
        k = flat // (ny * nx) + 1
        rem = flat % (ny * nx)
        j = rem // nx + 1
        i = rem % nx + 1
        field = (
            pad[k - 1, j, i] + pad[k + 1, j, i] + pad[k, j - 1, i] + pad[k, j + 1, i] + pad[k, j, i - 1] + pad[k, j, i + 1]
        )
        new = np.int8(1) if uniforms[t] < p_plus[(field + 6) // 2] else np.int8(-1)
        if new != pad[k, j, i]:
            pad[k, j, i] = new
            code ^= np.int64(1) << flat
        if (t + 1) % thin == 0:
            hist[code] += 1
    return code


@njit(cache=True)
def _constraint_ok(pad, offs, counts, visited, stamp, stack, region, target, n_target):
    """Mark the interface with `stamp`, stopping at the first face over the exterior region not in the target."""
    GZ, GY, GX = visited.shape
    top = _seed_stack(pad, stack)
    seen = 0
    for t in range(top):
        Z = stack[t, 0]
        Y = stack[t, 1]
        X = stack[t, 2]
        visited[Z, Y, X] = stamp
        if region[Y, X] != 0 and _in_box_face(pad, Z, Y, X):
            if target[Z, Y, X] == 0:
                return False
            seen += 1
    while top > 0:
        top -= 1
        Z = stack[top, 0]
        Y = stack[top, 1]
        X = stack[top, 2]
        a = _normal(Z, Y, X)
        for t in range(counts[a]):
            X2 = X + offs[a, t, 0]
            Y2 = Y + offs[a, t, 1]
            Z2 = Z + offs[a, t, 2]
            if Z2 < 0 or Y2 < 0 or X2 < 0 or Z2 >= GZ or Y2 >= GY or X2 >= GX:
                continue
            if visited[Z2, Y2, X2] == stamp:
                continue
            if not _face_present(pad, Z2, Y2, X2):
                continue
            visited[Z2, Y2, X2] = stamp
            if region[Y2, X2] != 0 and _in_box_face(pad, Z2, Y2, X2):
                if target[Z2, Y2, X2] == 0:
                    return False
                seen += 1
            stack[top, 0] = Z2
            stack[top, 1] = Y2
            stack[top, 2] = X2
            top += 1
    return seen == n_target


@njit(cache=True)
def conditional_updates(
    pad, p_plus, sites, uniforms, allowed, offs, counts, visited, state, stack, region, target, n_target, sensitive, tally
):
    """Heat-bath updates rejecting moves that alter the interface over the exterior region.

    Changes at non-sensitive columns are accepted on energy grounds alone; a change
    at a sensitive column re-extracts the interface with a fresh stamp in `visited`
    (state[0] is the last stamp used) and is undone unless the exterior faces still
    match the target.  tally accumulates [changes, checks, rejections, unchecked changes].
    """
    ny = pad.shape[1] - 2
    nx = pad.shape[2] - 2
    for t in range(sites.shape[0]):
        flat = allowed[sites[t]]
        k = flat // (ny * nx) + 1
        rem = flat % (ny * nx)
        j = rem // nx + 1
        i = rem % nx + 1
        field = (
            pad[k - 1, j, i] + pad[k + 1, j, i] + pad[k, j - 1, i] + pad[k, j + 1, i] + pad[k, j, i - 1] + pad[k, j, i + 1]
        )
        new = np.int8(1) if uniforms[t] < p_plus[(field + 6) // 2] else np.int8(-1)
        old = pad[k, j, i]
        if new == old:
            continue
        pad[k, j, i] = new
        if not sensitive[j - 1, i - 1]:
            tally[0] += 1
            tally[3] += 1
            continue
        tally[1] += 1
        state[0] += 1
        if _constraint_ok(pad, offs, counts, visited, state[0], stack, region, target, n_target):
            tally[0] += 1
        else:
            pad[k, j, i] = old
            tally[2] += 1
