"""Regina-style isomorphism signatures.

The signature alphabet is ``a-z A-Z 0-9 + -`` (values 0..63); multi-character
integers are little-endian base 64.  Permutations are indexed in
lexicographic order of S4.  A framing suffix after ``_`` is ignored.
"""
from __future__ import annotations

import itertools

from .triangulation import IDENTITY, Perm, Triangulation, TriangulationError, compose, invert

ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-"
_VALUE = {ch: i for i, ch in enumerate(ALPHABET)}
S4: tuple[Perm, ...] = tuple(itertools.permutations(range(4)))  # type: ignore[assignment]
_S4_INDEX = {p: i for i, p in enumerate(S4)}


class IsoSigError(TriangulationError):
    pass


def _encode_int(value: int, nchars: int) -> str:
    return "".join(ALPHABET[(value >> (6 * i)) & 63] for i in range(nchars))


class _Reader:
    def __init__(self, sig: str):
        self.sig = sig
        self.pos = 0

    def value(self) -> int:
        if self.pos >= len(self.sig):
            raise IsoSigError("truncated signature")
        ch = self.sig[self.pos]
        self.pos += 1
        return _VALUE[ch]

    def integer(self, nchars: int) -> int:
        return sum(self.value() << (6 * i) for i in range(nchars))

    def done(self) -> bool:
        return self.pos >= len(self.sig)


def _decode_component(reader: _Reader) -> list[list]:
    n = reader.value()
    nchars = 1
    if n == 63:
        nchars = reader.value()
        n = reader.integer(nchars)
    if n == 0:
        return []
    actions = []
    remaining = 4 * n
    while remaining > 0:
        v = reader.value()
        for k in range(3):
            if remaining <= 0:
                if (v >> (2 * k)) & 3:
                    raise IsoSigError("inconsistent facet actions")
                continue
            a = (v >> (2 * k)) & 3
            if a == 3:
                raise IsoSigError("invalid facet action")
            actions.append(a)
            remaining -= 1 if a == 0 else 2
    if remaining < 0:
        raise IsoSigError("inconsistent facet actions")
    njoins = actions.count(2)
    dests = [reader.integer(nchars) for _ in range(njoins)]
    perms = []
    for _ in range(njoins):
        idx = reader.value()
        if idx >= 24:
            raise IsoSigError("invalid permutation index")
        perms.append(S4[idx])
    glue: list[list] = [[None] * 4 for _ in range(n)]
    nxt = 1
    ap = jp = 0
    for t in range(n):
        for f in range(4):
            if glue[t][f] is not None:
                continue
            a = actions[ap]
            ap += 1
            if a == 0:
                glue[t][f] = "boundary"
                continue
            if a == 1:
                if nxt >= n:
                    raise IsoSigError("inconsistent gluing data: too many new tetrahedra")
                u, p = nxt, IDENTITY
                nxt += 1
            else:
                u, p = dests[jp], perms[jp]
                jp += 1
                if u >= n:
                    raise IsoSigError("inconsistent gluing data: destination out of range")
            g = p[f]
            if glue[u][g] is not None or (u == t and g == f):
                raise IsoSigError("inconsistent gluing data: face glued twice")
            glue[t][f] = (u, p)
            glue[u][g] = (t, invert(p))
    if nxt != n:
        raise IsoSigError("inconsistent gluing data: disconnected component")
    return glue


def decode_isosig(signature: str) -> Triangulation:
    """Decode a signature (possibly several concatenated components)."""
    sig = signature.strip().split("_", 1)[0]
    if not sig:
        raise IsoSigError("empty signature")
    bad = [ch for ch in sig if ch not in _VALUE]
    if bad:
        raise IsoSigError(f"invalid character {bad[0]!r} in signature")
    reader = _Reader(sig)
    table: list[list] = []
    while not reader.done():
        comp = _decode_component(reader)
        offset = len(table)
        for row in comp:
            table.append([
                None if g == "boundary" else (g[0] + offset, g[1]) for g in row
            ])
    if not table:
        raise IsoSigError("signature describes an empty triangulation")
    kind = "ideal" if all(g is not None for row in table for g in row) else "finite"
    return Triangulation(len(table), tuple(tuple(r) for r in table), kind)


def _signature_from(tri: Triangulation, comp: list[int], start: int, perm: Perm) -> str:
    """Encode the component containing ``start`` with the given relabelling.

    ``vertex_map[t]`` sends vertices of original tet ``t`` to labels in its image.
    """
    image = {start: 0}
    pre = [start]
    vertex_map = {start: invert(perm)}
    actions: list[int] = []
    dests: list[int] = []
    gluings: list[int] = []
    done: set[tuple[int, int]] = set()
    img = 0
    while img < len(pre):
        src = pre[img]
        vm = vertex_map[src]
        vm_inv = invert(vm)
        for fimg in range(4):
            fsrc = vm_inv[fimg]
            if (img, fimg) in done:
                continue
            g = tri.gluings[src][fsrc]
            if g is None:
                actions.append(0)
                done.add((img, fimg))
                continue
            dst, p = g
            if dst in image:
                dimg = image[dst]
                dface = vertex_map[dst][p[fsrc]]
                actions.append(2)
                dests.append(dimg)
                gluings.append(_S4_INDEX[compose(compose(vertex_map[dst], p), vm_inv)])
                done.add((img, fimg))
                done.add((dimg, dface))
            else:
                image[dst] = len(pre)
                pre.append(dst)
                vertex_map[dst] = compose(vm, invert(p))
                actions.append(1)
                done.add((img, fimg))
                done.add((image[dst], vertex_map[dst][p[fsrc]]))
        img += 1
    n = len(pre)
    if n < 63:
        nchars = 1
        out = ALPHABET[n]
    else:
        nchars = 0
        tmp = n
        while tmp:
            tmp >>= 6
            nchars += 1
        out = ALPHABET[63] + ALPHABET[nchars] + _encode_int(n, nchars)
    for i in range(0, len(actions), 3):
        v = 0
        for k in range(3):
            if i + k < len(actions):
                v |= actions[i + k] << (2 * k)
        out += ALPHABET[v]
    out += "".join(_encode_int(d, nchars) for d in dests)
    out += "".join(ALPHABET[g] for g in gluings)
    return out


def _components(tri: Triangulation) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for t in range(tri.size):
        if t in seen:
            continue
        stack, comp = [t], []
        seen.add(t)
        while stack:
            x = stack.pop()
            comp.append(x)
            for g in tri.gluings[x]:
                if g is not None and g[0] not in seen:
                    seen.add(g[0])
                    stack.append(g[0])
        comps.append(sorted(comp))
    return comps


def encode_isosig(tri: Triangulation) -> str:
    """Canonical signature: per component the smallest string (byte order)
    over all starting tetrahedra and vertex labellings; components sorted."""
    parts = []
    for comp in _components(tri):
        best = None
        for start in comp:
            for perm in S4:
                s = _signature_from(tri, comp, start, perm)
                if best is None or s < best:
                    best = s
        parts.append(best)
    return "".join(sorted(parts))
