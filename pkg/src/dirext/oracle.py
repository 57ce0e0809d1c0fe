"""Galerkin oracle for the decomposition ``F = H^1 ⊕ G_α``.

Every function of the extension splits on each interval into a part that is
absolutely continuous in ``x`` and a part ``ψ ∘ j_n`` that varies only on
``W_n``.  The discrete space uses piecewise linear hats for both: hats in
``x`` on a graded mesh (one copy per interval, so jumps at shared endpoints
are allowed) and hats in the darned coordinate ``s``.  The two energy parts
decouple and are assembled exactly; the mass matrix uses the Lebesgue rule
of the extension.  The discrete ``H^1`` is the continuous piecewise linear
space on the same ``x`` mesh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ConfigError

# ---------------------------------------------------------------------------
# Meshes


def graded_nodes(n_cells, window=16.0, center=0.0, grading=3.0, required=()):
    """Nodes of a mesh on ``[center - window, center + window]`` graded toward ``center``.

    ``x = center + window sinh(κu) / sinh(κ)`` for ``u`` uniform in ``[-1, 1]``
    with ``n_cells`` cells; ``required`` points are inserted.  Doubling
    ``n_cells`` gives a nested mesh.
    """
    if n_cells < 2 or n_cells % 2:
        raise ConfigError("the mesh needs an even number of cells >= 2")
    u = np.linspace(-1.0, 1.0, n_cells + 1)
    x = center + window * np.sinh(grading * u) / math.sinh(grading)
    req = np.asarray([r for r in required if abs(r - center) < window], dtype=float)
    x = np.unique(np.concatenate([x, req]))
    x[0], x[-1] = center - window, center + window
    return x


@dataclass
class _Block:
    """x-hats of one interval: node positions and their global indices."""

    n: int
    nodes: np.ndarray
    glob: np.ndarray


@dataclass
class _SBlock:
    """s-hats of one interval; the first node is pinned to zero."""

    n: int
    nodes: np.ndarray


class GalerkinMesh:
    """Mixed x/s hat basis on an extension with assembled matrices.

    Parameters
    ----------
    ext : Extension
    n_cells : int
        Cells of the global ``x`` mesh (its node count is ``n_cells + 1``
        plus required points).
    window : float
        Half-width of the truncated domain; functions vanish at its ends.
    s_cells : int, optional
        Cells of the ``s`` mesh on every interval with singular mass
        (defaults to ``n_cells // 4``).
    required : sequence of float
        Extra ``x`` nodes (function kinks).
    """

    def __init__(self, ext, n_cells, window=16.0, s_cells=None, required=(), grading=3.0):
        self.ext = ext
        self.n_cells = int(n_cells)
        self.window = float(window)
        req = list(required) + [float(v) for v in ext.endpoints()]
        self.x_nodes = graded_nodes(self.n_cells, window, 0.0, grading, req)
        interior = self.x_nodes[1:-1]
        self.n_glob = interior.size
        self.blocks = []
        self.sblocks = []
        offset = 0
        for n, sf in enumerate(ext.parts):
            iv = sf.interval
            sel = (self.x_nodes >= iv.a) & (self.x_nodes <= iv.b)
            nodes = self.x_nodes[sel]
            glob = np.flatnonzero(sel) - 1  # index into interior nodes
            self.blocks.append(_Block(n, nodes, glob))
            offset += nodes.size
        s_cells = max(4, self.n_cells // 4) if s_cells is None else int(s_cells)
        for n, sf in enumerate(ext.parts):
            if not sf.has_singular_mass:
                self.sblocks.append(_SBlock(n, np.zeros(0)))
                continue
            p = sf._pieces
            lo = float(p["S_lo"][0] - sf._S_e)
            hi = float(p["S_hi"][p["enumerated"]][-1] - sf._S_e) if p["enumerated"].any() else lo
            self.sblocks.append(_SBlock(n, np.linspace(lo, hi, s_cells + 1)))
        self._assemble()

    # -- degrees of freedom --------------------------------------------------

    def _layout(self):
        """Offsets of the per-interval x-blocks and s-blocks in the dof vector."""
        offs, k = [], 0
        for blk in self.blocks:
            # drop nodes at the truncation boundary
            keep = (blk.glob >= 0) & (blk.glob < self.n_glob)
            offs.append((k, keep))
            k += int(keep.sum())
        s_offs = []
        for sb in self.sblocks:
            s_offs.append(k)
            k += max(sb.nodes.size - 1, 0)
        return offs, s_offs, k

    def _basis_at(self, x):
        """Sparse matrix of all basis functions at the points ``x``."""
        x = np.asarray(x, dtype=float)
        rows, cols, vals = [], [], []
        idx = self.ext.locate(x)
        offs, s_offs, _ = self._layout()
        for blk, (off, keep), sb, soff in zip(self.blocks, offs, self.sblocks, s_offs):
            pts = np.flatnonzero(idx == blk.n)
            if pts.size == 0:
                continue
            xp = x[pts]
            nodes = blk.nodes
            inside = (xp >= nodes[0]) & (xp <= nodes[-1])
            pts_in, xp_in = pts[inside], xp[inside]
            k = np.clip(np.searchsorted(nodes, xp_in, side="right") - 1, 0, nodes.size - 2)
            t = (xp_in - nodes[k]) / (nodes[k + 1] - nodes[k])
            local = np.cumsum(keep) - 1
            for node, wgt in ((k, 1.0 - t), (k + 1, t)):
                ok = keep[node]
                rows.append(pts_in[ok])
                cols.append(off + local[node[ok]])
                vals.append(wgt[ok])
            if sb.nodes.size > 1:
                sf = self.ext.parts[blk.n]
                s = np.clip(sf.j_closure(xp), sb.nodes[0], sb.nodes[-1])
                k = np.clip(np.searchsorted(sb.nodes, s, side="right") - 1, 0, sb.nodes.size - 2)
                t = (s - sb.nodes[k]) / (sb.nodes[k + 1] - sb.nodes[k])
                for node, wgt in ((k, 1.0 - t), (k + 1, t)):
                    ok = node >= 1
                    rows.append(pts[ok])
                    cols.append(soff + node[ok] - 1)
                    vals.append(wgt[ok])
        _, _, N = self._layout()
        if rows:
            r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
        else:
            r = c = np.zeros(0, dtype=int)
            v = np.zeros(0)
        return sp.csr_matrix((v, (r, c)), shape=(x.size, N))

    # -- assembly ------------------------------------------------------------

    def _assemble(self):
        offs, s_offs, N = self._layout()
        A = np.zeros((N, N))
        for blk, (off, keep) in zip(self.blocks, offs):
            h = np.diff(blk.nodes)
            local = np.cumsum(keep) - 1
            for e in range(h.size):
                kk = 0.5 / h[e]
                for a, b_, sgn in ((e, e, 1), (e + 1, e + 1, 1), (e, e + 1, -1), (e + 1, e, -1)):
                    if keep[a] and keep[b_]:
                        A[off + local[a], off + local[b_]] += sgn * kk
        for sb, soff in zip(self.sblocks, s_offs):
            if sb.nodes.size < 2:
                continue
            h = np.diff(sb.nodes)
            for e in range(h.size):
                kk = 0.5 / h[e]
                for a, b_, sgn in ((e, e, 1), (e + 1, e + 1, 1), (e, e + 1, -1), (e + 1, e, -1)):
                    if a >= 1 and b_ >= 1:
                        A[soff + a - 1, soff + b_ - 1] += sgn * kk
        ext = self.ext
        rule = ext.lebesgue_rule(tuple(self.x_nodes))
        inside = (rule.x > -self.window) & (rule.x < self.window)
        B = self._basis_at(rule.x[inside])
        W = sp.diags(rule.w[inside])
        M = (B.T @ W @ B).toarray()
        self.A, self.M = A, 0.5 * (M + M.T)
        self.K = self.A + ext.alpha * self.M
        # embedding of the continuous x-P1 space
        E = np.zeros((N, self.n_glob))
        for blk, (off, keep) in zip(self.blocks, offs):
            local = np.cumsum(keep) - 1
            for i in np.flatnonzero(keep):
                E[off + local[i], blk.glob[i]] = 1.0
        self.E = E
        self.N = N

    # -- functions -----------------------------------------------------------

    def interpolate(self, f):
        """Coefficients of the mixed nodal interpolant of an extension function."""
        offs, s_offs, N = self._layout()
        c = np.zeros(N)
        for blk, (off, keep), sb, soff in zip(self.blocks, offs, self.sblocks, s_offs):
            n = blk.n
            sf = self.ext.parts[n]
            psi_nodes = np.zeros(sb.nodes.size)
            if sb.nodes.size > 1:
                # ψ(s) = ∫_{s0}^s df/dt on W, by Gauss in s
                t, w = np.polynomial.legendre.leggauss(8)
                a, b = sb.nodes[:-1], sb.nodes[1:]
                s = (0.5 * (a + b))[:, None] + 0.5 * (b - a)[:, None] * t
                x = sf.j_inv(s.ravel())
                d = f.deriv_w(n, s.ravel(), x).reshape(s.shape)
                cell = np.sum(d * w * 0.5 * (b - a)[:, None], axis=1)
                psi_nodes = np.concatenate([[0.0], np.cumsum(cell)])
                c[soff:soff + sb.nodes.size - 1] = psi_nodes[1:]
            xs = blk.nodes[keep]
            vals = f.value_on(n, xs)
            if sb.nodes.size > 1:
                s = np.clip(sf.j_closure(xs), sb.nodes[0], sb.nodes[-1])
                vals = vals - np.interp(s, sb.nodes, psi_nodes)
            c[off:off + xs.size] = vals
        return c

    def embed(self, g_nodes):
        """Coefficients of a continuous x-P1 function given at the interior global nodes."""
        return self.E @ np.asarray(g_nodes, dtype=float)

    def evaluate(self, coeffs, x):
        return self._basis_at(np.atleast_1d(np.asarray(x, dtype=float))) @ coeffs

    def norm(self, coeffs, which="energy"):
        Q = self.K if which == "energy" else self.M
        return float(math.sqrt(max(coeffs @ Q @ coeffs, 0.0)))


# ---------------------------------------------------------------------------
# Decomposition


@dataclass
class Decomposition:
    f: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    max_orthogonality: float
    pythagoras_gap: float
    residual_energy: float | None = None
    residual_l2: float | None = None

    def to_dict(self):
        return {k: getattr(self, k) for k in ("max_orthogonality", "pythagoras_gap", "residual_energy", "residual_l2")}


def discrete_decompose(mesh: GalerkinMesh, f, h1_part=None, coeffs=None) -> Decomposition:
    """``E_α``-orthogonal projection of ``f`` onto the discrete ``H^1``.

    Parameters
    ----------
    mesh : GalerkinMesh
    f : ExtensionFunction or None
        Function to decompose (ignored when ``coeffs`` is given).
    h1_part : ExtensionFunction, optional
        Known ``H^1`` component; the residuals compare ``f1`` with its
        interpolant (zero when omitted, i.e. ``f`` is expected in ``G_α``).
    coeffs : ndarray, optional
        Coefficients of ``f`` in the mesh basis.
    """
    fh = mesh.interpolate(f) if coeffs is None else np.asarray(coeffs, dtype=float)
    E, K = mesh.E, mesh.K
    lhs = E.T @ K @ E
    rhs = E.T @ K @ fh
    try:
        c = scipy.linalg.solve(lhs, rhs, assume_a="pos")
    except np.linalg.LinAlgError as exc:  # pragma: no cover - signals a broken invariant
        raise ConfigError(f"singular projection system: {exc}") from exc
    f1 = E @ c
    f2 = fh - f1
    orth = float(np.max(np.abs(E.T @ K @ f2))) if f2.size else 0.0
    total = fh @ K @ fh
    gap = abs(total - f1 @ K @ f1 - f2 @ K @ f2)
    ref = mesh.interpolate(h1_part) if h1_part is not None else np.zeros_like(fh)
    r = f1 - ref
    return Decomposition(fh, f1, f2, orth, float(gap), mesh.norm(r), mesh.norm(r, "l2"))


ROUNDOFF = 1e-10


def convergence_report(ext, f, n_list=(50, 100, 200, 400), h1_part=None, window=16.0, required=(),
                       s_cells=None, grading=3.0):
    """Residuals of the discrete decomposition over nested meshes."""
    n_list = [int(n) for n in n_list]
    if any(b != 2 * a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("mesh family must double the cell count at every level (nested meshes)")
    rows = []
    prev = None
    for level, n in enumerate(n_list):
        mesh = GalerkinMesh(ext, n, window, s_cells, required, grading)
        if prev is not None and not np.all(np.isin(prev, mesh.x_nodes)):
            raise ConfigError("meshes are not nested")
        prev = mesh.x_nodes
        d = discrete_decompose(mesh, f, h1_part)
        rows.append({
            "level": level,
            "N": n,
            "dofs": mesh.N,
            "residual_energy": d.residual_energy,
            "residual_l2": d.residual_l2,
            "max_orthogonality": d.max_orthogonality,
            "pythagoras_gap": d.pythagoras_gap,
            "energy_f": float(d.f @ mesh.K @ d.f),
        })
    res = np.array([r["residual_energy"] for r in rows])
    # residuals at this level are round-off: f already lies in the discrete space
    floor = ROUNDOFF * np.maximum(1.0, np.array([r["energy_f"] for r in rows]))
    resolved = res <= floor
    strictly = bool(np.all(np.diff(res) < 0))
    converged = bool(np.all((np.diff(res) < 0) | (resolved[1:] & resolved[:-1])))
    order = None
    if res.size >= 2 and np.all(res[-2:] > floor[-2:]):
        order = float(np.log2(res[-2] / res[-1]))
    return {"rows": rows, "strictly_decreasing": strictly, "converged": converged,
            "exact": bool(np.all(resolved)), "observed_order": order}
