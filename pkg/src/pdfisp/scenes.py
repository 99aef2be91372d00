"""Parametric scenes and their rasterization into ground-truth contrast grids.

A scene is an ordered list of dielectric shapes (disks, annuli, polygons);
later shapes overwrite earlier ones where they overlap. Rasterization uses a
cell-center membership test, matching the pulse-basis forward discretization:
a pixel belongs to a shape iff its center lies inside the shape.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import ComplexGrid, GridGeometry


class SceneError(ValueError):
    """Raised for nonphysical or malformed scenes."""


@dataclass(frozen=True)
class Shape:
    """One dielectric shape.

    kind is 'disk' (center, radius), 'annulus' (center, r_inner, r_outer) or
    'polygon' (vertices, an (n, 2) array). eps_r is the complex relative
    permittivity; Re{eps_r} >= 1 for a physical dielectric.
    """

    kind: str
    eps_r: complex
    center: tuple[float, float] | None = None
    radius: float | None = None
    r_inner: float | None = None
    r_outer: float | None = None
    vertices: tuple[tuple[float, float], ...] | None = None

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership of (n, 2) points (boundary counts as inside)."""
        if self.kind == "disk":
            d2 = ((points - np.asarray(self.center)) ** 2).sum(axis=1)
            return d2 <= self.radius ** 2
        if self.kind == "annulus":
            d2 = ((points - np.asarray(self.center)) ** 2).sum(axis=1)
            return (d2 >= self.r_inner ** 2) & (d2 <= self.r_outer ** 2)
        if self.kind == "polygon":
            return _points_in_polygon(points, np.asarray(self.vertices, dtype=float))
        raise SceneError(f"unknown shape kind {self.kind!r}")


def _points_in_polygon(points: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Even-odd ray casting, vectorized over points."""
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        # x-coordinate where the edge crosses the horizontal ray through y
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < np.where(crosses, xc, np.inf))
    return inside


@dataclass(frozen=True)
class Scene:
    shapes: tuple[Shape, ...] = field(default_factory=tuple)

    def validate(self) -> "Scene":
        for s in self.shapes:
            if complex(s.eps_r).real < 1.0:
                raise SceneError("every shape needs Re{eps_r} >= 1 (physical dielectric)")
        return self


def rasterize(scene: Scene, grid: GridGeometry) -> ComplexGrid:
    """Paint the scene onto the grid as a contrast image chi = eps_r - 1.

    Background contrast is zero; shapes are applied in order, later ones
    overwriting earlier ones at overlapping pixels.
    """
    scene.validate()
    chi = np.zeros(grid.n_cells, dtype=np.complex128)
    for shape in scene.shapes:
        mask = shape.contains(grid.centers)
        chi[mask] = complex(shape.eps_r) - 1.0
    return ComplexGrid(values=chi.reshape(grid.m1, grid.m2), cell_size=grid.cell_size)


# ----------------------------------------------------------------------
# Presets


def austria_preset(eps_r: complex, scale: float = 1.0, doi_side: float = 1.5,
                   margin: float = 1.5 / 64) -> Scene:
    """Two disks over a large annulus: the classic three-component benchmark.

    The layout (disks of radius 0.2*s at (+-0.3*s, 0.6*s), annulus at
    (0, -0.2*s) with radii 0.3*s / 0.6*s) spans 1.6*s vertically, so s is
    sized to fit the domain with a one-cell margin at scale=1; `scale`
    shrinks or grows everything proportionally.
    """
    s = scale * (doi_side / 2.0 - margin) / 0.8
    return Scene(shapes=(
        Shape(kind="disk", eps_r=eps_r, center=(-0.3 * s, 0.6 * s), radius=0.2 * s),
        Shape(kind="disk", eps_r=eps_r, center=(0.3 * s, 0.6 * s), radius=0.2 * s),
        Shape(kind="annulus", eps_r=eps_r, center=(0.0, -0.2 * s), r_inner=0.3 * s,
              r_outer=0.6 * s),
    )).validate()


def builtin_scene(name: str, eps_r: complex = 2.0, scale: float = 1.0) -> Scene:
    """Named preset scenes.

    'austria' is the three-component benchmark. 'case1'..'case4' are
    progressively harder layouts: a polygonal target, overlapping cylinders
    of differing permittivity, a concave U-shaped target, and a mixed scene.
    Their geometries are illustrative presets, not measured objects.
    """
    e = complex(eps_r)
    if name == "austria":
        return austria_preset(e, scale=scale)
    if name == "case1":  # rotated star-like polygon
        t = np.linspace(0, 2 * np.pi, 11)[:-1]
        r = np.where(np.arange(10) % 2 == 0, 0.55, 0.25) * scale
        verts = tuple((float(r[i] * np.cos(t[i])), float(r[i] * np.sin(t[i]))) for i in range(10))
        return Scene(shapes=(Shape(kind="polygon", eps_r=e, vertices=verts),)).validate()
    if name == "case2":  # overlapping cylinders, two permittivities
        return Scene(shapes=(
            Shape(kind="disk", eps_r=e, center=(-0.15 * scale, 0.0), radius=0.3 * scale),
            Shape(kind="disk", eps_r=1.0 + 0.5 * (e - 1.0), center=(0.2 * scale, 0.1 * scale),
                  radius=0.25 * scale),
        )).validate()
    if name == "case3":  # concave U-shaped target
        w, h, t = 0.5 * scale, 0.5 * scale, 0.15 * scale
        verts = ((-w, -h), (w, -h), (w, h), (w - t, h), (w - t, -h + t),
                 (-w + t, -h + t), (-w + t, h), (-w, h))
        return Scene(shapes=(Shape(kind="polygon", eps_r=e, vertices=verts),)).validate()
    if name == "case4":  # mixed: annulus + bar + small disk
        bar = ((-0.55 * scale, 0.45 * scale), (0.55 * scale, 0.45 * scale),
               (0.55 * scale, 0.6 * scale), (-0.55 * scale, 0.6 * scale))
        return Scene(shapes=(
            Shape(kind="annulus", eps_r=e, center=(0.0, -0.15 * scale), r_inner=0.18 * scale,
                  r_outer=0.38 * scale),
            Shape(kind="polygon", eps_r=1.0 + 0.5 * (e - 1.0), vertices=bar),
            Shape(kind="disk", eps_r=e, center=(0.55 * scale, -0.45 * scale), radius=0.12 * scale),
        )).validate()
    raise SceneError(f"unknown preset scene {name!r}")


# ----------------------------------------------------------------------
# JSON round trip


def scene_to_dict(scene: Scene) -> dict:
    out = []
    for s in scene.shapes:
        d: dict = {"kind": s.kind, "eps_r": [complex(s.eps_r).real, complex(s.eps_r).imag]}
        if s.kind == "disk":
            d.update(center=list(s.center), radius=s.radius)
        elif s.kind == "annulus":
            d.update(center=list(s.center), r_inner=s.r_inner, r_outer=s.r_outer)
        elif s.kind == "polygon":
            d.update(vertices=[list(v) for v in s.vertices])
        out.append(d)
    return {"shapes": out}


def scene_from_dict(d: dict) -> Scene:
    shapes = []
    for sd in d.get("shapes", []):
        kind = sd["kind"]
        re_im = sd["eps_r"]
        eps = complex(re_im[0], re_im[1]) if isinstance(re_im, (list, tuple)) else complex(re_im)
        if kind == "disk":
            shapes.append(Shape(kind=kind, eps_r=eps, center=tuple(sd["center"]),
                                radius=float(sd["radius"])))
        elif kind == "annulus":
            shapes.append(Shape(kind=kind, eps_r=eps, center=tuple(sd["center"]),
                                r_inner=float(sd["r_inner"]), r_outer=float(sd["r_outer"])))
        elif kind == "polygon":
            shapes.append(Shape(kind=kind, eps_r=eps,
                                vertices=tuple(tuple(v) for v in sd["vertices"])))
        else:
            raise SceneError(f"unknown shape kind {kind!r}")
    return Scene(shapes=tuple(shapes)).validate()


def save_scene(path, scene: Scene) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return scene_from_dict(json.load(fh))


def resolve_scene(spec: str) -> Scene:
    """Turn a CLI scene argument into a Scene.

    Accepts a JSON file path, or a preset spec 'name:eps_r[:scale]' such as
    'austria:2' or 'case3:5:0.8'.
    """
    if ":" in spec and not spec.lower().endswith(".json"):
        parts = spec.split(":")
        name = parts[0]
        eps = complex(parts[1]) if len(parts) > 1 else 2.0
        scale = float(parts[2]) if len(parts) > 2 else 1.0
        return builtin_scene(name, eps_r=eps, scale=scale)
    return load_scene(spec)
