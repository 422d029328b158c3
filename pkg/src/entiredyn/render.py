"""Viewport classification, Fatou-component labeling and image output."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from .dynamics import ATTRACTED, ESCAPED, ESCAPE_RADIUS, UNDECIDED, classify_points, fates_from_arrays

FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class Viewport:
    center: complex
    width: float
    nx: int
    ny: int

    def __post_init__(self):
        if not self.width > 0 or self.nx < 1 or self.ny < 1:
            raise ValueError("viewport needs positive width and resolution")
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def square(cls, center, width, n):
        return cls(center, width, n, n)

    @property
    def pixel(self) -> float:
        return self.width / self.nx

    @property
    def height(self) -> float:
        return self.pixel * self.ny

    def xs(self):
        return self.center.real + (np.arange(self.nx) - (self.nx - 1) / 2) * self.pixel

    def ys(self):
        # top row first
        return self.center.imag + ((self.ny - 1) / 2 - np.arange(self.ny)) * self.pixel

    def grid(self):
        return self.xs()[None, :] + 1j * self.ys()[:, None]

    def to_z(self, i, j) -> complex:
        h = self.pixel
        return complex(self.center.real + (j - (self.nx - 1) / 2) * h,
                       self.center.imag + ((self.ny - 1) / 2 - i) * h)

    def index_of(self, z):
        """(row, col) of the pixel whose cell contains z, or None outside."""
        z = complex(z)
        h = self.pixel
        j = int(np.floor((z.real - self.center.real) / h + self.nx / 2))
        i = int(np.floor((self.center.imag - z.imag) / h + self.ny / 2))
        if 0 <= i < self.ny and 0 <= j < self.nx:
            return i, j
        return None

    def scaled(self, factor: float) -> "Viewport":
        """Same pixel size, ``factor`` times the extent."""
        return Viewport(self.center, self.width * factor,
                        int(round(self.nx * factor)), int(round(self.ny * factor)))

    def to_json(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "width": self.width,
                "resolution": [self.nx, self.ny]}


@dataclass
class Component:
    id: int
    cycle_id: int
    pixel_count: int
    bbox: tuple          # (row0, col0, row1, col1), inclusive
    touches_frame: bool
    diameter: float

    def to_json(self) -> dict:
        return {"id": self.id, "cycle_id": self.cycle_id, "pixel_count": self.pixel_count,
                "bounding_box": list(self.bbox), "touches_frame": self.touches_frame,
                "diameter_estimate": self.diameter}


@dataclass
class ClassificationGrid:
    viewport: Viewport
    status: np.ndarray
    cycle: np.ndarray
    steps: np.ndarray
    component_ids: np.ndarray
    components: list
    max_iter: int
    label_parity: bool = False

    @property
    def fates(self):
        """Object array of PointFate, shaped like the image."""
        flat = fates_from_arrays(self.status.ravel(), self.cycle.ravel(),
                                 self.steps.ravel(), self.max_iter)
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(self.status.shape)

    def fate_at(self, z):
        ij = self.viewport.index_of(z)
        if ij is None:
            return None
        return fates_from_arrays([self.status[ij]], [self.cycle[ij]], [self.steps[ij]], self.max_iter)[0]

    def component_at(self, z):
        ij = self.viewport.index_of(z)
        if ij is None or self.component_ids[ij] < 0:
            return None
        return self.components[int(self.component_ids[ij])]

    def basin_fractions(self) -> dict:
        """Attracted pixels per cycle as a fraction of decided pixels."""
        decided = int(np.count_nonzero(self.status != UNDECIDED))
        if decided == 0:
            return {}
        cyc = self.cycle[self.status == ATTRACTED]
        ids, counts = np.unique(cyc, return_counts=True)
        return {int(c): n / decided for c, n in zip(ids, counts)}

    def survey_json(self) -> dict:
        return {"viewport": self.viewport.to_json(), "metric": "euclidean",
                "components": [c.to_json() for c in self.components]}


# --------------------------------------------------------------------------
# classification

def _tiles(ny, nx, tile):
    for i0 in range(0, ny, tile):
        for j0 in range(0, nx, tile):
            yield i0, min(i0 + tile, ny), j0, min(j0 + tile, nx)


def classify_grid(f, cycles, viewport: Viewport, max_iter: int = 1000,
                  escape_radius: float = ESCAPE_RADIUS, threads: int | None = None,
                  tile: int | None = None, label_parity: bool = False,
                  backend=None) -> ClassificationGrid:
    """Classify every pixel centre, then label 4-connected basin components.

    ``tile=None`` runs one serial batch; otherwise square tiles are farmed out
    to a thread pool (the compiled kernel releases the GIL).  Every pixel is
    computed independently, so the result does not depend on the tiling.
    """
    z = viewport.grid()
    ny, nx = z.shape
    status = np.empty((ny, nx), np.int8)
    cycle = np.empty((ny, nx), np.int32)
    steps = np.empty((ny, nx), np.int32)

    def work(box):
        i0, i1, j0, j1 = box
        s, c, t = classify_points(f, cycles, z[i0:i1, j0:j1], max_iter, escape_radius, backend)
        shape = (i1 - i0, j1 - j0)
        status[i0:i1, j0:j1] = s.reshape(shape)
        cycle[i0:i1, j0:j1] = c.reshape(shape)
        steps[i0:i1, j0:j1] = t.reshape(shape)

    if tile is None:
        work((0, ny, 0, nx))
    else:
        n = threads or os.cpu_count() or 1
        with ThreadPoolExecutor(max_workers=n) as pool:
            list(pool.map(work, _tiles(ny, nx, int(tile))))
    ids, comps = label_components(status, cycle, steps, viewport, label_parity)
    return ClassificationGrid(viewport, status, cycle, steps, ids, comps, max_iter, label_parity)


def canonical_labels(labels):
    """Renumber labels >= 0 by first appearance in row-major order."""
    flat = labels.ravel()
    mask = flat >= 0
    uniq, first = np.unique(flat[mask], return_index=True)
    order = uniq[np.argsort(first, kind="stable")]
    remap = np.full(int(flat.max(initial=-1)) + 2, -1, np.int32)
    remap[order] = np.arange(len(order), dtype=np.int32)
    out = np.where(mask, remap[np.where(mask, flat, -1)], -1)
    return out.reshape(labels.shape).astype(np.int32)


def _diameter(rows, cols, h):
    pts = np.column_stack([cols, rows]).astype(float)
    if len(pts) > 3:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            # collinear: the extreme points along the line suffice
            k = np.lexsort((pts[:, 1], pts[:, 0]))
            pts = pts[[k[0], k[-1]]]
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d * d).sum(-1)).max()) * h


def label_components(status, cycle, steps, viewport: Viewport, label_parity=False):
    """4-connected labeling of attracted pixels with equal cycle id (and parity)."""
    ny, nx = status.shape
    labels = np.full((ny, nx), -1, np.int64)
    attracted = status == ATTRACTED
    key = np.where(attracted, cycle.astype(np.int64) * 2, -1)
    if label_parity:
        key = np.where(attracted, key + (steps & 1), -1)
    offset = 0
    for k in np.unique(key[attracted]):
        lab, n = ndimage.label(key == k, structure=FOUR)
        labels = np.where(lab > 0, lab - 1 + offset, labels)
        offset += n
    ids = canonical_labels(labels)
    comps = []
    if offset == 0:
        return ids, comps
    h = viewport.pixel
    slices = ndimage.find_objects(ids + 1)
    flat = ids.ravel()
    order = np.argsort(flat, kind="stable")
    counts = np.bincount(flat[flat >= 0])
    start = int(np.count_nonzero(flat < 0))
    for cid, sl in enumerate(slices):
        idx = order[start:start + counts[cid]]
        start += counts[cid]
        rows, cols = np.divmod(idx, nx)
        r0, r1 = sl[0].start, sl[0].stop - 1
        c0, c1 = sl[1].start, sl[1].stop - 1
        comps.append(Component(
            id=cid, cycle_id=int(cycle.flat[idx[0]]), pixel_count=int(counts[cid]),
            bbox=(r0, c0, r1, c1),
            touches_frame=bool(r0 == 0 or c0 == 0 or r1 == ny - 1 or c1 == nx - 1),
            diameter=_diameter(rows, cols, h),
        ))
    return ids, comps


def diameter_survey(grid: ClassificationGrid, r_in: float, r_out: float):
    """Components meeting both |z| <= r_in + h and |z| >= r_out - h (h = one pixel)."""
    if not grid.components:
        return []
    h = grid.viewport.pixel
    mod = np.abs(grid.viewport.grid())
    ids = grid.component_ids
    inner = set(np.unique(ids[(mod <= r_in + h) & (ids >= 0)]).tolist())
    outer = set(np.unique(ids[(mod >= r_out - h) & (ids >= 0)]).tolist())
    return [grid.components[k] for k in sorted(inner & outer)]


def unbounded_evidence(f, cycles, viewport: Viewport, z, max_iter=1000,
                       escape_radius=ESCAPE_RADIUS, threads=None):
    """Heuristic unboundedness test for the component through z.

    True only if that component touches the frame both in ``viewport`` and in
    the viewport of twice the width; None if z is not in a labeled component.
    """
    verdicts = []
    for vp in (viewport, viewport.scaled(2.0)):
        g = classify_grid(f, cycles, vp, max_iter, escape_radius, threads=threads,
                          tile=128 if threads != 1 else None)
        comp = g.component_at(z)
        if comp is None:
            return None
        verdicts.append(comp.touches_frame)
    return all(verdicts)


# --------------------------------------------------------------------------
# colouring and output

BASIN_COLORS = (
    ((255, 255, 255), (211, 211, 211)),
    ((170, 200, 240), (120, 160, 220)),
    ((250, 210, 160), (225, 170, 110)),
    ((190, 235, 180), (140, 200, 130)),
)


@dataclass(frozen=True)
class Palette:
    """Colour by (cycle id, landing-time parity); escaped and undecided separately."""
    basins: tuple = BASIN_COLORS
    escaped: tuple = (90, 90, 90)
    undecided: tuple = (0, 0, 0)

    def basin(self, cycle_id: int, parity: int):
        return self.basins[cycle_id % len(self.basins)][parity]

    def to_json(self) -> dict:
        return {"basins": [list(map(list, b)) for b in self.basins],
                "escaped": list(self.escaped), "undecided": list(self.undecided)}

    @classmethod
    def from_json(cls, obj: dict) -> "Palette":
        base = cls()
        basins = obj.get("basins")
        return cls(
            basins=tuple(tuple(tuple(c) for c in b) for b in basins) if basins else base.basins,
            escaped=tuple(obj.get("escaped", base.escaped)),
            undecided=tuple(obj.get("undecided", base.undecided)),
        )


@dataclass
class ImageBuffer:
    pixels: np.ndarray  # (ny, nx, 3) uint8
    palette: Palette = field(default_factory=Palette)

    @property
    def nx(self) -> int:
        return self.pixels.shape[1]

    @property
    def ny(self) -> int:
        return self.pixels.shape[0]


def render(grid: ClassificationGrid, palette: Palette | None = None) -> ImageBuffer:
    palette = palette or Palette()
    ny, nx = grid.status.shape
    img = np.empty((ny, nx, 3), np.uint8)
    img[:] = palette.undecided
    img[grid.status == ESCAPED] = palette.escaped
    att = grid.status == ATTRACTED
    parity = grid.steps & 1
    for cid in np.unique(grid.cycle[att]):
        for par in (0, 1):
            img[att & (grid.cycle == cid) & (parity == par)] = palette.basin(int(cid), par)
    return ImageBuffer(img, palette)


def ppm_bytes(img: ImageBuffer) -> bytes:
    header = b"P6\n%d %d\n255\n" % (img.nx, img.ny)
    return header + np.ascontiguousarray(img.pixels, np.uint8).tobytes()


def write_image(img: ImageBuffer, path, png: bool = False) -> None:
    """Binary PPM (P6), top row first.  ``png=True`` also writes path.png via Pillow."""
    path = os.fspath(path)
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(img))
    if png:
        from PIL import Image

        Image.fromarray(img.pixels, "RGB").save(os.path.splitext(path)[0] + ".png")


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P6" or int(tokens[3]) != 255:
        raise ValueError("not an 8-bit P6 file")
    nx, ny = int(tokens[1]), int(tokens[2])
    pos += 1
    return np.frombuffer(data[pos:pos + 3 * nx * ny], np.uint8).reshape(ny, nx, 3).copy()
