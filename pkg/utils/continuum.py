"""
Continuum: равномерные кубические комплексы.

Единичный d-куб делится k раз пополам по каждой оси (2^k клеток на ось);
активные (белые) клетки задаются мультииндексами с 1. Черные клетки -
дополнение вместе с внешней рамкой толщиной в одну клетку. Белые клетки
связны по общей грани размерности d-1, черные - по любой общей вершине;
при такой паре связностей в размерности 2 отношение смежности - дерево.
"""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import networkx as nx
import numpy as np
from scipy import ndimage

from utils.errors import ContinuumError, NotATreeError

logger = logging.getLogger(__name__)

WHITE = "w"
BLACK = "b"


@dataclass(frozen=True)
class CubicalComplex:
    dim: int
    resolution: int
    active: frozenset

    def __post_init__(self):
        if self.dim < 1:
            raise ContinuumError(f"размерность должна быть >= 1: {self.dim}")
        if self.resolution < 0:
            raise ContinuumError(f"разрешение должно быть >= 0: {self.resolution}")
        cells = frozenset(tuple(int(i) for i in cell) for cell in self.active)
        for cell in cells:
            self._check_cell(cell)
        object.__setattr__(self, "active", cells)

    @property
    def size(self) -> int:
        return 2 ** self.resolution

    def _check_cell(self, cell: tuple) -> None:
        if len(cell) != self.dim or not all(1 <= i <= self.size for i in cell):
            raise ContinuumError(f"клетка {cell} вне сетки [1, {self.size}]^{self.dim}")

    def to_array(self) -> np.ndarray:
        grid = np.zeros((self.size,) * self.dim, dtype=bool)
        if self.active:
            index = np.array(sorted(self.active)) - 1
            grid[tuple(index.T)] = True
        return grid

    @classmethod
    def from_array(cls, grid: np.ndarray) -> "CubicalComplex":
        grid = np.asarray(grid, dtype=bool)
        side = grid.shape[0]
        if any(s != side for s in grid.shape) or side < 1 or side & (side - 1):
            raise ContinuumError(f"сетка должна быть кубической со стороной 2^k, получено {grid.shape}")
        active = frozenset(tuple(int(i) + 1 for i in idx) for idx in np.argwhere(grid))
        return cls(grid.ndim, side.bit_length() - 1, active)

    @classmethod
    def full(cls, dim: int, resolution: int) -> "CubicalComplex":
        size = 2 ** resolution
        return cls(dim, resolution, frozenset(itertools.product(range(1, size + 1), repeat=dim)))

    def dual(self) -> "CubicalComplex":
        """Черные клетки сетки (без рамки)"""
        return CubicalComplex.from_array(~self.to_array())


def subdivide(c: CubicalComplex) -> CubicalComplex:
    """Каждая активная клетка становится 2^dim активными клетками"""
    grid = c.to_array()
    for axis in range(c.dim):
        grid = grid.repeat(2, axis=axis)
    return CubicalComplex.from_array(grid)


def deactivate(c: CubicalComplex, cells) -> CubicalComplex:
    cells = {tuple(cell) for cell in cells}
    for cell in cells:
        c._check_cell(cell)
    return CubicalComplex(c.dim, c.resolution, c.active - cells)


@dataclass(eq=False)
class ComponentLabeling:
    """Метки компонент на сетке с рамкой; 0 - клетка другого цвета"""
    white: np.ndarray
    black: np.ndarray
    n_white: int
    n_black: int
    border: int


def unite(c: CubicalComplex) -> ComponentLabeling:
    """Белые компоненты по граням, черные по вершинам; рамка - одна черная компонента"""
    padded = np.pad(c.to_array(), 1, constant_values=False)
    white, n_white = ndimage.label(padded, structure=ndimage.generate_binary_structure(c.dim, 1))
    black, _ = ndimage.label(~padded, structure=ndimage.generate_binary_structure(c.dim, c.dim))

    frame = np.ones_like(padded)
    frame[(slice(1, -1),) * c.dim] = False
    frame_labels = np.unique(black[frame])
    on_frame = set(frame_labels.tolist())
    # все метки на рамке сливаются в одну компоненту-границу
    relabel = np.zeros(black.max() + 1, dtype=np.int64)
    others = [label for label in range(1, black.max() + 1) if label not in on_frame]
    relabel[frame_labels] = 1
    for new, label in enumerate(others, start=2):
        relabel[label] = new
    black = relabel[black]
    return ComponentLabeling(white, black, int(n_white), len(others) + 1, 1)


@dataclass(frozen=True)
class AdjacencyRelation:
    """Агрегированная смежность белых и черных компонент"""
    white: tuple
    black: tuple
    edges: frozenset
    border: tuple

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        for node in self.white:
            g.add_node(node, color=WHITE, root=False)
        for node in self.black:
            g.add_node(node, color=BLACK, root=node == self.border)
        g.add_edges_from(self.edges)
        return g


def _shifted(labels: np.ndarray, axis: int, start: bool) -> np.ndarray:
    index = [slice(None)] * labels.ndim
    index[axis] = slice(None, -1) if start else slice(1, None)
    return labels[tuple(index)]


def aggregate_adjacency(labeling: ComponentLabeling) -> AdjacencyRelation:
    pairs = []
    for axis in range(labeling.white.ndim):
        for white, black in (
            (_shifted(labeling.white, axis, True), _shifted(labeling.black, axis, False)),
            (_shifted(labeling.white, axis, False), _shifted(labeling.black, axis, True)),
        ):
            mask = (white > 0) & (black > 0)
            pairs.append(np.stack([white[mask], black[mask]], axis=1))
    found = np.unique(np.concatenate(pairs), axis=0) if pairs else np.empty((0, 2), dtype=np.int64)
    edges = frozenset(((WHITE, int(w)), (BLACK, int(b))) for w, b in found)
    return AdjacencyRelation(
        white=tuple((WHITE, i) for i in range(1, labeling.n_white + 1)),
        black=tuple((BLACK, i) for i in range(1, labeling.n_black + 1)),
        edges=edges,
        border=(BLACK, labeling.border),
    )


@dataclass(frozen=True)
class ComponentTree:
    root: tuple
    children: dict

    def __hash__(self):
        return hash(self.canonical())

    def canonical(self, node: Optional[tuple] = None) -> str:
        """Каноническая строка корневого неупорядоченного дерева"""
        node = self.root if node is None else node
        inner = "".join(sorted(self.canonical(child) for child in self.children.get(node, ())))
        return f"{node[0]}({inner})"

    def depth(self, node: Optional[tuple] = None) -> int:
        node = self.root if node is None else node
        kids = self.children.get(node, ())
        return 1 + max(self.depth(k) for k in kids) if kids else 0

    def size(self) -> int:
        return 1 + sum(len(kids) for kids in self.children.values())


def component_tree(relation: AdjacencyRelation) -> ComponentTree:
    """Дерево с корнем в компоненте-границе; цвета чередуются по глубине"""
    g = relation.graph()
    if not nx.is_tree(g):
        raise NotATreeError(
            f"отношение смежности не является деревом ({g.number_of_nodes()} компонент, {g.number_of_edges()} ребер)"
        )
    children = {}
    for parent, child in nx.bfs_edges(g, relation.border):
        children.setdefault(parent, []).append(child)
    return ComponentTree(relation.border, {node: tuple(kids) for node, kids in children.items()})


def relation_of(c: CubicalComplex) -> AdjacencyRelation:
    return aggregate_adjacency(unite(c))


def similar(c1: CubicalComplex, c2: CubicalComplex) -> bool:
    """Изоморфизм отношений смежности с учетом цвета и корня"""
    r1, r2 = relation_of(c1), relation_of(c2)
    try:
        return component_tree(r1).canonical() == component_tree(r2).canonical()
    except NotATreeError:
        logger.debug("Отношение не дерево, сравнение через изоморфизм графов")
        return nx.is_isomorphic(
            r1.graph(), r2.graph(),
            node_match=lambda a, b: a["color"] == b["color"] and a["root"] == b["root"],
        )


def analyze(c: CubicalComplex) -> dict:
    """Сводка для отчета: компоненты, ребра, каноническое дерево"""
    labeling = unite(c)
    relation = aggregate_adjacency(labeling)
    try:
        tree = component_tree(relation)
        canonical, depth = tree.canonical(), tree.depth()
    except NotATreeError as e:
        logger.warning("Комплекс без дерева компонент: %s", e)
        canonical, depth = None, None
    edges = sorted(f"{w[0]}{w[1]}-{b[0]}{b[1]}" for w, b in relation.edges)
    return {
        "dim": c.dim,
        "resolution": c.resolution,
        "active": len(c.active),
        "white_components": labeling.n_white,
        "black_components": labeling.n_black,
        "edges": edges,
        "tree": canonical,
        "depth": depth,
    }


# --- Ввод ---

def parse_grid(text: str, source: str = "<grid>") -> CubicalComplex:
    """Двумерная сетка: строки из '#' (белая клетка) и '.' (черная)"""
    rows = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if set(line) - {"#", "."}:
            raise ContinuumError(f"{source}:{number}: допустимы только '#' и '.'")
        rows.append([ch == "#" for ch in line])
    if not rows:
        raise ContinuumError(f"{source}: пустая сетка")
    if any(len(row) != len(rows[0]) for row in rows):
        raise ContinuumError(f"{source}: строки разной длины")
    return CubicalComplex.from_array(np.array(rows, dtype=bool))


def complex_from_document(document: dict, source: str = "<document>") -> CubicalComplex:
    try:
        return CubicalComplex(int(document["dim"]), int(document["resolution"]), frozenset(
            tuple(cell) for cell in document["active"]
        ))
    except KeyError as e:
        raise ContinuumError(f"{source}: отсутствует поле {e}") from e
    except (TypeError, ValueError) as e:
        raise ContinuumError(f"{source}: некорректный документ: {e}") from e


def complex_to_document(c: CubicalComplex) -> dict:
    return {"dim": c.dim, "resolution": c.resolution, "active": [list(cell) for cell in sorted(c.active)]}


def load_complex(path) -> CubicalComplex:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise ContinuumError(f"{path}:{e.lineno}: некорректный JSON: {e.msg}") from e
        return complex_from_document(document, str(path))
    return parse_grid(text, str(path))
