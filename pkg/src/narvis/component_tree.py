"""Hierarchical clustering of visual primitives into an editable component tree.

Primitives are grouped by, in order: their original group/class signature,
their element type, and their visual appearance (fill, stroke, shape class).
Subtree roots are the selectable visual-unit candidates; author edits
(split/merge/remove/rename) produce new tree values and never lose
primitives (removed ones land in a top-level holding node).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import NarvisError
from .svg_ingest import VisualPrimitive

REMOVED_NODE_ID = "removed"


class EmptyInput(NarvisError):
    code = "empty_input"


class UnknownNode(NarvisError):
    code = "unknown_node"


class InvalidPartition(NarvisError):
    code = "invalid_partition"


class NotSiblings(NarvisError):
    code = "not_siblings"


class NestedSelection(NarvisError):
    code = "nested_selection"


class InvalidEdit(NarvisError):
    code = "invalid_edit"


class InvalidSelection(NarvisError):
    code = "invalid_selection"


class DuplicateLabel(NarvisError):
    code = "duplicate_label"


@dataclass(frozen=True)
class ClusterNode:
    node_id: str
    label: str
    basis: str  # group | class | element_type | appearance | manual
    children: tuple["ClusterNode", ...] = ()
    primitive_ids: tuple[str, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaf_ids(self) -> list[str]:
        if self.is_leaf:
            return list(self.primitive_ids)
        out: list[str] = []
        for child in self.children:
            out.extend(child.leaf_ids())
        return out


@dataclass(frozen=True)
class ComponentTree:
    root: ClusterNode
    doc_id: str

    def find(self, node_id: str) -> ClusterNode | None:
        return _find(self.root, node_id)

    def all_nodes(self) -> list[ClusterNode]:
        out: list[ClusterNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out


@dataclass(frozen=True)
class VisualUnit:
    unit_id: str
    name: str
    primitive_ids: tuple[str, ...]
    source_node: str


def _find(node: ClusterNode, node_id: str) -> ClusterNode | None:
    if node.node_id == node_id:
        return node
    for child in node.children:
        hit = _find(child, node_id)
        if hit:
            return hit
    return None


# ---------------------------------------------------------------------------
# building

def build_tree(primitives: list[VisualPrimitive], doc_id: str = "doc") -> ComponentTree:
    """Cluster primitives into the three-level tree; deterministic for a fixed list."""
    if not primitives:
        raise EmptyInput("no primitives to cluster")

    def next_id() -> str:
        return ""  # assigned in preorder after collapsing

    def appearance_sig(p: VisualPrimitive) -> tuple[str, str, str]:
        return (p.channels.fill, p.channels.stroke, p.channels.shape_class)

    def by_appearance(prims: list[VisualPrimitive]) -> list[ClusterNode]:
        buckets = _bucket(prims, appearance_sig)
        if len(buckets) == 1:
            sig, members = next(iter(buckets.items()))
            return [ClusterNode(next_id(), _appearance_label(sig, buckets), "appearance",
                                (), tuple(p.id for p in members))]
        return [ClusterNode(next_id(), _appearance_label(sig, buckets), "appearance",
                            (), tuple(p.id for p in members))
                for sig, members in buckets.items()]

    def by_type(prims: list[VisualPrimitive]) -> list[ClusterNode]:
        buckets = _bucket(prims, lambda p: p.element_type)
        nodes = []
        for etype, members in buckets.items():
            nodes.append(ClusterNode(next_id(), etype, "element_type",
                                     tuple(by_appearance(members))))
        return nodes

    has_sig = any(p.group_chain or p.css_classes for p in primitives)
    root_children: list[ClusterNode] = []
    if has_sig:
        def group_sig(p: VisualPrimitive):
            if p.group_chain or p.css_classes:
                return (p.group_chain, p.css_classes)
            return None
        buckets = _bucket(primitives, group_sig)
        labels: set[str] = set()
        for sig, members in buckets.items():
            if sig is None:
                label, basis = "ungrouped", "group"
            else:
                chain, classes = sig
                label = "/".join(chain) if chain else "." + ".".join(classes)
                basis = "group" if chain else "class"
            label = _dedupe_label(label, labels)
            labels.add(label)
            root_children.append(ClusterNode(next_id(), label, basis,
                                             tuple(by_type(members))))
    else:
        root_children = by_type(primitives)

    root = ClusterNode(next_id(), "all", "group", tuple(root_children))
    root = _renumber(_collapse(root), iter(range(10 ** 9)))
    return ComponentTree(root, doc_id)


def _renumber(node: ClusterNode, counter) -> ClusterNode:
    node = replace(node, node_id=f"n{next(counter)}")
    if node.is_leaf:
        return node
    return replace(node, children=tuple(_renumber(c, counter) for c in node.children))


def _bucket(items, key):
    buckets: dict = {}
    for item in items:
        buckets.setdefault(key(item), []).append(item)
    return buckets


def _appearance_label(sig: tuple[str, str, str], buckets: dict) -> str:
    # label only with the components that actually differ between siblings
    varying = [i for i in range(3) if len({s[i] for s in buckets}) > 1]
    if not varying:
        return sig[2]
    names = ("fill", "stroke", "shape")
    return " ".join(f"{names[i]}:{sig[i]}" for i in varying)


def _dedupe_label(label: str, taken: set[str]) -> str:
    if label not in taken:
        return label
    i = 2
    while f"{label} ({i})" in taken:
        i += 1
    return f"{label} ({i})"


def _collapse(node: ClusterNode) -> ClusterNode:
    """Collapse single-child chains.

    The surviving node keeps the deepest label in the chain, except that a
    group/class name always wins over the generic type/appearance labels
    below it: sibling labels must stay unique and author-meaningful.
    """
    if node.is_leaf:
        return node
    children = tuple(_collapse(c) for c in node.children)
    if len(children) == 1:
        merged = children[0]
        if node.basis in ("group", "class") and merged.basis not in ("group", "class"):
            return replace(merged, label=node.label, basis=node.basis,
                           node_id=node.node_id)
        return merged
    return replace(node, children=children)


# ---------------------------------------------------------------------------
# edits

@dataclass(frozen=True)
class SplitEdit:
    node_id: str
    partition: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class MergeEdit:
    node_ids: tuple[str, ...]
    new_label: str


@dataclass(frozen=True)
class RemoveEdit:
    node_id: str


@dataclass(frozen=True)
class RenameEdit:
    node_id: str
    label: str


TreeEdit = SplitEdit | MergeEdit | RemoveEdit | RenameEdit


def edit_tree(tree: ComponentTree, edit: TreeEdit) -> ComponentTree:
    """Apply one author edit, returning a new tree; primitives are never lost."""
    if isinstance(edit, SplitEdit):
        return _split(tree, edit)
    if isinstance(edit, MergeEdit):
        return _merge(tree, edit)
    if isinstance(edit, RemoveEdit):
        return _remove(tree, edit)
    if isinstance(edit, RenameEdit):
        return _rename(tree, edit)
    raise InvalidEdit(f"unknown edit type {type(edit).__name__}")


def _next_node_id(tree: ComponentTree) -> int:
    best = -1
    for node in tree.all_nodes():
        if node.node_id.startswith("n") and node.node_id[1:].isdigit():
            best = max(best, int(node.node_id[1:]))
    return best + 1


def _rewrite(node: ClusterNode, target_id: str, fn) -> ClusterNode | None:
    """Replace the target node via fn (fn may return None to detach it)."""
    if node.node_id == target_id:
        return fn(node)
    if node.is_leaf:
        return node
    changed = False
    new_children = []
    for child in node.children:
        replacement = _rewrite(child, target_id, fn)
        if replacement is not child:
            changed = True
        if replacement is not None:
            new_children.append(replacement)
    if not changed:
        return node
    if not new_children:
        # internal node emptied out: prune it (callers re-check the root)
        return None
    return replace(node, children=tuple(new_children))


def _require(tree: ComponentTree, node_id: str) -> ClusterNode:
    node = tree.find(node_id)
    if node is None:
        raise UnknownNode(f"node {node_id!r} not in tree")
    return node


def _split(tree: ComponentTree, edit: SplitEdit) -> ComponentTree:
    node = _require(tree, edit.node_id)
    have = node.leaf_ids()
    flat = [pid for part in edit.partition for pid in part]
    if len(edit.partition) < 2 or any(not part for part in edit.partition):
        raise InvalidPartition("partition needs at least two nonempty parts")
    if sorted(flat) != sorted(have) or len(flat) != len(set(flat)):
        raise InvalidPartition("partition must cover the node's primitive ids exactly")
    base = _next_node_id(tree)
    parts = tuple(
        ClusterNode(f"n{base + i}", f"{node.label} {i + 1}", "manual", (), tuple(part))
        for i, part in enumerate(edit.partition)
    )

    def apply(n: ClusterNode) -> ClusterNode:
        return replace(n, basis="manual", children=parts, primitive_ids=())

    return replace(tree, root=_rewrite(tree.root, edit.node_id, apply))


def _merge(tree: ComponentTree, edit: MergeEdit) -> ComponentTree:
    if len(edit.node_ids) < 2:
        raise NotSiblings("merge needs at least two nodes")
    nodes = [_require(tree, nid) for nid in edit.node_ids]
    parent = _parent_of(tree.root, edit.node_ids[0])
    if parent is None:
        raise NotSiblings("cannot merge the root")
    sibling_ids = {c.node_id for c in parent.children}
    if not all(nid in sibling_ids for nid in edit.node_ids):
        raise NotSiblings("merge nodes must share a parent")
    merged_ids: list[str] = []
    for n in nodes:
        merged_ids.extend(n.leaf_ids())
    merged = ClusterNode(f"n{_next_node_id(tree)}", edit.new_label, "manual",
                         (), tuple(merged_ids))
    drop = set(edit.node_ids)

    def apply(p: ClusterNode) -> ClusterNode:
        new_children = []
        placed = False
        for child in p.children:
            if child.node_id in drop:
                if not placed:
                    new_children.append(merged)
                    placed = True
                continue
            new_children.append(child)
        return replace(p, children=tuple(new_children))

    return replace(tree, root=_rewrite(tree.root, parent.node_id, apply))


def _remove(tree: ComponentTree, edit: RemoveEdit) -> ComponentTree:
    node = _require(tree, edit.node_id)
    if node.node_id == tree.root.node_id:
        raise InvalidEdit("cannot remove the root")
    if node.node_id == REMOVED_NODE_ID:
        raise InvalidEdit("cannot remove the holding node")
    detached = node.leaf_ids()
    root = _rewrite(tree.root, edit.node_id, lambda n: None)
    if root is None:
        raise InvalidEdit("edit would empty the tree")
    holder = _find(root, REMOVED_NODE_ID)
    if holder is None:
        holder = ClusterNode(REMOVED_NODE_ID, "removed", "manual", (), tuple(detached))
        root = replace(root, children=root.children + (holder,))
    else:
        updated = replace(holder, primitive_ids=holder.primitive_ids + tuple(detached))
        root = _rewrite(root, REMOVED_NODE_ID, lambda n: updated)
    return replace(tree, root=root)


def _rename(tree: ComponentTree, edit: RenameEdit) -> ComponentTree:
    node = _require(tree, edit.node_id)
    parent = _parent_of(tree.root, edit.node_id)
    if parent is not None:
        for sib in parent.children:
            if sib.node_id != edit.node_id and sib.label == edit.label:
                raise DuplicateLabel(f"sibling already labeled {edit.label!r}")

    def apply(n: ClusterNode) -> ClusterNode:
        return replace(n, label=edit.label, basis="manual")

    return replace(tree, root=_rewrite(tree.root, edit.node_id, apply))


def _parent_of(node: ClusterNode, child_id: str) -> ClusterNode | None:
    for child in node.children:
        if child.node_id == child_id:
            return node
        hit = _parent_of(child, child_id)
        if hit:
            return hit
    return None


# ---------------------------------------------------------------------------
# selection

def descendants_of(tree: ComponentTree, node_id: str) -> list[str]:
    """Leaf primitive ids under a node; exactly what select_units would take."""
    return _require(tree, node_id).leaf_ids()


def select_units(tree: ComponentTree, selections: list[tuple[str, str]]) -> list[VisualUnit]:
    """Materialize selected subtree roots as visual units, in the order given."""
    nodes = []
    for node_id, name in selections:
        if node_id == REMOVED_NODE_ID:
            raise InvalidSelection("the removed holder cannot become a unit")
        nodes.append((_require(tree, node_id), name))
    chosen = {node.node_id for node, _ in nodes}
    for node, _ in nodes:
        for other_id in chosen:
            if other_id != node.node_id and _find(node, other_id) is not None:
                raise NestedSelection(
                    f"{other_id!r} is a descendant of selected node {node.node_id!r}")
    units = []
    for i, (node, name) in enumerate(nodes):
        units.append(VisualUnit(
            unit_id=f"u{i}",
            name=name or node.label,
            primitive_ids=tuple(node.leaf_ids()),
            source_node=node.node_id,
        ))
    return units


# ---------------------------------------------------------------------------
# JSON

def node_to_json(node: ClusterNode) -> dict:
    return {
        "node_id": node.node_id,
        "label": node.label,
        "basis": node.basis,
        "children": [node_to_json(c) for c in node.children],
        "primitive_ids": list(node.primitive_ids),
    }


def node_from_json(data: dict) -> ClusterNode:
    return ClusterNode(
        node_id=data["node_id"],
        label=data["label"],
        basis=data["basis"],
        children=tuple(node_from_json(c) for c in data.get("children", [])),
        primitive_ids=tuple(data.get("primitive_ids", [])),
    )


def tree_to_json(tree: ComponentTree) -> dict:
    return {"doc_id": tree.doc_id, "root": node_to_json(tree.root)}


def tree_from_json(data: dict) -> ComponentTree:
    return ComponentTree(node_from_json(data["root"]), data["doc_id"])


def units_to_json(units: list[VisualUnit]) -> list[dict]:
    return [{"unit_id": u.unit_id, "name": u.name,
             "primitive_ids": list(u.primitive_ids), "source_node": u.source_node}
            for u in units]


def units_from_json(data: list[dict]) -> list[VisualUnit]:
    return [VisualUnit(u["unit_id"], u["name"], tuple(u["primitive_ids"]), u["source_node"])
            for u in data]
