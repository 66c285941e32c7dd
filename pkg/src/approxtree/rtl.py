"""Combinational netlist construction and Verilog text generation.

A quantized tree becomes a fully parallel circuit: one hardwired
comparator per internal node, one AND term per root-to-leaf path (one-hot
leaf selection), and an OR-encoded class output bus. Each feature enters
on a bus sized to the widest precision any comparator applies to it; a
narrower comparator reads the top bits of that bus, which is exactly the
floor-quantization at its own precision.

eval_netlist interprets the same structure in software so emitted designs
can be equivalence-checked against quantized inference before shipping.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InternalError
from .quantizer import QuantizedTree, quantize_feature

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Comparator:
    node_id: int
    feature: int
    precision: int
    threshold: int  # hardwired integer constant


@dataclass(frozen=True)
class LeafTerm:
    leaf_id: int
    class_label: int
    # (node_id, take_left): take_left selects the comparator output,
    # otherwise its complement
    path: tuple[tuple[int, bool], ...]


@dataclass(frozen=True)
class Netlist:
    feature_bits: dict[int, int]  # feature index -> input bus width
    comparators: tuple[Comparator, ...]
    leaf_terms: tuple[LeafTerm, ...]
    class_count: int

    @property
    def out_bits(self) -> int:
        return max(1, (self.class_count - 1).bit_length())


def build_netlist(qtree: QuantizedTree) -> Netlist:
    tree = qtree.tree
    comparators = []
    feature_bits: dict[int, int] = {}
    for i in tree.split_ids:
        node = tree.nodes[i]
        p = qtree.precisions[i]
        comparators.append(
            Comparator(
                node_id=i, feature=node.feature, precision=p,
                threshold=qtree.int_thresholds[i],
            )
        )
        feature_bits[node.feature] = max(feature_bits.get(node.feature, 0), p)

    leaf_terms = []

    def walk(i: int, path: tuple[tuple[int, bool], ...]):
        node = tree.nodes[i]
        if node.kind == "leaf":
            leaf_terms.append(LeafTerm(leaf_id=i, class_label=node.label, path=path))
            return
        walk(node.left, path + ((i, True),))
        walk(node.right, path + ((i, False),))

    walk(tree.root, ())

    if tree.class_count > 1 << max(1, (tree.class_count - 1).bit_length()):
        raise InternalError("class count exceeds output bus capacity")

    return Netlist(
        feature_bits=dict(sorted(feature_bits.items())),
        comparators=tuple(comparators),
        leaf_terms=tuple(leaf_terms),
        class_count=tree.class_count,
    )


def _comparator_values(net: Netlist, sample) -> dict[int, bool]:
    sample = np.asarray(sample, dtype=np.float64)
    values = {}
    for cmp in net.comparators:
        if cmp.feature >= sample.shape[0]:
            raise InputError(
                f"sample has {sample.shape[0]} features, comparator reads {cmp.feature}"
            )
        bus = net.feature_bits[cmp.feature]
        code = quantize_feature(sample[cmp.feature], bus)
        values[cmp.node_id] = (code >> (bus - cmp.precision)) <= cmp.threshold
    return values


def eval_netlist(net: Netlist, sample) -> int:
    """Software interpretation of the circuit; must match quantized inference."""
    cmp_vals = _comparator_values(net, sample)
    out = 0
    hot = 0
    for term in net.leaf_terms:
        sel = all(cmp_vals[nid] == take_left for nid, take_left in term.path)
        if sel:
            hot += 1
            out |= term.class_label  # OR-encoded output bus
    if hot != 1:
        raise InternalError(f"leaf selection is not one-hot ({hot} terms active)")
    return out


def check_equivalence(net: Netlist, qtree: QuantizedTree, X) -> int:
    """Return the number of samples where netlist and quantized tree disagree."""
    from .quantizer import predict_quantized

    mismatches = 0
    for row in np.asarray(X, dtype=np.float64):
        if eval_netlist(net, row) != predict_quantized(qtree, row):
            mismatches += 1
    return mismatches


def emit_verilog(net: Netlist, module_name: str) -> str:
    """Render the netlist as one synthesizable combinational module.

    Output is byte-stable for a given netlist: fixed ordering, fixed
    naming (cmp_<nodeid>, sel_<leafid>), LF line endings.
    """
    if not _IDENT.match(module_name):
        raise InputError(f"invalid Verilog module name: {module_name!r}")

    w = net.out_bits
    lines = []
    lines.append(f"module {module_name} (")
    ports = [
        f"    input  wire [{bits - 1}:0] f{feat},"
        for feat, bits in net.feature_bits.items()
    ]
    ports.append(f"    output wire [{w - 1}:0] class_out")
    lines.extend(ports)
    lines.append(");")
    lines.append("")

    for cmp in net.comparators:
        bus = net.feature_bits[cmp.feature]
        hi = bus - 1
        lo = bus - cmp.precision
        literal = f"{cmp.precision}'b{cmp.threshold:0{cmp.precision}b}"
        lines.append(
            f"    wire cmp_{cmp.node_id} = f{cmp.feature}[{hi}:{lo}] <= {literal};"
        )
    if net.comparators:
        lines.append("")

    for term in net.leaf_terms:
        if term.path:
            expr = " & ".join(
                (f"cmp_{nid}" if take_left else f"~cmp_{nid}")
                for nid, take_left in term.path
            )
        else:
            expr = "1'b1"  # single-leaf tree: always selected
        lines.append(f"    wire sel_{term.leaf_id} = {expr};")
    lines.append("")

    for bit in range(w):
        sources = [
            f"sel_{term.leaf_id}"
            for term in net.leaf_terms
            if term.class_label >> bit & 1
        ]
        expr = " | ".join(sources) if sources else "1'b0"
        lines.append(f"    assign class_out[{bit}] = {expr};")

    lines.append("")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"
