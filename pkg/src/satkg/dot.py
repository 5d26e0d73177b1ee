"""Graphviz DOT rendering of a class taxonomy."""

from __future__ import annotations

from .core import Ontology


def export_dot(ont: Ontology, name: str = "taxonomy") -> str:
    """One node per class, one edge per direct subclass link, sorted output."""
    lines = [f"digraph {name} {{", "    rankdir=BT;"]
    for cls in sorted(ont.classes):
        lines.append(f'    "{cls}";')
    for cls in sorted(ont.classes):
        for parent in sorted(ont.classes[cls].parents):
            lines.append(f'    "{cls}" -> "{parent}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
