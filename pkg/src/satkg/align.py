"""Applying term mappings between the local catalog schema and the reference
vocabulary.

Two deployment patterns are supported:

* term mapping: :func:`apply_mapping` annotates existing instances with the
  reference classes their local classes map to, merging the reference
  vocabulary into the store's ontology;
* reference-as-schema: :func:`build_bridged_ontology` yields a combined
  ontology where each mapped local class sits beneath its reference class,
  so data can be loaded directly against the reference vocabulary.
"""

from __future__ import annotations

from typing import Optional

from .core import InstanceStore, Ontology
from .errors import DanglingMapping
from .schema import (
    MappingEntry,
    ModelingMode,
    build_mapping,
    build_ssao_core,
    build_ucsso,
)


def merge_ontologies(base: Ontology, extra: Ontology) -> Ontology:
    """Union of two ontologies; same-named classes merge by uniting parents."""
    merged = base.copy()
    # Insert extra classes in dependency order so parents always exist.
    pending = sorted(extra.classes)
    while pending:
        progressed = []
        for name in pending:
            parents = extra.classes[name].parents
            if all(p in merged.classes or p not in extra.classes for p in parents):
                progressed.append(name)
        if not progressed:  # only reachable with a malformed extra ontology
            raise DanglingMapping(f"cannot order classes {pending!r} for merge")
        for name in progressed:
            cdef = extra.classes[name]
            if name in merged.classes:
                for parent in sorted(cdef.parents):
                    if parent not in merged.classes[name].parents:
                        merged.add_parent(name, parent)
            else:
                merged.define_class(name, sorted(cdef.parents), cdef.definition)
        pending = [n for n in pending if n not in progressed]
    for name in sorted(extra.properties):
        if name not in merged.properties:
            merged.properties[name] = extra.properties[name]
    for alias, target in sorted(extra.aliases.items()):
        if alias not in merged.aliases:
            merged.aliases[alias] = target
    return merged


def apply_mapping(
    store: InstanceStore,
    entries: list[MappingEntry],
    reference: Optional[Ontology] = None,
) -> InstanceStore:
    """Add reference-class typing for every instance of a mapped local class.

    Monotone: only typing assertions are added; local assertions are left
    untouched.  The reference vocabulary is merged into the result's
    ontology so the new classes are queryable.
    """
    if reference is None:
        reference = build_ssao_core()
    for entry in entries:
        if not store.ontology.has_class(entry.local.name):
            raise DanglingMapping(f"local class {entry.local.name!r} not in store ontology")
        if not reference.has_class(entry.reference.name):
            raise DanglingMapping(
                f"reference class {entry.reference.name!r} not in reference ontology"
            )

    merged = merge_ontologies(store.ontology, reference)
    result = store.copy()
    result.ontology = merged
    for entry in entries:
        for term in store.instances:
            if entry.local.name in store.all_types_of(term.name):
                result.assert_fact(term.name, "instance_of", entry.reference.name)
    return result


def build_bridged_ontology(
    mode: ModelingMode,
    entries: Optional[list[MappingEntry]] = None,
) -> Ontology:
    """Catalog schema joined to the reference vocabulary by subclass bridges.

    Equivalences are bridged one-directionally (local beneath reference) to
    keep the subsumption graph acyclic; instance data is local-typed, so the
    downward direction is never consulted.
    """
    if entries is None:
        entries = build_mapping()
    merged = merge_ontologies(build_ucsso(mode), build_ssao_core())
    for entry in entries:
        if entry.local.name == entry.reference.name:
            continue
        if entry.reference.name not in merged.classes[entry.local.name].parents:
            merged.add_parent(entry.local.name, entry.reference.name)
    return merged
