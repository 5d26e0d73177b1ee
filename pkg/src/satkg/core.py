"""In-memory schema (T-box) and assertion (A-box) store.

Classes form an acyclic subsumption graph (a DAG, multiple parents allowed).
Properties relate instances to other instances (object properties) or to typed
literals (data properties).  A store holds instances and assertions over one
ontology; after population it is treated as frozen and is safe to read from
many threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Iterable, Iterator, Optional, Union

from .errors import (
    CycleDetected,
    DuplicateTerm,
    FunctionalViolation,
    RestrictionViolation,
    TypeMismatch,
    UnknownParent,
    UnknownTerm,
)


class TermKind(Enum):
    CLASS = "class"
    OBJECT_PROPERTY = "object_property"
    DATA_PROPERTY = "data_property"
    INSTANCE = "instance"


# Schema terms follow the camel-case-with-underscores convention; instance
# names come from catalog data and additionally allow characters such as
# '-', '.' or '(' (e.g. satellite names), but never whitespace.
_SCHEMA_NAME = re.compile(r"[A-Za-z0-9_]+\Z")
_INSTANCE_NAME = re.compile(r"\S+\Z")


@dataclass(frozen=True)
class TermId:
    name: str
    kind: TermKind

    def __post_init__(self) -> None:
        pattern = _INSTANCE_NAME if self.kind is TermKind.INSTANCE else _SCHEMA_NAME
        if not pattern.match(self.name):
            raise ValueError(f"invalid term name {self.name!r} for kind {self.kind.value}")

    def __str__(self) -> str:
        return self.name


def class_term(name: str) -> TermId:
    return TermId(name, TermKind.CLASS)


def instance_term(name: str) -> TermId:
    return TermId(name, TermKind.INSTANCE)


#: Built-in relation typing an instance with a class.  It is not part of any
#: ontology's property table and is accepted by every store.
INSTANCE_OF = TermId("instance_of", TermKind.OBJECT_PROPERTY)

LiteralValue = Union[Decimal, int, str, date]


@dataclass(frozen=True)
class Literal:
    value: LiteralValue
    unit: Optional[str] = None

    def __str__(self) -> str:
        if self.unit:
            return f"{self.value} {self.unit}"
        return str(self.value)


@dataclass(frozen=True)
class NumericRestriction:
    lower: Optional[Decimal] = None
    upper: Optional[Decimal] = None
    lower_inclusive: bool = True
    upper_inclusive: bool = True
    #: Accept values equal to the upper bound but raise a warning for them
    #: (boundary cases such as an eccentricity of exactly 1).
    warn_at_upper: bool = False

    def __post_init__(self) -> None:
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    def allows(self, value: Union[Decimal, int]) -> bool:
        if self.lower is not None:
            if value < self.lower or (value == self.lower and not self.lower_inclusive):
                return False
        if self.upper is not None:
            if value > self.upper or (value == self.upper and not self.upper_inclusive):
                return False
        return True

    def warns(self, value: Union[Decimal, int]) -> bool:
        return (
            self.warn_at_upper
            and self.upper is not None
            and self.upper_inclusive
            and value == self.upper
        )


_DATATYPE_BASES = ("decimal", "integer", "string", "date")
_NUMERIC_BASES = ("decimal", "integer")


@dataclass(frozen=True)
class DatatypeSpec:
    base: str = "decimal"
    unit: Optional[str] = None
    restriction: Optional[NumericRestriction] = None

    def __post_init__(self) -> None:
        if self.base not in _DATATYPE_BASES:
            raise ValueError(f"unknown datatype base {self.base!r}")
        if self.restriction is not None and self.base not in _NUMERIC_BASES:
            raise ValueError("numeric restriction on a non-numeric datatype")

    def coerce(self, value: LiteralValue) -> LiteralValue:
        """Return ``value`` adjusted to this datatype, or raise TypeMismatch."""
        if isinstance(value, bool):
            raise TypeMismatch(f"boolean literal not valid for {self.base} datatype")
        if self.base == "decimal":
            if isinstance(value, Decimal):
                return value
            if isinstance(value, int):
                return Decimal(value)
            if isinstance(value, float):
                return Decimal(str(value))
        elif self.base == "integer":
            if isinstance(value, int):
                return value
        elif self.base == "string":
            if isinstance(value, str):
                return value
        elif self.base == "date":
            if isinstance(value, date):
                return value
        raise TypeMismatch(f"value {value!r} not valid for {self.base} datatype")


@dataclass(frozen=True)
class ClassDef:
    name: str
    parents: frozenset[str] = frozenset()
    definition: Optional[str] = None

    @property
    def id(self) -> TermId:
        return TermId(self.name, TermKind.CLASS)


@dataclass(frozen=True)
class PropertyDef:
    name: str
    kind: TermKind
    domain: frozenset[str] = frozenset()
    range_classes: frozenset[str] = frozenset()
    datatype: Optional[DatatypeSpec] = None
    functional: bool = False

    def __post_init__(self) -> None:
        if self.kind is TermKind.OBJECT_PROPERTY and self.datatype is not None:
            raise ValueError("object property carries no datatype")
        if self.kind is TermKind.DATA_PROPERTY and self.datatype is None:
            raise ValueError("data property needs exactly one datatype")

    @property
    def id(self) -> TermId:
        return TermId(self.name, self.kind)


@dataclass(frozen=True)
class Assertion:
    subject: TermId
    predicate: TermId
    object: Union[TermId, Literal]

    def __str__(self) -> str:
        return f"({self.subject} {self.predicate} {self.object})"


class Ontology:
    """Named classes and properties with an acyclic subsumption graph."""

    def __init__(self) -> None:
        self.classes: dict[str, ClassDef] = {}
        self.properties: dict[str, PropertyDef] = {}
        # alias name -> canonical name (classes or properties)
        self.aliases: dict[str, str] = {}

    # -------------------------------------------------------------- schema

    def define_class(
        self,
        name: str,
        parents: Iterable[str] = (),
        definition: Optional[str] = None,
    ) -> ClassDef:
        TermId(name, TermKind.CLASS)  # charset check
        if name in self.classes or name in self.aliases:
            raise DuplicateTerm(f"class {name!r} already defined")
        parent_set = frozenset(parents)
        for p in parent_set:
            if p not in self.classes:
                raise UnknownParent(f"parent class {p!r} of {name!r} not defined")
        cdef = ClassDef(name, parent_set, definition)
        self.classes[name] = cdef
        return cdef

    def add_parent(self, child: str, parent: str) -> None:
        """Add a subsumption edge, rejecting edges that would close a cycle."""
        if child not in self.classes:
            raise UnknownTerm(f"class {child!r} not defined")
        if parent not in self.classes:
            raise UnknownParent(f"parent class {parent!r} not defined")
        if child == parent or self.is_subclass_of(parent, child):
            raise CycleDetected(f"edge {child!r} -> {parent!r} would create a subsumption cycle")
        old = self.classes[child]
        self.classes[child] = ClassDef(old.name, old.parents | {parent}, old.definition)

    def define_object_property(
        self,
        name: str,
        domain: Iterable[str],
        range_classes: Iterable[str],
        functional: bool = False,
    ) -> PropertyDef:
        self._check_new_property(name)
        dom = frozenset(domain)
        rng = frozenset(range_classes)
        for c in dom | rng:
            if c not in self.classes:
                raise UnknownTerm(f"domain/range class {c!r} of {name!r} not defined")
        pdef = PropertyDef(name, TermKind.OBJECT_PROPERTY, dom, rng, None, functional)
        self.properties[name] = pdef
        return pdef

    def define_data_property(
        self,
        name: str,
        domain: Iterable[str],
        datatype: DatatypeSpec,
        functional: bool = False,
    ) -> PropertyDef:
        self._check_new_property(name)
        dom = frozenset(domain)
        for c in dom:
            if c not in self.classes:
                raise UnknownTerm(f"domain class {c!r} of {name!r} not defined")
        pdef = PropertyDef(name, TermKind.DATA_PROPERTY, dom, frozenset(), datatype, functional)
        self.properties[name] = pdef
        return pdef

    def define_alias(self, alias: str, target: str) -> None:
        TermId(alias, TermKind.CLASS)  # charset check; kind irrelevant here
        if alias in self.classes or alias in self.properties or alias in self.aliases:
            raise DuplicateTerm(f"alias {alias!r} collides with an existing term")
        if target not in self.classes and target not in self.properties:
            raise UnknownTerm(f"alias target {target!r} not defined")
        self.aliases[alias] = target

    def _check_new_property(self, name: str) -> None:
        TermId(name, TermKind.OBJECT_PROPERTY)  # charset check
        if name in self.properties or name in self.aliases:
            raise DuplicateTerm(f"property {name!r} already defined")

    # -------------------------------------------------------------- lookup

    def canonical_name(self, name: str) -> str:
        return self.aliases.get(name, name)

    def has_class(self, name: str) -> bool:
        return self.canonical_name(name) in self.classes

    def has_property(self, name: str) -> bool:
        return self.canonical_name(name) in self.properties

    def cls(self, name: str) -> ClassDef:
        canonical = self.canonical_name(name)
        try:
            return self.classes[canonical]
        except KeyError:
            raise UnknownTerm(f"class {name!r} not defined") from None

    def prop(self, name: str) -> PropertyDef:
        canonical = self.canonical_name(name)
        try:
            return self.properties[canonical]
        except KeyError:
            raise UnknownTerm(f"property {name!r} not defined") from None

    # ---------------------------------------------------------- subsumption

    def is_subclass_of(self, sub: str, sup: str) -> bool:
        """Reflexive-transitive subsumption over the class graph."""
        sub = self.cls(sub).name
        sup = self.cls(sup).name
        if sub == sup:
            return True
        seen = {sub}
        frontier = [sub]
        while frontier:
            nxt = []
            for name in frontier:
                for parent in self.classes[name].parents:
                    if parent == sup:
                        return True
                    if parent not in seen:
                        seen.add(parent)
                        nxt.append(parent)
            frontier = nxt
        return False

    def ancestors(self, name: str) -> list[str]:
        """Strict superclasses ordered nearest-first (breadth-first levels)."""
        start = self.cls(name).name
        out: list[str] = []
        seen = {start}
        frontier = [start]
        while frontier:
            level: set[str] = set()
            for n in frontier:
                level.update(p for p in self.classes[n].parents if p not in seen)
            frontier = sorted(level)
            seen.update(level)
            out.extend(frontier)
        return out

    def subclasses_of(self, name: str) -> set[str]:
        """The class itself plus every strict descendant."""
        root = self.cls(name).name
        out = {root}
        changed = True
        while changed:
            changed = False
            for cdef in self.classes.values():
                if cdef.name not in out and cdef.parents & out:
                    out.add(cdef.name)
                    changed = True
        return out

    # -------------------------------------------------------------- misc

    def copy(self) -> "Ontology":
        dup = Ontology()
        dup.classes = dict(self.classes)
        dup.properties = dict(self.properties)
        dup.aliases = dict(self.aliases)
        return dup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return (
            self.classes == other.classes
            and self.properties == other.properties
            and self.aliases == other.aliases
        )

    def __repr__(self) -> str:
        return f"<Ontology {len(self.classes)} classes, {len(self.properties)} properties>"


class InstanceStore:
    """Instances and assertions over one ontology.

    Mutated by exactly one writer during population; reads afterwards are
    side-effect free.  Duplicate assertions are silently collapsed, so adding
    the same fact twice leaves the store unchanged.
    """

    def __init__(self, ontology: Ontology):
        self.ontology = ontology
        self._instances: dict[str, TermId] = {}
        self._assertions: list[Assertion] = []
        self._assertion_set: set[Assertion] = set()
        self._types: dict[str, list[str]] = {}
        self._by_predicate: dict[str, list[Assertion]] = {}
        self._by_subject: dict[str, list[Assertion]] = {}
        #: Non-fatal messages produced while adding assertions (e.g. values
        #: sitting exactly on a warned numeric bound).
        self.warnings: list[str] = []
        #: Filled by the classifier when a computed type contradicts an
        #: asserted one; consumed by validation.
        self.rule_conflicts: list = []

    # ------------------------------------------------------------ instances

    def add_instance(self, name: str) -> TermId:
        term = self._instances.get(name)
        if term is None:
            term = TermId(name, TermKind.INSTANCE)
            self._instances[name] = term
        return term

    def has_instance(self, name: str) -> bool:
        return name in self._instances

    def instance(self, name: str) -> TermId:
        try:
            return self._instances[name]
        except KeyError:
            raise UnknownTerm(f"instance {name!r} not in store") from None

    @property
    def instances(self) -> list[TermId]:
        return list(self._instances.values())

    # ----------------------------------------------------------- assertions

    def add(self, assertion: Assertion) -> bool:
        """Validate and store one assertion; return True when newly added."""
        subject = assertion.subject
        if subject.kind is not TermKind.INSTANCE or subject.name not in self._instances:
            raise UnknownTerm(f"assertion subject {subject.name!r} is not a store instance")

        predicate = assertion.predicate
        obj = assertion.object
        if predicate.name == INSTANCE_OF.name:
            predicate = INSTANCE_OF
            if not isinstance(obj, TermId) or obj.kind is not TermKind.CLASS:
                raise TypeMismatch("instance_of expects a class object")
            obj = self.ontology.cls(obj.name).id
        else:
            pdef = self.ontology.prop(predicate.name)
            predicate = pdef.id
            if pdef.kind is TermKind.OBJECT_PROPERTY:
                if not isinstance(obj, TermId) or obj.kind is not TermKind.INSTANCE:
                    raise TypeMismatch(
                        f"object property {pdef.name!r} expects an instance object, got {obj!r}"
                    )
                if obj.name not in self._instances:
                    raise UnknownTerm(f"assertion object {obj.name!r} is not a store instance")
            else:
                if not isinstance(obj, Literal):
                    raise TypeMismatch(
                        f"data property {pdef.name!r} expects a literal object, got {obj!r}"
                    )
                obj = self._check_literal(pdef, subject, obj)

        normalized = Assertion(subject, predicate, obj)
        if normalized in self._assertion_set:
            return False
        self._check_functional(normalized)
        self._assertions.append(normalized)
        self._assertion_set.add(normalized)
        self._by_predicate.setdefault(predicate.name, []).append(normalized)
        self._by_subject.setdefault(subject.name, []).append(normalized)
        if predicate.name == INSTANCE_OF.name:
            types = self._types.setdefault(subject.name, [])
            if normalized.object.name not in types:  # type: ignore[union-attr]
                types.append(normalized.object.name)  # type: ignore[union-attr]
        return True

    def assert_fact(
        self,
        subject: Union[str, TermId],
        predicate: Union[str, TermId],
        obj: Union[str, TermId, Literal, LiteralValue],
    ) -> bool:
        """Convenience wrapper around :meth:`add` accepting plain names.

        A string object names an instance for object properties and
        ``instance_of``, and is taken as a string literal for data
        properties; other scalars become literals.
        """
        sterm = self.instance(subject) if isinstance(subject, str) else subject
        pname = predicate if isinstance(predicate, str) else predicate.name
        if pname == INSTANCE_OF.name:
            pterm = INSTANCE_OF
            oterm: Union[TermId, Literal]
            if isinstance(obj, str):
                oterm = class_term(obj)
            elif isinstance(obj, TermId):
                oterm = obj
            else:
                raise TypeMismatch("instance_of expects a class name")
        else:
            pdef = self.ontology.prop(pname)
            pterm = pdef.id
            if isinstance(obj, (TermId, Literal)):
                oterm = obj
            elif pdef.kind is TermKind.OBJECT_PROPERTY:
                if not isinstance(obj, str):
                    raise TypeMismatch(f"object property {pname!r} expects an instance name")
                oterm = self.instance(obj)
            else:
                oterm = Literal(obj)  # type: ignore[arg-type]
        return self.add(Assertion(sterm, pterm, oterm))

    def _check_literal(self, pdef: PropertyDef, subject: TermId, literal: Literal) -> Literal:
        spec = pdef.datatype
        assert spec is not None
        value = spec.coerce(literal.value)
        unit = literal.unit
        if unit is None:
            unit = spec.unit
        elif spec.unit is not None and unit != spec.unit:
            raise TypeMismatch(
                f"unit {unit!r} does not match declared unit {spec.unit!r} of {pdef.name!r}"
            )
        if spec.restriction is not None:
            if not spec.restriction.allows(value):  # type: ignore[arg-type]
                raise RestrictionViolation(
                    f"value {value} of {pdef.name!r} on {subject.name!r} outside permitted range"
                )
            if spec.restriction.warns(value):  # type: ignore[arg-type]
                self.warnings.append(
                    f"{subject.name}: {pdef.name} = {value} sits on the permitted boundary"
                )
        return Literal(value, unit)

    def _check_functional(self, assertion: Assertion) -> None:
        if assertion.predicate.name == INSTANCE_OF.name:
            return
        pdef = self.ontology.prop(assertion.predicate.name)
        if not pdef.functional:
            return
        for existing in self._by_subject.get(assertion.subject.name, ()):
            if existing.predicate.name == assertion.predicate.name:
                raise FunctionalViolation(
                    f"{pdef.name!r} is functional; {assertion.subject.name!r} already has a value"
                )

    # --------------------------------------------------------------- access

    def assertions(self) -> Iterator[Assertion]:
        return iter(self._assertions)

    @property
    def assertion_count(self) -> int:
        return len(self._assertions)

    def assertions_with_predicate(self, name: str) -> list[Assertion]:
        return self._by_predicate.get(self.ontology.canonical_name(name), [])

    def assertions_about(self, subject: str) -> list[Assertion]:
        return self._by_subject.get(subject, [])

    def types_of(self, name: str) -> list[str]:
        """Directly asserted classes of an instance."""
        return list(self._types.get(name, ()))

    def all_types_of(self, name: str) -> set[str]:
        """Asserted classes closed under subsumption."""
        out: set[str] = set()
        for t in self._types.get(name, ()):
            out.add(t)
            out.update(self.ontology.ancestors(t))
        return out

    def object_values(self, subject: str, predicate: str) -> list[Union[TermId, Literal]]:
        canonical = self.ontology.canonical_name(predicate)
        return [
            a.object
            for a in self._by_subject.get(subject, ())
            if a.predicate.name == canonical
        ]

    # ----------------------------------------------------------------- misc

    def copy(self) -> "InstanceStore":
        dup = InstanceStore(self.ontology)
        dup._instances = dict(self._instances)
        dup._assertions = list(self._assertions)
        dup._assertion_set = set(self._assertion_set)
        dup._types = {k: list(v) for k, v in self._types.items()}
        dup._by_predicate = {k: list(v) for k, v in self._by_predicate.items()}
        dup._by_subject = {k: list(v) for k, v in self._by_subject.items()}
        dup.warnings = list(self.warnings)
        dup.rule_conflicts = list(self.rule_conflicts)
        return dup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InstanceStore):
            return NotImplemented
        return (
            self.ontology == other.ontology
            and set(self._instances) == set(other._instances)
            and self._assertion_set == other._assertion_set
        )

    def __repr__(self) -> str:
        return (
            f"<InstanceStore {len(self._instances)} instances, "
            f"{len(self._assertions)} assertions>"
        )


def lexical_form(value: LiteralValue) -> str:
    """Canonical text form of a literal value, stable across round trips."""
    if isinstance(value, Decimal):
        text = str(value)
        if "E" in text or "e" in text:
            text = format(value, "f")
        return text
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def parse_decimal(text: str) -> Decimal:
    try:
        return Decimal(text)
    except InvalidOperation as exc:
        raise ValueError(f"not a decimal: {text!r}") from exc
