"""Proof certificates: an ordered tree of checked steps.

The status of a certificate is derived from its steps, never stored:
a failing step makes it Failed, an undecided one Unknown, and any
ExternalAssumption anywhere in the tree turns Verified into
VerifiedWithAssumptions. Theorem citations do not lower the status.
"""
from dataclasses import dataclass, field
from enum import Enum

from .lattice import Obstruction, gram_determinant


class NodeKind(Enum):
    ENUMERATION_EMPTY = "EnumerationEmpty"
    CLASSES_FOUND = "ClassesFound"
    DIVISIBILITY_RULED_OUT = "DivisibilityRuledOut"
    INEQUALITY_CHECKED = "InequalityChecked"
    QUADRATIC_ARGUMENT = "QuadraticArgument"
    SYMBOLIC_CHECK = "SymbolicCheck"
    CLASSIFICATION = "Classification"
    EXTERNAL_ASSUMPTION = "ExternalAssumption"
    THEOREM_CITATION = "TheoremCitation"
    SUB_CERTIFICATE = "SubCertificate"


class Status(Enum):
    VERIFIED = "Verified"
    VERIFIED_WITH_ASSUMPTIONS = "VerifiedWithAssumptions"
    FAILED = "Failed"
    UNKNOWN = "Unknown"


@dataclass
class Step:
    kind: NodeKind
    statement: str
    ok: bool = True
    decided: bool = True
    data: dict = field(default_factory=dict)
    child: "Certificate" = None

    def to_dict(self):
        out = {"kind": self.kind.value, "statement": self.statement, "ok": self.ok}
        if not self.decided:
            out["decided"] = False
        if self.data:
            out["data"] = self.data
        if self.child is not None:
            out["certificate"] = self.child.to_dict()
        return out


def query_data(lattice, result):
    """JSON-ready description of an enumeration and its search box."""
    q = result.query
    pairings = []
    for c in q.pairings:
        entry = {"anchor": lattice.describe(c.anchor), "relation": c.relation.value, "value": c.value}
        if c.upper is not None:
            entry["upper"] = c.upper
        pairings.append(entry)
    data = {
        "query": {
            "self_intersection": q.self_intersection,
            "pairings": pairings,
            "primitive_only": q.primitive_only,
            "exclude": [lattice.describe(x) for x in q.exclude],
        },
        "bound": {
            "lower": list(result.completeness_bound.lower),
            "upper": list(result.completeness_bound.upper),
        },
        "nodes": result.stats.get("nodes", 0),
        "solutions": [lattice.describe(x) for x in result.solutions],
    }
    if result.pairing_bound is not None:
        data["pairing_bound"] = result.pairing_bound
    return data


class Certificate:
    def __init__(self, claim_id, params=None):
        """Init.

        Args:
            claim_id (str): what is being certified, e.g. "Claim3.7"
            params (LatticeFamilyParams, optional): family the steps refer to
        """
        self.claim_id = claim_id
        self.params = params
        self.steps = []

    def __repr__(self):
        return "Certificate(%s, %s, %d steps)" % (self.claim_id, self.status.value, len(self.steps))

    @property
    def status(self):
        statuses = [step.child.status for step in self.steps if step.child is not None]
        if any(not step.ok for step in self.steps) or Status.FAILED in statuses:
            return Status.FAILED
        if any(not step.decided for step in self.steps) or Status.UNKNOWN in statuses:
            return Status.UNKNOWN
        if self.has_assumptions():
            return Status.VERIFIED_WITH_ASSUMPTIONS
        return Status.VERIFIED

    def has_assumptions(self):
        for step in self.steps:
            if step.kind == NodeKind.EXTERNAL_ASSUMPTION:
                return True
            if step.child is not None and step.child.has_assumptions():
                return True
        return False

    def walk(self):
        """Depth-first iteration over (certificate, step) pairs."""
        for step in self.steps:
            yield self, step
            if step.child is not None:
                yield from step.child.walk()

    def first_failure(self):
        """Statement of the first violated or undecided step, or None."""
        for _, step in self.walk():
            if not step.ok or not step.decided:
                return step.statement
        return None

    def add(self, kind, statement, ok=True, decided=True, **data):
        step = Step(kind, statement, bool(ok), bool(decided), data)
        self.steps.append(step)
        return step

    def enumeration(self, statement, lattice, result, expect_empty=True):
        """Record an enumeration; ok when emptiness matches the expectation."""
        kind = NodeKind.ENUMERATION_EMPTY if result.is_empty() else NodeKind.CLASSES_FOUND
        ok = result.is_empty() == expect_empty if expect_empty is not None else True
        return self.add(kind, statement, ok, **query_data(lattice, result))

    def divisibility(self, statement, lattice, prescribed, expect=Obstruction.RULED_OUT):
        """Replay "disc L divides disc(vs)" for a prescribed Gram matrix."""
        outcome = lattice.divisibility_obstruction(prescribed)
        value = gram_determinant(prescribed)
        return self.add(
            NodeKind.DIVISIBILITY_RULED_OUT,
            statement,
            outcome == expect,
            gram=[list(row) for row in prescribed],
            value=value,
            disc=lattice.disc,
            outcome=outcome.value,
        )

    def inequality(self, statement, lhs, rhs, expected=None, relation=">="):
        """Exact integer comparison; `expected` pins lhs to a printed value."""
        lhs, rhs = int(lhs), int(rhs)
        holds = {">=": lhs >= rhs, ">": lhs > rhs, "==": lhs == rhs}[relation]
        data = {"lhs": lhs, "rhs": rhs, "relation": relation}
        if expected is not None:
            data["expected"] = int(expected)
            holds = holds and lhs == int(expected)
        return self.add(NodeKind.INEQUALITY_CHECKED, statement, holds, **data)

    def assumption(self, quote, consequence=None):
        data = {"quote": quote}
        if consequence is not None:
            data["consequence"] = consequence
        return self.add(NodeKind.EXTERNAL_ASSUMPTION, "assumed: %s" % quote, **data)

    def cite(self, reference, statement):
        return self.add(NodeKind.THEOREM_CITATION, statement, reference=reference)

    def sub(self, certificate, statement=None):
        step = Step(
            NodeKind.SUB_CERTIFICATE,
            statement or certificate.claim_id,
            child=certificate,
        )
        self.steps.append(step)
        return step

    def to_dict(self):
        out = {"claim_id": self.claim_id, "status": self.status.value}
        if self.params is not None:
            out["params"] = self.params.to_dict()
        failure = self.first_failure()
        if failure is not None:
            out["failure"] = failure
        out["steps"] = [step.to_dict() for step in self.steps]
        return out
