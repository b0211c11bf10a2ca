"""Utils for reading queries and writing certificates and reports.
"""
import datetime
import json

from k3lattice.enumerator import ClassQuery, PairingConstraint, Relation
from k3lattice.geometry import PolarizedLattice
from k3lattice.lattice import DivisorClass, IntLattice, LatticeError

INT64_MAX = 2 ** 63 - 1


class InputError(Exception):
    def __init__(self, field, message):
        super().__init__("%s: %s" % (field, message))
        self.field = field


def to_json(value):
    """Convert to JSON-ready data; ints beyond 64 bits become decimal strings.

    Args:
        value: nested dicts, lists, tuples, enums and ints

    Returns:
        JSON-ready copy
    """
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) > INT64_MAX else value
    if isinstance(value, dict):
        return {str(key): to_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json(item) for item in value]
    if hasattr(value, "value"):
        return to_json(value.value)
    if hasattr(value, "to_dict"):
        return to_json(value.to_dict())
    if isinstance(value, DivisorClass):
        return to_json(list(value.coords))
    return str(value)


def read_json(path):
    """Read a JSON document.

    Args:
        path (str): path to file

    Returns:
        dict: document
    """
    try:
        with open(path, "r") as file:
            return json.load(file)
    except OSError as err:
        raise InputError(path, "cannot read file (%s)" % err.strerror)
    except json.JSONDecodeError as err:
        raise InputError(path, "invalid JSON at line %d column %d" % (err.lineno, err.colno))


def write_json(path, data):
    """Write JSON file with sorted keys.

    Args:
        path (str): path to file
        data: JSON-convertible data
    """
    with open(path, "w") as file:
        json.dump(to_json(data), file, indent=2, sort_keys=True)
        file.write("\n")


def read_int(value, field):
    if isinstance(value, bool):
        raise InputError(field, "expected an integer, got %r" % (value,))
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip()
        if text.lstrip("+-").isdigit():
            return int(text)
    raise InputError(field, "expected an integer, got %r" % (value,))


def _require(doc, key, field):
    if not isinstance(doc, dict):
        raise InputError(field, "expected an object")
    if key not in doc:
        raise InputError("%s.%s" % (field, key), "missing")
    return doc[key]


def read_lattice(doc, field="lattice"):
    """Lattice from {"labels": [...], "gram": [[...]]}.

    Args:
        doc (dict): lattice document
        field (str, optional): path used in error messages

    Returns:
        IntLattice: lattice
    """
    gram = _require(doc, "gram", field)
    if not isinstance(gram, list) or not all(isinstance(row, list) for row in gram):
        raise InputError(field + ".gram", "expected a list of rows")
    rows = [
        [read_int(entry, "%s.gram[%d][%d]" % (field, i, j)) for j, entry in enumerate(row)]
        for i, row in enumerate(gram)
    ]
    labels = doc.get("labels")
    if labels is not None and not isinstance(labels, list):
        raise InputError(field + ".labels", "expected a list of strings")
    try:
        return IntLattice(rows, labels=labels)
    except LatticeError as err:
        raise InputError(field, str(err))


def read_class(lattice, doc, field):
    """Class from {"coords": [...]} or a linear expression such as "D - L"."""
    if isinstance(doc, str):
        try:
            return lattice.parse(doc)
        except LatticeError as err:
            raise InputError(field, str(err))
    coords = _require(doc, "coords", field)
    if not isinstance(coords, list):
        raise InputError(field + ".coords", "expected a list of integers")
    if len(coords) != lattice.rank:
        raise InputError(field + ".coords", "expected %d coordinates, got %d" % (lattice.rank, len(coords)))
    return DivisorClass(tuple(read_int(c, "%s.coords[%d]" % (field, i)) for i, c in enumerate(coords)))


def _read_pairing(lattice, doc, field):
    anchor = read_class(lattice, _require(doc, "anchor", field), field + ".anchor")
    relation = _require(doc, "relation", field)
    names = {r.value.lower(): r for r in Relation}
    if not isinstance(relation, str) or relation.lower() not in names:
        raise InputError(field + ".relation", "expected one of %s" % [r.value for r in Relation])
    relation = names[relation.lower()]
    if relation == Relation.RANGE:
        bounds = _require(doc, "range", field)
        if not isinstance(bounds, list) or len(bounds) != 2:
            raise InputError(field + ".range", "expected [low, high]")
        low = read_int(bounds[0], field + ".range[0]")
        high = read_int(bounds[1], field + ".range[1]")
        return PairingConstraint(anchor, relation, low, high)
    return PairingConstraint(anchor, relation, read_int(_require(doc, "value", field), field + ".value"))


def read_query(lattice, doc, field="query"):
    """ClassQuery from {self_intersection, pairings, primitive_only, exclude}."""
    square = read_int(_require(doc, "self_intersection", field), field + ".self_intersection")
    pairings = doc.get("pairings", [])
    exclude = doc.get("exclude", [])
    if not isinstance(pairings, list):
        raise InputError(field + ".pairings", "expected a list")
    if not isinstance(exclude, list):
        raise InputError(field + ".exclude", "expected a list")
    primitive_only = doc.get("primitive_only", False)
    if not isinstance(primitive_only, bool):
        raise InputError(field + ".primitive_only", "expected true or false")
    return ClassQuery(
        square,
        tuple(_read_pairing(lattice, p, "%s.pairings[%d]" % (field, i)) for i, p in enumerate(pairings)),
        primitive_only,
        tuple(read_class(lattice, x, "%s.exclude[%d]" % (field, i)) for i, x in enumerate(exclude)),
    )


def read_query_file(path):
    """Read a query file.

    The document holds "lattice", "query" and optionally "ample" (a class,
    making the target a polarized lattice) and "box" (oracle box radius).

    Args:
        path (str): path to file

    Returns:
        tuple: (lattice or polarized lattice, ClassQuery, box or None)
    """
    doc = read_json(path)
    lattice = read_lattice(_require(doc, "lattice", "$"), "lattice")
    query = read_query(lattice, _require(doc, "query", "$"), "query")
    target = lattice
    if "ample" in doc:
        ample = read_class(lattice, doc["ample"], "ample")
        try:
            target = PolarizedLattice(lattice, ample)
        except Exception as err:
            raise InputError("ample", str(err))
    box = doc.get("box")
    if box is not None:
        box = read_int(box, "box")
    return target, query, box


def result_to_dict(lattice, result):
    """Solutions and completeness bound of an enumeration."""
    out = {
        "solutions": [list(x.coords) for x in result.solutions],
        "described": [lattice.describe(x) for x in result.solutions],
        "count": len(result.solutions),
        "bound": {
            "lower": list(result.completeness_bound.lower),
            "upper": list(result.completeness_bound.upper),
        },
        "nodes": result.stats.get("nodes", 0),
    }
    if result.anchor is not None:
        out["anchor"] = lattice.describe(result.anchor)
        out["interval"] = list(result.interval)
    return out


def family_to_dict(P, params, certificate):
    return {
        "params": params.to_dict(),
        "lattice": {"labels": list(P.lattice.labels), "gram": [list(row) for row in P.lattice.gram]},
        "ample": {"coords": list(P.ample.coords)},
        "disc": P.lattice.disc,
        "signature": list(P.lattice.signature()),
        "certificate": certificate.to_dict(),
    }


def write_report(path, results, summary, timestamp=True, coverage=None):
    """Write a verification report.

    Args:
        path (str): path to file
        results (list): (TableRow or None, params, Certificate) triples
        summary (dict): status counts
        timestamp (bool, optional): add a "timestamp" field. Defaults to True.
        coverage (Certificate, optional): genus coverage of the table. Defaults to None.
    """
    rows = []
    for row, params, cert in results:
        entry = {"params": params.to_dict() if params is not None else None, "status": cert.status.value}
        if row is not None:
            entry["row"] = row.to_dict()
            entry["disc"], entry["genus"] = row.evaluate(params)
        rows.append(entry)
    report = {
        "rows": rows,
        "certificates": [cert.to_dict() for _, _, cert in results],
        "summary": summary,
    }
    if coverage is not None:
        report["coverage"] = coverage.to_dict()
    if timestamp:
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    write_json(path, report)
    return report


def comparable(report):
    """Report without the fields allowed to differ between runs."""
    return {key: value for key, value in report.items() if key != "timestamp"}
