"""Row by row verification of the decomposition table."""
import concurrent.futures
import math

import sympy

from .certificate import Certificate, NodeKind, Status
from .claims import replay_claim
from .families import TABLE, build_family, h_sym, j_sym, k_sym
from .geometry import genus, is_indivisible

# smallest genus the rows with the given i are published for
GENUS_START = {1: 17, 2: 7}


def table_instances(h_max=10, k_max=12):
    """All (row, params) pairs up to the caps, in canonical order."""
    return [(row, params) for row in TABLE for params in row.instances(h_max, k_max)]


def verify_row(row, params):
    """Certificate for one table row at one parameter value.

    Args:
        row (TableRow): table row
        params (LatticeFamilyParams): parameters inside the row's range

    Returns:
        Certificate: discriminant and genus columns, H indivisible, the root
        exclusion and the claim the row cites
    """
    P, root_exclusion = build_family(params)
    lattice = P.lattice
    H = P.parse(row.H)
    disc, g = row.evaluate(params)

    cert = Certificate("Table row %d" % row.index, params)
    cert.inequality("disc column %s" % row.disc, lattice.disc, disc, relation="==")
    cert.inequality("g(H) column %s" % row.genus, genus(P, H), g, relation="==")
    cert.add(NodeKind.CLASSIFICATION, "H = %s is indivisible" % row.H, is_indivisible(P, H), content=H.content())
    cert.sub(root_exclusion)
    cert.sub(replay_claim(row.claim, P, params, root_exclusion))
    return cert


def _verify(item):
    row, params = item
    return verify_row(row, params)


def verify_table(h_max=10, k_max=12, jobs=1):
    """Verify every table instance up to the caps.

    Args:
        h_max (int, optional): cap on h for rows unbounded in h. Defaults to 10.
        k_max (int, optional): cap on k for the row unbounded in k. Defaults to 12.
        jobs (int, optional): worker processes. Defaults to 1.

    Returns:
        list: (TableRow, LatticeFamilyParams, Certificate) in canonical order
    """
    items = table_instances(h_max, k_max)
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            certificates = list(pool.map(_verify, items))
    else:
        certificates = []
        for index, item in enumerate(items):
            row, params = item
            print("  verifying row {} at {} ({}/{})".format(row.index, params, index + 1, len(items)))
            certificates.append(_verify(item))
    return [(row, params, cert) for (row, params), cert in zip(items, certificates)]


def summarize(results):
    """Counts of certificates per status."""
    counts = {status.value: 0 for status in Status}
    for _, _, cert in results:
        counts[cert.status.value] += 1
    counts["total"] = len(results)
    return counts


def genus_progressions(row):
    """(first genus, step) of each progression an unbounded row runs through."""
    if row.free_symbol is None:
        return []
    firsts = {}
    for params in row.instances(h_max=3, k_max=6):
        firsts.setdefault(params.j, params)
    out = []
    for params in firsts.values():
        values = {h_sym: params.h, j_sym: params.j, k_sym: params.k}
        step = sympy.diff(row.genus, row.free_symbol).subs(values)
        out.append((int(row.genus.subs(values)), int(step)))
    return out


def _covered(g, progressions, values):
    return g in values or any(g >= v and (g - v) % s == 0 for v, s in progressions)


def genus_coverage(results):
    """Certificate that g(H) runs through every integer from GENUS_START on.

    The closed form part works on the row formulas: past the largest first
    value, coverage repeats with the lcm of the steps, so one window decides
    it for all g. The sweep part asks the passing instances in `results` to
    realize every g up to the smallest maximum reached by an unbounded row.

    Args:
        results (list): (TableRow, LatticeFamilyParams, Certificate) triples

    Returns:
        Certificate: one closed form check and one sweep per i
    """
    cert = Certificate("Genus coverage")
    for i, start in sorted(GENUS_START.items()):
        rows = [row for row in TABLE if row.i == i]
        progressions, values = [], set()
        for row in rows:
            if row.free_symbol is None:
                values.update(row.evaluate(params)[1] for params in row.instances(h_max=3, k_max=6))
                continue
            cert.add(
                NodeKind.SYMBOLIC_CHECK,
                "row %d: g(H) = %s is linear in %s" % (row.index, row.genus, row.free_symbol),
                sympy.diff(row.genus, row.free_symbol, 2) == 0,
            )
            progressions.extend(genus_progressions(row))
        period = math.lcm(*(s for _, s in progressions))
        end = max([start] + [v for v, _ in progressions] + list(values)) + period
        missing = [g for g in range(start, end) if not _covered(g, progressions, values)]
        cert.add(
            NodeKind.SYMBOLIC_CHECK,
            "g(H) takes every integer value g >= %d for i = %d" % (start, i),
            not missing and all(s > 0 for _, s in progressions),
            progressions=[list(p) for p in progressions],
            values=sorted(values),
            period=period,
            missing=missing,
        )

        swept = {}
        for row, params, row_cert in results:
            if row.i == i and row_cert.status in (Status.VERIFIED, Status.VERIFIED_WITH_ASSUMPTIONS):
                swept.setdefault(row.index, set()).add(row.evaluate(params)[1])
        unbounded = [row.index for row in rows if row.free_symbol is not None]
        if any(index not in swept for index in unbounded):
            cert.add(
                NodeKind.CLASSIFICATION,
                "sweep for i = %d reaches every unbounded row" % i,
                decided=False,
                rows=[index for index in unbounded if index not in swept],
            )
            continue
        cap = min(max(swept[index]) for index in unbounded)
        realized = set().union(*swept.values())
        gaps = [g for g in range(start, cap + 1) if g not in realized]
        cert.add(
            NodeKind.CLASSIFICATION,
            "verified instances realize every g in [%d, %d] for i = %d" % (start, cap, i),
            cap >= start and not gaps,
            cap=cap,
            missing=gaps,
        )
    return cert
