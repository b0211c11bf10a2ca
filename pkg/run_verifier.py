"""Verify the K3 lattice families, their claims and the decomposition table.
"""
import argparse
import os
import sys

import util.io

from k3lattice.certificate import Status
from k3lattice.claims import UnknownClaim, verify_claim
from k3lattice.enumerator import (
    AnchorNotPositive,
    FinitenessNotCertified,
    NotNegativeDefinite,
    enumerate_classes,
    oracle_enumerate,
)
from k3lattice.families import (
    FamilyOutOfRange,
    FamilyValidationError,
    LatticeFamilyParams,
    build_family,
)
from k3lattice.lattice import LatticeError
from k3lattice.multiples import verify_multiple
from k3lattice.table import genus_coverage, summarize, verify_table

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def _exit_code(certificates):
    return EXIT_FAILED if any(c.status == Status.FAILED for c in certificates) else EXIT_OK


def run_verify_table(output_path, h_max=10, k_max=12, jobs=1):
    """Verify every table row up to the caps and write a report.

    Args:
        output_path (str): path to output folder
        h_max (int, optional): cap on h. Defaults to 10.
        k_max (int, optional): cap on k. Defaults to 12.
        jobs (int, optional): worker processes. Defaults to 1.

    Returns:
        int: exit code
    """
    print("initialize")
    os.makedirs(output_path, exist_ok=True)

    print("start processing")
    results = verify_table(h_max, k_max, jobs)
    summary = summarize(results)
    for row, params, cert in results:
        if cert.status == Status.FAILED:
            print("  row {} at {} failed: {}".format(row.index, params, cert.first_failure()))

    coverage = genus_coverage(results)
    if coverage.status == Status.FAILED:
        print("  genus coverage failed: {}".format(coverage.first_failure()))

    filename = os.path.join(output_path, "table_report.json")
    util.io.write_report(filename, results, summary, coverage=coverage)
    print("summary: {}".format(", ".join("{} {}".format(v, k) for k, v in summary.items() if v)))
    print("genus coverage: {}".format(coverage.status.value))
    print("finished")
    return _exit_code([cert for _, _, cert in results] + [coverage])


def run_verify_claim(output_path, claim_id, params, explore=False):
    """Replay one claim and write its certificate.

    Args:
        output_path (str): path to output folder
        claim_id (str): claim id
        params (LatticeFamilyParams): family parameters
        explore (bool, optional): allow parameters outside the claim's range

    Returns:
        int: exit code
    """
    print("initialize")
    os.makedirs(output_path, exist_ok=True)

    print("  processing claim {} at {}".format(claim_id, params))
    cert = verify_claim(claim_id, params, explore=explore)
    filename = os.path.join(output_path, "claim_{}.json".format(cert.claim_id.replace("Claim", "")))
    util.io.write_report(filename, [(None, params, cert)], {cert.status.value: 1, "total": 1})
    print("status: {}".format(cert.status.value))
    if cert.status == Status.FAILED:
        print("first failure: {}".format(cert.first_failure()))
    print("finished")
    return _exit_code([cert])


def run_verify_multiple(output_path, i, g):
    """Check the decomposition of iH on a K3 surface of Picard rank one.

    Args:
        output_path (str): path to output folder
        i (int): Veronese degree
        g (int): genus

    Returns:
        int: exit code
    """
    print("initialize")
    os.makedirs(output_path, exist_ok=True)

    print("  processing i = {}, g = {}".format(i, g))
    cert = verify_multiple(i, g)
    filename = os.path.join(output_path, "multiple_{}_{}.json".format(i, g))
    util.io.write_report(filename, [(None, None, cert)], {cert.status.value: 1, "total": 1})
    print("status: {}".format(cert.status.value))
    if cert.status == Status.FAILED:
        print("first failure: {}".format(cert.first_failure()))
    print("finished")
    return _exit_code([cert])


def run_build(out, params, explore=False):
    """Build a family and write lattice, ample class and root exclusion.

    Args:
        out (str): output file
        params (LatticeFamilyParams): family parameters
        explore (bool, optional): allow parameters outside the published ranges

    Returns:
        int: exit code
    """
    print("  building {}".format(params))
    P, cert = build_family(params, explore=explore)
    if cert.status == Status.UNKNOWN:
        print("warning: root exclusion replay is inconclusive: {}".format(cert.first_failure()))
    directory = os.path.dirname(out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    util.io.write_json(out, util.io.family_to_dict(P, params, cert))
    print("disc {}, signature {}".format(P.lattice.disc, P.lattice.signature()))
    return _exit_code([cert])


def _lattice_of(target):
    return getattr(target, "lattice", target)


def run_query(path):
    """Run the query in a file and print its solutions.

    Args:
        path (str): query file

    Returns:
        int: exit code
    """
    target, query, _ = util.io.read_query_file(path)
    lattice = _lattice_of(target)
    result = enumerate_classes(target, query)
    out = util.io.result_to_dict(lattice, result)
    print("{} solutions".format(out["count"]))
    for text in out["described"]:
        print("  {}".format(text))
    print("completeness bound: {} .. {}".format(out["bound"]["lower"], out["bound"]["upper"]))
    return EXIT_OK


def run_oracle(path, box=None):
    """Compare the enumerator with a brute force box scan.

    Args:
        path (str): query file
        box (int, optional): box radius, overriding the file's "box"

    Returns:
        int: exit code
    """
    target, query, file_box = util.io.read_query_file(path)
    box = box if box is not None else file_box
    if box is None:
        raise util.io.InputError("box", "give --box or a \"box\" field")
    lattice = _lattice_of(target)
    oracle = oracle_enumerate(target, query, box)
    print("oracle: {} solutions in box {}".format(len(oracle.solutions), box))
    try:
        result = enumerate_classes(target, query)
    except FinitenessNotCertified as err:
        print("enumerator: {}".format(err))
        return EXIT_OK
    if not result.completeness_bound.fits_in(box):
        print("enumerator bound {} exceeds the box".format(result.completeness_bound.radius))
        return EXIT_OK
    agree = set(result.solutions) == set(oracle.solutions)
    print("enumerator: {} solutions, {}".format(len(result.solutions), "agree" if agree else "DISAGREE"))
    for x in sorted(set(result.solutions) ^ set(oracle.solutions), key=lambda x: x.coords):
        print("  differs at {}".format(lattice.describe(x)))
    return EXIT_OK if agree else EXIT_FAILED


def _params(args):
    return LatticeFamilyParams.infer(args.j, args.k, args.h, args.rank)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    table = subparsers.add_parser("verify-table", help="reproduce the decomposition table")
    table.add_argument("--h-max", dest="h_max", type=int, help="cap on h")
    table.add_argument("--k-max", dest="k_max", type=int, help="cap on k")
    table.add_argument("--jobs", type=int, help="worker processes")
    table.add_argument("--output_path", help="folder for the report")
    table.set_defaults(h_max=10, k_max=12, jobs=1, output_path="output_verifier")

    claim = subparsers.add_parser("verify-claim", help="replay one claim")
    claim.add_argument("claim_id", help="3.3 or 3.6 .. 3.12")
    build = subparsers.add_parser("build", help="build one lattice family")
    for sub in (claim, build):
        sub.add_argument("--j", type=int, required=True)
        sub.add_argument("--k", type=int, required=True)
        sub.add_argument("--h", type=int, required=True)
        sub.add_argument("--rank", type=int, choices=(2, 3), help="force rank 2 or 3")
        sub.add_argument("--explore", dest="explore", action="store_true")
        sub.set_defaults(explore=False, rank=None)
    claim.add_argument("--output_path", help="folder for the certificate")
    claim.set_defaults(output_path="output_verifier")
    build.add_argument("--out", help="output file")
    build.set_defaults(out=os.path.join("output_verifier", "family.json"))

    multiple = subparsers.add_parser("verify-multiple", help="check the decomposition of iH in Picard rank one")
    multiple.add_argument("--i", type=int, required=True, help="Veronese degree")
    multiple.add_argument("--g", type=int, required=True, help="genus")
    multiple.add_argument("--output_path", help="folder for the certificate")
    multiple.set_defaults(output_path="output_verifier")

    query = subparsers.add_parser("query", help="enumerate the classes of a query file")
    query.add_argument("file")

    oracle = subparsers.add_parser("oracle", help="compare the enumerator with a box scan")
    oracle.add_argument("file")
    oracle.add_argument("--box", type=int, help="box radius")

    args = parser.parse_args(argv)

    try:
        if args.command == "verify-table":
            return run_verify_table(args.output_path, args.h_max, args.k_max, args.jobs)
        if args.command == "verify-claim":
            return run_verify_claim(args.output_path, args.claim_id, _params(args), args.explore)
        if args.command == "build":
            return run_build(args.out, _params(args), args.explore)
        if args.command == "verify-multiple":
            return run_verify_multiple(args.output_path, args.i, args.g)
        if args.command == "query":
            return run_query(args.file)
        return run_oracle(args.file, args.box)
    except (util.io.InputError, FamilyOutOfRange, UnknownClaim, LatticeError) as err:
        print("error: {}".format(err))
        return EXIT_INPUT
    except (FinitenessNotCertified, AnchorNotPositive, NotNegativeDefinite) as err:
        print("error: {}".format(err))
        return EXIT_INPUT
    except FamilyValidationError as err:
        print("validation failed: {}".format(err))
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
