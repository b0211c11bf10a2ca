from k3lattice.certificate import NodeKind, Status
from k3lattice.families import TABLE, LatticeFamilyParams
from k3lattice.table import genus_coverage, summarize, table_instances, verify_row, verify_table

PASSING = (Status.VERIFIED, Status.VERIFIED_WITH_ASSUMPTIONS)


def test_verify_row():
    cert = verify_row(TABLE[5], LatticeFamilyParams.infer(0, 1, 3))
    assert cert.status in PASSING, cert.first_failure()
    columns = [step.data for step in cert.steps if step.kind == NodeKind.INEQUALITY_CHECKED]
    assert [(c["lhs"], c["rhs"]) for c in columns] == [(34, 34), (13, 13)]
    claims = [step.child.claim_id for step in cert.steps if step.kind == NodeKind.SUB_CERTIFICATE]
    assert claims == ["Claim3.3", "Claim3.8"]


def test_verify_table_reproduces_every_row():
    results = verify_table(h_max=10, k_max=12)
    assert [(row, params) for row, params, _ in results] == table_instances(10, 12)
    failed = [(row.index, str(params), cert.first_failure()) for row, params, cert in results
              if cert.status not in PASSING]
    assert failed == []
    for row, params, cert in results:
        disc, genus = row.evaluate(params)
        assert cert.steps[0].data["lhs"] == disc
        assert cert.steps[1].data["lhs"] == genus
    summary = summarize(results)
    assert summary["total"] == 57
    assert summary["Failed"] == 0


def test_parallel_run_is_identical():
    serial = verify_table(h_max=3, k_max=6, jobs=1)
    parallel = verify_table(h_max=3, k_max=6, jobs=2)
    assert [cert.to_dict() for _, _, cert in serial] == [cert.to_dict() for _, _, cert in parallel]


def test_genus_formulas_cover_every_genus():
    cert = genus_coverage([])
    closed = [step for step in cert.steps if step.statement.startswith("g(H) takes")]
    assert [step.ok for step in closed] == [True, True]
    assert closed[0].data["progressions"] == [[20, 2], [23, 2]]
    assert closed[0].data["values"] == [17, 18, 19, 21]
    assert closed[1].data["progressions"] == [[10, 4], [8, 4], [13, 4], [11, 4]]
    assert closed[1].data["values"] == [7, 9]
    assert closed[1].data["period"] == 4
    # nothing swept yet
    assert cert.status == Status.UNKNOWN


def test_genus_sweep():
    results = verify_table(h_max=3, k_max=6)
    cert = genus_coverage(results)
    assert cert.status == Status.VERIFIED, cert.first_failure()
    sweeps = [step.data["cap"] for step in cert.steps if step.statement.startswith("verified instances")]
    assert sweeps == [23, 10]

    # the only instance with g = 19 is row 2 at k = 6
    without = [(row, params, c) for row, params, c in results
               if not (row.index == 2 and params.k == 6)]
    cert = genus_coverage(without)
    assert cert.status == Status.FAILED
    assert cert.first_failure() == "verified instances realize every g in [17, 23] for i = 1"
