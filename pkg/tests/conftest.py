import os
from multiprocessing import Pool, cpu_count

import pytest

from crysred.report import ReportRecord, structure_report

STRUCT_PRIMES = (3, 5, 7, 11)


def _worker(job):
    p, r = job
    return structure_report(p, r).to_dict()


@pytest.fixture(scope="session")
def structure_grid():
    """Brute-force-vs-prediction records for every prime in STRUCT_PRIMES and
    every degree from 2p+1 up to 3p^2 (computed once per session)."""
    jobs = [(p, r) for p in STRUCT_PRIMES for r in range(2 * p + 1, 3 * p * p + 1)]
    workers = min(8, max(1, cpu_count()))
    if workers > 1 and os.environ.get("CRYSRED_TEST_SERIAL") != "1":
        with Pool(workers) as pool:
            dicts = pool.map(_worker, jobs, chunksize=8)
    else:
        dicts = [_worker(j) for j in jobs]
    return {(d["p"], d["r"]): ReportRecord.from_dict(d) for d in dicts}
