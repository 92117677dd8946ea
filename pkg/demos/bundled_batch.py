"""Order-4 obstruction for every knot in the bundled database.

Knots without a recorded presentation appear as error entries; the batch
carries on regardless. Use ``KNOTORDER_DB`` to point at an extended file.
"""
import sys

from knotorder.knotdb import batch_report, batch_to_text, db_checksum, load_knot_db

jobs = int(sys.argv[1]) if len(sys.argv) > 1 else 1
records = load_knot_db()
report = batch_report(records, 4, jobs=jobs, checksum=db_checksum())
print(batch_to_text(report), end="")

verdicts = report.verdicts()
done = {k: v for k, v in verdicts.items() if v is not None}
print(f"{len(done)} of {len(verdicts)} knots resolved; "
      f"{sum(v == 'Obstructed' for v in done.values())} obstructed at order 4")
