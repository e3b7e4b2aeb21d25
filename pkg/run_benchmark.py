#run_benchmark.py
"""Example driver: the synthetic QP-vs-ES replica through the library API.

    python run_benchmark.py

Runs five seeds of the 4-D MSG landscape (160 components, 160 Latin Hypercube
points, three RBF kernels, leave-one-out), journals each seed so an interrupted
run resumes where it stopped, and writes a Markdown summary to logs/audit."""

from src.benchmark import ReplicaConfig, run_sweep
from src.memory.journal import SweepJournal
from src.utils.logger import AuditLogger, configure_console


def main():
    configure_console(verbosity=1)
    journal = SweepJournal("data/sweep_journal.json")
    audit = AuditLogger("logs/audit")
    if journal.rows:
        audit.log_snapshot(journal.resume_summary(), "RESUME")

    rows = run_sweep(range(5), ReplicaConfig(), journal, record_timings=True)

    md = [
        "| Seed | QP RMSE | ES RMSE | Gap | QP s | ES s |",
        "| :--- | :--- | :--- | :--- | :--- | :--- |",
    ]
    for row in rows:
        md.append(
            f"| {row['seed']} | {row['qp_rmse']:.6g} | {row['es_rmse']:.6g} | {row['rmse_gap']:.3g} "
            f"| {row.get('qp_seconds', float('nan')):.4f} | {row.get('es_seconds', float('nan')):.4f} |"
        )
    audit.log_snapshot("\n".join(md), "BENCHMARK")
    print("\n".join(md))


if __name__ == "__main__":
    main()
