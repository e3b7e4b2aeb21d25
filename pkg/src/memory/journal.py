#src/memory/journal.py
"""JSON journal of completed benchmark seeds.

A sweep over 20 seeds of the synthetic replica takes a while; the journal is
rewritten after every seed, so an interrupted sweep picks up at the first seed
it has no row for."""

import json
import os


class SweepJournal:
    def __init__(self, journal_path="data/sweep_journal.json"):
        self.path = journal_path
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self.rows = self._load()

    def _load(self):
        if not os.path.exists(self.path):
            return []
        with open(self.path, encoding="utf-8") as f:
            return json.load(f)

    def completed_seeds(self):
        return {row["seed"] for row in self.rows}

    def record(self, row):
        """Called after every finished seed."""
        self.rows = [r for r in self.rows if r["seed"] != row["seed"]]
        self.rows.append(row)
        self.rows.sort(key=lambda r: r["seed"])
        self._persist()

    def _persist(self):
        tmp = f"{self.path}.tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(self.rows, f, indent=4)
        os.replace(tmp, self.path)

    def resume_summary(self):
        """Markdown status for the audit log after a restart."""
        if not self.rows:
            return "No completed seeds. Starting the sweep from scratch."
        seeds = ", ".join(str(row["seed"]) for row in self.rows)
        return "\n".join([
            "## Sweep Journal: Resuming",
            f"Completed seeds: {seeds}",
            "\n**Next:** remaining seeds run in ascending order.",
        ])
