"""Running verification suites programmatically and emitting canonical reports.

The same suites back the command line (`torwave run --config ...`); reports
are byte-identical across reruns of one config, floats serialized at full
precision with sorted keys.
"""

import re

from torwave import ExperimentConfig, emit_report, parse_report, run_suite

config = ExperimentConfig(
    suite="commutator_identity",
    resolutions=[256, 512],
    sample_count=10,
    root_seed=42,
    operator="hilbert",
)

report = run_suite(config)
print(f"suite {report.suite}: passed={report.passed}, "
      f"{len(report.cases)} cases in {report.wall_time:.2f}s")
print("summary:", report.summary)

text = emit_report(report, "json")
again = emit_report(run_suite(config), "json")
strip = lambda s: re.sub(r'"wall_time": [^,\n]*', "", s)
print("byte-identical records on rerun:", strip(text) == strip(again))

back = parse_report(text)
print("round trip preserves every record:", back.cases == report.cases)

csv = emit_report(report, "csv")
print("\nfirst CSV lines:")
for line in csv.splitlines()[:5]:
    print(" ", line)
