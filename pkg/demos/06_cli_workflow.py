"""The same pipeline through the command-line interface.

Everything the library does is reachable from the ocsc entry point. This
script drives the five subcommands in-process: make a synthetic corpus,
train on it with a config file, evaluate the saved dictionary, render its
mosaic, and reconstruct one sample. Each call returns the process exit
code the shell would see.
"""

import os
import tempfile

from ocsc.cli import cli_main

work = tempfile.mkdtemp(prefix="ocsc_demo_")
corpus = os.path.join(work, "corpus")
print(f"working under {work}\n")

# 1. synth: write consistent samples plus the dictionary that made them.
rc = cli_main([
    "synth", "--out", corpus, "--p", "16x16", "--k", "3",
    "--m", "4x4", "--n", "12", "--seed", "7", "--variant", "consistent",
])
print(f"synth exit code {rc}\n")

# 2. train: defaults come from a config file, flags override it. The
# report CSV carries one row per pass.
config_path = os.path.join(work, "train.cfg")
with open(config_path, "w") as fh:
    fh.write("beta = 0.3\nk = 3\nfilter-size = 4x4\npasses = 3\n")
dict_path = os.path.join(work, "learned.dic")
report_path = os.path.join(work, "report.csv")
rc = cli_main([
    "train", "--data", corpus, "--test", corpus, "--config", config_path,
    "--seed", "1", "--out", dict_path, "--report", report_path,
])
print(f"train exit code {rc}")
with open(report_path) as fh:
    for line in fh:
        print(f"  report| {line.rstrip()}")
print()

# 3. eval: held-out metrics for a frozen dictionary.
rc = cli_main([
    "eval", "--dict", dict_path, "--test", corpus, "--beta", "0.3",
])
print(f"eval exit code {rc}\n")

# 4. mosaic: the filters as a grayscale grid.
mosaic_path = os.path.join(work, "filters.png")
rc = cli_main(["mosaic", "--dict", dict_path, "--out", mosaic_path])
print(f"mosaic exit code {rc}\n")

# 5. reconstruct: code one stored sample and write the reconstruction.
sample = sorted(
    os.path.join(corpus, name)
    for name in os.listdir(corpus)
    if name.endswith(".smp")
)[0]
recon_path = os.path.join(work, "recon.png")
rc = cli_main([
    "reconstruct", "--dict", dict_path, "--in", sample,
    "--beta", "0.3", "--out", recon_path,
])
print(f"reconstruct exit code {rc}, wrote {recon_path}")
