#!/usr/bin/env python3
"""End-to-end checks of the mftraffic CLI.

Covers the exit-code contract (0 success, 2 usage/parameter errors,
1 runtime failures), the generate -> analyze -> mix -> analyze pipeline,
the resolved-parameter echo replay, and the experiment subcommand.
Usage: test_cli.py /path/to/mftraffic
"""

import subprocess
import sys
import tempfile
from pathlib import Path

BINARY = Path(sys.argv[1]).resolve()
CHECKS = []


def run(*args, cwd=None):
    return subprocess.run(
        [str(BINARY)] + [str(a) for a in args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=240,
    )


def check(name, cond, detail=""):
    CHECKS.append((name, bool(cond), detail))
    status = "ok" if cond else "FAIL"
    print(f"[{status}] {name}{(' -- ' + detail) if detail and not cond else ''}")


def read_values(path):
    values = []
    with open(path) as f:
        header_seen = False
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                assert line == "value", line
                header_seen = True
                continue
            values.append(float(line))
    return values


def spectrum_rows(path):
    rows = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("q,"):
                continue
            rows.append(line.split(","))
    return rows


def main():
    tmp = Path(tempfile.mkdtemp(prefix="mftraffic_cli_"))

    # generate: cascade trace with mean 1
    m = tmp / "m.csv"
    r = run("generate", "--model", "cascade", "--depth", "14", "--alpha", "1.0",
            "--seed", "42", "--out", m)
    check("generate cascade exits 0", r.returncode == 0, r.stderr)
    values = read_values(m)
    check("cascade trace has 16384 values", len(values) == 16384, str(len(values)))
    mean = sum(values) / len(values)
    check("cascade trace mean is 1", abs(mean - 1.0) < 1e-9, str(mean))
    check("generate echoes resolved flags", "# resolved: generate" in r.stderr, r.stderr)

    # generate: exp of white noise
    w = tmp / "w.csv"
    r = run("generate", "--model", "exp-fgn", "--n", "16384", "--hurst", "0.5",
            "--seed", "7", "--out", w)
    check("generate exp-fgn exits 0", r.returncode == 0, r.stderr)
    check("exp-fgn trace is positive", min(read_values(w)) > 0.0)

    # parameter errors exit 2 and leave no partial file
    bad = tmp / "bad.csv"
    r = run("generate", "--model", "fgn", "--hurst", "1.5", "--n", "1024",
            "--seed", "1", "--out", bad)
    check("hurst out of range exits 2", r.returncode == 2, str(r.returncode))
    check("error names the valid range", "(0,1)" in r.stderr, r.stderr)
    check("no partial file left behind", not bad.exists())

    r = run("generate", "--model", "fgn", "--hurst", "0.5", "--phi", "0.7",
            "--n", "1024", "--seed", "1", "--out", bad)
    check("extraneous flag for the model exits 2", r.returncode == 2, r.stderr)

    r = run("generate", "--model", "cascade", "--depth", "10", "--alpha", "1",
            "--frobnicate", "1", "--seed", "1", "--out", bad)
    check("unknown flag exits 2", r.returncode == 2, r.stderr)

    r = run("frobnicate")
    check("unknown subcommand exits 2", r.returncode == 2, r.stderr)

    # analyze: default grid gives a 20-row spectrum
    spec = tmp / "m.spectrum.csv"
    r = run("analyze", "--in", m, "--method", "mfdfa", "--q-min", "0.5",
            "--q-max", "10", "--q-step", "0.5", "--out", spec)
    check("analyze exits 0", r.returncode == 0, r.stderr)
    rows = spectrum_rows(spec)
    check("spectrum has 20 rows", len(rows) == 20, str(len(rows)))
    check("analyze prints h(2)", "h(2)=" in r.stdout, r.stdout)
    check("analyze prints the spread", "spread(q>0)=" in r.stdout, r.stdout)

    # analyze: full-range grid including q=0
    full = tmp / "full.csv"
    r = run("analyze", "--in", m, "--q-min", "-10", "--q-max", "10",
            "--q-step", "0.5", "--out", full)
    check("full-range analyze exits 0", r.returncode == 0, r.stderr)
    check("full-range spectrum has 41 rows", len(spectrum_rows(full)) == 41)

    # analyze: a constant trace is h=1 under moments, undefined under mfdfa
    const_trace = tmp / "const.csv"
    const_trace.write_text("value\n" + "2.5\n" * 2048)
    cspec = tmp / "const_moments.csv"
    r = run("analyze", "--in", const_trace, "--method", "moments", "--q-min", "1",
            "--q-max", "3", "--q-step", "1", "--out", cspec)
    check("moments on constant trace exits 0", r.returncode == 0, r.stderr)
    rows = spectrum_rows(cspec)
    check("moments on constant trace gives h=1",
          all(abs(float(row[1]) - 1.0) < 1e-9 and row[4] == "1" for row in rows),
          str(rows))
    cspec2 = tmp / "const_mfdfa.csv"
    r = run("analyze", "--in", const_trace, "--method", "mfdfa", "--q-min", "1",
            "--q-max", "3", "--q-step", "1", "--out", cspec2)
    check("mfdfa on constant trace still exits 0", r.returncode == 0, r.stderr)
    rows = spectrum_rows(cspec2)
    check("mfdfa on constant trace is all-undefined",
          all(row[4] == "0" for row in rows), str(rows))

    # malformed trace: runtime failure, line number in the message
    broken = tmp / "broken.csv"
    broken.write_text("value\n1.0\nnot-a-number\n2.0\n")
    r = run("analyze", "--in", broken)
    check("malformed trace exits 1", r.returncode == 1, str(r.returncode))
    check("error cites the line number", ":3" in r.stderr, r.stderr)

    r = run("analyze", "--in", tmp / "missing.csv")
    check("missing input exits 1", r.returncode == 1, str(r.returncode))

    # mix: achieved snr is exact
    s5 = tmp / "s5.csv"
    r = run("mix", "--signal", m, "--noise", w, "--snr", "5", "--out", s5)
    check("mix exits 0", r.returncode == 0, r.stderr)
    achieved = float(r.stdout.split("achieved_snr=")[1].split()[0])
    check("achieved snr is 5 within 1e-12", abs(achieved - 5.0) / 5.0 <= 1e-12,
          str(achieved))

    r = run("mix", "--signal", m, "--noise", w, "--snr", "0", "--out", tmp / "x.csv")
    check("snr 0 exits 2", r.returncode == 2, str(r.returncode))

    short = tmp / "short.csv"
    short.write_text("value\n" + "1.5\n2.5\n" * 8)
    r = run("mix", "--signal", m, "--noise", short, "--snr", "1", "--out", tmp / "x.csv")
    check("length mismatch exits 2", r.returncode == 2, str(r.returncode))
    check("mismatch message has both lengths", "16384" in r.stderr and "16" in r.stderr,
          r.stderr)

    # mixing a trace with itself at snr 1 doubles it
    dbl = tmp / "dbl.csv"
    r = run("mix", "--signal", m, "--noise", m, "--snr", "1", "--out", dbl)
    check("self-mix exits 0", r.returncode == 0, r.stderr)
    doubled = read_values(dbl)
    check("self-mix at snr 1 doubles the trace",
          all(d == 2.0 * v for d, v in zip(doubled, values)))

    # pipeline closure: the mixed trace analyzes cleanly
    mixed_spec = tmp / "s5.spectrum.csv"
    r = run("analyze", "--in", s5, "--out", mixed_spec)
    check("pipeline generate->mix->analyze closes", r.returncode == 0, r.stderr)
    check("mixed spectrum parses", len(spectrum_rows(mixed_spec)) == 20)

    # oracle
    r = run("oracle", "cascade", "--alpha", "1.0", "--q", "1")
    check("oracle h(1) is 1", r.returncode == 0 and "h(1) = 1" in r.stdout, r.stdout)
    r = run("oracle", "cascade", "--alpha", "1.0", "--q", "2")
    h2 = float(r.stdout.split("=")[1])
    check("oracle h(2) is 0.7925", abs(h2 - 0.79248125) < 1e-4, str(h2))
    r = run("oracle", "cascade", "--alpha", "100", "--q", "5")
    h5 = float(r.stdout.split("=")[1])
    check("oracle degenerates to 1 at large alpha", abs(h5 - 1.0) < 0.02, str(h5))
    r = run("oracle", "cascade", "--alpha", "1.0", "--q", "-2")
    check("oracle domain violation exits 2", r.returncode == 2, str(r.returncode))
    ofile = tmp / "oracle.csv"
    r = run("oracle", "cascade", "--alpha", "1.0", "--out", ofile)
    check("oracle writes a spectrum file", r.returncode == 0 and ofile.exists())
    orows = spectrum_rows(ofile)
    check("oracle file has r2=1, defined=1",
          all(row[3] == "1" and row[4] == "1" for row in orows))

    # reproducibility echo: replaying the echoed flags gives identical bytes
    g1 = tmp / "g1.csv"
    r = run("generate", "--model", "ar1", "--n", "2048", "--phi", "0.7", "--seed", "3",
            "--out", g1)
    echo = [ln for ln in r.stderr.splitlines() if ln.startswith("# resolved:")][0]
    replay = echo.removeprefix("# resolved:").split()
    g2 = tmp / "g2.csv"
    replay = [str(g2) if tok == str(g1) else tok for tok in replay]
    r = run(*replay)
    check("echo replay exits 0", r.returncode == 0, r.stderr)
    check("echo replay reproduces byte-identical output",
          g1.read_bytes() == g2.read_bytes())

    # experiment: tiny config end to end, plus config error paths
    cfg = tmp / "tiny.cfg"
    cfg.write_text(
        "[signal]\nmodel = cascade\ndepth = 10\nalpha = 1.0\n"
        "[noise exp-white]\nmodel = exp-fgn\nhurst = 0.5\n"
        "[sweep]\nsnr_levels = 1 5\nreplicates = 2\nbase_seed = 5\n"
        "[q]\nmin = 1\nmax = 5\nstep = 1\n"
    )
    outdir = tmp / "results"
    r = run("experiment", "--config", cfg, "--out-dir", outdir)
    check("experiment exits 0", r.returncode == 0, r.stderr)
    check("experiment writes results.csv", (outdir / "results.csv").exists())
    check("experiment writes summary.csv", (outdir / "summary.csv").exists())
    check("experiment writes the figure csv", (outdir / "fig1_exp-white.csv").exists())
    check("experiment prints the summary table", "deviation_mean" in r.stdout, r.stdout)

    r = run("experiment", "--config", cfg, "--out-dir", tmp / "results1",
            "--replicates", "1")
    check("replicate override works", r.returncode == 0, r.stderr)

    r = run("experiment", "--config", tmp / "nope.cfg", "--out-dir", outdir)
    check("missing config exits 2", r.returncode == 2, str(r.returncode))

    badcfg = tmp / "bad.cfg"
    badcfg.write_text("[signal]\nmodel = cascade\ndepth = 10\nalpha = 1.0\nwhat = 3\n"
                      "[noise a]\nmodel = iid\ndist = uniform\nlo = 0\nhi = 1\n")
    r = run("experiment", "--config", badcfg, "--out-dir", outdir)
    check("config error exits 2", r.returncode == 2, str(r.returncode))
    check("config error names the field", "signal.what" in r.stderr, r.stderr)

    # help exits 0
    r = run("--help")
    check("--help exits 0", r.returncode == 0)

    failed = [c for c in CHECKS if not c[1]]
    print(f"\n{len(CHECKS) - len(failed)}/{len(CHECKS)} checks passed")
    if failed:
        for name, _, detail in failed:
            print(f"FAILED: {name} -- {detail}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
