"""
dapkit - Demo Script

Walks through the toolkit on the shipped example data:
1. Enumerate Al-N pair shells in 3C-SiC
2. Model and fit the ZPL series
3. Render a composite luminescence spectrum
4. Resolve a static dipole from charge snapshots
5. Compare DAP and NV couplings, estimate a lifetime
6. Tabulate charge transition levels

Run from the repository root: python scripts/demo.py
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def print_section(title):
    """Print formatted section header"""
    print("\n" + "=" * 80)
    print(f"  {title}")
    print("=" * 80 + "\n")


def dapkit(*args):
    """Run one subcommand; returns stdout or None on failure"""
    result = subprocess.run(
        [sys.executable, str(ROOT / "main.py"), "--log-level", "WARNING", *args],
        cwd=ROOT, capture_output=True, text=True,
    )
    if result.returncode != 0:
        print(f"❌ dapkit {' '.join(args)} exited with {result.returncode}")
        print(result.stderr.strip().splitlines()[-1])
        return None
    return result.stdout


def print_csv(text, max_rows=8):
    """Print CSV output with truncation"""
    lines = text.splitlines()
    for line in lines[:max_rows + 2]:
        print(line)
    if len(lines) > max_rows + 2:
        print(f"... ({len(lines) - max_rows - 2} more rows not shown)")


def print_result(text, keys=None):
    result = json.loads(text)["result"]
    if keys:
        result = {k: result[k] for k in keys}
    print(json.dumps(result, indent=2))


def demo_shells():
    print_section("STEP 1: Al-N shells in 3C-SiC")
    out = dapkit("shells", "--host", "3C-SiC", "--donor", "N_C", "--acceptor", "Al_Si", "--shells", "8")
    if out:
        print_csv(out)
    return out is not None


def demo_zpl(workdir):
    print_section("STEP 2: ZPL series and fit")
    series = workdir / "aln-series.csv"
    if dapkit("--out", str(series), "zpl-series", "--host", "3C-SiC",
              "--donor", "N_C", "--acceptor", "Al_Si", "--shells", "12", "--with-j") is None:
        return False
    print_csv(series.read_text())
    fit = dapkit("zpl-fit", "--input", str(series), "--host", "3C-SiC")
    if fit is None:
        return False
    print("\nFit against r_b/R_m:")
    print_result(fit, ["slope", "intercept", "binding_sum", "residual_rms"])
    print(f"\n📝 Manifest: {series}.manifest.json")
    return True


def demo_spectrum():
    print_section("STEP 3: Composite spectrum (aln-sic, 5 K)")
    out = dapkit("--format", "json", "pl-spectrum", "--case", "aln-sic", "--composite")
    if out:
        print_result(out, ["temperature_K", "zpl_weight", "captured_weight", "peak_eV"])
    return out is not None


def demo_dipole():
    print_section("STEP 4: Dipole from Wannier-centre snapshots")
    out = dapkit("dipole", "--ground", "data/ground.example.snap", "--excited", "data/excited.example.snap")
    if out:
        print_result(out)
    return out is not None


def demo_response():
    print_section("STEP 5: Coupling map and lifetime")
    out = dapkit("--format", "json", "interaction-map", "--mu1", "15", "--mu2", "15", "--eps", "9.72")
    if out is None:
        return False
    print_result(out, ["coupling_ratio", "range_factor", "ranges"])
    out = dapkit("lifetime", "--energy-eV", "3.8", "--mu-eA", "1.0", "--nr", "2.4")
    if out is None:
        return False
    print()
    print_result(out, ["tau_ns", "wavelength_nm", "convention"])
    return True


def demo_ctl():
    print_section("STEP 6: Charge transition levels")
    out = dapkit("reproduce", "table1")
    if out:
        print_csv(out)
    return out is not None


def run_demo():
    """Run the complete walkthrough"""
    print("\n")
    print("╔" + "=" * 78 + "╗")
    print("║" + " " * 25 + "DAPKIT WALKTHROUGH" + " " * 35 + "║")
    print("╚" + "=" * 78 + "╝")

    with tempfile.TemporaryDirectory() as tmp:
        steps = [
            demo_shells(),
            demo_zpl(Path(tmp)),
            demo_spectrum(),
            demo_dipole(),
            demo_response(),
            demo_ctl(),
        ]

    print_section("DEMO COMPLETE ✅" if all(steps) else "DEMO FINISHED WITH ERRORS ❌")
    print(f"{sum(steps)}/{len(steps)} steps succeeded")
    print("\n🎯 More:")
    print("   • python main.py reproduce fig3   (ZPL vs r_b/R_m for three pairs)")
    print("   • python main.py reproduce fig5 --case bn-diamond")
    print("   • python main.py <subcommand> --help")


if __name__ == "__main__":
    try:
        run_demo()
    except KeyboardInterrupt:
        print("\n\n⚠️ Demo interrupted by user")
