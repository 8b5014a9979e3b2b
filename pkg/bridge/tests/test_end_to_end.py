"""Acceptance-level bridge checks, driven through real files and real CLIs."""

import json
import subprocess
import sys

import numpy as np

from sdec_bridge.export import export_embeddings
from sdec_bridge.inject import generate_from_prompt, inject_embeddings

PROMPT = "a photo of a dog chasing a frisbee in a park"
ID_SPAN = "a photo of a dog"


def test_identity_injection_contract(tmp_path, verdict):
    problems = []
    out_dir = tmp_path / "export"
    export_embeddings(PROMPT, ID_SPAN, out_dir)
    injected = inject_embeddings(out_dir / "embeddings.npy",
                                 out_dir / "manifest.json",
                                 tmp_path / "injected.ppm", seed=42)
    direct = generate_from_prompt(PROMPT, tmp_path / "direct.ppm", seed=42)
    if injected.read_bytes() != direct.read_bytes():
        problems.append("unrefined injection is not byte-identical to text generation")
    verdict("identity injection reproduces text generation byte-for-byte", problems)


def test_export_refine_inject_end_to_end(tmp_path, verdict):
    problems = []
    out_dir = tmp_path / "export"
    manifest = export_embeddings(PROMPT, ID_SPAN, out_dir)

    refined = tmp_path / "refined.npy"
    report = tmp_path / "report.json"
    proc = subprocess.run(
        [sys.executable, "-m", "sdec", "refine",
         "--embeddings", str(out_dir / "embeddings.npy"),
         "--partition", str(out_dir / "partition.json"),
         "--out", str(refined), "--report", str(report)],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        problems.append(f"refine exited {proc.returncode}: {proc.stderr.strip()}")
    else:
        doc = json.loads(report.read_text())
        weights = doc["payload"]["lambda_omega"]
        if not weights or not all(1.0 - 1e-9 <= w <= 2.0 + 1e-9 for w in weights):
            problems.append(f"refine report weights out of range: {weights}")

        original = np.load(out_dir / "embeddings.npy", allow_pickle=False)
        edited = np.load(refined, allow_pickle=False)
        if edited.shape != original.shape:
            problems.append(f"refined shape {edited.shape} != {original.shape}")
        lo, hi = manifest.id_rows
        if np.array_equal(edited[lo:hi], original[lo:hi]):
            problems.append("identity rows were not edited")
        if not np.array_equal(edited[hi:], original[hi:]):
            problems.append("scene rows were modified")

        image = inject_embeddings(refined, out_dir / "manifest.json",
                                  tmp_path / "refined.ppm", seed=42)
        baseline = inject_embeddings(out_dir / "embeddings.npy",
                                     out_dir / "manifest.json",
                                     tmp_path / "baseline.ppm", seed=42)
        if not image.read_bytes().startswith(b"P6\n"):
            problems.append("refined image is not a PPM file")
        if image.read_bytes() == baseline.read_bytes():
            problems.append("refined embeddings generated the baseline image")
    verdict("export -> refine (default config) -> inject completes end to end", problems)


def test_bridge_cli_round_trip(tmp_path):
    out_dir = tmp_path / "export"
    env_cmds = [
        [sys.executable, "-m", "sdec_bridge", "export",
         "--prompt", PROMPT, "--id-span", ID_SPAN, "--out-dir", str(out_dir)],
        [sys.executable, "-m", "sdec_bridge", "inject",
         "--embeddings", str(out_dir / "embeddings.npy"),
         "--manifest", str(out_dir / "manifest.json"),
         "--seed", "7", "--out", str(tmp_path / "cli.ppm")],
        [sys.executable, "-m", "sdec_bridge", "generate",
         "--prompt", PROMPT, "--seed", "7", "--out", str(tmp_path / "direct.ppm")],
    ]
    for cmd in env_cmds:
        proc = subprocess.run(cmd, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "cli.ppm").read_bytes() == (tmp_path / "direct.ppm").read_bytes()


def test_bridge_cli_validation_exit_codes(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sdec_bridge", "export",
         "--prompt", PROMPT, "--id-span", "a cat", "--out-dir", str(tmp_path / "x")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "not found" in proc.stderr

    out_dir = tmp_path / "export"
    export_embeddings(PROMPT, ID_SPAN, out_dir)
    wrong = tmp_path / "wrong.npy"
    np.save(wrong, np.zeros((3, 3)))
    proc = subprocess.run(
        [sys.executable, "-m", "sdec_bridge", "inject",
         "--embeddings", str(wrong), "--manifest", str(out_dir / "manifest.json"),
         "--out", str(tmp_path / "img.ppm")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "shape" in proc.stderr
