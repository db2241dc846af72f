import numpy as np
from click.testing import CliRunner

from filtbank import read_features
from filtbank.cli import main, utterance_seed
from conftest import write_wav


def run(args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_info(tmp_wav):
    result = run(["info", tmp_wav])
    assert result.exit_code == 0
    assert "16000 Hz, 16000 samples, 1.000 s" in result.output


def test_info_missing_file(tmp_path):
    result = run(["info", tmp_path / "nope.wav"])
    assert result.exit_code != 0


def test_compute_defaults(tmp_wav, tmp_path):
    out = tmp_path / "utt.fbk"
    result = run(["compute", tmp_wav, "-o", out])
    assert result.exit_code == 0, result.output
    assert result.output.strip() == f"98 123 {out}"
    m = read_features(out)
    assert m.values.shape == (98, 123)


def test_compute_si_same_shape(tmp_wav, tmp_path):
    out = tmp_path / "utt_si.fbk"
    result = run(["compute", tmp_wav, "--method", "si", "-o", out])
    assert result.exit_code == 0, result.output
    assert read_features(out).values.shape == (98, 123)


def test_compute_csv(tmp_wav, tmp_path):
    out = tmp_path / "utt.csv"
    result = run(["compute", tmp_wav, "--format", "csv", "-o", out])
    assert result.exit_code == 0, result.output
    data = np.loadtxt(out, delimiter=",")
    assert data.shape == (98, 123)


def test_compute_deterministic(tmp_wav, tmp_path):
    out1, out2 = tmp_path / "a.fbk", tmp_path / "b.fbk"
    assert run(["compute", tmp_wav, "--seed", 7, "-o", out1]).exit_code == 0
    assert run(["compute", tmp_wav, "--seed", 7, "-o", out2]).exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_compute_nyquist_error(tmp_wav, tmp_path):
    result = run(["compute", tmp_wav, "--high-hz", 9000, "-o", tmp_path / "x.fbk"])
    assert result.exit_code != 0
    assert "Nyquist" in result.output


def test_compute_batch_list(tmp_path):
    rng = np.random.default_rng(0)
    for name in ("one", "two"):
        write_wav(tmp_path / f"{name}.wav", 2000 * rng.standard_normal(8000))
    list_file = tmp_path / "utts.lst"
    list_file.write_text(
        f"utt_one {tmp_path / 'one.wav'}\nutt_two {tmp_path / 'two.wav'}\n"
    )
    out_dir = tmp_path / "feats"
    result = run(
        ["compute", list_file, "--list", "--output-dir", out_dir, "--seed", 3]
    )
    assert result.exit_code == 0, result.output
    assert (out_dir / "utt_one.fbk").exists()
    assert (out_dir / "utt_two.fbk").exists()
    # rerunning is bit-identical (order-independent per-utterance seeds)
    first = (out_dir / "utt_one.fbk").read_bytes()
    assert run(
        ["compute", list_file, "--list", "--output-dir", out_dir, "--seed", 3]
    ).exit_code == 0
    assert (out_dir / "utt_one.fbk").read_bytes() == first


def test_batch_bad_line(tmp_path):
    list_file = tmp_path / "bad.lst"
    list_file.write_text("only-an-id\n")
    result = run(["compute", list_file, "--list"])
    assert result.exit_code != 0


def test_utterance_seed_stable():
    assert utterance_seed(3, "utt_one") == utterance_seed(3, "utt_one")
    assert utterance_seed(3, "utt_one") != utterance_seed(3, "utt_two")
    assert utterance_seed(3, "utt_one") != utterance_seed(4, "utt_one")


def test_design_gabor_crossings():
    result = run(
        ["design", "--filter", "gabor", "--num-filters", 40,
         "--grid-resolution", 8000]
    )
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0].startswith("hz,")
    data = np.loadtxt(lines[1:], delimiter=",")
    assert data.shape == (8000, 41)
    # every filter column peaks at 1 (within grid resolution)
    assert np.all(data[:, 1:].max(axis=0) > 0.999)


def test_design_triangular_zero_outside_vertices():
    result = run(
        ["design", "--filter", "tri", "--num-filters", 4,
         "--low-hz", 1000, "--high-hz", 4000, "--grid-resolution", 1000]
    )
    assert result.exit_code == 0
    data = np.loadtxt(result.output.splitlines()[1:], delimiter=",")
    hz = data[:, 0]
    assert np.all(data[hz < 1000.0, 1:] == 0.0)
    assert np.all(data[hz > 7000.0, 1:] == 0.0)


def test_design_zero_resolution_error():
    result = run(["design", "--grid-resolution", 0])
    assert result.exit_code != 0


def test_bench_small():
    result = run(
        ["bench", "--duration-s", 1, "--repetitions", 3, "--num-filters", 6,
         "--low-hz", 100, "--high-hz", 4000]
    )
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert len(lines) == 3  # one line per filter kind
    for line in lines:
        assert "ratio" in line


def test_service_rejects_bad_wav():
    import asyncio
    import base64

    import httpx

    from filtbank.service import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://t"
        ) as client:
            return await client.post(
                "/v1/info",
                json={"wav_base64": base64.b64encode(b"junk").decode()},
            )

    resp = asyncio.run(go())
    assert resp.status_code == 400
    assert "detail" in resp.json()
