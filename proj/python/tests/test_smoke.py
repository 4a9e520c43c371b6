import math
import wave

import numpy as np
import pytest

import fstwfr


def numpy_log_mel(x, sr=16000, n_fft=1024, hop=512, n_mels=128, fmin=0.0, fmax=8000.0, floor=1e-10):
    """Straight numpy log-mel used as a reference."""
    f_sp = 200.0 / 3.0
    logstep = math.log(6.4) / 27.0

    def to_mel(f):
        f = np.asarray(f, dtype=float)
        return np.where(f < 1000.0, f / f_sp, 15.0 + np.log(np.maximum(f, 1e-300) / 1000.0) / logstep)

    def to_hz(m):
        m = np.asarray(m, dtype=float)
        return np.where(m < 15.0, m * f_sp, 1000.0 * np.exp(logstep * (m - 15.0)))

    edges = to_hz(np.linspace(to_mel(fmin), to_mel(fmax), n_mels + 2))
    freqs = np.arange(n_fft // 2 + 1) * sr / n_fft
    fb = np.zeros((n_mels, freqs.size))
    for m in range(n_mels):
        lo, c, hi = edges[m], edges[m + 1], edges[m + 2]
        up = (freqs - lo) / (c - lo)
        down = (hi - freqs) / (hi - c)
        fb[m] = np.maximum(0.0, np.minimum(up, down)) * 2.0 / (hi - lo)
    window = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n_fft) / n_fft)
    n_frames = 1 + (len(x) - n_fft) // hop
    frames = np.stack([x[t * hop : t * hop + n_fft] * window for t in range(n_frames)], axis=1)
    power = np.abs(np.fft.rfft(frames, axis=0)) ** 2
    return np.log(np.maximum(fb @ power, floor))


def test_weights_and_hand_value():
    np.testing.assert_allclose(fstwfr.weights(0.5, 3), [4 / 7, 2 / 7, 1 / 7], rtol=0, atol=1e-15)
    np.testing.assert_array_equal(fstwfr.weights(0.0, 3), [1.0, 0.0, 0.0])
    v = fstwfr.twfr(np.array([[1.0, 3.0, 2.0], [0.0, 5.0, 4.0]]), 0.5)
    np.testing.assert_allclose(v, [17 / 7, 4.0], rtol=0, atol=1e-12)
    np.testing.assert_array_equal(fstwfr.ranking(np.array([[1.0, 3.0, 2.0]])), [[3.0, 2.0, 1.0]])


def test_pooling_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(16, 40))
    np.testing.assert_array_equal(fstwfr.twfr(x, 0.0), x.max(axis=1))
    np.testing.assert_allclose(fstwfr.twfr(x, 1.0), x.mean(axis=1), rtol=0, atol=1e-12)
    r = 0.83
    w = r ** np.arange(40)
    ref = -np.sort(-x, axis=1) @ (w / w.sum())
    np.testing.assert_allclose(fstwfr.twfr(x, r), ref, rtol=0, atol=1e-12)
    with pytest.raises(fstwfr.Error):
        fstwfr.weights(1.5, 4)


def test_metrics():
    scores = [0.9, 0.8, 0.1, 0.85]
    labels = [True, True, False, False]
    assert fstwfr.auc(scores, labels) == 0.75
    assert fstwfr.pauc(scores, labels, 0.5) == 0.5
    assert fstwfr.objective(scores, labels, "harmonic", 0.5) == pytest.approx(0.6)
    assert fstwfr.objective(scores, labels, "arithmetic", 0.5) == pytest.approx(0.625)
    with pytest.raises(fstwfr.Error):
        fstwfr.auc([1.0, 2.0], [True, True])


def test_captions():
    meta = fstwfr.parse_label("section_00_source_test_normal_0001_car_B2_spd_31V_mic_1.wav", "ToyCar")
    assert meta.condition == "normal"
    assert meta.attributes == [("car", "B2"), ("spd", "31V"), ("mic", "1")]
    cap = fstwfr.render_caption(meta, "ToyCar")
    assert cap.text == (
        "This is the normal sound of a toy car with model B2 and speed 31V, "
        "recorded by a microphone placed at the position 1."
    )
    assert fstwfr.to_anomaly_caption(cap).text == cap.text.replace("normal", "anomaly")
    assert "{condition}" in fstwfr.default_template("grinder")
    with pytest.raises(fstwfr.Error, match="oops"):
        fstwfr.parse_label("section_00_source_test_oops_0001.wav")


def test_gmm():
    model, trace = fstwfr.fit_gmm(np.array([[-1.0], [1.0]]), fstwfr.GmmFitConfig())
    assert model.parameter_count() == 2 * 3 + 2
    assert all(b >= a - 1e-8 for a, b in zip(trace, trace[1:]))
    cfg = fstwfr.GmmFitConfig()
    cfg.n_components = 1
    model, _ = fstwfr.fit_gmm(np.array([[-1.0], [1.0]]), cfg)
    # Standard normal after standardisation: score(mean) = 0.5 ln(2 pi).
    assert model.score(np.array([0.0])) == pytest.approx(0.5 * math.log(2 * math.pi), abs=1e-12)
    assert model.score(np.array([3.0])) > model.score(np.array([1.0]))
    with pytest.raises(fstwfr.Error):
        model.score(np.array([0.0, 1.0]))


def test_wav_against_stdlib_reader(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, 3000)
    path = tmp_path / "clip.wav"
    fstwfr.write_wav(str(path), x, 16000)
    with wave.open(str(path), "rb") as w:
        assert w.getframerate() == 16000
        assert w.getsampwidth() == 2
        raw = np.frombuffer(w.readframes(w.getnframes()), dtype="<i2")
    clip = fstwfr.decode_wav(str(path))
    np.testing.assert_array_equal(clip.samples, raw / 32768.0)
    assert np.max(np.abs(clip.samples - x)) <= 1 / 32768
    with pytest.raises(fstwfr.Error, match="missing.wav"):
        fstwfr.decode_wav(str(tmp_path / "missing.wav"))


def test_log_mel_matches_numpy_reference():
    rng = np.random.default_rng(2)
    t = np.arange(16000) / 16000
    x = 0.3 * np.sin(2 * np.pi * 1234.0 * t) + 0.05 * rng.normal(size=t.size)
    clip = fstwfr.AudioClip(x, 16000)
    ours = fstwfr.log_mel(clip, fstwfr.SpectrogramConfig())
    ref = numpy_log_mel(x)
    assert ours.shape == ref.shape == (128, 30)
    np.testing.assert_allclose(ours, ref, rtol=0, atol=1e-8)
    silent = fstwfr.log_mel(fstwfr.AudioClip(np.zeros(4096), 16000), fstwfr.SpectrogramConfig())
    assert np.all(silent == math.log(1e-10))


def test_remove_silence():
    x = np.concatenate([0.5 * np.sin(np.arange(8000) * 0.3), np.zeros(8000)])
    cfg = fstwfr.SilenceRemovalConfig()
    out = fstwfr.remove_silence(fstwfr.AudioClip(x, 16000), cfg)
    assert 8000 <= len(out) < 8000 + cfg.frame_len
    again = fstwfr.remove_silence(out, cfg)
    np.testing.assert_array_equal(again.samples, out.samples)


def test_tune_r_small():
    rng = np.random.default_rng(3)
    t = np.arange(8000) / 16000

    def clip(burst):
        x = 0.3 * np.sin(2 * np.pi * 900 * t + rng.uniform(0, 6)) + 0.05 * rng.normal(size=t.size)
        if burst:
            start = rng.integers(800, 6500)
            x[start : start + 480] += 0.3 * rng.normal(size=480)
        return fstwfr.AudioClip(x, 16000)

    real = [clip(False) for _ in range(12)]
    normals = [clip(False) for _ in range(10)]
    anomalies = [clip(True) for _ in range(10)]
    cfg = fstwfr.TuningConfig()
    cfg.r_step = 0.1
    cfg.gmm.n_components = 1
    result = fstwfr.tune_r(real, normals, anomalies, fstwfr.SpectrogramConfig(), cfg)
    assert len(result.trace) == 12
    best = max(obj for _, obj, _, _ in result.trace)
    selected = [obj for r, obj, _, _ in result.trace if r == result.r_selected][0]
    assert selected == best
    assert result.trace[0][1] >= result.trace[10][1]
