"""Acceptance suite: one test per criterion, each printing one PASS/FAIL
line with the measured numbers (run with ``pytest -s`` to see the lines).
"""

import math
import time

import numpy as np

from icfsim import (
    DEFAULT_SEED,
    FrameOptics,
    HarmonicModulation,
    NoiseModel,
    PhaseConfig,
    RoiSpec,
    ScanPattern,
    SourceModel,
    classical_limit,
    estimate_scan,
    fringe_visibility,
    g2_point,
    g3_point,
    g4_point,
    g3_profile,
    g4_profile,
    icf_general,
    load_frames,
    mean_profile,
    roi_average,
    save_frames,
    scan,
    synth_frames,
    verify_closed_form,
)

COHERENT = SourceModel.coherent()
THERMAL = SourceModel.thermal()
DENSE = np.linspace(0.0, 2.0 * np.pi, 721)

EXACT_LIMITS = {
    ("coherent", 2): 1 / 2, ("coherent", 3): 9 / 11, ("coherent", 4): 17 / 18,
    ("thermal", 2): 1 / 3, ("thermal", 3): 3 / 5, ("thermal", 4): 7 / 9,
}
# printed percentages and the number of decimals they carry
PAPER_PERCENT = {
    ("coherent", 2): (50.0, 0), ("coherent", 3): (81.9, 1),
    ("coherent", 4): (94.4, 1), ("thermal", 2): (33.0, 0),
    ("thermal", 3): (60.0, 0), ("thermal", 4): (77.8, 1),
}
SCHEME_OF_ORDER = {2: "symmetric_opposite", 3: "symmetric_opposite",
                   4: "four_point_double_speed"}


def report(num, name, ok, details=""):
    print(f"ACCEPTANCE {num} [{name}]: {'PASS' if ok else 'FAIL'} {details}")
    assert ok, f"criterion {num} ({name}) failed: {details}"


def test_criterion_1_analytic_classical_limits():
    worst_exact = 0.0
    rounding_ok = True
    for (kind, order), exact in EXACT_LIMITS.items():
        pattern = scan(SourceModel(kind), ScanPattern(
            order=order, scheme=SCHEME_OF_ORDER[order], grid=DENSE))
        worst_exact = max(worst_exact, abs(pattern.visibility - exact),
                          abs(pattern.visibility - classical_limit(order, kind)))
        printed, decimals = PAPER_PERCENT[(kind, order)]
        pct = 100.0 * pattern.visibility
        # the printed figures are rounded: 0.2 pp covers the one-decimal
        # values; integer-printed ones must round to the printed number
        rounding_ok &= (abs(pct - printed) <= 0.2
                        or round(pct, decimals) == printed)
    report(1, "analytic classical limits",
           worst_exact < 1e-9 and rounding_ok,
           f"(max |V - exact| = {worst_exact:.2e}; printed-value check "
           f"{'ok' if rounding_ok else 'failed'})")


def test_criterion_2_single_detector_scan():
    at_quarter = scan(COHERENT, ScanPattern(
        order=3, scheme="single_detector", grid=DENSE, offset=math.pi / 2))
    dev = abs(at_quarter.visibility - math.sqrt(2) / 2)
    offsets = np.linspace(0.0, math.pi, 181)
    vis = np.array([scan(COHERENT, ScanPattern(
        order=3, scheme="single_detector", grid=DENSE, offset=c)).visibility
        for c in offsets])
    argmax_at_quarter = math.isclose(offsets[int(np.argmax(vis))], math.pi / 2)
    report(2, "single-detector scan", dev < 1e-9 and argmax_at_quarter,
           f"(V = {at_quarter.visibility:.9f}, |V - sqrt(2)/2| = {dev:.2e}, "
           f"offset grid argmax = {offsets[int(np.argmax(vis))]:.6f})")


def test_criterion_3_oracle_equivalence():
    start = time.perf_counter()
    devs = {order: verify_closed_form(order, trials=1000, seed=DEFAULT_SEED)
            for order in (2, 3, 4)}
    elapsed = time.perf_counter() - start
    ok = max(devs.values()) < 1e-10 and elapsed < 1.0
    report(3, "oracle equivalence",
           ok, f"(max deviations {devs[2]:.1e}/{devs[3]:.1e}/{devs[4]:.1e} "
               f"over 1000 trials each, {elapsed:.2f} s)")


def test_criterion_4_monte_carlo_convergence():
    grid = np.linspace(0.0, 2.0 * np.pi, 25)
    cases = []
    for kind in ("coherent", "thermal"):
        cases.append((kind, ScanPattern(order=3, scheme="symmetric_opposite",
                                        grid=grid)))
        cases.append((kind, ScanPattern(order=3, scheme="single_detector",
                                        grid=grid, offset=math.pi / 2)))
        cases.append((kind, ScanPattern(order=4, scheme="four_point_double_speed",
                                        grid=grid)))
    start = time.perf_counter()
    worst_vis = 0.0
    within3 = []
    for i, (kind, pattern) in enumerate(cases):
        model = SourceModel(kind)
        truth = scan(model, pattern)
        est = estimate_scan(model, pattern, n_samples=100_000, n_batches=100,
                            seed=DEFAULT_SEED + i)
        worst_vis = max(worst_vis, abs(est.visibility - truth.visibility))
        within3.extend(np.abs(est.values - truth.values) <= 3 * est.stderrs)
    elapsed = time.perf_counter() - start
    coverage = float(np.mean(within3))
    ok = worst_vis < 0.03 and coverage >= 0.95 and elapsed < 30.0
    report(4, "Monte Carlo convergence", ok,
           f"(6 canonical scans at 1e5 samples/point: max |V - analytic| = "
           f"{worst_vis:.4f}, {100 * coverage:.1f}% of points within 3 stderr, "
           f"{elapsed:.1f} s)")


def test_criterion_5_frame_pipeline_end_to_end():
    start = time.perf_counter()
    # paper-scale run: 500 single-pulse frames, default camera noise,
    # processed with the 600 x 50 ROI
    noisy = synth_frames(COHERENT, FrameOptics(), n=500, seed=DEFAULT_SEED)
    series = roi_average(noisy, RoiSpec(0, 0, 600, 50, 300))
    g3 = g3_profile(series)
    g4 = g4_profile(series)
    fringe = fringe_visibility(mean_profile(series), noisy.fringe_period_px)
    in_band_3 = 0.70 <= g3.visibility <= 9 / 11 + 0.02
    in_band_4 = 0.85 <= g4.visibility <= 17 / 18 + 0.02
    # convergence run: noise disabled, 5000 frames (noise-free rows are
    # identical, so short frames carry the same information)
    clean_optics = FrameOptics(noise=NoiseModel.none(), bit_depth=None,
                               frame_height=8)
    clean = synth_frames(COHERENT, clean_optics, n=5000, seed=DEFAULT_SEED)
    clean_series = roi_average(clean, RoiSpec(0, 0, 600, 8, 300))
    dev3 = abs(g3_profile(clean_series).visibility - 9 / 11)
    dev4 = abs(g4_profile(clean_series).visibility - 17 / 18)
    elapsed = time.perf_counter() - start
    ok = (in_band_3 and in_band_4 and fringe < 0.10
          and dev3 <= 0.02 and dev4 <= 0.02 and elapsed < 60.0)
    report(5, "frame pipeline end-to-end", ok,
           f"(n=500 noisy: V3 = {g3.visibility:.4f} in [0.70, {9 / 11 + 0.02:.4f}], "
           f"V4 = {g4.visibility:.4f} in [0.85, {17 / 18 + 0.02:.4f}], "
           f"mean fringe = {fringe:.4f} < 0.10; n=5000 clean: "
           f"|V3 - 9/11| = {dev3:.4f}, |V4 - 17/18| = {dev4:.4f}; {elapsed:.1f} s)")


def test_criterion_6_harmonic_vs_uniform_phase():
    optics = FrameOptics(noise=NoiseModel.none(), bit_depth=None, frame_height=8)
    roi = RoiSpec(0, 0, 600, 8, 300)
    uniform = synth_frames(COHERENT, optics, n=5000, seed=DEFAULT_SEED)
    harmonic = synth_frames(COHERENT, optics, n=5000, seed=DEFAULT_SEED,
                            modulation=HarmonicModulation())
    gu = g3_profile(roi_average(uniform, roi))
    gh = g3_profile(roi_average(harmonic, roi))
    combined = np.sqrt(gu.stderrs ** 2 + gh.stderrs ** 2)
    worst = float(np.max(np.abs(gu.values - gh.values) / combined))
    # near-quarter-wave drive, reported but not asserted: such a weak drive
    # does not erase the phase, so equivalence genuinely fails there
    quarter = synth_frames(COHERENT, optics, n=5000, seed=DEFAULT_SEED,
                           modulation=HarmonicModulation(amplitude=math.pi / 2))
    gq = g3_profile(roi_average(quarter, roi))
    cq = np.sqrt(gu.stderrs ** 2 + gq.stderrs ** 2)
    worst_q = float(np.max(np.abs(gu.values - gq.values) / cq))
    print(f"  (report only) quarter-wave amplitude pi/2: max deviation "
          f"{worst_q:.1f} combined stderr")
    report(6, "harmonic-vs-uniform phase equivalence", worst <= 5.0,
           f"(calibrated amplitude {HarmonicModulation().amplitude:.3f} rad: "
           f"max pointwise deviation {worst:.2f} combined stderr at n=5000)")


def test_criterion_7_property_suites(tmp_path):
    rng = np.random.default_rng(DEFAULT_SEED)
    # nonnegativity of analytic and oracle values over 1e4 random inputs
    nonneg = True
    for _ in range(10_000):
        g2v = rng.uniform(1.0, 4.0)
        g3v = g2v * g2v * rng.uniform(1.0, 2.5)
        g4v = (g3v * g3v / g2v) * rng.uniform(1.0, 2.5)
        model = SourceModel.custom({2: g2v, 3: g3v, 4: g4v})
        d = rng.uniform(-8.0, 8.0, 4)
        nonneg &= g2_point(model, d[0] - d[1]) >= 0.0
        nonneg &= g3_point(model, PhaseConfig(tuple(d[:3]))) >= 0.0
        nonneg &= g4_point(model, PhaseConfig(tuple(d))) >= 0.0
        nonneg &= icf_general(model, d[:3]) >= 0.0
    # gauge and permutation invariance to 1e-12 (relative for large values)
    invariant = True
    for _ in range(500):
        d = rng.uniform(0.0, 2.0 * np.pi, 4)
        base = g4_point(THERMAL, PhaseConfig(tuple(d)))
        scale = max(1.0, abs(base))
        invariant &= abs(g4_point(THERMAL, PhaseConfig(tuple(d + 0.87))) - base) <= 1e-12 * scale
        perm = rng.permutation(d)
        invariant &= abs(g4_point(THERMAL, PhaseConfig(tuple(perm))) - base) <= 1e-12 * scale
        invariant &= abs(icf_general(THERMAL, d) - base) <= 1e-10 * scale
    # seed determinism across worker counts
    pattern = ScanPattern(order=3, scheme="symmetric_opposite",
                          grid=np.linspace(0, 2 * np.pi, 5))
    mc1 = estimate_scan(THERMAL, pattern, 20_000, n_batches=20, seed=3)
    mc3 = estimate_scan(THERMAL, pattern, 20_000, n_batches=20, seed=3, workers=3)
    det = np.array_equal(mc1.values, mc3.values)
    s1 = synth_frames(THERMAL, FrameOptics(frame_height=8), n=30, seed=3)
    s3 = synth_frames(THERMAL, FrameOptics(frame_height=8), n=30, seed=3, workers=3)
    det &= np.array_equal(s1.frames, s3.frames)
    # file round-trips are bit-exact for integer stacks
    stack = synth_frames(THERMAL, FrameOptics(frame_width=64, frame_height=8),
                         n=5, seed=4)
    roundtrip = True
    for fmt in ("pgm", "csv"):
        manifest = save_frames(stack, tmp_path / fmt, fmt=fmt)
        again = load_frames(manifest)
        roundtrip &= np.array_equal(stack.frames, again.frames)
        roundtrip &= again.frames.dtype == stack.frames.dtype
    report(7, "property suites", nonneg and invariant and det and roundtrip,
           f"(nonnegativity 1e4 draws: {nonneg}; invariances 1e-12: {invariant}; "
           f"worker-count determinism: {det}; PGM/CSV round-trip: {roundtrip})")
