import numpy as np
import pytest

from beamtwin import (
    ConfigurationError,
    ScenarioSpec,
    SimConfig,
    generate_dataset,
    generate_scenario,
    simulate_all_beam_powers,
    simulate_profile,
    synth_ula_codebook,
)

CB = synth_ula_codebook(16, 64, (-50.0, 50.0))
CFG = SimConfig()


def test_identical_seed_identical_triple():
    spec = ScenarioSpec(n_reflectors=4, seed=77)
    s1, p1, m1 = generate_scenario(spec, CB, CFG)
    s2, p2, m2 = generate_scenario(spec, CB, CFG)
    assert np.array_equal(p1, p2)
    assert np.array_equal(m1, m2)
    assert np.array_equal(s1.ue_position, s2.ue_position)
    for a, b in zip(s1.reflectors, s2.reflectors):
        assert np.array_equal(a.position, b.position)
        assert a.reflectance == b.reflectance


def test_different_seeds_differ():
    a = generate_scenario(ScenarioSpec(seed=1), CB, CFG)
    b = generate_scenario(ScenarioSpec(seed=2), CB, CFG)
    assert not np.array_equal(a[1], b[1])


def test_los_only_measurements_close_the_loop():
    spec = ScenarioSpec(n_reflectors=0, noise_floor=0.0, seed=3)
    scene, profile, measurements = generate_scenario(spec, CB, CFG)
    assert not scene.reflectors
    assert np.array_equal(simulate_profile(scene, CFG), profile)
    assert np.array_equal(simulate_all_beam_powers(profile, CB), measurements)


def test_noise_floor_adds_bounded_uniform():
    base_spec = ScenarioSpec(n_reflectors=0, noise_floor=0.0, seed=5)
    noisy_spec = ScenarioSpec(n_reflectors=0, noise_floor=1e-12, seed=5)
    _, _, clean = generate_scenario(base_spec, CB, CFG)
    _, _, noisy = generate_scenario(noisy_spec, CB, CFG)
    delta = noisy - clean
    assert np.all(delta >= 0.0)
    assert np.all(delta <= 1e-12)


def test_multipath_argmax_beam_points_at_profile_peak():
    # +/-2 deg tolerance frozen after sweeping 3000 seeds: it holds whenever
    # paths are separated by >= 10 deg (one kernel half-width) AND one path
    # dominates the runner-up by 1.5x (near-equal paths can legitimately win
    # the beam argmax while losing the profile-bin argmax); observed worst
    # deviation in that regime was 1.06 deg
    from beamtwin.simulate import build_impulses

    grid = CFG.grid
    checked = 0
    for seed in range(1000):
        spec = ScenarioSpec(n_reflectors=5, reflectance_range=(0.5, 1.0), seed=seed)
        scene, profile, measurements = generate_scenario(spec, CB, CFG)
        impulses, _ = build_impulses(scene, CFG)
        azimuths = sorted(i.azimuth_deg for i in impulses)
        if min(b - a for a, b in zip(azimuths, azimuths[1:])) < 10.0:
            continue
        powers = sorted((i.power for i in impulses), reverse=True)
        if powers[0] < 1.5 * powers[1]:
            continue
        checked += 1
        best_bore = CB.beams[int(np.argmax(measurements))].boresight_deg
        peak_angle = grid.angles[int(np.argmax(profile))]
        assert abs(best_bore - peak_angle) <= 2.0
    assert checked >= 3


def test_generate_dataset_shapes_and_splits():
    spec = ScenarioSpec(n_reflectors=2, seed=11)
    samples, scenes, profiles = generate_dataset(spec, 50, scenario_id="syn", codebook=CB)
    assert len(samples) == len(scenes) == 50
    assert profiles.shape == (50, 180)
    assert [s.sample_id for s in samples] == [f"syn-{i:05d}" for i in range(50)]
    splits = [s.split for s in samples]
    assert splits.count("calibration") == 15
    assert splits.count("test") == 35
    # contiguous assignment
    assert splits == ["calibration"] * 15 + ["test"] * 35


def test_generate_dataset_gps_chain_is_consistent():
    from beamtwin import azimuth_of, gps_to_camera_frame
    from beamtwin.synthetic import DEFAULT_GEOREF

    spec = ScenarioSpec(n_reflectors=0, seed=13)
    samples, scenes, _ = generate_dataset(spec, 20, codebook=CB)
    for sample, scene in zip(samples, scenes):
        back = gps_to_camera_frame(sample.ue_lat, sample.ue_lon, DEFAULT_GEOREF)
        assert abs(azimuth_of(back) - azimuth_of(scene.ue_position)) < 1e-6


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        ScenarioSpec(n_reflectors=-1)
    with pytest.raises(ConfigurationError):
        ScenarioSpec(ue_range=(10.0, 5.0))
    with pytest.raises(ConfigurationError):
        ScenarioSpec(ue_range=(0.0, 5.0))
    with pytest.raises(ConfigurationError):
        ScenarioSpec(reflectance_range=(0.5, 1.5))
    with pytest.raises(ConfigurationError):
        ScenarioSpec(noise_floor=-1.0)
