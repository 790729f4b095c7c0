"""Diverse multi-trajectory search: regions, windows, exclusion guarantees."""

import numpy as np
import pytest

from vcam360.diverse import (
    SphereRegion,
    TimeWindow,
    canonical_regions,
    diverse_search,
    sample_windows,
    window_length,
)
from vcam360.dp_solver import SearchProblem, best_ending_in_region, solve
from vcam360.grid import build_full_grid
from vcam360.scoring import ScoreField

from helpers import assert_feasible, random_scores, tiny_grid


def _problem(grid, seed):
    return SearchProblem(grid, ScoreField(grid, random_scores(grid, seed)))


class TestWindows:
    def test_window_length_rounds_half_up(self):
        assert window_length(120) == 12
        assert window_length(60) == 6
        assert window_length(15) == 2     # 1.5 rounds up
        assert window_length(10) == 1
        assert window_length(1) == 1

    def test_twenty_windows_on_long_videos(self):
        ws = sample_windows(120)
        assert len(ws) == 20
        assert ws[0] == TimeWindow(0, 12)
        assert ws[-1] == TimeWindow(108, 120)
        assert all(len(w) == 12 for w in ws)

    def test_short_videos_get_fewer_windows(self):
        ws = sample_windows(12)
        assert len(ws) == 12
        assert [w.start_idx for w in ws] == list(range(12))

    def test_windows_stay_in_range_and_deduplicate(self):
        for n in (1, 2, 5, 19, 20, 21, 37, 200):
            ws = sample_windows(n)
            starts = [w.start_idx for w in ws]
            assert starts == sorted(set(starts))
            assert all(0 <= w.start_idx < w.end_idx <= n for w in ws)

    def test_zero_steps_rejected(self):
        with pytest.raises(ValueError):
            sample_windows(0)


class TestRegions:
    def test_six_regions_lower_hemisphere_first(self):
        regions = canonical_regions()
        assert len(regions) == 6
        assert [r.upper for r in regions] == [False] * 3 + [True] * 3
        assert [r.phi_start_deg for r in regions] == [0.0, 120.0, 240.0] * 2

    def test_regions_partition_the_full_lattice(self):
        grid = build_full_grid(10.0)
        regions = canonical_regions()
        counts = np.zeros(6, dtype=int)
        for tv in grid.theta_values:
            for pv in grid.phi_values:
                hits = [i for i, r in enumerate(regions) if r.contains(tv, pv)]
                assert len(hits) == 1, (tv, pv, hits)
                counts[hits[0]] += 1
        assert counts.sum() == 198
        # equator row (theta = 0) counts as lower: 6 rows below, 5 above
        assert counts[:3].sum() == 6 * 18
        assert counts[3:].sum() == 5 * 18

    def test_contains_wraps_azimuth(self):
        r = SphereRegion(240.0, 360.0, upper=False)
        assert r.contains(0.0, 350.0)
        assert r.contains(-10.0, 360.0 + 250.0)
        assert not r.contains(0.0, 10.0)
        assert not r.contains(30.0, 350.0)


class TestFirstIteration:
    def test_six_outputs_in_six_distinct_regions(self):
        grid = tiny_grid(n_theta=2, n_phi=3, n_f=2, n_steps=6)
        problem = _problem(grid, 1)
        trajs = diverse_search(problem, 6)
        assert len(trajs) == 6
        regions = {tuple(t.meta["region"]) for t in trajs}
        assert len(regions) == 6
        for t in trajs:
            assert t.meta["iteration"] == 1
            assert t.meta["window"] is None
            assert_feasible(t, grid)

    def test_matches_per_region_solves(self):
        grid = tiny_grid(n_theta=2, n_phi=3, n_f=2, n_steps=6)
        problem = _problem(grid, 2)
        got = sorted(t.total_score for t in diverse_search(problem, 6))
        want = sorted(best_ending_in_region(problem, r).total_score
                      for r in canonical_regions())
        assert got == pytest.approx(want)

    def test_best_diverse_output_is_the_global_optimum(self):
        grid = tiny_grid(n_theta=2, n_phi=3, n_f=2, n_steps=6)
        problem = _problem(grid, 3)
        trajs = diverse_search(problem, 1)
        assert len(trajs) == 1
        assert trajs[0].total_score == solve(problem).total_score

    def test_sorted_by_score(self):
        grid = tiny_grid(n_theta=2, n_phi=3, n_f=2, n_steps=6)
        vals = [t.total_score for t in diverse_search(_problem(grid, 4), 6)]
        assert vals == sorted(vals, reverse=True)


class TestLaterIterations:
    def _run(self, seed, k=12):
        grid = tiny_grid(n_theta=2, n_phi=3, n_f=2, n_steps=10)
        return grid, diverse_search(_problem(grid, seed), k)

    def test_banned_window_glimpses_avoided(self):
        grid, trajs = self._run(11)
        paths = [(t.meta["iteration"], t.glimpse_indices(grid), t.meta["window"])
                 for t in trajs]
        for it, path, window in paths:
            if it == 1:
                continue
            s, e = window
            for prev_it, prev_path, _ in paths:
                if prev_it >= it:
                    continue
                for step in range(s, e):
                    assert path[step] != prev_path[step]

    def test_cross_iteration_outputs_differ_at_window_many_steps(self):
        grid, trajs = self._run(12)
        wlen = window_length(grid.n_steps)
        for a in trajs:
            for b in trajs:
                if a.meta["iteration"] < b.meta["iteration"]:
                    pa = a.glimpse_indices(grid)
                    pb = b.glimpse_indices(grid)
                    differing = sum(x != y for x, y in zip(pa, pb))
                    assert differing >= wlen

    def test_same_direction_other_focal_is_allowed_later(self):
        # one direction, two focal scales: later outputs can only differ by zoom
        grid = tiny_grid(n_theta=1, n_phi=1, n_f=2, n_steps=10)
        trajs = diverse_search(_problem(grid, 13), 2)
        assert len(trajs) == 2
        a, b = sorted(trajs, key=lambda t: t.meta["iteration"])
        s, e = b.meta["window"]
        pa, pb = a.glimpse_indices(grid), b.glimpse_indices(grid)
        for step in range(s, e):
            assert pa[step].f_idx != pb[step].f_idx
            assert pa[step].theta_idx == pb[step].theta_idx

    def test_exhaustion_warns_and_truncates(self):
        grid = tiny_grid(n_theta=1, n_phi=1, n_f=1, n_steps=10)
        with pytest.warns(UserWarning, match="exhausted"):
            trajs = diverse_search(_problem(grid, 14), 5)
        assert len(trajs) == 1

    def test_k_truncates_sorted_results(self):
        # k=3 stops after the first iteration, so it must agree with the
        # first-iteration outputs of a deeper run
        grid = tiny_grid(n_theta=2, n_phi=3, n_f=2, n_steps=10)
        all12 = diverse_search(_problem(grid, 15), 12)
        top3 = diverse_search(_problem(grid, 15), 3)
        first_iter = sorted((t.total_score for t in all12 if t.meta["iteration"] == 1),
                            reverse=True)
        assert [t.total_score for t in top3] == first_iter[:3]

    def test_k_must_be_positive(self):
        grid = tiny_grid()
        with pytest.raises(ValueError):
            diverse_search(_problem(grid, 0), 0)
