"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured figure,
so ``pytest -v`` output (or ``python3 tests/test_acceptance.py``) doubles as
the acceptance report.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from cgq.assignment import (
    assign_bns,
    assign_partial_trace,
    mc_average_bns,
    mc_average_partial_trace,
    mc_estimate_bns,
    orbit_seed,
    seed_from_vector,
)
from cgq.channels import apply_channel, bns_channel, partial_trace_channel, verify_cptp
from cgq.cli import main as cli_main
from cgq.discriminate import fig3_experiment, run_discrimination
from cgq.dynamics import EffectiveChannelSpec, effective_evolve, linearity_probe, open_system_evolve
from cgq.linalg import IDENTITY_2, HamiltonianSpec, conjugate, local_y, tensor, unitary_at
from cgq.sampling import SamplerConfig

sys.path.insert(0, str(Path(__file__).parent))
from conftest import random_density, random_hermitian, random_qubit_with_floor  # noqa: E402

N = 10**6
PLUS = np.full((2, 2), 0.5)
ZERO = np.diag([1.0, 0.0])


REPORT: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  [{number}] {title}: {detail}"
    REPORT.append(line)
    print(line)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_c1_closed_form_matches_orbit_average():
    rng = np.random.default_rng(101)
    with Timer() as clock:
        worst = 0.0
        for k in range(20):
            rho = random_qubit_with_floor(rng, 0.05)
            mc = mc_average_bns(rho, SamplerConfig(sample_count=N, seed=k))
            worst = max(worst, np.max(np.abs(mc - assign_bns(rho))))
    ok = worst <= 5e-3 and clock.elapsed < 30
    report(1, "BnS closed form vs orbit MC", ok, f"max deviation {worst:.2e} (<= 5e-3), {clock.elapsed:.1f} s (< 30 s)")
    assert ok


def test_c2_product_form_matches_haar_average():
    rng = np.random.default_rng(102)
    with Timer() as clock:
        worst = 0.0
        for k in range(10):
            rho = random_density(rng, 2)
            mc = mc_average_partial_trace(rho, 2, SamplerConfig(sample_count=N, seed=k))
            worst = max(worst, np.max(np.abs(mc - tensor(rho, IDENTITY_2 / 2))))
    ok = worst <= 5e-3 and clock.elapsed < 60
    report(2, "partial-trace product form vs Haar MC", ok, f"max deviation {worst:.2e} (<= 5e-3), {clock.elapsed:.1f} s (< 60 s)")
    assert ok


def test_c3_nonlinear_ground_population_formula():
    spec = EffectiveChannelSpec(bns_channel(), local_y())
    with Timer() as clock:
        worst = 0.0
        for r01 in np.linspace(0.0, 0.5, 51):
            rho = np.array([[0.5, r01], [r01, 0.5]])
            p0 = effective_evolve(spec, rho, math.pi / 3)[0, 0].real
            worst = max(worst, abs(p0 - (1 - r01) ** 2 / 16))
    ok = worst <= 1e-10 and clock.elapsed < 1
    report(3, "ground population (1 - r01)^2/16 at t = pi/3", ok, f"max deviation {worst:.3e} (<= 1e-10), {clock.elapsed:.2f} s (< 1 s)")
    assert ok


def test_c4_effective_distance_excursion():
    with Timer() as clock:
        series = run_discrimination(fig3_experiment(steps=400))
    peak = float(series.d_effective.max())
    bounded = bool(np.all(series.d_effective <= series.d_micro + 1e-9))
    ok = abs(series.d_initial - 0.5) <= 1e-12 and peak >= 0.52 and bounded and clock.elapsed < 5
    detail = (
        f"d_initial {series.d_initial:.15f}, max d_effective {peak:.5f} (>= 0.52), "
        f"d_micro {series.d_micro:.5f}, bounded {bounded}, {clock.elapsed:.2f} s (< 5 s)"
    )
    report(4, "effective distance exceeds initial distance", ok, detail)
    assert ok


def test_c5_channel_laws():
    rng = np.random.default_rng(105)
    with Timer() as clock:
        cptp = verify_cptp(bns_channel())
        bns, pt = bns_channel(), partial_trace_channel(2, 2)
        worst = 0.0
        for _ in range(1000):
            rho = random_density(rng, 2)
            worst = max(
                worst,
                np.max(np.abs(apply_channel(bns, assign_bns(rho)) - rho)),
                np.max(np.abs(apply_channel(pt, assign_partial_trace(rho, 2)) - rho)),
            )
    ok = (
        cptp.tp_defect <= 1e-12
        and cptp.choi_min_eigenvalue >= -1e-10
        and worst <= 1e-12
        and clock.elapsed < 5
    )
    detail = (
        f"TP defect {cptp.tp_defect:.1e}, Choi min eigenvalue {cptp.choi_min_eigenvalue:.2e}, "
        f"left-inverse defect {worst:.1e} (<= 1e-12), {clock.elapsed:.2f} s (< 5 s)"
    )
    report(5, "CPTP and left-inverse laws", ok, detail)
    assert ok


def test_c6_linearity_dichotomy():
    rng = np.random.default_rng(106)
    with Timer() as clock:
        worst_linear = 0.0
        for _ in range(100):
            spec = EffectiveChannelSpec(partial_trace_channel(2, 2), HamiltonianSpec(random_hermitian(rng, 4)))
            d = linearity_probe(
                spec, random_density(rng, 2), random_density(rng, 2), rng.uniform(), rng.uniform(0, 2 * np.pi)
            )
            worst_linear = max(worst_linear, d)
        witness = linearity_probe(EffectiveChannelSpec(bns_channel(), local_y()), PLUS, ZERO, 0.5, math.pi / 3)
    ok = worst_linear <= 1e-12 and witness >= 1e-3 and clock.elapsed < 5
    detail = (
        f"partial-trace defect {worst_linear:.1e} (<= 1e-12), BnS witness {witness:.4f} (>= 1e-3), "
        f"{clock.elapsed:.2f} s (< 5 s)"
    )
    report(6, "linear vs nonlinear effective dynamics", ok, detail)
    assert ok


def test_c7_local_hamiltonian_gives_unitary_system_dynamics():
    rng = np.random.default_rng(107)
    with Timer() as clock:
        worst = 0.0
        for _ in range(100):
            hs, he = random_hermitian(rng, 2), random_hermitian(rng, 2)
            h = HamiltonianSpec(tensor(hs, IDENTITY_2) + tensor(IDENTITY_2, he))
            rho = random_density(rng, 2)
            t = rng.uniform(-2 * np.pi, 2 * np.pi)
            expected = conjugate(unitary_at(hs, t), rho)
            worst = max(worst, np.max(np.abs(open_system_evolve(rho, h, 2, t) - expected)))
    ok = worst <= 1e-12 and clock.elapsed < 5
    report(7, "local Hamiltonian recovers system unitary", ok, f"max deviation {worst:.1e} (<= 1e-12), {clock.elapsed:.2f} s (< 5 s)")
    assert ok


def _seeds_plus():
    phase = np.exp(0.9j)
    psi = phase * np.array([math.sqrt(0.5), *([math.sqrt(1 / 6)] * 3)])
    return {
        "canonical": orbit_seed(PLUS),
        "tilted split": orbit_seed(PLUS, u=(1, 1, -2), w=(0, 1, -1), split=math.pi / 4),
        "global phase": seed_from_vector(psi, PLUS),
    }


def _seeds_mixed():
    rho = IDENTITY_2 / 2
    omega = np.exp(2j * math.pi / 3)
    psi = np.exp(-0.4j) * np.array([math.sqrt(0.5), *(math.sqrt(1 / 6) * omega ** np.arange(3))])
    return {
        "canonical": orbit_seed(rho),
        "tilted split": orbit_seed(rho, u=(1, 1, -2), w=(0, 1, -1), split=math.pi / 3),
        "complex vector": seed_from_vector(psi, rho),
    }


def test_c8_orbit_seed_independence():
    with Timer() as clock:
        rows = []
        for label, rho, seeds in (("|+><+|", PLUS, _seeds_plus()), ("I/2", IDENTITY_2 / 2, _seeds_mixed())):
            exact = assign_bns(rho)
            for k, (name, seed) in enumerate(seeds.items()):
                est = mc_estimate_bns(rho, SamplerConfig(sample_count=N, seed=800 + k), seed)
                rows.append((label, name, float(np.max(np.abs(est.mean - exact)))))
    worst = max(r[2] for r in rows)
    ok = worst <= 5e-3 and clock.elapsed < 30
    devs = ", ".join(f"{lab} {name} {dev:.1e}" for lab, name, dev in rows)
    report(8, "orbit average independent of seed", ok, f"max deviation {worst:.2e} (<= 5e-3) [{devs}], {clock.elapsed:.1f} s (< 30 s)")
    assert ok


def test_c9_determinism(tmp_path):
    outputs = []
    for name in ("first", "second"):
        path = tmp_path / f"{name}.csv"
        argv = ["discriminate", "--preset", "fig3", "--samples", "200000", "--seed", "9", "--out", str(path)]
        assert cli_main(argv) == 0
        outputs.append(path.read_bytes() + path.with_suffix(".json").read_bytes())
    identical = outputs[0] == outputs[1]

    rho = random_density(np.random.default_rng(109), 2)
    serial = mc_average_bns(rho, SamplerConfig(sample_count=N, seed=3, chunk_size=N))
    chunked = mc_average_bns(rho, SamplerConfig(sample_count=N, seed=3, chunk_size=N // 4 + 1, workers=4))
    gap = float(np.max(np.abs(serial - chunked)))
    ok = identical and gap <= 1e-12
    report(9, "reproducible outputs and chunking", ok, f"byte-identical {identical}, chunked vs serial {gap:.1e} (<= 1e-12)")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
