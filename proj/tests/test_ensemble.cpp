#include "qmem/ensemble.hpp"
#include "qmem/scenarios.hpp"
#include "qmem/units.hpp"

#include <catch_amalgamated.hpp>
#include <omp.h>

#include <cmath>
#include <numeric>

using namespace qmem;
using Catch::Approx;

namespace {

// Scenario with a coarse grid so sweeps stay fast.
Scenario coarse_storage()
{
    Scenario sc = triple_bit_storage(ScenarioParams{});
    sc.ensemble.spacing_khz = 10.0;
    return sc;
}

// Lossless system and an abrupt Raman pi pulse that leaves rho_12 = -1/4 in
// every member, followed by free evolution.
struct FreeDecay {
    LevelSystem sys;
    PulseSequence seq;
    double t0 = 0.0;  // pulse centre
};

FreeDecay free_decay()
{
    FreeDecay f;
    f.sys = default_three_level();
    f.sys.big_gamma = {};
    f.sys.gamma = {};
    PulseSegment kick;
    const double each = 2.5e6 / std::sqrt(2.0);
    kick.with(Field::probe, each).with(Field::coupling, each);
    kick.area_pi = 1.0;
    f.seq.add(kick);
    f.seq.mark("kick_end");
    f.seq.wait(6.0);
    f.t0 = 0.5 * build_timeline(f.sys, f.seq).require_marker("kick_end");
    return f;
}

double direct_sum(const DetuningGrid& g, double t)
{
    cplx s = 0.0;
    for (std::size_t j = 0; j < g.deltas.size(); ++j) s += g.weights[j] * std::polar(1.0, to_angular(g.deltas[j]) * t);
    return std::abs(s);
}

}  // namespace

TEST_CASE("detuning grid")
{
    const DetuningGrid g = build_grid(EnsembleSpec{});
    REQUIRE(g.deltas.size() == 251);
    CHECK(g.warnings.empty());
    CHECK(std::accumulate(g.weights.begin(), g.weights.end(), 0.0) == Approx(1.0).margin(1e-12));
    const auto mid = g.deltas.size() / 2;
    CHECK(g.deltas[mid] == 0.0);
    CHECK(*std::max_element(g.weights.begin(), g.weights.end()) == g.weights[mid]);
    for (std::size_t j = 0; j < g.deltas.size(); ++j) {
        CHECK(g.deltas[j] == -g.deltas[g.deltas.size() - 1 - j]);
        CHECK(g.weights[j] == g.weights[g.deltas.size() - 1 - j]);
        if (j) CHECK(g.deltas[j] - g.deltas[j - 1] == Approx(2.0));
    }
    CHECK(g.deltas.front() == -250.0);

    SECTION("vanishing width collapses onto one bin")
    {
        EnsembleSpec e;
        e.fwhm_khz = 0.02;
        const DetuningGrid n = build_grid(e);
        for (std::size_t j = 0; j < n.deltas.size(); ++j)
            if (n.deltas[j] != 0.0) CHECK(n.weights[j] < 1e-12);
    }
    SECTION("truncation off the grid is rounded outward")
    {
        EnsembleSpec e;
        e.truncation_khz = 251.0;
        const DetuningGrid n = build_grid(e);
        CHECK(n.deltas.front() == -252.0);
        CHECK(n.deltas.size() == 253);
        CHECK(n.warnings.size() == 1);
    }
}

TEST_CASE("single-bin sweep equals run_member")
{
    const Scenario sc = triple_bit_storage(ScenarioParams{});
    const EnsembleTrace tr = sweep(sc.system, sc.sequence, single_member_grid(6.0));
    const TimeTrace m = run_member(sc.system, sc.sequence, 6.0);
    REQUIRE(tr.times == m.times);
    for (std::size_t i = 0; i < m.times.size(); ++i) {
        CHECK(tr.S[i] == m.states[i](0, 1));
        CHECK(tr.P[i] == m.states[i](0, 2));
        CHECK(tr.populations[i][2] == m.states[i](2, 2).real());
    }
}

TEST_CASE("free induction decay follows the Gaussian envelope")
{
    const FreeDecay f = free_decay();
    SweepOptions o;
    o.run.sample_interval_us = 0.05;

    SECTION("default grid against its direct weighted sum")
    {
        const DetuningGrid g = build_grid(EnsembleSpec{});
        const EnsembleTrace tr = sweep(f.sys, f.seq, g, o);
        const double s0 = std::abs(tr.S[tr.index_at(2.0 * f.t0)]);
        CHECK(s0 == Approx(0.25).epsilon(1e-6));
        for (double t : {0.5, 1.0, 2.0, 3.0, 4.0, 5.6}) {
            const double sim = std::abs(tr.S[tr.index_at(t)]) / 0.25;
            CHECK(sim == Approx(direct_sum(g, t - f.t0)).epsilon(1e-3));
        }
    }
    SECTION("wide grid against the continuous closed form")
    {
        EnsembleSpec e;
        e.truncation_khz = 600.0;
        const DetuningGrid g = build_grid(e);
        const EnsembleTrace tr = sweep(f.sys, f.seq, g, o);
        const double sigma = 200.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
        for (double t : {0.5, 1.0, 2.0, 3.0, 4.0, 5.6}) {
            const double x = to_angular(sigma) * (t - f.t0);
            const double sim = std::abs(tr.S[tr.index_at(t)]) / 0.25;
            CHECK(sim == Approx(std::exp(-0.5 * x * x)).epsilon(1e-3));
        }
        const double x2 = to_angular(sigma) * 2.0;
        CHECK(std::exp(-0.5 * x2 * x2) == Approx(0.566).margin(5e-4));
    }
}

TEST_CASE("sweep is bit-identical across thread counts")
{
    const Scenario sc = coarse_storage();
    const DetuningGrid g = build_grid(sc.ensemble);
    SweepOptions o;
    o.chunk_size = 4;
    o.retained_deltas = {-10.0, 10.0};
    o.snapshot_markers = {"write_end"};
    const EnsembleTrace ref = sweep_serial(sc.system, sc.sequence, g, o);
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 3, 4}) {
        omp_set_num_threads(threads);
        const EnsembleTrace tr = sweep(sc.system, sc.sequence, g, o);
        CHECK(tr.times == ref.times);
        CHECK(tr.S == ref.S);
        CHECK(tr.P == ref.P);
        CHECK(tr.populations == ref.populations);
        REQUIRE(tr.retained.size() == 2);
        CHECK(tr.retained[0].states.back() == ref.retained[0].states.back());
        CHECK(tr.snapshots.at("write_end").back() == ref.snapshots.at("write_end").back());
    }
    omp_set_num_threads(saved);
}

TEST_CASE("reduction is linear over grid partitions")
{
    const Scenario sc = coarse_storage();
    const DetuningGrid g = build_grid(sc.ensemble);
    DetuningGrid lo, hi;
    for (std::size_t j = 0; j < g.deltas.size(); ++j) {
        DetuningGrid& part = g.deltas[j] < 0.0 ? lo : hi;
        part.deltas.push_back(g.deltas[j]);
        part.weights.push_back(g.weights[j]);
    }
    const double wl = std::accumulate(lo.weights.begin(), lo.weights.end(), 0.0);
    const double wh = std::accumulate(hi.weights.begin(), hi.weights.end(), 0.0);
    for (double& w : lo.weights) w /= wl;
    for (double& w : hi.weights) w /= wh;

    const EnsembleTrace all = sweep(sc.system, sc.sequence, g);
    const EnsembleTrace a = sweep(sc.system, sc.sequence, lo);
    const EnsembleTrace b = sweep(sc.system, sc.sequence, hi);
    double dev = 0.0;
    for (std::size_t i = 0; i < all.times.size(); ++i)
        dev = std::max(dev, std::abs(all.S[i] - (wl * a.S[i] + wh * b.S[i])));
    CHECK(dev < 1e-12);
}

TEST_CASE("ensemble observables stay physical")
{
    const Scenario sc = triple_bit_storage(ScenarioParams{});
    SweepOptions o;
    o.retained_deltas = {10.0, -10.0, 3.0};
    const EnsembleTrace tr = sweep(sc.system, sc.sequence, build_grid(sc.ensemble), o);
    CHECK(tr.max_trace_drift < 1e-9);
    CHECK(tr.max_hermiticity_error < 1e-9);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        CHECK(std::abs(tr.S[i]) <= 0.5);
        double sum = 0.0;
        for (double p : tr.populations[i]) {
            CHECK(p >= -1e-12);
            CHECK(p <= 1.0 + 1e-12);
            sum += p;
        }
        CHECK(sum == Approx(1.0).margin(1e-9));
    }

    SECTION("retained members are sorted and include off-grid requests")
    {
        REQUIRE(tr.retained.size() == 3);
        CHECK(tr.retained[0].delta_khz == -10.0);
        CHECK(tr.retained[1].delta_khz == 3.0);
        CHECK(tr.retained[2].delta_khz == 10.0);
        REQUIRE(tr.member(3.0));
        CHECK(tr.member(3.0)->states.size() == tr.times.size());
        CHECK_FALSE(tr.member(4.0));
    }
    SECTION("three echoes appear after the rephasing pulse")
    {
        const double te = sc.timeline().require_marker("rephase_end");
        int peaks = 0;
        for (std::size_t i = 1; i + 1 < tr.times.size(); ++i) {
            if (tr.times[i] < te) continue;
            const double a = std::abs(tr.S[i]);
            if (a > 0.01 && a > std::abs(tr.S[i - 1]) && a >= std::abs(tr.S[i + 1])) ++peaks;
        }
        CHECK(peaks == 3);
    }
}

TEST_CASE("member failures carry the offending detuning")
{
    const Scenario sc = coarse_storage();
    const DetuningGrid g = build_grid(sc.ensemble);
    SweepOptions o;
    o.run.trace_tolerance = -1.0;
    try {
        sweep(sc.system, sc.sequence, g, o);
        FAIL("expected a NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.delta_khz == g.deltas.front());
        CHECK(std::string(e.what()).find("-250") != std::string::npos);
    }
}

TEST_CASE("phase-cycle combination keeps the odd part")
{
    EnsembleTrace a, b;
    a.times = b.times = {0.0, 1.0};
    a.deltas = b.deltas = {0.0};
    a.weights = b.weights = {1.0};
    a.S = {cplx(1.0, 2.0), cplx(0.5, 0.0)};
    b.S = {cplx(-1.0, -2.0), cplx(0.5, 0.0)};
    a.P = {cplx(0.2, 0.0), cplx(0.0, 0.0)};
    b.P = {cplx(0.2, 0.0), cplx(0.0, -0.4)};
    a.populations = b.populations = {{1, 0, 0, 0}, {1, 0, 0, 0}};
    a.snapshots["x"] = {Matrix::Constant(3, 3, cplx(0.3, 0.0))};
    b.snapshots["x"] = {Matrix::Constant(3, 3, cplx(-0.3, 0.0))};
    const EnsembleTrace c = combine_phase_cycled(a, b);
    CHECK(c.S[0] == cplx(1.0, 2.0));
    CHECK(c.S[1] == cplx(0.0, 0.0));
    CHECK(c.P[0] == cplx(0.0, 0.0));
    CHECK(c.P[1] == cplx(0.0, 0.2));
    CHECK(c.snapshots.at("x")[0](1, 2) == cplx(0.3, 0.0));

    EnsembleTrace d = b;
    d.times = {0.0, 2.0};
    CHECK_THROWS_AS(combine_phase_cycled(a, d), std::invalid_argument);
}
