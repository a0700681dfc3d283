#include "qmem/propagate.hpp"
#include "qmem/scenarios.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace qmem;
using Catch::Approx;

namespace {

// Probe-only two-level use of the lambda system, no relaxation.
LevelSystem bare_system()
{
    LevelSystem s = default_three_level();
    s.big_gamma = {};
    s.gamma = {};
    return s;
}

Matrix ground(int n)
{
    Matrix m = Matrix::Zero(n, n);
    m(0, 0) = 1.0;
    return m;
}

PulseSegment probe(double khz)
{
    PulseSegment s;
    s.with(Field::probe, khz);
    s.duration_us = 1.0;
    return s;
}

Matrix rk4_drive(double khz, double total, double dt)
{
    const LevelSystem sys = bare_system();
    const PulseSegment s = probe(khz);
    Matrix rho = ground(3);
    const int n = static_cast<int>(std::lround(total / dt));
    for (int k = 0; k < n; ++k) rho = step_rk4(rho, sys, s, 0.0, dt);
    return rho;
}

}  // namespace

TEST_CASE("rk4 step")
{
    SECTION("zero Liouvillian leaves the state unchanged")
    {
        const Matrix rho = ground(3);
        const Matrix out = step_rk4(rho, Matrix::Zero(3, 3), RelaxationRates{3, {}, {}}, 0.01);
        CHECK((out - rho).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("pi pulse inverts")
    {
        CHECK(rk4_drive(25.0, 20.0, 0.01)(2, 2).real() == Approx(1.0).margin(1e-6));
    }
    SECTION("2 pi pulse returns to the ground state")
    {
        CHECK(rk4_drive(25.0, 40.0, 0.01)(0, 0).real() == Approx(1.0).margin(1e-6));
    }
    SECTION("oversized steps are refused")
    {
        CHECK_THROWS_AS(step_rk4(ground(3), bare_system(), probe(2500.0), 0.0, 0.1), std::invalid_argument);
    }
}

TEST_CASE("exact segment propagation")
{
    const LevelSystem sys = default_three_level();

    SECTION("free spin coherence")
    {
        Matrix rho = Matrix::Zero(3, 3);
        rho(0, 0) = rho(1, 1) = 0.5;
        rho(0, 1) = rho(1, 0) = 0.5;
        PulseSegment w;
        w.duration_us = 25.0;
        const Matrix out = propagate_segment_exact(rho, sys, w, 10.0);
        CHECK(std::arg(out(0, 1)) == Approx(1.5707963).epsilon(1e-7));
        CHECK(std::abs(out(0, 1)) / 0.5 == Approx(0.92447).epsilon(1e-4));
    }
    SECTION("zero duration is the identity")
    {
        PulseSegment w;
        w.with(Field::probe, 40.0);
        w.duration_us = 0.0;
        Matrix rho = ground(3);
        rho(0, 0) = 0.5;
        rho(1, 1) = 0.5;
        rho(0, 1) = rho(1, 0) = 0.3;
        CHECK((propagate_segment_exact(rho, sys, w, 10.0) - rho).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("auxiliary pi pulse transfers the excited population")
    {
        const LevelSystem s4 = default_four_level();
        Matrix rho = Matrix::Zero(4, 4);
        rho(2, 2) = 1.0;
        PulseSegment a;
        // Fast enough that optical dephasing during the pulse is negligible.
        a.with(Field::aux, 2500.0);
        a.duration_us = 0.2;
        CHECK(propagate_segment_exact(rho, s4, a, 0.0)(3, 3).real() >= 0.99);
    }
    SECTION("substeps reproduce the single exponential")
    {
        PulseSegment s;
        s.with(Field::probe, 30.0).with(Field::coupling, 20.0);
        s.duration_us = 4.0;
        std::vector<Matrix> samples;
        const Matrix a = propagate_segment_exact(ground(3), sys, s, 5.0, 8, &samples);
        const Matrix b = propagate_segment_exact(ground(3), sys, s, 5.0);
        REQUIRE(samples.size() == 8);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((samples.back() - a).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("run_member")
{
    SECTION("empty sequence gives the initial sample")
    {
        const TimeTrace t = run_member(default_three_level(), PulseSequence{}, 0.0);
        REQUIRE(t.times.size() == 1);
        CHECK(t.times[0] == 0.0);
        CHECK(t.states[0](0, 0).real() == 1.0);
    }

    const ScenarioParams p;
    const Scenario sc = triple_bit_storage(p);
    const Timeline tl = sc.timeline();
    const double ts = tl.require_marker("rephase_start");
    const double te = tl.require_marker("rephase_end");

    SECTION("samples land on every marker and segment boundary")
    {
        const TimeTrace t = run_member(sc.system, sc.sequence, 0.0);
        for (const auto& [name, when] : tl.markers) CHECK(t.times[t.index_at(when)] == Approx(when).margin(1e-12));
        for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
        CHECK(t.times.back() == Approx(tl.duration));
    }
    // The finite rephasing pulse also damps Re through optical dephasing
    // (5 to 9 percent here), so only Im gets a tight bound.
    SECTION("2 pi rephasing keeps Re and flips Im")
    {
        for (double d : {-10.0, 10.0}) {
            const TimeTrace t = run_member(sc.system, sc.sequence, d);
            const cplx before = t.at(ts)(0, 1), after = t.at(te)(0, 1);
            REQUIRE(std::abs(before.imag()) > 1e-3);
            CHECK(std::abs(after.real() - before.real()) < 0.1 * std::abs(before));
            CHECK(std::abs(after.imag() + before.imag()) < 0.03 * std::abs(before));
        }
    }
    SECTION("4 pi rephasing recovers both parts")
    {
        ScenarioParams q;
        q.area_pi = 4.0;
        const Scenario s4 = triple_bit_storage(q);
        const Timeline t4 = s4.timeline();
        for (double d : {-10.0, 10.0}) {
            const TimeTrace t = run_member(s4.system, s4.sequence, d);
            const cplx before = t.at(t4.require_marker("rephase_start"))(0, 1);
            const cplx after = t.at(t4.require_marker("rephase_end"))(0, 1);
            REQUIRE(std::abs(before.imag()) > 1e-3);
            CHECK(std::abs(after.real() - before.real()) < 0.1 * std::abs(before));
            CHECK(std::abs(after.imag() - before.imag()) < 0.03 * std::abs(before));
        }
    }
    SECTION("trace and Hermiticity hold over the whole scenario")
    {
        const TimeTrace t = run_member(sc.system, sc.sequence, 10.0);
        for (const auto& rho : t.states) {
            CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-9);
            CHECK(hermiticity_error(rho) < 1e-9);
        }
    }
    SECTION("trace drift beyond the tolerance aborts")
    {
        RunOptions o;
        o.trace_tolerance = -1.0;
        CHECK_THROWS_AS(run_member(sc.system, sc.sequence, 4.0, o), NumericalError);
    }
}

TEST_CASE("unitary evolution preserves the spectrum")
{
    ScenarioParams p;
    Scenario sc = triple_bit_storage(p);
    sc.system.big_gamma = {};
    sc.system.gamma = {};
    sc.sequence.initial_populations = {0.7, 0.3};
    const TimeTrace t = run_member(sc.system, sc.sequence, 14.0);
    Eigen::SelfAdjointEigenSolver<Matrix> first(t.states.front());
    for (std::size_t i = 0; i < t.states.size(); i += 50) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(t.states[i]);
        CHECK((es.eigenvalues() - first.eigenvalues()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("composition of segments")
{
    const LevelSystem sys = default_three_level();
    PulseSegment a;
    a.with(Field::probe, 17.0).with(Field::coupling, 17.0);
    a.duration_us = 3.0;
    PulseSegment b;
    b.with(Field::coupling, 40.0, 2.0);
    b.duration_us = 1.7;
    PulseSequence seq;
    seq.add(a).add(b);
    const TimeTrace t = run_member(sys, seq, 8.0);
    const Matrix mid = propagate_segment_exact(ground(3), sys, a, 8.0);
    const Matrix end = propagate_segment_exact(mid, sys, b, 8.0);
    CHECK((t.states.back() - end).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("rk4 agrees with the exact propagator")
{
    const Scenario sc = triple_bit_storage(ScenarioParams{});
    CHECK(cross_validate(sc.system, sc.sequence, 10.0, 0.005) < 1e-8);

    PulseSequence decay;
    decay.initial_populations = {0.2, 0.3, 0.5};
    decay.wait(50.0);
    CHECK(cross_validate(default_three_level(), decay, 10.0, 0.005) < 1e-10);
}

TEST_CASE("rk4 error is fourth order in the step")
{
    // Weak drive so the phase cap never shortens the requested step.
    PulseSequence seq;
    seq.initial_populations = {0.5, 0.5};
    PulseSegment s;
    s.with(Field::probe, 17.0).with(Field::coupling, 12.0);
    s.duration_us = 40.0;
    seq.add(s);
    const LevelSystem sys = default_three_level();
    const double e1 = cross_validate(sys, seq, 5.0, 0.025);
    const double e2 = cross_validate(sys, seq, 5.0, 0.05);
    CHECK(e2 / e1 == Approx(16.0).epsilon(0.15));
}
