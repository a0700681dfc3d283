#include "qmem/model.hpp"
#include "qmem/units.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace qmem;
using Catch::Approx;

namespace {

PulseSegment raman_pair(double each_khz, double dur_us)
{
    PulseSegment s;
    s.with(Field::probe, each_khz).with(Field::coupling, each_khz);
    s.duration_us = dur_us;
    return s;
}

}  // namespace

TEST_CASE("unit conversions")
{
    CHECK(to_angular(50.0) == Approx(0.3141592654).epsilon(1e-9));
    CHECK(to_angular(0.0) == 0.0);
    CHECK(to_decay_constant(1.0) == Approx(3.141592654e-3).epsilon(1e-9));
    CHECK(coherence_time_us(1.0) == Approx(318.30989).epsilon(1e-7));
    CHECK(std::isinf(coherence_time_us(0.0)));

    for (double v : {1e-6, 0.5, 17.0, 2500.0, -40.0}) {
        CHECK(from_angular(to_angular(v)) == Approx(v).epsilon(1e-12));
        CHECK(from_decay_constant(to_decay_constant(v)) == Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("pulse area uses the generalized Rabi frequency")
{
    CHECK(pulse_area(raman_pair(50.0 / std::sqrt(2.0), 20.0)) == Approx(2.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(pulse_area(raman_pair(17.0, 3.0)) == Approx(0.45313).epsilon(1e-4));

    PulseSegment off;
    off.with(Field::probe, 0.0);
    off.duration_us = 5.0;
    CHECK(pulse_area(off) == 0.0);

    PulseSegment unresolved;
    unresolved.with(Field::probe, 10.0);
    unresolved.area_pi = 1.0;
    CHECK_THROWS_AS(pulse_area(unresolved), std::invalid_argument);
}

TEST_CASE("pulse area is additive over subdivision")
{
    const PulseSegment whole = raman_pair(23.7, 7.3);
    const PulseSegment half = raman_pair(23.7, 7.3 / 2.0);
    CHECK(2.0 * pulse_area(half) == Approx(pulse_area(whole)).epsilon(1e-12));
}

TEST_CASE("resolve_durations converts areas")
{
    PulseSequence seq;
    PulseSegment r;
    r.with(Field::probe, 50.0 / std::sqrt(2.0)).with(Field::coupling, 50.0 / std::sqrt(2.0));
    r.area_pi = 1.0;
    seq.add(r);
    PulseSegment aux;
    aux.with(Field::aux, 50.0);
    aux.area_pi = 1.0;
    seq.add(aux);
    seq.add(raman_pair(17.0, 3.0));

    const PulseSequence res = resolve_durations(seq);
    const auto& s0 = std::get<PulseSegment>(res.items[0]);
    const auto& s1 = std::get<PulseSegment>(res.items[1]);
    const auto& s2 = std::get<PulseSegment>(res.items[2]);
    CHECK(*s0.duration_us == Approx(10.0).epsilon(1e-12));
    CHECK(*s1.duration_us == Approx(10.0).epsilon(1e-12));
    CHECK(s2 == std::get<PulseSegment>(seq.items[2]));
    CHECK_FALSE(s0.area_pi);

    SECTION("idempotent")
    {
        CHECK(resolve_durations(res) == res);
    }
    SECTION("area with no active field is rejected")
    {
        PulseSequence bad;
        PulseSegment z;
        z.with(Field::probe, 0.0);
        z.area_pi = 2.0;
        bad.add(z);
        CHECK_THROWS_AS(resolve_durations(bad), std::invalid_argument);
    }
}

TEST_CASE("default systems validate cleanly")
{
    for (const auto& sys : {default_three_level(), default_four_level()}) {
        const auto rep = validate_system(sys);
        CHECK(rep.error_count() == 0);
        CHECK(rep.warning_count() == 0);
    }
    const LevelSystem s3 = default_three_level();
    CHECK(s3.Gamma(3, 1) == 0.5);
    CHECK(s3.Gamma(3, 2) == 0.5);
    CHECK(s3.dephasing(3, 1) == 25.0);
    CHECK(s3.dephasing(2, 3) == 25.0);
    CHECK(s3.dephasing(1, 2) == 1.0);
    CHECK(s3.Gamma(2, 1) == 0.0);
    const LevelSystem s4 = default_four_level();
    CHECK(s4.n_levels == 4);
    CHECK(s4.Gamma(3, 4) == 0.5);
    CHECK(s4.dephasing(3, 4) == 25.0);
    CHECK(s4.dephasing(4, 1) == 0.0);
    REQUIRE(s4.transition(Field::aux));
    CHECK(*s4.transition(Field::aux) == Transition{Field::aux, 3, 4});
}

TEST_CASE("validation reports")
{
    const LevelSystem sys = default_three_level();

    SECTION("population normalization")
    {
        PulseSequence seq;
        seq.initial_populations = {0.6, 0.6};
        const auto rep = validate(sys, seq, EnsembleSpec{});
        CHECK_FALSE(rep.ok());
        REQUIRE(rep.has("population"));
        bool found = false;
        for (const auto& is : rep.issues)
            if (is.message.find("population normalization") != std::string::npos) found = true;
        CHECK(found);
    }
    SECTION("positivity warning when dephasing is below the lifetime bound")
    {
        LevelSystem s = sys;
        s.set_dephasing(3, 1, 0.0);
        const auto rep = validate_system(s);
        CHECK(rep.ok());
        CHECK(rep.has("positivity"));
    }
    SECTION("negative rates and bad transitions are errors")
    {
        LevelSystem s = sys;
        s.set_Gamma(3, 1, -1.0);
        CHECK_FALSE(validate_system(s).ok());
        LevelSystem t = sys;
        t.transitions.push_back({Field::probe, 2, 3});
        CHECK(validate_system(t).has("transition"));
    }
    SECTION("ensemble checks")
    {
        EnsembleSpec e;
        e.spacing_khz = 0.0;
        CHECK_FALSE(validate_ensemble(e).ok());
        EnsembleSpec narrow;
        narrow.truncation_khz = 100.0;
        CHECK_FALSE(validate_ensemble(narrow).ok());
        EnsembleSpec other;
        other.shift_target = 3;
        CHECK(validate(sys, PulseSequence{}, other).has("shift_target"));
    }
    SECTION("field missing from the system")
    {
        PulseSequence seq;
        PulseSegment a;
        a.with(Field::aux, 50.0);
        a.duration_us = 1.0;
        seq.add(a);
        CHECK(validate_sequence(sys, seq).has("field"));
    }
    SECTION("long sequences warn about grid revivals")
    {
        PulseSequence seq;
        seq.wait(600.0);
        const auto rep = validate(sys, seq, EnsembleSpec{});
        CHECK(rep.ok());
        CHECK(rep.has("grid_revival"));
    }
}

TEST_CASE("timeline places markers and applies overrides")
{
    PulseSequence seq;
    seq.initial_populations = {0.5, 0.5};
    seq.mark("A_start");
    seq.add(raman_pair(17.0, 3.0));
    seq.mark("A_end");
    PulseSegment w;
    w.duration_us = 10.0;
    w.overrides.push_back({2, 1, 0.0});
    seq.add(w);
    seq.items.emplace_back(SetDecay{{2, 1, 4.0}});
    seq.wait(2.0);

    const Timeline tl = build_timeline(default_three_level(), seq);
    CHECK(tl.duration == Approx(15.0));
    CHECK(tl.require_marker("A_start") == 0.0);
    CHECK(tl.require_marker("A_end") == Approx(3.0));
    CHECK_FALSE(tl.marker("nope"));
    CHECK_THROWS(tl.require_marker("nope"));
    REQUIRE(tl.segments.size() == 3);
    CHECK(tl.segments[0].gamma[1][0] == 1.0);
    CHECK(tl.segments[1].gamma[1][0] == 0.0);
    CHECK(tl.segments[1].gamma[0][1] == 0.0);
    CHECK(tl.segments[2].gamma[1][0] == 4.0);
    CHECK(tl.initial[0] == 0.5);
    CHECK(tl.initial[1] == 0.5);
}

TEST_CASE("default initial state is the lowest level")
{
    const PulseSequence seq;
    const auto p = seq.initial_state();
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
    CHECK(p[2] == 0.0);
    CHECK(p[3] == 0.0);
}
