#include <doctest.h>

#include <set>

#include "qlc/errors.hpp"
#include "qlc/population.hpp"
#include "qlc/report.hpp"
#include "qlc/rng.hpp"

using namespace qlc;

TEST_CASE("population storage") {
    PopulationState p;
    CHECK(p.j_max() == -1);
    CHECK(p.get(3, 1, 0) == 0.0);
    p.set(3, -2, 1, 0.25);
    CHECK(p.j_max() == 3);
    CHECK(p.get(3, -2, 1) == 0.25);
    p.add_uniform_m(1, 0, 0.75);
    CHECK(p.get(1, -1, 0) == doctest::Approx(0.25));
    CHECK(p.j_mass(1) == doctest::Approx(0.75));
    CHECK(p.phonon_mass(1) == doctest::Approx(0.25));
    CHECK(p.total() == doctest::Approx(1.0));
    CHECK(p.j_max_populated() == 3);
    CHECK_NOTHROW(p.check_valid());
    p.set_lost(0.1);
    CHECK_THROWS_AS(p.check_valid(), PreconditionError);
    CHECK_THROWS_AS(p.set(1, 2, 0, 1.0), PreconditionError);
    CHECK_THROWS_AS(p.set(1, 0, 2, 1.0), PreconditionError);
}

TEST_CASE("equality ignores storage size") {
    PopulationState a = PopulationState::delta(1, 0), b = PopulationState::delta(1, 0);
    b.reserve_j(20);
    CHECK(a == b);
    b.add(4, 0, 0, 1e-300);
    CHECK_FALSE(a == b);
}

TEST_CASE("uniform start and histogram") {
    const auto u = PopulationState::uniform_in_J(0, 9);
    const auto h = u.j_histogram();
    REQUIRE(h.size() == 10);
    for (double w : h) CHECK(w == doctest::Approx(0.1));
    CHECK(u.get(9, -9, 0) == doctest::Approx(0.1 / 19));
}

TEST_CASE("ground fraction and standard error") {
    PopulationState p;
    p.set(0, 0, 0, 0.3);
    p.set(1, 1, 1, 0.3);
    p.set(2, 0, 0, 0.2);
    p.set_lost(0.2);
    CHECK(ground_fraction(p) == doctest::Approx(0.6));
    CHECK(bernoulli_se(0.5, 101) == doctest::Approx(0.05));
    CHECK(bernoulli_se(0.0, 100) == 0.0);
}

TEST_CASE("random streams") {
    CHECK(derive_seed(1, "cooling", 0) != derive_seed(1, "cooling", 1));
    CHECK(derive_seed(1, "cooling", 0) != derive_seed(1, "pumping", 0));
    CHECK(derive_seed(1, "cooling", 0) != derive_seed(2, "cooling", 0));
    CHECK(derive_seed(7, "scan", 3) == derive_seed(7, "scan", 3));
    Rng a(1, "x", 0), b(1, "x", 0);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
    Rng r(3);
    double sum = 0, sq = 0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        const double z = r.normal();
        sq += z * z;
    }
    CHECK(sum / N == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sq / N == doctest::Approx(1.0).epsilon(0.02));
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(r.below(5));
    CHECK(seen == std::set<std::uint64_t>{0, 1, 2, 3, 4});
}
