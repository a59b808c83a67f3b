// Desk-scale Monte Carlo properties (10,000 replicates per cell).

#include "oslr/simulation.hpp"

#include <doctest.h>

#include <map>
#include <utility>

using namespace oslr;

namespace {

constexpr double kBandLo = 0.0435;
constexpr double kBandHi = 0.0565;

const SimulationResult& cell(std::size_t n_b, double pi)
{
    static std::map<std::pair<std::size_t, double>, SimulationResult> cache;
    auto it = cache.find({n_b, pi});
    if (it == cache.end()) {
        Scenario s;
        s.n_b = n_b;
        s.pi = pi;
        s.replicates = 10000;
        it = cache.emplace(std::pair{n_b, pi}, run_scenario(s, default_workers())).first;
    }
    return it->second;
}

const double kPis[] = {1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0, 1.0};

}  // namespace

TEST_CASE("corrected tests hold the level across allocation ratios")
{
    for (double pi : kPis) {
        const auto& r = cell(50, pi);
        for (Procedure p : {Procedure::corrected, Procedure::corrected_wu}) {
            INFO("pi = " << pi << ", " << procedure_id(p) << " rate " << r[p].two_sided_rate);
            CHECK(r[p].two_sided_rate >= kBandLo);
            CHECK(r[p].two_sided_rate <= kBandHi);
        }
    }
}

TEST_CASE("uncorrected inflation grows with the allocation ratio")
{
    double previous = 0.0;
    for (double pi : kPis) {
        const double rate = cell(50, pi)[Procedure::uncorrected].two_sided_rate;
        INFO("pi = " << pi << " rate " << rate);
        CHECK(rate >= previous - 0.005);
        previous = rate;
    }
    CHECK(cell(50, 1.0)[Procedure::uncorrected].two_sided_rate > kBandHi);
}

TEST_CASE("inflation barely depends on the experimental sample size")
{
    const double small = cell(25, 0.5)[Procedure::uncorrected].two_sided_rate - 0.05;
    const double large = cell(200, 0.5)[Procedure::uncorrected].two_sided_rate - 0.05;
    INFO("inflation n_B=25: " << small << ", n_B=200: " << large);
    CHECK(std::abs(small - large) < 0.01);
}

TEST_CASE("Wu weight is at least as liberal as the classical variance in the superiority direction")
{
    // With N < E the w = 0.5 variance is the smaller one, so every lower-tail
    // rejection at w = 0 is also one at w = 0.5.
    for (double pi : kPis) {
        const auto& r = cell(50, pi);
        INFO("pi = " << pi);
        CHECK(r[Procedure::uncorrected_wu].one_sided_rejections >= r[Procedure::uncorrected].one_sided_rejections);
        CHECK(r[Procedure::oslr_true_wu].one_sided_rejections >= r[Procedure::oslr_true].one_sided_rejections);
        CHECK(r[Procedure::corrected_wu].one_sided_rejections >= r[Procedure::corrected].one_sided_rejections);
    }
}
