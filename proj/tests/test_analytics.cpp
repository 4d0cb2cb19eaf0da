#include "support.hpp"

#include "zeroblock/analytics.hpp"
#include "zeroblock/errors.hpp"
#include "zeroblock/report_io.hpp"
#include "zeroblock/scenario.hpp"

#include <doctest.h>

#include <cmath>

using namespace zeroblock;

TEST_CASE("poisson pmf")
{
    CHECK(poisson_pmf(1, 1.0) == doctest::Approx(0.3679).epsilon(1e-4));
    CHECK(poisson_pmf(2, 1.0) == doctest::Approx(0.1839).epsilon(1e-4));
    CHECK(poisson_pmf(3, 1.0) == doctest::Approx(0.0613).epsilon(1e-3));
    CHECK(poisson_pmf(4, 1.0) == doctest::Approx(0.0153).epsilon(1e-2));
    CHECK(poisson_pmf(5, 1.0) < 0.01);
    // e^-1 / rho! computed directly.
    double fact = 1.0;
    for (unsigned rho = 0; rho <= 10; ++rho) {
        if (rho > 0) fact *= rho;
        CHECK(poisson_pmf(rho, 1.0) == doctest::Approx(std::exp(-1.0) / fact).epsilon(1e-12));
    }
    for (double lambda : {0.5, 1.0, 2.0}) {
        double sum = 0.0;
        for (unsigned rho = 0; rho <= 50; ++rho) sum += poisson_pmf(rho, lambda);
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }
    CHECK_THROWS_AS(poisson_pmf(1, 0.0), DomainError);
    CHECK_THROWS_AS(poisson_pmf(1, -1.0), DomainError);
}

TEST_CASE("selfish threshold")
{
    CHECK(selfish_threshold_lower(0.0) == doctest::Approx(1.0 / 3));
    CHECK(selfish_threshold_lower(0.5) == doctest::Approx(0.25));
    CHECK(selfish_threshold_lower(0.99) == doctest::Approx(0.01 / 1.02));
    CHECK(std::abs(selfish_threshold_lower(0.99) - 0.009) <= 1e-3);
    CHECK(selfish_threshold_lower(1.0) == 0.0);
    double prev = 1.0;
    for (int k = 0; k <= 100; ++k) {
        const double v = selfish_threshold_lower(k / 100.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(selfish_threshold_lower(-0.1), DomainError);
    CHECK_THROWS_AS(selfish_threshold_lower(1.1), DomainError);
}

TEST_CASE("event-4 bound and Monte Carlo cross-check")
{
    const double sp = 0.49, hp = 0.51;
    const double printed = sp * std::exp(-sp) * hp * std::exp(-hp) * sp;
    CHECK(event4_max_probability(sp) == doctest::Approx(printed).epsilon(1e-14));
    CHECK(event4_max_probability(sp) == doctest::Approx(0.0450472054508843).epsilon(1e-12));
    CHECK(event4_max_probability(1e-9) < 1e-17);
    CHECK_THROWS_AS(event4_max_probability(0.0), DomainError);
    CHECK_THROWS_AS(event4_max_probability(1.0), DomainError);

    // Exactly one arrival of each kind with the selfish one first: the two
    // Poisson terms times the 1/2 chance of the order.
    const double pattern = sp * std::exp(-sp) * hp * std::exp(-hp) * 0.5;
    const std::uint64_t trials = 400000;
    const auto par = event4_monte_carlo(sp, trials, 9);
    const auto ser = event4_monte_carlo_serial(sp, trials, 9);
    CHECK(par.hits == ser.hits);
    CHECK(par.trials == trials);
    const double sd = std::sqrt(pattern * (1 - pattern) / trials);
    CHECK(std::abs(par.frequency() - pattern) < 4 * sd);
    MESSAGE("event-4 printed bound " << printed << ", simulated pattern frequency " << par.frequency());
}

TEST_CASE("all-honest revenue follows hash power")
{
    SimConfig c;
    c.miners = {{1, Role::Honest, 0.2}, {2, Role::Honest, 0.3}, {3, Role::Honest, 0.5}};
    c.zeroblock = false;
    c.duration_blocks = 20000;
    c.seed = 8;
    c.record_trace = false;
    const auto report = revenue_shares(run(c), fork_window(c));
    const double n = static_cast<double>(report.totals.canonical);
    for (const auto& m : report.miners) {
        const double sd = std::sqrt(m.hash_power * (1 - m.hash_power) / n);
        CHECK(std::abs(m.share - m.hash_power) <= 3 * sd);
    }
    CHECK(report_reconciles(report));
    CHECK(report.totals.intentional_forks == 0);
}

TEST_CASE("report reconciles and round-trips through CSV")
{
    for (const bool zb : {false, true}) {
        auto cfg = zbtest::three_miners(0.35, zb, 3000, 14);
        cfg.record_trace = false;
        const auto report = revenue_shares(run(cfg), fork_window(cfg));
        CHECK(report_reconciles(report));
        double sum = 0.0;
        for (const auto& m : report.miners) {
            CHECK(m.share >= 0.0);
            CHECK(m.minted == m.canonical + m.orphaned + m.rejected);
            sum += m.share;
        }
        CHECK(sum == doctest::Approx(1.0));
        CHECK_FALSE(report.partial);

        const std::string csv = format_report_csv(report);
        CHECK(csv.rfind(std::string(report_csv_header), 0) == 0);
        const auto back = parse_report_csv(csv);
        CHECK(format_report_csv(back) == csv);
        CHECK(report_reconciles(back));
    }
    CHECK_THROWS_AS(parse_report_csv("nonsense\n"), ParseError);
}

namespace {

SimTrace synthetic_trace()
{
    // Two honest miners; miner 2 holds a block first published after its interval ended.
    SimTrace t;
    const Chain base = zbtest::extend(Chain(), 1, 1, 1);
    const Chain late = zbtest::extend(base, 2, 2, 2);
    const Chain rival = zbtest::extend(base, 2, 1, 3);
    auto add = [&](const Block& b, double mint, double pub, bool adv) {
        t.minted_index.emplace(b.id(), t.minted.size());
        t.minted.push_back(MintedBlock{b, mint, pub, adv, {mint, mint}});
    };
    add(base.head(), 10.0, 10.0, false);
    add(late.head(), 700.0, 1400.0, false);
    add(rival.head(), 800.0, 800.0, false);
    t.final_chains = {{MinerSpec{1, Role::Honest, 0.7}, rival}, {MinerSpec{2, Role::Honest, 0.3}, late}};
    t.horizon_reached = false;
    return t;
}

} // namespace

TEST_CASE("canonical chain, dispositions and the withholding metric on a hand-built trace")
{
    const SimTrace t = synthetic_trace();
    CHECK(canonical_chain(t).head_id() == t.final_chains[0].second.head_id());
    const MatSchedule s;
    CHECK(withheld_past_boundary(t, s) == 1);

    const auto report = revenue_shares(t, 60.0);
    CHECK(report.partial);
    CHECK(report.miners[0].canonical == 2);
    CHECK(report.miners[1].orphaned == 1);
    // The two children of the first block were published 600 s apart: not accidental.
    CHECK(report.unclassified_forks == 1);
    CHECK(report.totals.accidental_forks == 0);
    CHECK(revenue_shares(t, 1000.0).totals.accidental_forks == 1);
}
