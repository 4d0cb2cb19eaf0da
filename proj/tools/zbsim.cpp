#include "zeroblock/analytics.hpp"
#include "zeroblock/chain.hpp"
#include "zeroblock/churn.hpp"
#include "zeroblock/errors.hpp"
#include "zeroblock/scenario.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace zeroblock;

namespace {

enum Exit { ok = 0, validation_failure = 1, runtime_failure = 2 };

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("zbsim");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("ZEROBLOCK_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string_view(env) != "off") {
            spdlog::warn("ignoring unknown ZEROBLOCK_LOG level '{}'", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

std::string six(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Target parse_pow_target(const std::string& text)
{
    std::istringstream in(text);
    std::string kind;
    unsigned width = 0;
    std::uint64_t threshold = 0;
    if (!(in >> kind >> width >> threshold) || kind != "toy") {
        throw ConfigError("--pow-target expects 'toy <width> <threshold>'");
    }
    return Target::toy(width, threshold);
}

struct SimulateArgs {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::string format = "csv";
    bool serial = false;
};

int cmd_simulate(const SimulateArgs& a)
{
    Scenario sc;
    try {
        sc = load_scenario(a.scenario);
    } catch (const ParseError& e) {
        std::cerr << a.scenario << ':' << e.line() << ": " << e.what() << '\n';
        return validation_failure;
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << '\n';
        return runtime_failure;
    }
    if (a.seed) sc.config.seed = *a.seed;
    if (a.reps) {
        if (*a.reps < 1) {
            std::cerr << "--reps must be at least 1\n";
            return validation_failure;
        }
        sc.repetitions = *a.reps;
    }
    try {
        validate(sc.config);
    } catch (const ConfigError& e) {
        std::cerr << a.scenario << ": " << e.what() << '\n';
        return validation_failure;
    }

    spdlog::info("running scenario {} ({} repetitions, seed {})", sc.name, sc.repetitions, sc.config.seed);
    const auto result = run_scenario(sc, std::filesystem::path(a.out), !a.serial);
    for (const auto& f : result.files) spdlog::info("wrote {}", f.string());
    std::cout << format_aggregate_csv(result.reps);
    return ok;
}

int cmd_chain(const std::string& action, const std::string& file, const std::string& out,
              const std::string& target_text)
{
    const Target target = target_text.empty() ? default_pow_target() : parse_pow_target(target_text);
    const std::string text = read_file(file);
    Chain chain;
    try {
        chain = parse_chain(text);
    } catch (const ParseError& e) {
        std::cerr << file << ':' << e.line() << ": " << e.what() << '\n';
        return validation_failure;
    }
    if (auto fault = validate_chain(chain, target)) {
        std::cerr << file << ':' << fault->position + 1 << ": invalid block: " << to_string(fault->reason) << '\n';
        return validation_failure;
    }
    if (action == "validate") {
        std::cout << "valid: " << chain.size() << " blocks, " << chain.standard_height() << " standard\n";
        return ok;
    }
    const std::string compacted = format_chain(compact(chain));
    if (out.empty()) {
        std::cout << compacted;
    } else {
        std::ofstream o(out, std::ios::binary);
        if (!(o << compacted)) throw std::runtime_error("cannot write " + out);
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();

    CLI::App app{"ZeroBlock selfish-mining simulator and analytics"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
    simulate->add_option("--scenario", sim.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--seed", sim.seed, "Override the scenario seed");
    simulate->add_option("--reps", sim.reps, "Override the number of repetitions");
    simulate->add_option("--format", sim.format, "Output format")->check(CLI::IsMember({"csv"}));
    simulate->add_flag("--serial", sim.serial, "Run repetitions sequentially");

    auto* analytics = app.add_subcommand("analytics", "Closed-form probabilities");
    analytics->require_subcommand(1);
    double gamma = 0.0, lambda = 1.0, sp = 0.49;
    unsigned rho = 1;
    std::uint64_t mc_trials = 0, mc_seed = 1, m = 0;
    ChurnParams cp;
    std::vector<std::string> rows;
    auto* threshold = analytics->add_subcommand("threshold", "Lower selfish-mining threshold for gamma");
    threshold->add_option("--gamma", gamma)->required();
    auto* poisson = analytics->add_subcommand("poisson", "Poisson probability of rho blocks");
    poisson->add_option("--rho", rho)->required();
    poisson->add_option("--lambda", lambda)->required();
    auto* event4 = analytics->add_subcommand("event4", "Event-4 probability bound");
    event4->add_option("--sp", sp)->required();
    event4->add_option("--mc-trials", mc_trials, "Also print a Monte Carlo estimate");
    event4->add_option("--seed", mc_seed);
    auto* churn_table = analytics->add_subcommand("churn-table", "Majority join probabilities as CSV");
    churn_table->add_option("--row", rows, "Extra row n,sigma,eta,psi");
    auto* retry = analytics->add_subcommand("retry", "Probability of success after m homogeneous retries");
    retry->add_option("--n", cp.n)->required();
    retry->add_option("--sigma", cp.sigma)->required();
    retry->add_option("--eta", cp.eta)->required();
    retry->add_option("--psi", cp.psi)->required();
    retry->add_option("--m", m)->required();

    auto* chain_cmd = app.add_subcommand("chain", "Chain file utilities");
    chain_cmd->require_subcommand(1);
    std::string chain_file, chain_out, chain_target;
    auto* validate_cmd = chain_cmd->add_subcommand("validate", "Validate a chain file");
    validate_cmd->add_option("file", chain_file)->required();
    validate_cmd->add_option("--pow-target", chain_target, "toy <width> <threshold>");
    auto* compact_cmd = chain_cmd->add_subcommand("compact", "Remove interior dummy runs");
    compact_cmd->add_option("file", chain_file)->required();
    compact_cmd->add_option("--out", chain_out, "Output file (default stdout)");
    compact_cmd->add_option("--pow-target", chain_target, "toy <width> <threshold>");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return validation_failure;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*threshold) {
            std::cout << six(selfish_threshold_lower(gamma)) << '\n';
        } else if (*poisson) {
            std::cout << six(poisson_pmf(rho, lambda)) << '\n';
        } else if (*event4) {
            std::cout << six(event4_max_probability(sp)) << '\n';
            if (mc_trials > 0) {
                const auto est = event4_monte_carlo(sp, mc_trials, mc_seed);
                std::cout << "monte_carlo," << six(est.frequency()) << ',' << est.trials << '\n';
            }
        } else if (*churn_table) {
            auto params = reference_join_rows();
            for (const auto& r : rows) {
                ChurnParams p;
                char c1, c2, c3;
                std::istringstream in(r);
                if (!(in >> p.n >> c1 >> p.sigma >> c2 >> p.eta >> c3 >> p.psi) || c1 != ',' || c2 != ',' || c3 != ',') {
                    std::cerr << "--row expects n,sigma,eta,psi, got '" << r << "'\n";
                    return validation_failure;
                }
                params.push_back(p);
            }
            std::cout << "n,sigma,eta,psi,p_majority\n";
            for (const auto& p : params) {
                std::cout << p.n << ',' << p.sigma << ',' << p.eta << ',' << p.psi << ','
                          << six(join_majority_probability(p)) << '\n';
            }
        } else if (*retry) {
            std::cout << six(retry_success_probability(cp, m)) << '\n';
        } else if (*validate_cmd) {
            return cmd_chain("validate", chain_file, "", chain_target);
        } else if (*compact_cmd) {
            return cmd_chain("compact", chain_file, chain_out, chain_target);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return validation_failure;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return validation_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return runtime_failure;
    }
    return ok;
}
