#include "zeroblock/scenario.hpp"

#include "zeroblock/batch.hpp"
#include "zeroblock/errors.hpp"
#include "zeroblock/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace zeroblock {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> words(std::string_view s)
{
    std::istringstream in{std::string(s)};
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

template <class T>
T parse_number(std::string_view value, std::size_t line, std::string_view key)
{
    const std::string v(value);
    try {
        std::size_t used = 0;
        T out;
        if constexpr (std::is_floating_point_v<T>) {
            out = static_cast<T>(std::stod(v, &used));
        } else {
            if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
            out = static_cast<T>(std::stoull(v, &used));
        }
        if (used != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ParseError(line, "invalid value '" + v + "' for " + std::string(key));
    }
}

bool parse_bool(std::string_view value, std::size_t line, std::string_view key)
{
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ParseError(line, "invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

Target parse_target(std::string_view value, std::size_t line)
{
    const auto w = words(value);
    try {
        if (w.size() == 3 && w[0] == "toy") {
            return Target::toy(static_cast<unsigned>(std::stoul(w[1])), std::stoull(w[2]));
        }
        if (w.size() == 2 && w[0] == "network") {
            auto d = digest_from_hex(w[1]);
            if (!d) throw ParseError(line, "network target must be 64 hex digits");
            Uint256 t;
            boost::multiprecision::import_bits(t, d->begin(), d->end(), 8, true);
            return Target::network(t);
        }
    } catch (const DomainError& e) {
        throw ParseError(line, std::string("invalid pow_target: ") + e.what());
    } catch (const std::logic_error&) {
        throw ParseError(line, "invalid pow_target '" + std::string(value) + "'");
    }
    throw ParseError(line, "pow_target must be 'toy <width> <threshold>' or 'network <hex>'");
}

MinerSpec parse_miner(std::string_view value, std::size_t line)
{
    const auto w = words(value);
    if (w.size() != 3 && w.size() != 4) throw ParseError(line, "miner takes 'id role share [clock_offset]'");
    MinerSpec m;
    m.id = parse_number<MinerId>(w[0], line, "miner id");
    if (w[1] == "honest") m.role = Role::Honest;
    else if (w[1] == "selfish") m.role = Role::Selfish;
    else throw ParseError(line, "miner role must be honest or selfish, got '" + w[1] + "'");
    m.hash_share = parse_number<double>(w[2], line, "miner share");
    if (w.size() == 4) m.clock_offset = parse_number<double>(w[3], line, "clock offset");
    return m;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::pair<double, double> mean_sd(const std::vector<double>& xs)
{
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return {mean, sd};
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace

Scenario parse_scenario(std::string_view text)
{
    Scenario sc;
    std::set<std::string> seen;
    std::size_t lineno = 0, start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (value.empty()) throw ParseError(lineno, "empty value for " + key);
        if (key != "miner" && !seen.insert(key).second) throw ParseError(lineno, "duplicate key " + key);
        seen.insert(key);

        auto& c = sc.config;
        if (key == "name") sc.name = std::string(value);
        else if (key == "miner") c.miners.push_back(parse_miner(value, lineno));
        else if (key == "zeroblock") c.zeroblock = parse_bool(value, lineno, key);
        else if (key == "duration_blocks") c.duration_blocks = parse_number<std::uint64_t>(value, lineno, key);
        else if (key == "duration_seconds") c.duration_seconds = parse_number<double>(value, lineno, key);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(value, lineno, key);
        else if (key == "reps") sc.repetitions = parse_number<std::size_t>(value, lineno, key);
        else if (key == "avt_net") c.avt_net = parse_number<double>(value, lineno, key);
        else if (key == "ipt") c.ipt = parse_number<double>(value, lineno, key);
        else if (key == "propagation") {
            try {
                c.propagation = PropagationModel::parse(value);
            } catch (const ConfigError& e) {
                throw ParseError(lineno, e.what());
            }
        } else if (key == "forced_gamma") {
            if (value == "none") c.forced_gamma.reset();
            else c.forced_gamma = parse_number<double>(value, lineno, key);
        } else if (key == "mine_until_boundary") c.mine_until_boundary = parse_bool(value, lineno, key);
        else if (key == "adversary_builds_dummies") c.adversary_builds_dummies = parse_bool(value, lineno, key);
        else if (key == "retarget_epoch") c.retarget_epoch = parse_number<std::size_t>(value, lineno, key);
        else if (key == "retarget_clamp") c.retarget_clamp = parse_number<double>(value, lineno, key);
        else if (key == "hash_scale") c.hash_scale = parse_number<double>(value, lineno, key);
        else if (key == "backend") {
            if (value == "stochastic") c.backend = MiningBackend::Stochastic;
            else if (value == "hash") c.backend = MiningBackend::Hash;
            else throw ParseError(lineno, "backend must be stochastic or hash");
        } else if (key == "pow_target") c.pow_target = parse_target(value, lineno);
        else if (key == "allow_majority_adversary") c.allow_majority_adversary = parse_bool(value, lineno, key);
        else if (key == "trace") sc.write_trace = parse_bool(value, lineno, key);
        else throw ParseError(lineno, "unknown key " + key);
    }

    for (const char* required : {"name", "miner", "zeroblock", "seed"}) {
        if (!seen.contains(required)) throw ParseError(0, std::string("missing required key ") + required);
    }
    if (!seen.contains("duration_blocks") && !seen.contains("duration_seconds")) {
        throw ParseError(0, "missing required key duration_blocks or duration_seconds");
    }
    if (sc.repetitions < 1) throw ParseError(0, "reps must be at least 1");
    for (char ch : sc.name) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) {
            throw ParseError(0, "name may only contain letters, digits, '-', '_' and '.'");
        }
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

double fork_window(const SimConfig& config)
{
    return config.ipt;
}

std::string format_aggregate_csv(const std::vector<RepetitionSummary>& reps)
{
    std::ostringstream os;
    os << "miner,role,hash_power,reps,share_mean,share_stddev,fork_rate_mean,fork_rate_stddev\n";
    if (reps.empty()) return os.str();
    std::vector<double> fork_rates;
    for (const auto& r : reps) fork_rates.push_back(r.report.fork_rate);
    const auto [fm, fs] = mean_sd(fork_rates);
    const auto& first = reps.front().report.miners;
    for (std::size_t m = 0; m < first.size(); ++m) {
        std::vector<double> shares;
        for (const auto& r : reps) shares.push_back(r.report.miners.at(m).share);
        const auto [sm, ss] = mean_sd(shares);
        os << first[m].miner << ',' << to_string(first[m].role) << ',' << fmt(first[m].hash_power) << ','
           << reps.size() << ',' << fmt(sm) << ',' << fmt(ss) << ',' << fmt(fm) << ',' << fmt(fs) << '\n';
    }
    return os.str();
}

ScenarioResult run_scenario(const Scenario& scenario, const std::optional<std::filesystem::path>& out_dir,
                            bool parallel)
{
    validate(scenario.config);
    if (out_dir) std::filesystem::create_directories(*out_dir);

    auto prefix = [&](std::size_t rep) {
        return *out_dir / (scenario.name + ".rep" + std::to_string(rep));
    };
    auto one = [&](const SimConfig& cfg, std::size_t rep) {
        SimConfig c = cfg;
        c.record_trace = c.record_trace && out_dir && scenario.write_trace;
        const SimTrace trace = run(c);
        RepetitionSummary s{rep, c.seed, revenue_shares(trace, fork_window(c))};
        if (out_dir) {
            if (scenario.write_trace) {
                std::ofstream out(prefix(rep).string() + ".trace.csv", std::ios::binary);
                if (!out) throw std::runtime_error("cannot write trace for repetition " + std::to_string(rep));
                write_trace(out, trace);
            }
            write_file(prefix(rep).string() + ".report.csv", format_report_csv(s.report));
        }
        return s;
    };

    ScenarioResult result;
    result.reps = parallel ? run_batch(scenario.config, scenario.repetitions, one)
                           : run_batch_serial(scenario.config, scenario.repetitions, one);
    if (out_dir) {
        for (std::size_t rep = 0; rep < scenario.repetitions; ++rep) {
            if (scenario.write_trace) result.files.push_back(prefix(rep).string() + ".trace.csv");
            result.files.push_back(prefix(rep).string() + ".report.csv");
        }
        const auto agg = *out_dir / (scenario.name + ".aggregate.csv");
        write_file(agg, format_aggregate_csv(result.reps));
        result.files.push_back(agg);
    }
    return result;
}

} // namespace zeroblock
