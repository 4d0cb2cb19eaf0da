#include "zeroblock/report_io.hpp"

#include "zeroblock/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace zeroblock {

namespace {

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_row(std::ostream& os, const std::string& miner, std::string_view role, const MinerRevenue& r,
               double fork_rate, bool partial)
{
    os << miner << ',' << role << ',' << num(r.hash_power) << ',' << r.minted << ',' << r.canonical << ','
       << r.orphaned << ',' << r.rejected << ',' << num(r.share) << ',' << r.accidental_forks << ','
       << r.intentional_forks << ',' << num(fork_rate) << ',' << (partial ? 1 : 0) << '\n';
}

std::vector<std::string> fields(std::string_view line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::uint64_t to_u64(const std::string& s, std::size_t line)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) throw ParseError(line, "bad integer '" + s + "'");
    return v;
}

double to_double(const std::string& s, std::size_t line)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ParseError(line, "bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(line, "bad number '" + s + "'");
    }
}

} // namespace

std::string format_report_csv(const RevenueReport& report)
{
    std::ostringstream os;
    os << report_csv_header << '\n';
    for (const auto& r : report.miners) {
        write_row(os, std::to_string(r.miner), to_string(r.role), r, report.fork_rate, report.partial);
    }
    write_row(os, "total", "-", report.totals, report.fork_rate, report.partial);
    return os.str();
}

RevenueReport parse_report_csv(std::string_view text)
{
    RevenueReport report;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool saw_total = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != report_csv_header) throw ParseError(1, "unexpected report header");
            continue;
        }
        if (line.empty()) continue;
        if (saw_total) throw ParseError(lineno, "row after the total row");
        const auto f = fields(line);
        if (f.size() != 12) throw ParseError(lineno, "expected 12 fields, got " + std::to_string(f.size()));
        MinerRevenue r;
        r.hash_power = to_double(f[2], lineno);
        r.minted = to_u64(f[3], lineno);
        r.canonical = to_u64(f[4], lineno);
        r.orphaned = to_u64(f[5], lineno);
        r.rejected = to_u64(f[6], lineno);
        r.share = to_double(f[7], lineno);
        r.accidental_forks = to_u64(f[8], lineno);
        r.intentional_forks = to_u64(f[9], lineno);
        report.fork_rate = to_double(f[10], lineno);
        report.partial = to_u64(f[11], lineno) != 0;
        if (f[0] == "total") {
            report.totals = r;
            saw_total = true;
            continue;
        }
        r.miner = static_cast<MinerId>(to_u64(f[0], lineno));
        if (f[1] == "honest") r.role = Role::Honest;
        else if (f[1] == "selfish") r.role = Role::Selfish;
        else throw ParseError(lineno, "unknown role '" + f[1] + "'");
        report.miners.push_back(r);
    }
    if (lineno == 0) throw ParseError(0, "empty report");
    if (!saw_total) throw ParseError(lineno, "missing total row");
    return report;
}

bool report_reconciles(const RevenueReport& report, double tol)
{
    double share = 0.0;
    std::uint64_t minted = 0, canonical = 0, orphaned = 0, rejected = 0;
    for (const auto& r : report.miners) {
        if (r.share < 0.0) return false;
        if (r.canonical + r.orphaned + r.rejected != r.minted) return false;
        share += r.share;
        minted += r.minted;
        canonical += r.canonical;
        orphaned += r.orphaned;
        rejected += r.rejected;
    }
    const auto& t = report.totals;
    if (minted != t.minted || canonical != t.canonical || orphaned != t.orphaned || rejected != t.rejected) {
        return false;
    }
    return canonical == 0 || std::abs(share - 1.0) <= tol;
}

} // namespace zeroblock
