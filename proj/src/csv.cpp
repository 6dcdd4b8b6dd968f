#include "dualobs/csv.hpp"

#include "dualobs/error.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace dualobs {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }
std::string opt_size(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

void write_meta(std::ostream& out, const CsvMetadata& meta)
{
    for (const auto& [k, v] : meta.entries) out << "# " << k << ": " << v << '\n';
}

void write_row(std::ostream& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        throw ParseError("not a number: '" + s + "'");
    }
    return v;
}

std::uint64_t parse_uint(const std::string& s)
{
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParseError("not an integer: '" + s + "'");
    return v;
}

std::optional<double> parse_opt(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

}  // namespace

void CsvMetadata::set(const std::string& key, const std::string& value)
{
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

std::optional<std::string> CsvMetadata::get(const std::string& key) const
{
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

const std::vector<std::string>& result_columns()
{
    static const std::vector<std::string> cols{
        "scheme", "label",      "n",    "mean_time", "time_se",     "error",       "error_se",
        "trials", "denominator", "did_not_stop", "aborted", "low_confidence", "pareto", "T1",
        "T2",     "T3",          "T4",   "sprt_lower", "sprt_upper", "sprt_cap",    "seed"};
    return cols;
}

const std::vector<std::string>& trace_columns()
{
    static const std::vector<std::string> cols{"trial", "round", "y",     "z",       "d1",      "d2",
                                               "o1",    "o2",    "beta1", "beta2", "stopped", "decision"};
    return cols;
}

const std::vector<std::string>& exponent_columns()
{
    static const std::vector<std::string> cols{"scheme",  "T1",     "T2",      "rate_fa", "rate_miss",
                                               "rate",    "lambda0", "sigma0", "lambda1", "sigma1"};
    return cols;
}

void write_results_csv(std::ostream& out, const CsvMetadata& meta, std::span<const ResultRow> rows)
{
    write_meta(out, meta);
    write_row(out, result_columns());
    for (const auto& r : rows) {
        write_row(out, {r.scheme,
                        r.label,
                        opt_size(r.n),
                        format_number(r.mean_time),
                        format_number(r.time_se),
                        format_number(r.error),
                        format_number(r.error_se),
                        std::to_string(r.trials),
                        std::to_string(r.denominator),
                        std::to_string(r.did_not_stop),
                        std::to_string(r.aborted),
                        r.low_confidence ? "1" : "0",
                        r.pareto ? "1" : "0",
                        opt(r.t1),
                        opt(r.t2),
                        opt(r.t3),
                        opt(r.t4),
                        opt(r.sprt_lower),
                        opt(r.sprt_upper),
                        opt_size(r.sprt_cap),
                        std::to_string(r.seed)});
    }
}

void write_traces_csv(std::ostream& out, const CsvMetadata& meta, std::span<const ConsensusTrace> traces,
                      std::size_t first_trial)
{
    write_meta(out, meta);
    write_row(out, trace_columns());
    for (std::size_t t = 0; t < traces.size(); ++t) {
        const auto& trace = traces[t];
        for (const auto& r : trace.rounds) {
            auto bit = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
            const bool last = r.stopped;
            write_row(out, {std::to_string(first_trial + t), std::to_string(r.round), std::to_string(r.obs.y),
                            std::to_string(r.obs.z), std::to_string(r.d1), std::to_string(r.d2), bit(r.o1),
                            bit(r.o2), opt(r.beta1), opt(r.beta2), last ? "1" : "0",
                            last && trace.final_decision ? std::to_string(to_int(*trace.final_decision))
                                                         : std::string()});
        }
    }
}

void write_exponents_csv(std::ostream& out, const CsvMetadata& meta, std::span<const ExponentResult> rows)
{
    write_meta(out, meta);
    write_row(out, exponent_columns());
    for (const auto& r : rows) {
        const bool dec = r.scheme == RateScheme::Decentralized;
        write_row(out, {rate_scheme_name(r.scheme), format_number(std::exp2(r.log2_t1)),
                        r.log2_t2 ? format_number(std::exp2(*r.log2_t2)) : std::string(), format_number(r.rate_fa),
                        format_number(r.rate_miss), format_number(r.rate), format_number(r.lambda0),
                        dec ? format_number(r.sigma0) : std::string(), format_number(r.lambda1),
                        dec ? format_number(r.sigma1) : std::string()});
    }
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("missing column '" + name + "'");
}

CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header && line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ", 2);
            if (colon == std::string::npos) throw ParseError("malformed metadata line: " + line);
            t.meta.entries.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        auto cells = split(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) throw ParseError("row has " + std::to_string(cells.size()) + " cells");
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw ParseError("CSV has no header");
    return t;
}

std::vector<ResultRow> results_from_table(const CsvTable& table)
{
    std::vector<std::size_t> idx;
    for (const auto& c : result_columns()) idx.push_back(table.column(c));
    std::vector<ResultRow> out;
    for (const auto& cells : table.rows) {
        auto at = [&](std::size_t k) -> const std::string& { return cells[idx[k]]; };
        ResultRow r;
        r.scheme = at(0);
        r.label = at(1);
        if (!at(2).empty()) r.n = parse_uint(at(2));
        r.mean_time = parse_double(at(3));
        r.time_se = parse_double(at(4));
        r.error = parse_double(at(5));
        r.error_se = parse_double(at(6));
        r.trials = parse_uint(at(7));
        r.denominator = parse_uint(at(8));
        r.did_not_stop = parse_uint(at(9));
        r.aborted = parse_uint(at(10));
        r.low_confidence = at(11) == "1";
        r.pareto = at(12) == "1";
        r.t1 = parse_opt(at(13));
        r.t2 = parse_opt(at(14));
        r.t3 = parse_opt(at(15));
        r.t4 = parse_opt(at(16));
        r.sprt_lower = parse_opt(at(17));
        r.sprt_upper = parse_opt(at(18));
        if (!at(19).empty()) r.sprt_cap = parse_uint(at(19));
        r.seed = parse_uint(at(20));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace dualobs
