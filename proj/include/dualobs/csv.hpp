#pragma once

#include "dualobs/consensus.hpp"
#include "dualobs/exponents.hpp"
#include "dualobs/sim.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dualobs {

// "# key: value" lines written ahead of the column header.
struct CsvMetadata {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& key) const;
};

// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

const std::vector<std::string>& result_columns();
const std::vector<std::string>& trace_columns();
const std::vector<std::string>& exponent_columns();

void write_results_csv(std::ostream& out, const CsvMetadata& meta, std::span<const ResultRow> rows);

// One row per recorded round; `first_trial` numbers the first trace.
void write_traces_csv(std::ostream& out, const CsvMetadata& meta, std::span<const ConsensusTrace> traces,
                      std::size_t first_trial = 0);

// Thresholds are written as likelihood-ratio values (2^log2 T).
void write_exponents_csv(std::ostream& out, const CsvMetadata& meta, std::span<const ExponentResult> rows);

struct CsvTable {
    CsvMetadata meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws ParseError if absent
};

// Reads the metadata block, header and rows. Throws ParseError on ragged rows.
CsvTable read_csv(std::istream& in);

std::vector<ResultRow> results_from_table(const CsvTable& table);

}  // namespace dualobs
