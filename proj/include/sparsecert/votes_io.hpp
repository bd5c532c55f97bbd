#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sparsecert/errors.hpp"
#include "sparsecert/types.hpp"

namespace sparsecert::io {

// Votes file: line-oriented text. Comment lines start with '#'. The first
// directive line declares the class count and the per-stage sample counts:
//
//   classes=4 selection=1000 estimation=1000000
//   n17 992 5 2 1 | 991234 4310 3456 1000
//
// Each record is `id selection-counts | estimation-counts`; both count lists
// carry exactly `classes` entries and must sum to the declared stage sizes.
struct VotesFile {
    int num_classes = 0;
    std::uint64_t num_selection = 0;
    std::uint64_t num_estimation = 0;
    std::vector<std::pair<VoteRecord, VoteRecord>> records;
};

namespace detail {

inline ParseError parse_error(std::size_t line_no, const std::string& msg) {
    return ParseError("line " + std::to_string(line_no) + ": " + msg);
}

inline std::uint64_t parse_u64(const std::string& token, std::size_t line_no, const char* what) {
    try {
        std::size_t pos = 0;
        if (!token.empty() && token[0] == '-') throw std::invalid_argument("negative");
        std::uint64_t v = std::stoull(token, &pos);
        if (pos != token.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw parse_error(line_no, std::string("expected nonnegative integer for ") + what + ", got '" + token + "'");
    }
}

inline bool directive(const std::string& line, const std::string& key, std::string& value) {
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        if (token.rfind(key + "=", 0) == 0) {
            value = token.substr(key.size() + 1);
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline VotesFile read_votes(std::istream& in) {
    VotesFile file;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            std::string c, s, e;
            if (!detail::directive(line, "classes", c) || !detail::directive(line, "selection", s) ||
                !detail::directive(line, "estimation", e))
                throw detail::parse_error(line_no, "expected header 'classes=C selection=N0 estimation=N'");
            file.num_classes = static_cast<int>(detail::parse_u64(c, line_no, "classes"));
            file.num_selection = detail::parse_u64(s, line_no, "selection");
            file.num_estimation = detail::parse_u64(e, line_no, "estimation");
            if (file.num_classes < 1) throw detail::parse_error(line_no, "classes must be positive");
            have_header = true;
            continue;
        }
        std::istringstream rec(line);
        std::string id;
        if (!(rec >> id)) throw detail::parse_error(line_no, "missing record id");
        auto read_counts = [&](const char* stage, std::uint64_t expected_sum) {
            std::vector<std::uint64_t> counts;
            counts.reserve(static_cast<std::size_t>(file.num_classes));
            std::string token;
            for (int i = 0; i < file.num_classes; ++i) {
                if (!(rec >> token) || token == "|")
                    throw detail::parse_error(line_no, std::string("expected ") + std::to_string(file.num_classes) +
                                                           " " + stage + " counts");
                counts.push_back(detail::parse_u64(token, line_no, stage));
            }
            std::uint64_t sum = 0;
            for (auto v : counts) sum += v;
            if (sum != expected_sum)
                throw detail::parse_error(line_no, std::string(stage) + " counts sum to " + std::to_string(sum) +
                                                       ", header declares " + std::to_string(expected_sum));
            return counts;
        };
        VoteRecord selection;
        selection.input_id = id;
        selection.counts = read_counts("selection", file.num_selection);
        std::string sep;
        if (!(rec >> sep) || sep != "|") throw detail::parse_error(line_no, "expected '|' between stages");
        VoteRecord estimation;
        estimation.input_id = id;
        estimation.counts = read_counts("estimation", file.num_estimation);
        std::string extra;
        if (rec >> extra) throw detail::parse_error(line_no, "unexpected trailing token '" + extra + "'");
        file.records.emplace_back(std::move(selection), std::move(estimation));
    }
    if (!have_header) throw ParseError("votes file has no header line");
    return file;
}

inline void write_votes(std::ostream& out, const VotesFile& file) {
    out << "# sparsecert votes\n";
    out << "classes=" << file.num_classes << " selection=" << file.num_selection
        << " estimation=" << file.num_estimation << "\n";
    for (const auto& [selection, estimation] : file.records) {
        out << selection.input_id;
        for (auto c : selection.counts) out << ' ' << c;
        out << " |";
        for (auto c : estimation.counts) out << ' ' << c;
        out << "\n";
    }
}

// One certification result row plus the bounds it was computed from.
struct ResultRow {
    CertResult cert;
    ClassBounds bounds;
};

inline const char* csv_mode(const ResultRow& row) {
    if (row.cert.mode == Mode::binary_class) return "binary";
    return row.cert.binary_fallback ? "multi_fallback" : "multi";
}

// Fixed-schema CSV; rationals rendered at 12 significant digits. Joint runs
// append the second group's (per-run constant) radii as two extra columns.
inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                              const std::optional<RadiiSpec>& joint_b = std::nullopt) {
    out << "id,mode,p_lower,runner_upper,ra,rd,rc,rho_or_margin,certified,abstained";
    if (joint_b) out << ",ra_b,rd_b";
    out << "\n";
    for (const ResultRow& row : rows) {
        out << row.cert.input_id << ',' << csv_mode(row) << ',' << decimal_string(row.bounds.p_lower) << ','
            << decimal_string(row.bounds.p_upper_runner) << ',' << row.cert.radii.r_add << ','
            << row.cert.radii.r_del << ',' << row.cert.radii.r_change << ','
            << decimal_string(row.cert.rho_or_margin) << ',' << (row.cert.certified ? 1 : 0) << ','
            << (row.cert.abstained ? 1 : 0);
        if (joint_b) out << ',' << joint_b->r_add << ',' << joint_b->r_del;
        out << "\n";
    }
}

}  // namespace sparsecert::io
