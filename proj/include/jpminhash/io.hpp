#ifndef JPMINHASH_IO_HPP
#define JPMINHASH_IO_HPP

#include "jpminhash/dense_minhash.hpp"
#include "jpminhash/retrieval.hpp"
#include "jpminhash/sparse_minhash.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace jpminhash {

// File formats. CSV files start with the line "# jpminhash-v1" followed by a
// column header; JSONL records carry "v": 1. 64-bit integers travel as
// decimal strings, floats are written with 9 significant digits.

inline constexpr std::string_view kCsvVersionLine = "# jpminhash-v1";
inline constexpr int kJsonlVersion = 1;

/// Malformed input file. The message starts with "<source>:<line>: ".
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& source, std::size_t line, const std::string& what);
};

/// "%.9g".
std::string format_double(double v);

/// Decimal or 0x-prefixed hexadecimal.
Seed parse_seed(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

// ---------------------------------------------------------------------------
// Input records: {"id", "text"} | {"id", "weights": {token: w}} |
// {"id", "masses": [...]} | {"id", "breakpoints": [...], "values": [...]};
// an optional "weight" applies to pair files.

struct InputRecord {
    using Weights = std::map<std::string, double>;
    using Masses = std::vector<double>;

    std::string id;
    std::variant<std::string, Weights, Masses, PiecewiseDensity> payload;
    std::optional<double> weight;

    bool is_piecewise() const noexcept { return std::holds_alternative<PiecewiseDensity>(payload); }
};

std::vector<InputRecord> read_records(std::istream& in, const std::string& source);
void write_record(std::ostream& out, const InputRecord& record);

/// Sparse view of a record: text is tokenized, weights are keyed by
/// token_id(), masses are keyed by index. Throws for piecewise records and
/// for records without any mass.
Document to_document(const InputRecord& record);

/// Text, weights and mass records as documents; text without tokens is
/// skipped and counted.
Corpus to_corpus(const std::vector<InputRecord>& records);

/// Pair files: consecutive records form a pair (lines 1-2, 3-4, ...). The
/// pair weight is the "weight" of its first record (default 1). Two piecewise
/// densities are compared through their common refinement masses.
std::vector<DistributionPair> read_pair_records(std::istream& in, const std::string& source);

// ---------------------------------------------------------------------------
// Pair-sample CSV: idA,idB,jp,jw,jsd,tv,jaccard,weight

void write_pair_csv(std::ostream& out, const PairSample& pairs);
PairSample read_pair_csv(std::istream& in, const std::string& source);

// PR CSV: method,a,o,cost,precision,recall,mode

void write_pr_csv(std::ostream& out, const std::vector<PRPoint>& points);
std::vector<PRPoint> read_pr_csv(std::istream& in, const std::string& source);

// ---------------------------------------------------------------------------
// Signatures: {"v":1,"id":..,"seed":"..","k":..,"samples":["..",...]}

void write_signature(std::ostream& out, const Signature& sig);
std::vector<Signature> read_signatures(std::istream& in, const std::string& source);

// Index: header {"v":1,"a":..,"o":..,"seed":"..","docs":[ids...]}, then one
// line per posting list {"v":1,"band":b,"key":"..","docs":[ids...]}.

void write_index(std::ostream& out, const InvertedIndex& index);
InvertedIndex read_index(std::istream& in, const std::string& source);

} // namespace jpminhash

#endif
