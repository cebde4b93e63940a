#include "jpminhash/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace jpminhash {

using nlohmann::json;

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& source,
                                        std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw FormatError(source, lineno, "unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

double parse_double_field(const std::string& s, const std::string& source, std::size_t lineno) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw FormatError(source, lineno, "bad number '" + s + "'");
    return v;
}

std::size_t parse_size_field(const std::string& s, const std::string& source, std::size_t lineno) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(source, lineno, "bad integer '" + s + "'");
    }
    return v;
}

// Reads the version line and the column header; returns the next line number.
std::size_t expect_csv_header(std::istream& in, const std::string& source, const std::string& header) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvVersionLine) {
        throw FormatError(source, 1, "expected '" + std::string(kCsvVersionLine) + "'");
    }
    if (!std::getline(in, line) || line != header) {
        throw FormatError(source, 2, "expected column header '" + header + "'");
    }
    return 3;
}

template <typename Fn>
void for_each_jsonl(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError(source, lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw FormatError(source, lineno, "expected a JSON object");
        if (j.contains("v") && j["v"] != kJsonlVersion) {
            throw FormatError(source, lineno, "unsupported format version");
        }
        try {
            fn(j, lineno);
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception& e) {
            throw FormatError(source, lineno, e.what());
        }
    }
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw InvalidInput(std::string("missing field '") + key + "'");
    return *it;
}

std::string id_field(const json& j) {
    const auto& v = require(j, "id");
    if (!v.is_string()) throw InvalidInput("field 'id' must be a string");
    return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const char* key) {
    if (!v.is_array()) throw InvalidInput(std::string("field '") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw InvalidInput(std::string("field '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string u64_string(std::uint64_t v) { return std::to_string(v); }

std::uint64_t u64_field(const json& v) {
    if (!v.is_string()) throw InvalidInput("64-bit values must be decimal strings");
    return parse_u64(v.get<std::string>());
}

} // namespace

FormatError::FormatError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::uint64_t parse_u64(std::string_view text) {
    int base = 10;
    if (text.starts_with("0x") || text.starts_with("0X")) {
        base = 16;
        text.remove_prefix(2);
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidInput("expected an unsigned 64-bit integer, got '" + std::string(text) + "'");
    }
    return v;
}

Seed parse_seed(std::string_view text) { return Seed{parse_u64(text)}; }

// ---------------------------------------------------------------------------

std::vector<InputRecord> read_records(std::istream& in, const std::string& source) {
    std::vector<InputRecord> records;
    for_each_jsonl(in, source, [&](const json& j, std::size_t) {
        InputRecord r;
        r.id = id_field(j);
        if (j.contains("text")) {
            if (!j["text"].is_string()) throw InvalidInput("field 'text' must be a string");
            r.payload = j["text"].get<std::string>();
        } else if (j.contains("weights")) {
            const auto& w = j["weights"];
            if (!w.is_object()) throw InvalidInput("field 'weights' must be an object");
            InputRecord::Weights weights;
            for (auto it = w.begin(); it != w.end(); ++it) {
                if (!it.value().is_number()) throw InvalidInput("weights must be numbers");
                weights[it.key()] = it.value().get<double>();
            }
            r.payload = std::move(weights);
        } else if (j.contains("masses")) {
            r.payload = number_array(j["masses"], "masses");
        } else if (j.contains("breakpoints")) {
            r.payload = PiecewiseDensity(number_array(j["breakpoints"], "breakpoints"),
                                         number_array(require(j, "values"), "values"));
        } else {
            throw InvalidInput("record needs one of 'text', 'weights', 'masses', 'breakpoints'");
        }
        if (j.contains("weight")) {
            if (!j["weight"].is_number()) throw InvalidInput("field 'weight' must be a number");
            r.weight = j["weight"].get<double>();
        }
        records.push_back(std::move(r));
    });
    return records;
}

void write_record(std::ostream& out, const InputRecord& record) {
    json j;
    j["v"] = kJsonlVersion;
    j["id"] = record.id;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>) {
                j["text"] = p;
            } else if constexpr (std::is_same_v<T, InputRecord::Weights>) {
                j["weights"] = p;
            } else if constexpr (std::is_same_v<T, InputRecord::Masses>) {
                j["masses"] = p;
            } else {
                j["breakpoints"] = std::vector<double>(p.breakpoints().begin(), p.breakpoints().end());
                j["values"] = std::vector<double>(p.values().begin(), p.values().end());
            }
        },
        record.payload);
    if (record.weight) j["weight"] = *record.weight;
    out << j.dump() << '\n';
}

Document to_document(const InputRecord& record) {
    return std::visit(
        [&](const auto& p) -> Document {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>) {
                Corpus c = ingest_text({{record.id, p}});
                if (c.documents.empty()) {
                    throw InvalidInput("document '" + record.id + "' has no tokens");
                }
                return std::move(c.documents.front());
            } else if constexpr (std::is_same_v<T, InputRecord::Weights>) {
                return document_from_weights(record.id, p);
            } else if constexpr (std::is_same_v<T, InputRecord::Masses>) {
                return Document{record.id, normalize(SparseVector::from_dense(p)), {}};
            } else {
                throw InvalidInput("piecewise density '" + record.id + "' has no sparse form");
            }
        },
        record.payload);
}

Corpus to_corpus(const std::vector<InputRecord>& records) {
    Corpus corpus;
    for (const auto& r : records) {
        if (const auto* text = std::get_if<std::string>(&r.payload)) {
            Corpus one = ingest_text({{r.id, *text}});
            corpus.skipped += one.skipped;
            for (auto& d : one.documents) corpus.documents.push_back(std::move(d));
        } else {
            corpus.documents.push_back(to_document(r));
        }
    }
    return corpus;
}

std::vector<DistributionPair> read_pair_records(std::istream& in, const std::string& source) {
    const auto records = read_records(in, source);
    if (records.size() % 2 != 0) {
        throw FormatError(source, records.size(), "pair file needs an even number of records");
    }
    std::vector<DistributionPair> pairs;
    for (std::size_t i = 0; i < records.size(); i += 2) {
        const auto& ra = records[i];
        const auto& rb = records[i + 1];
        const double weight = ra.weight.value_or(1.0);
        if (!(weight > 0.0) || !std::isfinite(weight)) {
            throw FormatError(source, i + 1, "pair weight must be positive");
        }
        if (ra.is_piecewise() != rb.is_piecewise()) {
            throw FormatError(source, i + 2, "cannot pair a piecewise density with a sparse record");
        }
        if (ra.is_piecewise()) {
            auto [ma, mb] = common_refinement_masses(std::get<PiecewiseDensity>(ra.payload),
                                                     std::get<PiecewiseDensity>(rb.payload));
            pairs.push_back({ra.id, rb.id, normalize(ma), normalize(mb), weight});
        } else {
            pairs.push_back({ra.id, rb.id, to_document(ra).dist, to_document(rb).dist, weight});
        }
    }
    return pairs;
}

// ---------------------------------------------------------------------------

namespace {
const std::string kPairHeader = "idA,idB,jp,jw,jsd,tv,jaccard,weight";
const std::string kPrHeader = "method,a,o,cost,precision,recall,mode";
} // namespace

void write_pair_csv(std::ostream& out, const PairSample& pairs) {
    out << kCsvVersionLine << '\n' << kPairHeader << '\n';
    for (const auto& p : pairs) {
        out << csv_field(p.id_a) << ',' << csv_field(p.id_b) << ',' << format_double(p.jp) << ','
            << format_double(p.jw) << ',' << format_double(p.jsd) << ',' << format_double(p.tv)
            << ',' << format_double(p.jaccard) << ',' << format_double(p.weight) << '\n';
    }
}

PairSample read_pair_csv(std::istream& in, const std::string& source) {
    std::size_t lineno = expect_csv_header(in, source, kPairHeader);
    PairSample pairs;
    std::string line;
    for (; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line, source, lineno);
        if (f.size() != 8) throw FormatError(source, lineno, "expected 8 columns");
        PairScore p{f[0], f[1]};
        p.jp = parse_double_field(f[2], source, lineno);
        p.jw = parse_double_field(f[3], source, lineno);
        p.jsd = parse_double_field(f[4], source, lineno);
        p.tv = parse_double_field(f[5], source, lineno);
        p.jaccard = parse_double_field(f[6], source, lineno);
        p.weight = parse_double_field(f[7], source, lineno);
        if (!(p.weight > 0.0)) throw FormatError(source, lineno, "weight must be positive");
        for (double v : {p.jp, p.jw, p.jsd, p.tv, p.jaccard}) {
            if (!(v >= 0.0 && v <= 1.0)) throw FormatError(source, lineno, "score outside [0,1]");
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void write_pr_csv(std::ostream& out, const std::vector<PRPoint>& points) {
    out << kCsvVersionLine << '\n' << kPrHeader << '\n';
    for (const auto& p : points) {
        out << to_string(p.method) << ',' << p.a << ',' << p.o << ',' << p.cost << ','
            << format_double(p.precision) << ',' << format_double(p.recall) << ','
            << to_string(p.mode) << '\n';
    }
}

std::vector<PRPoint> read_pr_csv(std::istream& in, const std::string& source) {
    std::size_t lineno = expect_csv_header(in, source, kPrHeader);
    std::vector<PRPoint> points;
    std::string line;
    for (; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line, source, lineno);
        if (f.size() != 7) throw FormatError(source, lineno, "expected 7 columns");
        PRPoint p;
        if (f[0] == "JP") p.method = Method::jp;
        else if (f[0] == "JW") p.method = Method::jw;
        else throw FormatError(source, lineno, "unknown method '" + f[0] + "'");
        p.a = parse_size_field(f[1], source, lineno);
        p.o = parse_size_field(f[2], source, lineno);
        p.cost = parse_size_field(f[3], source, lineno);
        p.precision = parse_double_field(f[4], source, lineno);
        p.recall = parse_double_field(f[5], source, lineno);
        if (f[6] == "analytic") p.mode = EvalMode::analytic;
        else if (f[6] == "empirical") p.mode = EvalMode::empirical;
        else throw FormatError(source, lineno, "unknown mode '" + f[6] + "'");
        points.push_back(p);
    }
    return points;
}

// ---------------------------------------------------------------------------

void write_signature(std::ostream& out, const Signature& sig) {
    json j;
    j["v"] = kJsonlVersion;
    j["id"] = sig.doc_id;
    j["seed"] = u64_string(sig.base_seed.value);
    j["k"] = sig.k();
    json samples = json::array();
    for (ElementId s : sig.samples) samples.push_back(u64_string(s));
    j["samples"] = std::move(samples);
    out << j.dump() << '\n';
}

std::vector<Signature> read_signatures(std::istream& in, const std::string& source) {
    std::vector<Signature> out;
    for_each_jsonl(in, source, [&](const json& j, std::size_t) {
        Signature sig;
        sig.doc_id = id_field(j);
        sig.base_seed = Seed{u64_field(require(j, "seed"))};
        const auto& samples = require(j, "samples");
        if (!samples.is_array()) throw InvalidInput("field 'samples' must be an array");
        for (const auto& s : samples) sig.samples.push_back(u64_field(s));
        const auto& k = require(j, "k");
        if (!k.is_number_unsigned() || k.get<std::size_t>() != sig.samples.size() || sig.samples.empty()) {
            throw InvalidInput("field 'k' must equal the number of samples");
        }
        out.push_back(std::move(sig));
    });
    return out;
}

void write_index(std::ostream& out, const InvertedIndex& index) {
    json header;
    header["v"] = kJsonlVersion;
    header["a"] = index.scheme().a;
    header["o"] = index.scheme().o;
    header["seed"] = u64_string(index.scheme().base_seed.value);
    header["docs"] = index.doc_ids();
    out << header.dump() << '\n';
    for (const auto& [key, docs] : index.postings()) {
        json j;
        j["v"] = kJsonlVersion;
        j["band"] = key.first;
        j["key"] = u64_string(key.second);
        json ids = json::array();
        for (auto d : docs) ids.push_back(index.doc_ids()[d]);
        j["docs"] = std::move(ids);
        out << j.dump() << '\n';
    }
}

InvertedIndex read_index(std::istream& in, const std::string& source) {
    std::optional<BandingScheme> scheme;
    std::vector<std::string> doc_ids;
    std::unordered_map<std::string, InvertedIndex::DocIndex> lookup;
    InvertedIndex::Postings postings;
    for_each_jsonl(in, source, [&](const json& j, std::size_t) {
        if (!scheme) {
            BandingScheme s;
            s.a = require(j, "a").get<std::size_t>();
            s.o = require(j, "o").get<std::size_t>();
            s.base_seed = Seed{u64_field(require(j, "seed"))};
            validate(s);
            doc_ids = require(j, "docs").get<std::vector<std::string>>();
            for (std::size_t i = 0; i < doc_ids.size(); ++i) {
                lookup.emplace(doc_ids[i], static_cast<InvertedIndex::DocIndex>(i));
            }
            scheme = s;
            return;
        }
        const auto band = require(j, "band").get<std::uint32_t>();
        const auto key = u64_field(require(j, "key"));
        auto& list = postings[{band, key}];
        for (const auto& id : require(j, "docs")) {
            auto it = lookup.find(id.get<std::string>());
            if (it == lookup.end()) throw InvalidInput("posting refers to unknown document");
            list.push_back(it->second);
        }
    });
    if (!scheme) throw FormatError(source, 1, "missing index header");
    return InvertedIndex::restore(*scheme, std::move(doc_ids), std::move(postings));
}

} // namespace jpminhash
