#include "jpminhash/retrieval.hpp"

#include "jpminhash/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

namespace jpminhash {

// ---------------------------------------------------------------------------
// Corpus ingestion

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
            current.push_back(ch);
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Document document_from_weights(std::string id, const std::map<std::string, double>& weights) {
    Document doc{std::move(id), {}, {}};
    std::vector<Entry> entries;
    for (const auto& [token, w] : weights) {
        const ElementId eid = token_id(token);
        doc.tokens.emplace(token, eid);
        entries.push_back({eid, w});
    }
    doc.dist = normalize(SparseVector::from_entries(std::move(entries)));
    return doc;
}

Corpus ingest_text(const std::vector<std::pair<std::string, std::string>>& documents) {
    Corpus corpus;
    for (const auto& [id, text] : documents) {
        std::map<std::string, double> counts;
        for (auto& t : tokenize(text)) counts[std::move(t)] += 1.0;
        if (counts.empty()) {
            ++corpus.skipped;
            continue;
        }
        corpus.documents.push_back(document_from_weights(id, counts));
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// Labeled pairs

PairScore score_pair(const DistributionPair& pair) {
    if (!(pair.weight > 0.0)) throw InvalidInput("pair weight must be positive");
    const auto r = similarity_report(pair.a, pair.b);
    return {pair.id_a, pair.id_b, r.jp, r.jw, r.jsd, r.tv, r.support_jaccard, pair.weight};
}

PairSample score_pairs(const std::vector<DistributionPair>& pairs) {
    PairSample out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(score_pair(p));
    return out;
}

std::pair<SparseDistribution, SparseDistribution>
mix_pair(const SparseDistribution& base, const SparseDistribution& noise_a,
         const SparseDistribution& noise_b, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("mixing level must lie in [0,1]");
    auto mix = [&](const SparseDistribution& noise) {
        std::map<ElementId, double> m;
        for (const auto& e : base.entries()) m[e.id] += (1.0 - t) * e.mass;
        for (const auto& e : noise.entries()) m[e.id] += t * e.mass;
        std::vector<Entry> entries;
        for (const auto& [id, mass] : m) entries.push_back({id, mass});
        return make_distribution(std::move(entries));
    };
    return {mix(noise_a), mix(noise_b)};
}

std::vector<DistributionPair> synth_pairs(std::size_t count, Seed seed) {
    if (count == 0) throw InvalidInput("pair count must be positive");
    Rng rng(seed);
    std::vector<DistributionPair> pairs;
    pairs.reserve(count);

    auto noise = [&](std::size_t universe) {
        std::vector<Entry> entries;
        while (entries.empty()) {
            for (std::size_t id = 0; id < universe; ++id) {
                if (rng.bernoulli(0.5)) entries.push_back({id, rng.exponential()});
            }
        }
        return make_distribution(std::move(entries));
    };

    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t dim = 10 + rng.below(191);
        std::vector<Entry> base;
        for (std::size_t id = 0; id < dim; ++id) base.push_back({id, rng.exponential()});
        const auto z = make_distribution(std::move(base));
        const auto n1 = noise(2 * dim);
        const auto n2 = noise(2 * dim);
        const double t = rng.uniform();
        auto [x, y] = mix_pair(z, n1, n2, t);
        const std::string stem = "s" + std::to_string(i);
        pairs.push_back({stem + "a", stem + "b", std::move(x), std::move(y), 1.0});
    }
    return pairs;
}

std::vector<DistributionPair> corpus_pairs(const Corpus& corpus, std::size_t count, Seed seed) {
    if (count == 0) throw InvalidInput("pair count must be positive");
    const std::size_t n = corpus.documents.size();
    if (n < 2) throw InvalidInput("corpus needs at least two documents");
    const std::size_t all = n * (n - 1) / 2;

    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    if (count >= all) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) chosen.emplace_back(i, j);
    } else {
        Rng rng(seed);
        std::set<std::pair<std::size_t, std::size_t>> seen;
        while (chosen.size() < count) {
            std::size_t i = rng.below(n), j = rng.below(n);
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            if (seen.emplace(i, j).second) chosen.emplace_back(i, j);
        }
    }

    std::vector<DistributionPair> pairs;
    for (auto [i, j] : chosen) {
        const auto& a = corpus.documents[i];
        const auto& b = corpus.documents[j];
        pairs.push_back({a.id, b.id, a.dist, b.dist, 1.0});
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Banding

double amplify(double p, std::size_t a, std::size_t o) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability must lie in [0,1]");
    if (a == 0 || o == 0) throw InvalidInput("a and o must be positive");
    const double and_p = std::pow(p, static_cast<double>(a));
    return 1.0 - std::pow(1.0 - and_p, static_cast<double>(o));
}

void validate(const BandingScheme& scheme) {
    if (scheme.a == 0 || scheme.o == 0) throw InvalidInput("a and o must be positive");
}

std::vector<std::uint64_t> band_keys(const Signature& sig, const BandingScheme& scheme) {
    validate(scheme);
    if (sig.samples.size() < scheme.hashes()) {
        throw InvalidInput("signature shorter than a*o");
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(scheme.o);
    for (std::size_t b = 0; b < scheme.o; ++b) {
        std::uint64_t h = derive_seed(scheme.base_seed, b).value;
        for (std::size_t j = b * scheme.a; j < (b + 1) * scheme.a; ++j) h = fin64(h ^ sig.samples[j]);
        keys.push_back(h);
    }
    return keys;
}

InvertedIndex::InvertedIndex(BandingScheme scheme) : scheme_(scheme) { validate(scheme_); }

InvertedIndex InvertedIndex::build(const std::vector<Document>& corpus, const BandingScheme& scheme) {
    if (corpus.empty()) throw InvalidInput("cannot index an empty corpus");
    InvertedIndex index(scheme);
    std::set<std::string_view> ids;
    for (const auto& doc : corpus) {
        if (!ids.insert(doc.id).second) throw InvalidInput("duplicate document id '" + doc.id + "'");
    }
    for (const auto& doc : corpus) index.add(doc.id, doc.dist);
    return index;
}

InvertedIndex InvertedIndex::restore(BandingScheme scheme, std::vector<std::string> doc_ids,
                                     Postings postings) {
    InvertedIndex index(scheme);
    for (const auto& [key, docs] : postings) {
        if (key.first >= scheme.o) throw InvalidInput("posting band out of range");
        for (DocIndex d : docs) {
            if (d >= doc_ids.size()) throw InvalidInput("posting refers to an unknown document");
        }
    }
    index.doc_ids_ = std::move(doc_ids);
    index.postings_ = std::move(postings);
    return index;
}

std::vector<std::uint64_t> InvertedIndex::keys_for(const SparseVector& dist) const {
    return band_keys(signature(dist, scheme_.base_seed, scheme_.hashes()), scheme_);
}

std::vector<std::uint64_t> InvertedIndex::stored_keys(std::string_view doc_id) const {
    const auto it = std::find(doc_ids_.begin(), doc_ids_.end(), doc_id);
    if (it == doc_ids_.end()) return {};
    const auto idx = static_cast<DocIndex>(it - doc_ids_.begin());
    std::vector<std::uint64_t> keys(scheme_.o);
    for (const auto& [band_key, docs] : postings_) {
        if (std::find(docs.begin(), docs.end(), idx) != docs.end()) keys[band_key.first] = band_key.second;
    }
    return keys;
}

InvertedIndex::DocIndex InvertedIndex::add(std::string doc_id, const std::vector<std::uint64_t>& keys) {
    if (keys.size() != scheme_.o) throw InvalidInput("expected one key per band");
    const auto idx = static_cast<DocIndex>(doc_ids_.size());
    doc_ids_.push_back(std::move(doc_id));
    for (std::uint32_t b = 0; b < keys.size(); ++b) postings_[{b, keys[b]}].push_back(idx);
    return idx;
}

void InvertedIndex::add(std::string doc_id, const SparseVector& dist) {
    add(std::move(doc_id), keys_for(dist));
}

std::vector<InvertedIndex::DocIndex>
InvertedIndex::query_indices(const std::vector<std::uint64_t>& keys) const {
    std::vector<DocIndex> out;
    for (std::uint32_t b = 0; b < keys.size(); ++b) {
        auto it = postings_.find({b, keys[b]});
        if (it != postings_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<InvertedIndex::DocIndex> InvertedIndex::query_indices(const SparseVector& dist) const {
    return query_indices(keys_for(dist));
}

std::vector<std::string> InvertedIndex::query(const SparseVector& dist) const {
    std::vector<std::string> out;
    for (DocIndex i : query_indices(dist)) out.push_back(doc_ids_[i]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Precision / recall

namespace {

double field_value(const PairScore& s, ScoreField f) {
    switch (f) {
    case ScoreField::jp: return s.jp;
    case ScoreField::jw: return s.jw;
    case ScoreField::jsd: return s.jsd;
    case ScoreField::tv: return s.tv;
    case ScoreField::jaccard: return s.jaccard;
    }
    return 0.0;
}

const char* field_name(ScoreField f) {
    switch (f) {
    case ScoreField::jp: return "jp";
    case ScoreField::jw: return "jw";
    case ScoreField::jsd: return "jsd";
    case ScoreField::tv: return "tv";
    case ScoreField::jaccard: return "jaccard";
    }
    return "?";
}

std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw InvalidInput("expected a positive integer, got '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void check_grid(const Grid& grid) {
    if (grid.empty()) throw InvalidInput("empty grid");
    for (auto [a, o] : grid) {
        if (a == 0 || o == 0) throw InvalidInput("grid entries must have positive a and o");
    }
}

} // namespace

bool Task::positive(const PairScore& s) const noexcept {
    const double v = field_value(s, field);
    if (less) return inclusive ? v <= threshold : v < threshold;
    return inclusive ? v >= threshold : v > threshold;
}

Task parse_task(std::string_view text) {
    const auto pos = text.find_first_of("<>");
    if (pos == std::string_view::npos) throw InvalidInput("task must look like 'jsd<0.25'");
    Task task;
    const auto name = text.substr(0, pos);
    if (name == "jp") task.field = ScoreField::jp;
    else if (name == "jw") task.field = ScoreField::jw;
    else if (name == "jsd") task.field = ScoreField::jsd;
    else if (name == "tv") task.field = ScoreField::tv;
    else if (name == "jaccard") task.field = ScoreField::jaccard;
    else throw InvalidInput("unknown task field '" + std::string(name) + "'");

    task.less = text[pos] == '<';
    std::size_t rest = pos + 1;
    task.inclusive = rest < text.size() && text[rest] == '=';
    if (task.inclusive) ++rest;
    const std::string number(text.substr(rest));
    std::size_t used = 0;
    try {
        task.threshold = std::stod(number, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (number.empty() || used != number.size()) {
        throw InvalidInput("bad task threshold '" + number + "'");
    }
    return task;
}

std::string to_string(const Task& task) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%s%s%.9g", field_name(task.field), task.less ? "<" : ">",
                  task.inclusive ? "=" : "", task.threshold);
    return buf;
}

std::string to_string(Method m) { return m == Method::jp ? "JP" : "JW"; }
std::string to_string(EvalMode m) { return m == EvalMode::analytic ? "analytic" : "empirical"; }

Grid default_grid() {
    Grid grid;
    for (std::size_t a : {1, 2, 3, 4, 6, 8})
        for (std::size_t o : {1, 2, 4, 8, 16, 32, 64, 128}) grid.emplace_back(a, o);
    return grid;
}

Grid parse_grid(std::string_view text) {
    if (text == "default") return default_grid();
    Grid grid;
    if (text.starts_with("a=")) {
        const auto parts = split(text, ';');
        if (parts.size() != 2 || !parts[1].starts_with("o=")) {
            throw InvalidInput("grid must look like 'a=1,2;o=4,8'");
        }
        for (auto a : split(parts[0].substr(2), ','))
            for (auto o : split(parts[1].substr(2), ',')) grid.emplace_back(parse_size(a), parse_size(o));
    } else {
        for (auto item : split(text, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string_view::npos) throw InvalidInput("grid entries must look like 'a:o'");
            grid.emplace_back(parse_size(item.substr(0, colon)), parse_size(item.substr(colon + 1)));
        }
    }
    check_grid(grid);
    return grid;
}

std::vector<PRPoint> eval_analytic(const PairSample& pairs, const Grid& grid, const Task& task) {
    check_grid(grid);
    double positive_weight = 0.0;
    for (const auto& p : pairs) {
        if (!(p.weight > 0.0)) throw InvalidInput("pair weight must be positive");
        if (task.positive(p)) positive_weight += p.weight;
    }
    if (positive_weight == 0.0) throw InvalidInput("degenerate task");

    std::vector<PRPoint> points;
    for (Method method : {Method::jp, Method::jw}) {
        for (auto [a, o] : grid) {
            double hit_pos = 0.0, hit_all = 0.0;
            for (const auto& p : pairs) {
                const double q = amplify(method == Method::jp ? p.jp : p.jw, a, o);
                hit_all += p.weight * q;
                if (task.positive(p)) hit_pos += p.weight * q;
            }
            // Nothing retrieved at all: no false positives, precision is vacuous.
            const double precision = hit_all > 0.0 ? hit_pos / hit_all : 1.0;
            points.push_back({method, a, o, o, precision, hit_pos / positive_weight, EvalMode::analytic});
        }
    }
    return points;
}

std::vector<EmpiricalPoint> eval_empirical(const std::vector<DistributionPair>& pairs,
                                           const Grid& grid, const Task& task,
                                           std::size_t replicates, Seed base) {
    check_grid(grid);
    if (replicates == 0) throw InvalidInput("need at least one replicate");
    const PairSample scores = score_pairs(pairs);
    double positive_weight = 0.0;
    for (const auto& s : scores)
        if (task.positive(s)) positive_weight += s.weight;
    if (positive_weight == 0.0) throw InvalidInput("degenerate task");

    // Signatures are prefix-stable, so each replicate hashes every document once
    // at the largest a*o of the grid and all grid points read their prefix.
    std::size_t max_hashes = 0;
    for (auto [a, o] : grid) max_hashes = std::max(max_hashes, a * o);

    std::vector<std::vector<double>> precisions(grid.size()), recalls(grid.size());
    for (std::size_t r = 0; r < replicates; ++r) {
        const Seed seed = derive_seed(base, r);
        std::vector<Signature> sig_a, sig_b;
        sig_a.reserve(pairs.size());
        sig_b.reserve(pairs.size());
        for (const auto& p : pairs) {
            sig_a.push_back(signature(p.a, seed, max_hashes));
            sig_b.push_back(signature(p.b, seed, max_hashes));
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            // A pair comes back from the index exactly when the two sides share
            // a key in some band, so the keys are compared directly.
            const BandingScheme scheme{grid[g].first, grid[g].second, seed};
            double hit_pos = 0.0, hit_all = 0.0;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const auto ka = band_keys(sig_a[i], scheme);
                const auto kb = band_keys(sig_b[i], scheme);
                bool hit = false;
                for (std::size_t b = 0; b < ka.size() && !hit; ++b) hit = ka[b] == kb[b];
                if (!hit) continue;
                hit_all += scores[i].weight;
                if (task.positive(scores[i])) hit_pos += scores[i].weight;
            }
            precisions[g].push_back(hit_all > 0.0 ? hit_pos / hit_all : 1.0);
            recalls[g].push_back(hit_pos / positive_weight);
        }
    }

    std::vector<EmpiricalPoint> out;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto [a, o] = grid[g];
        EmpiricalPoint p;
        p.point = {Method::jp, a, o, o, mean(precisions[g]), mean(recalls[g]), EvalMode::empirical};
        p.precision_se = standard_error(precisions[g]);
        p.recall_se = standard_error(recalls[g]);
        p.replicates = replicates;
        out.push_back(p);
    }
    return out;
}

} // namespace jpminhash
