#ifndef JPMINHASH_RETRIEVAL_HPP
#define JPMINHASH_RETRIEVAL_HPP

#include "jpminhash/hashing.hpp"
#include "jpminhash/similarity.hpp"
#include "jpminhash/sparse_minhash.hpp"
#include "jpminhash/sparse_vector.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jpminhash {

// ---------------------------------------------------------------------------
// Corpus ingestion

struct Document {
    std::string id;
    SparseDistribution dist;
    std::map<std::string, ElementId> tokens; // token -> element id, may be empty
};

struct Corpus {
    std::vector<Document> documents;
    std::size_t skipped = 0; // documents without a single token
};

/// Lowercases ASCII and splits on every byte that is not an ASCII letter or
/// digit. Bytes >= 0x80 are kept as word characters so multi-byte UTF-8
/// sequences stay inside their token.
std::vector<std::string> tokenize(std::string_view text);

/// Unigram term distribution of every (id, text); token element ids come from
/// token_id(). Documents with no token are skipped and counted.
Corpus ingest_text(const std::vector<std::pair<std::string, std::string>>& documents);

/// Document from pre-computed token weights.
Document document_from_weights(std::string id, const std::map<std::string, double>& weights);

// ---------------------------------------------------------------------------
// Labeled pairs

struct DistributionPair {
    std::string id_a;
    std::string id_b;
    SparseDistribution a;
    SparseDistribution b;
    double weight = 1.0;
};

struct PairScore {
    std::string id_a;
    std::string id_b;
    double jp = 0.0;
    double jw = 0.0;
    double jsd = 0.0;
    double tv = 0.0;
    double jaccard = 0.0;
    double weight = 1.0;
};

using PairSample = std::vector<PairScore>;

PairScore score_pair(const DistributionPair& pair);
PairSample score_pairs(const std::vector<DistributionPair>& pairs);

/// x = normalize((1-t) z + t n1), y = normalize((1-t) z + t n2).
std::pair<SparseDistribution, SparseDistribution>
mix_pair(const SparseDistribution& base, const SparseDistribution& noise_a,
         const SparseDistribution& noise_b, double t);

/// Similarity sweep: each pair mixes a random base distribution (dimension
/// 10..200, normalized exponential masses) with two independent noise
/// distributions at a uniform mixing level t. Deterministic given the seed.
std::vector<DistributionPair> synth_pairs(std::size_t count, Seed seed);

/// Random distinct document pairs from a corpus (all pairs when count covers them).
std::vector<DistributionPair> corpus_pairs(const Corpus& corpus, std::size_t count, Seed seed);

// ---------------------------------------------------------------------------
// Banding

/// Probability that at least one of o bands of a ANDed hashes collides.
double amplify(double p, std::size_t a, std::size_t o);

struct BandingScheme {
    std::size_t a = 1; // hashes per band key
    std::size_t o = 1; // independent band keys
    Seed base_seed{};

    std::size_t hashes() const noexcept { return a * o; }
};

void validate(const BandingScheme& scheme);

/// Band b folds samples[b*a .. b*a+a-1] through h = fin64(h ^ sample),
/// starting from derive_seed(base_seed, b).
std::vector<std::uint64_t> band_keys(const Signature& sig, const BandingScheme& scheme);

class InvertedIndex {
public:
    using DocIndex = std::uint32_t;
    using Postings = std::map<std::pair<std::uint32_t, std::uint64_t>, std::vector<DocIndex>>;

    explicit InvertedIndex(BandingScheme scheme);

    static InvertedIndex build(const std::vector<Document>& corpus, const BandingScheme& scheme);

    /// Reassembles an index from its parts (used when loading a dump).
    static InvertedIndex restore(BandingScheme scheme, std::vector<std::string> doc_ids,
                                 Postings postings);

    /// Registers a document under precomputed band keys.
    DocIndex add(std::string doc_id, const std::vector<std::uint64_t>& keys);
    void add(std::string doc_id, const SparseVector& dist);

    /// Indices of documents sharing at least one band key, sorted and unique.
    std::vector<DocIndex> query_indices(const std::vector<std::uint64_t>& keys) const;
    std::vector<DocIndex> query_indices(const SparseVector& dist) const;

    /// Document ids sharing at least one band key, sorted and unique.
    std::vector<std::string> query(const SparseVector& dist) const;

    const BandingScheme& scheme() const noexcept { return scheme_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const Postings& postings() const noexcept { return postings_; }
    std::vector<std::uint64_t> keys_for(const SparseVector& dist) const;

    /// Band keys an indexed document was stored under; empty if the id is unknown.
    std::vector<std::uint64_t> stored_keys(std::string_view doc_id) const;

    friend bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
        return a.scheme_.a == b.scheme_.a && a.scheme_.o == b.scheme_.o &&
               a.scheme_.base_seed == b.scheme_.base_seed && a.doc_ids_ == b.doc_ids_ &&
               a.postings_ == b.postings_;
    }

private:
    BandingScheme scheme_;
    std::vector<std::string> doc_ids_;
    Postings postings_;
};

// ---------------------------------------------------------------------------
// Precision / recall

enum class ScoreField { jp, jw, jsd, tv, jaccard };
enum class Method { jp, jw };
enum class EvalMode { analytic, empirical };

/// "field<threshold" style predicate marking a pair as a positive.
struct Task {
    ScoreField field = ScoreField::jsd;
    bool less = true;
    bool inclusive = false;
    double threshold = 0.25;

    bool positive(const PairScore& s) const noexcept;
};

Task parse_task(std::string_view text);
std::string to_string(const Task& task);
std::string to_string(Method m);
std::string to_string(EvalMode m);

struct PRPoint {
    Method method = Method::jp;
    std::size_t a = 1;
    std::size_t o = 1;
    std::size_t cost = 1; // = o
    double precision = 0.0;
    double recall = 0.0;
    EvalMode mode = EvalMode::analytic;
};

using Grid = std::vector<std::pair<std::size_t, std::size_t>>;

/// a in {1,2,3,4,6,8} x o in {1,2,4,...,128}.
Grid default_grid();

/// "default", "a:o,a:o,..." or "a=1,2;o=4,8" (cartesian product).
Grid parse_grid(std::string_view text);

/// Expected precision and recall when each pair is retrieved with probability
/// amplify(p, a, o), p = jp (method JP) or jw (method JW). JP points for every
/// grid entry come first, then JW.
std::vector<PRPoint> eval_analytic(const PairSample& pairs, const Grid& grid, const Task& task);

struct EmpiricalPoint {
    PRPoint point;
    double precision_se = 0.0;
    double recall_se = 0.0;
    std::size_t replicates = 0;
};

/// Per replicate r: band both sides with scheme seed derive_seed(base, r) and
/// count the pair as retrieved when an index of the b-sides queried with the
/// a-side would return its partner (some band key agrees). Reports means over replicates and
/// their standard errors.
std::vector<EmpiricalPoint> eval_empirical(const std::vector<DistributionPair>& pairs,
                                           const Grid& grid, const Task& task,
                                           std::size_t replicates, Seed base);

} // namespace jpminhash

#endif
