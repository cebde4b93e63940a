#include "jpminhash/acceptance.hpp"
#include "jpminhash/dense_minhash.hpp"
#include "jpminhash/io.hpp"
#include "jpminhash/retrieval.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace jpminhash;

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kSuiteFailure = 2;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    return in;
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    write(out);
    if (!out) throw InvalidInput("write to '" + path + "' failed");
}

void warn_skipped(std::size_t skipped) {
    if (skipped) std::cerr << "warning: skipped " << skipped << " document(s) without tokens\n";
}

std::vector<InputRecord> load_records(const std::string& path) {
    auto in = open_input(path);
    return read_records(in, path);
}

struct Options {
    std::string out;
    std::string pairs, corpus, index, doc, text;
    std::string seed = "0";
    std::size_t k = 128, a = 1, o = 1;
    bool astar = false;
    std::optional<std::size_t> synthetic;
    std::string grid = "default";
    std::string task = "jsd<0.25";
    std::string mode = "analytic";
    std::size_t replicates = 50;
    std::string report_dir;
};

int cmd_sim(const Options& opt) {
    auto in = open_input(opt.pairs);
    const auto scores = score_pairs(read_pair_records(in, opt.pairs));
    with_output(opt.out, [&](std::ostream& out) { write_pair_csv(out, scores); });
    return kOk;
}

int cmd_hash(const Options& opt) {
    if (opt.k == 0) throw InvalidInput("--k must be positive");
    const Seed seed = parse_seed(opt.seed);
    const auto records = load_records(opt.corpus);
    std::vector<Signature> sigs;
    std::size_t skipped = 0;
    for (const auto& r : records) {
        Signature sig{r.id, seed, {}};
        if (const auto* pd = std::get_if<PiecewiseDensity>(&r.payload)) {
            if (!opt.astar) throw InvalidInput("record '" + r.id + "' is a piecewise density; use --astar");
            const auto lambda = PiecewiseDensity::uniform();
            for (std::size_t j = 0; j < opt.k; ++j)
                sig.samples.push_back(std::bit_cast<std::uint64_t>(
                    astar_pminhash(*pd, lambda, derive_seed(seed, j)).point));
        } else if (const auto* masses = std::get_if<InputRecord::Masses>(&r.payload); masses && opt.astar) {
            const FiniteMeasure mu(*masses);
            const auto lambda = FiniteMeasure::uniform(masses->size());
            for (std::size_t j = 0; j < opt.k; ++j)
                sig.samples.push_back(astar_pminhash(mu, lambda, derive_seed(seed, j)).sample);
        } else {
            if (std::holds_alternative<std::string>(r.payload)) {
                const Corpus c = ingest_text({{r.id, std::get<std::string>(r.payload)}});
                if (c.documents.empty()) {
                    ++skipped;
                    continue;
                }
            }
            sig = signature(to_document(r).dist, seed, opt.k, r.id);
        }
        sigs.push_back(std::move(sig));
    }
    warn_skipped(skipped);
    with_output(opt.out, [&](std::ostream& out) {
        for (const auto& s : sigs) write_signature(out, s);
    });
    return kOk;
}

int cmd_index(const Options& opt) {
    const BandingScheme scheme{opt.a, opt.o, parse_seed(opt.seed)};
    validate(scheme);
    const Corpus corpus = to_corpus(load_records(opt.corpus));
    warn_skipped(corpus.skipped);
    const auto index = InvertedIndex::build(corpus.documents, scheme);
    with_output(opt.out, [&](std::ostream& out) { write_index(out, index); });
    return kOk;
}

int cmd_query(const Options& opt) {
    auto in = open_input(opt.index);
    const auto index = read_index(in, opt.index);
    std::vector<std::uint64_t> keys;
    if (!opt.text.empty()) {
        const Corpus c = ingest_text({{"query", opt.text}});
        if (c.documents.empty()) throw InvalidInput("query text has no tokens");
        keys = index.keys_for(c.documents.front().dist);
    } else if (!opt.corpus.empty()) {
        const Corpus corpus = to_corpus(load_records(opt.corpus));
        const auto it = std::find_if(corpus.documents.begin(), corpus.documents.end(),
                                     [&](const Document& d) { return d.id == opt.doc; });
        if (it == corpus.documents.end()) throw InvalidInput("document '" + opt.doc + "' not in corpus");
        keys = index.keys_for(it->dist);
    } else {
        keys = index.stored_keys(opt.doc);
        if (keys.empty()) throw InvalidInput("document '" + opt.doc + "' is not indexed");
    }
    std::vector<std::string> ids;
    for (auto i : index.query_indices(keys)) ids.push_back(index.doc_ids()[i]);
    std::sort(ids.begin(), ids.end());
    with_output(opt.out, [&](std::ostream& out) {
        for (const auto& id : ids) out << id << '\n';
    });
    return kOk;
}

bool is_pair_csv(const std::string& path) {
    auto in = open_input(path);
    std::string first;
    std::getline(in, first);
    return first.rfind(kCsvVersionLine, 0) == 0;
}

int cmd_eval(const Options& opt) {
    const Grid grid = parse_grid(opt.grid);
    const Task task = parse_task(opt.task);
    const Seed seed = parse_seed(opt.seed);
    if (opt.mode != "analytic" && opt.mode != "empirical") {
        throw InvalidInput("--mode must be 'analytic' or 'empirical'");
    }
    const bool empirical = opt.mode == "empirical";

    std::vector<DistributionPair> pairs;
    PairSample scores;
    if (opt.synthetic) {
        if (*opt.synthetic == 0) throw InvalidInput("--synthetic needs a positive pair count");
        pairs = synth_pairs(*opt.synthetic, seed);
        scores = score_pairs(pairs);
    } else if (is_pair_csv(opt.pairs)) {
        if (empirical) throw InvalidInput("empirical mode needs distributions, not a pair-sample CSV");
        auto in = open_input(opt.pairs);
        scores = read_pair_csv(in, opt.pairs);
    } else {
        auto in = open_input(opt.pairs);
        pairs = read_pair_records(in, opt.pairs);
        scores = score_pairs(pairs);
    }

    std::vector<PRPoint> points;
    if (empirical) {
        if (opt.replicates < 2) throw InvalidInput("--replicates must be at least 2");
        for (const auto& e : eval_empirical(pairs, grid, task, opt.replicates, seed)) {
            points.push_back(e.point);
            std::cerr << "a=" << e.point.a << " o=" << e.point.o
                      << " precision_se=" << format_double(e.precision_se)
                      << " recall_se=" << format_double(e.recall_se) << '\n';
        }
        std::cerr << "replicate r uses scheme seed derive_seed(" << seed.value << ", r), r < "
                  << opt.replicates << '\n';
    } else {
        points = eval_analytic(scores, grid, task);
    }
    with_output(opt.out, [&](std::ostream& out) { write_pr_csv(out, points); });
    return kOk;
}

int cmd_verify(const Options& opt) {
    AcceptanceOptions options;
    if (!opt.report_dir.empty()) options.report_dir = opt.report_dir;
    options.progress = &std::cout;
    const auto results = run_acceptance(options);
    const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return passed == static_cast<long>(results.size()) ? kOk : kSuiteFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"P-MinHash sketches and the J_P probability Jaccard similarity"};
    app.require_subcommand(1);
    Options opt;

    auto* sim = app.add_subcommand("sim", "Score JSONL record pairs with all five measures (pair CSV)");
    sim->add_option("--pairs", opt.pairs, "JSONL file, consecutive records form a pair")->required();
    sim->add_option("--out", opt.out, "Output file (default stdout)");

    auto* hash = app.add_subcommand("hash", "P-MinHash signatures of a corpus (JSONL)");
    hash->add_option("--corpus", opt.corpus, "JSONL corpus")->required();
    hash->add_option("--k", opt.k, "Samples per signature")->capture_default_str();
    hash->add_option("--seed", opt.seed, "Base seed, decimal or 0x-hex")->capture_default_str();
    hash->add_flag("--astar", opt.astar, "Use the A* sampler for 'masses' and piecewise records");
    hash->add_option("--out", opt.out, "Output file (default stdout)");

    auto* index = app.add_subcommand("index", "Build a banded inverted index (JSONL dump)");
    index->add_option("--corpus", opt.corpus, "JSONL corpus")->required();
    index->add_option("--a", opt.a, "Hashes per band")->capture_default_str();
    index->add_option("--o", opt.o, "Number of bands")->capture_default_str();
    index->add_option("--seed", opt.seed, "Base seed, decimal or 0x-hex")->capture_default_str();
    index->add_option("--out", opt.out, "Output file (default stdout)");

    auto* query = app.add_subcommand("query", "Document ids sharing a band key with the query");
    query->add_option("--index", opt.index, "Index dump")->required();
    auto* doc = query->add_option("--doc", opt.doc, "Query with a document (indexed, or from --corpus)");
    auto* qcorpus = query->add_option("--corpus", opt.corpus, "Corpus holding --doc");
    auto* text = query->add_option("--text", opt.text, "Query with free text");
    qcorpus->needs(doc);
    doc->excludes(text);
    query->add_option("--out", opt.out, "Output file (default stdout)");

    auto* eval = app.add_subcommand("eval", "Precision/recall of banded retrieval (PR CSV)");
    auto* pairs = eval->add_option("--pairs", opt.pairs, "Pair CSV or JSONL pair file");
    auto* synthetic = eval->add_option("--synthetic", opt.synthetic, "Generate N synthetic pairs");
    pairs->excludes(synthetic);
    eval->add_option("--grid", opt.grid, "'default', 'a:o,...' or 'a=..;o=..'")->capture_default_str();
    eval->add_option("--task", opt.task, "Positive pairs, e.g. 'jsd<0.25' or 'jw>0.5'")->capture_default_str();
    eval->add_option("--mode", opt.mode, "analytic or empirical")->capture_default_str();
    eval->add_option("--replicates", opt.replicates, "Seed replicates (empirical)")->capture_default_str();
    eval->add_option("--seed", opt.seed, "Seed, decimal or 0x-hex")->capture_default_str();
    eval->add_option("--out", opt.out, "Output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Run the property and Monte-Carlo suite");
    verify->add_option("--report-dir", opt.report_dir, "Write scatter and curve CSVs here");

    try {
        app.parse(argc, argv);
        if (*query && !*doc && !*text) throw CLI::ValidationError("query needs --doc or --text");
        if (*eval && !*pairs && !*synthetic) throw CLI::ValidationError("eval needs --pairs or --synthetic");
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidationError;
    }

    try {
        if (*sim) return cmd_sim(opt);
        if (*hash) return cmd_hash(opt);
        if (*index) return cmd_index(opt);
        if (*query) return cmd_query(opt);
        if (*eval) return cmd_eval(opt);
        return cmd_verify(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    }
}
