#include "jpminhash/retrieval.hpp"
#include "jpminhash/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace jpminhash;
using doctest::Approx;

namespace {

double sigma(double p, double n) { return std::sqrt(p * (1 - p) / n); }

const SparseDistribution X = make_distribution({{1, 0.5}, {2, 0.4}, {3, 0.1}});
const SparseDistribution Y = make_distribution({{1, 0.2}, {2, 0.4}, {3, 0.4}});

PairScore scored(double jp, double jw, double jsd, double weight = 1.0) {
    PairScore s;
    s.jp = jp;
    s.jw = jw;
    s.jsd = jsd;
    s.weight = weight;
    return s;
}

} // namespace

TEST_SUITE("ingestion") {
    TEST_CASE("tokenize") {
        CHECK(tokenize("A,b!A") == std::vector<std::string>{"a", "b", "a"});
        CHECK(tokenize("  ").empty());
        CHECK(tokenize("caf\xc3\xa9 ok") == std::vector<std::string>{"caf\xc3\xa9", "ok"});
    }

    TEST_CASE("term distributions") {
        const auto c = ingest_text({{"d1", "a b a"}, {"d2", "A,b!A"}, {"d3", ""}});
        REQUIRE(c.documents.size() == 2);
        CHECK(c.skipped == 1);
        const auto& d = c.documents[0];
        CHECK(d.dist.mass(token_id("a")) == Approx(2.0 / 3.0));
        CHECK(d.dist.mass(token_id("b")) == Approx(1.0 / 3.0));
        CHECK(d.tokens.at("a") == token_id("a"));
        CHECK(c.documents[1].dist == d.dist);
    }

    TEST_CASE("documents from weights") {
        const auto d = document_from_weights("w", {{"x", 3.0}, {"y", 1.0}});
        CHECK(d.dist.mass(token_id("x")) == 0.75);
        CHECK_THROWS_AS(document_from_weights("w", {{"x", -1.0}}), InvalidInput);
    }
}

TEST_SUITE("synthetic pairs") {
    TEST_CASE("deterministic and sandwiched") {
        const auto a = synth_pairs(200, Seed{1});
        const auto b = synth_pairs(200, Seed{1});
        REQUIRE(a.size() == 200);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].a == b[i].a);
            CHECK(a[i].b == b[i].b);
            const auto s = score_pair(a[i]);
            CHECK(s.jw <= s.jp + 1e-9);
            CHECK(s.jp <= 2 * s.jw / (1 + s.jw) + 1e-9);
        }
        CHECK_THROWS_AS(synth_pairs(0, Seed{1}), InvalidInput);
    }

    TEST_CASE("mixing endpoints") {
        const auto z = make_distribution({{0, 0.6}, {1, 0.4}});
        const auto n1 = make_distribution({{10, 1.0}});
        const auto n2 = make_distribution({{20, 1.0}});
        const auto [x0, y0] = mix_pair(z, n1, n2, 0.0);
        CHECK(x0 == y0);
        const auto [x1, y1] = mix_pair(z, n1, n2, 1.0);
        const auto s = score_pair({"a", "b", x1, y1, 1.0});
        CHECK(s.jp == 0.0);
        CHECK(s.jw == 0.0);
        const auto s0 = score_pair({"a", "b", x0, y0, 1.0});
        CHECK(s0.jp == Approx(1.0));
        CHECK(s0.jsd == Approx(0.0));
    }

    TEST_CASE("corpus pairs") {
        const auto c = ingest_text({{"a", "x y"}, {"b", "y z"}, {"c", "z w"}});
        const auto all = corpus_pairs(c, 100, Seed{2});
        CHECK(all.size() == 3);
        for (const auto& p : all) CHECK(p.id_a != p.id_b);
    }
}

TEST_SUITE("banding") {
    TEST_CASE("amplify") {
        CHECK(amplify(0.5, 2, 3) == 0.578125);
        CHECK(amplify(0.37, 1, 1) == 0.37);
        CHECK(amplify(1.0, 4, 7) == 1.0);
        CHECK(amplify(0.0, 4, 7) == 0.0);
        CHECK_THROWS_AS(amplify(1.5, 1, 1), InvalidInput);
        CHECK_THROWS_AS(amplify(0.5, 0, 1), InvalidInput);
    }

    TEST_CASE("band keys use disjoint signature ranges") {
        const BandingScheme scheme{2, 2, Seed{3}};
        const auto sig = signature(X, Seed{3}, 4);
        const auto keys = band_keys(sig, scheme);
        REQUIRE(keys.size() == 2);
        std::uint64_t h0 = derive_seed(Seed{3}, 0).value;
        h0 = fin64(fin64(h0 ^ sig.samples[0]) ^ sig.samples[1]);
        std::uint64_t h1 = derive_seed(Seed{3}, 1).value;
        h1 = fin64(fin64(h1 ^ sig.samples[2]) ^ sig.samples[3]);
        CHECK(keys[0] == h0);
        CHECK(keys[1] == h1);
        CHECK_THROWS_AS(band_keys(signature(X, Seed{3}, 3), scheme), InvalidInput);
    }

    TEST_CASE("identical documents share every key") {
        const BandingScheme scheme{3, 5, Seed{4}};
        InvertedIndex index(scheme);
        CHECK(index.keys_for(X) == index.keys_for(make_distribution({{3, 1}, {2, 4}, {1, 5}})));
    }

    TEST_CASE("query returns the document itself and nothing disjoint") {
        const auto c = ingest_text({{"d1", "alpha beta gamma"}, {"d2", "alpha beta delta"}, {"d3", "omega psi"}});
        const auto index = InvertedIndex::build(c.documents, {2, 8, Seed{5}});
        const auto hits = index.query(c.documents[0].dist);
        CHECK(std::find(hits.begin(), hits.end(), "d1") != hits.end());
        CHECK(std::find(hits.begin(), hits.end(), "d3") == hits.end());
        CHECK(index.stored_keys("d1") == index.keys_for(c.documents[0].dist));
        CHECK(index.stored_keys("missing").empty());
    }

    TEST_CASE("index build is deterministic and validated") {
        const auto c = ingest_text({{"d1", "a b"}, {"d2", "b c"}});
        CHECK(InvertedIndex::build(c.documents, {2, 4, Seed{6}}) == InvertedIndex::build(c.documents, {2, 4, Seed{6}}));
        CHECK_THROWS_AS(InvertedIndex::build({}, {1, 1, Seed{0}}), InvalidInput);
        CHECK_THROWS_AS(InvertedIndex::build({c.documents[0], c.documents[0]}, {1, 1, Seed{0}}), InvalidInput);
        CHECK_THROWS_AS(validate(BandingScheme{0, 1, Seed{0}}), InvalidInput);
    }

    TEST_CASE("single band retrieval rate follows jp") {
        constexpr std::size_t R = 20'000;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < R; ++r) {
            InvertedIndex index({1, 1, derive_seed(Seed{7}, r)});
            index.add("y", Y);
            hits += !index.query(X).empty();
        }
        const double p = 0.607692307692;
        CHECK(std::abs(static_cast<double>(hits) / R - p) <= 4 * sigma(p, R));
    }
}

TEST_SUITE("evaluation") {
    TEST_CASE("task parsing") {
        const auto t = parse_task("jsd<0.25");
        CHECK(t.field == ScoreField::jsd);
        CHECK(t.less);
        CHECK_FALSE(t.inclusive);
        CHECK(t.threshold == 0.25);
        const auto u = parse_task("jw>=0.5");
        CHECK(u.inclusive);
        CHECK_FALSE(u.less);
        CHECK(to_string(u) == "jw>=0.5");
        CHECK_THROWS_AS(parse_task("foo<1"), InvalidInput);
        CHECK_THROWS_AS(parse_task("jsd"), InvalidInput);
        CHECK_THROWS_AS(parse_task("jsd<abc"), InvalidInput);
    }

    TEST_CASE("grid parsing") {
        CHECK(default_grid().size() == 48);
        CHECK(parse_grid("default") == default_grid());
        CHECK(parse_grid("2:4,1:2") == Grid{{2, 4}, {1, 2}});
        CHECK(parse_grid("a=1,2;o=4,8") == Grid{{1, 4}, {1, 8}, {2, 4}, {2, 8}});
        CHECK_THROWS_AS(parse_grid("0:4"), InvalidInput);
        CHECK_THROWS_AS(parse_grid("2-4"), InvalidInput);
        CHECK_THROWS_AS(parse_grid(""), InvalidInput);
    }

    TEST_CASE("single positive pair recall is the amplified probability") {
        const auto pts = eval_analytic({scored(0.5, 0.3, 0.1)}, {{2, 3}}, parse_task("jsd<0.25"));
        REQUIRE(pts.size() == 2);
        CHECK(pts[0].method == Method::jp);
        CHECK(pts[0].recall == Approx(0.578125));
        CHECK(pts[0].precision == 1.0);
        CHECK(pts[1].method == Method::jw);
        CHECK(pts[1].recall == Approx(amplify(0.3, 2, 3)));
    }

    TEST_CASE("all positive gives precision 1") {
        const PairSample s{scored(0.9, 0.8, 0.01), scored(0.4, 0.3, 0.2), scored(0.1, 0.05, 0.24)};
        for (const auto& p : eval_analytic(s, default_grid(), parse_task("jsd<0.25"))) CHECK(p.precision == 1.0);
    }

    TEST_CASE("no positives is a degenerate task") {
        CHECK_THROWS_WITH_AS(eval_analytic({scored(0.5, 0.3, 0.9)}, {{1, 1}}, parse_task("jsd<0.25")),
                             "degenerate task", InvalidInput);
    }

    TEST_CASE("doubling a weight matches the closed form") {
        const auto pos = scored(0.8, 0.7, 0.1), neg = scored(0.5, 0.4, 0.5);
        auto pos2 = pos;
        pos2.weight = 2.0;
        const Task task = parse_task("jsd<0.25");
        for (auto [a, o] : Grid{{1, 1}, {2, 4}, {3, 8}}) {
            const auto p = eval_analytic({pos2, neg}, {{a, o}}, task)[0];
            const double qp = amplify(0.8, a, o), qn = amplify(0.5, a, o);
            CHECK(p.precision == Approx(2 * qp / (2 * qp + qn)).epsilon(1e-12));
            CHECK(p.recall == Approx(qp).epsilon(1e-12));
            const auto dup = eval_analytic({pos, pos, neg}, {{a, o}}, task)[0];
            CHECK(dup.precision == Approx(p.precision).epsilon(1e-12));
        }
    }

    TEST_CASE("property: recall monotone on the default grid") {
        const auto pairs = score_pairs(synth_pairs(400, Seed{8}));
        const auto pts = eval_analytic(pairs, default_grid(), parse_task("jw>0.5"));
        for (const auto& p : pts) {
            for (const auto& q : pts) {
                if (p.method != q.method) continue;
                if (p.a == q.a && q.o > p.o) CHECK(q.recall >= p.recall - 1e-12);
                if (p.o == q.o && q.a > p.a) CHECK(q.recall <= p.recall + 1e-12);
            }
        }
    }

    TEST_CASE("empirical points agree with analytic ones") {
        const auto pairs = synth_pairs(500, Seed{9});
        const Task task = parse_task("jsd<0.25");
        const auto ana = eval_analytic(score_pairs(pairs), {{2, 4}}, task);
        const auto emp = eval_empirical(pairs, {{2, 4}}, task, 20, Seed{10});
        REQUIRE(emp.size() == 1);
        CHECK(emp[0].point.mode == EvalMode::empirical);
        CHECK(std::abs(emp[0].point.recall - ana[0].recall) <= 4 * emp[0].recall_se);
        CHECK(std::abs(emp[0].point.precision - ana[0].precision) <= 4 * emp[0].precision_se);
    }
}
