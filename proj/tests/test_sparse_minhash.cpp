#include "jpminhash/random.hpp"
#include "jpminhash/similarity.hpp"
#include "jpminhash/sparse_minhash.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace jpminhash;

namespace {

const SparseDistribution X = make_distribution({{1, 0.5}, {2, 0.4}, {3, 0.1}});
const SparseDistribution Y = make_distribution({{1, 0.2}, {2, 0.4}, {3, 0.4}});

double sigma(double p, double n) { return std::sqrt(p * (1 - p) / n); }

} // namespace

TEST_SUITE("hashing") {
    TEST_CASE("finalizer and uniform hash fixtures") {
        CHECK(fin64(0) == 0);
        CHECK(fin64(1) == 12994781566227106604ULL);
        CHECK(uniform_hash(0, Seed{0}) == 0x1.0p-53);
        CHECK(uniform_hash(1, Seed{0}) == 0.48996417306913687);
        CHECK(uniform_hash(12345, Seed{0xDEADBEEF}) == 0.35056812247456948);
        CHECK(derive_seed(Seed{42}, 7).value == 17877881014533227113ULL);
        CHECK(token_id("hello") == 2359792716144876849ULL);
        static_assert(uniform_hash(3, Seed{9}) > 0.0);
    }

    TEST_CASE("uniform hash stays in (0, 1]") {
        for (std::uint64_t i = 0; i < 10000; ++i) {
            const double u = uniform_hash(i * 0x9E3779B97F4A7C15ULL, Seed{i});
            CHECK(u > 0.0);
            CHECK(u <= 1.0);
        }
        CHECK(uniform_hash(77, Seed{5}) == uniform_hash(77, Seed{5}));
    }

    TEST_CASE("token ids differ by length and content") {
        CHECK(token_id("a") != token_id("b"));
        CHECK(token_id("a") != token_id(std::string_view("a\0", 2)));
        CHECK(token_id("abcdefgh") != token_id("abcdefghi"));
    }
}

TEST_SUITE("pminhash") {
    TEST_CASE("single element") {
        const auto d = make_distribution({{42, 1.0}});
        for (std::uint64_t s = 0; s < 100; ++s) CHECK(pminhash(d, Seed{s}) == 42);
        CHECK_THROWS_AS(pminhash(SparseVector{}, Seed{0}), InvalidInput);
    }

    TEST_CASE("invariant under positive scaling") {
        Rng rng(Seed{21});
        for (int i = 0; i < 200; ++i) {
            const auto [x, y] = random_pair(rng, 30);
            const Seed s{rng.bits()};
            CHECK(pminhash(x.scaled(rng.uniform(0.01, 100.0)), s) == pminhash(x, s));
        }
    }

    TEST_CASE("invariant under input order") {
        std::vector<Entry> entries{{5, 0.1}, {1, 0.7}, {9, 0.2}};
        const auto a = SparseVector::from_entries(entries);
        std::reverse(entries.begin(), entries.end());
        const auto b = SparseVector::from_entries(entries);
        for (std::uint64_t s = 0; s < 200; ++s) CHECK(pminhash(a, Seed{s}) == pminhash(b, Seed{s}));
    }

    TEST_CASE("marginal frequencies") {
        constexpr std::size_t N = 200'000;
        std::map<ElementId, std::size_t> counts;
        for (std::size_t j = 0; j < N; ++j) ++counts[pminhash(X, derive_seed(Seed{1}, j))];
        for (const auto& e : X.entries()) {
            const double f = static_cast<double>(counts[e.id]) / N;
            CHECK(std::abs(f - e.mass) <= 4 * sigma(e.mass, N));
        }
    }
}

TEST_SUITE("signatures") {
    TEST_CASE("k = 1 and determinism") {
        const auto s = signature(X, Seed{3}, 1, "x");
        REQUIRE(s.k() == 1);
        CHECK(s.samples[0] == pminhash(X, derive_seed(Seed{3}, 0)));
        CHECK(signature(X, Seed{3}, 64) == signature(X, Seed{3}, 64));
        CHECK_THROWS_AS(signature(X, Seed{3}, 0), InvalidInput);
    }

    TEST_CASE("agreement estimates jp") {
        const auto sx = signature(X, Seed{4}, 10'000);
        const auto sy = signature(Y, Seed{4}, 10'000);
        const double p = jp(X, Y);
        CHECK(std::abs(signature_agreement(sx, sy) - p) <= 4 * sigma(p, 10'000));
        CHECK(signature_agreement(sx, signature(X, Seed{4}, 10'000)) == 1.0);
        CHECK_THROWS_AS(signature_agreement(sx, signature(X, Seed{4}, 3)), InvalidInput);
    }

    TEST_CASE("collision estimate") {
        CHECK(collision_estimate(X, X, Seed{5}, 1000) == 1.0);
        CHECK(collision_estimate(make_distribution({{1, 1}}), make_distribution({{2, 1}}), Seed{5}, 1000) == 0.0);
        constexpr std::size_t N = 200'000;
        const double p = 0.607692307692;
        CHECK(std::abs(collision_estimate(X, Y, Seed{6}, N) - p) <= 4 * sigma(p, N));
    }
}

TEST_SUITE("weight tree") {
    TEST_CASE("single leaf") {
        const auto t = WeightTree::flat({8});
        CHECK(tree_pminhash(t, make_distribution({{8, 1.0}}), Seed{1}) == 8);
    }

    TEST_CASE("validation") {
        CHECK_THROWS_AS(WeightTree::flat({1, 1}), InvalidInput);
        CHECK_THROWS_AS(WeightTree(WeightTree::Node{}), InvalidInput);
        WeightTree::Node leaf_with_children{1, {WeightTree::Node{2, {}}}};
        CHECK_THROWS_AS(WeightTree(WeightTree::Node{std::nullopt, {leaf_with_children}}), InvalidInput);
        CHECK_THROWS_AS(tree_pminhash(WeightTree::flat({1, 2}), X, Seed{0}), InvalidInput);
    }

    TEST_CASE("flat tree marginal matches the distribution") {
        constexpr std::size_t N = 200'000;
        const auto tree = WeightTree::flat({1, 2, 3});
        std::map<ElementId, std::size_t> counts;
        for (std::size_t j = 0; j < N; ++j) ++counts[tree_pminhash(tree, X, derive_seed(Seed{2}, j))];
        double chi2 = 0;
        for (const auto& e : X.entries()) {
            const double expected = e.mass * N;
            chi2 += std::pow(counts[e.id] - expected, 2) / expected;
        }
        CHECK(chi2 < 13.8155); // chi-square(2) at 0.001
    }

    TEST_CASE("promoted element collides with probability min(x_i, y_i)") {
        constexpr std::size_t N = 200'000;
        const auto tree = WeightTree::promote(2, {1, 3});
        std::size_t hits = 0;
        for (std::size_t j = 0; j < N; ++j) {
            const Seed s = derive_seed(Seed{3}, j);
            hits += tree_pminhash(tree, X, s) == 2 && tree_pminhash(tree, Y, s) == 2;
        }
        CHECK(std::abs(static_cast<double>(hits) / N - 0.4) <= 4 * sigma(0.4, N));
    }

    TEST_CASE("deep tree marginal") {
        constexpr std::size_t N = 100'000;
        using Node = WeightTree::Node;
        const WeightTree tree(Node{std::nullopt,
                                   {Node{std::nullopt, {Node{1, {}}, Node{std::nullopt, {Node{2, {}}, Node{3, {}}}}}},
                                    Node{4, {}}}});
        const auto x = make_distribution({{1, 0.1}, {2, 0.2}, {3, 0.3}, {4, 0.4}});
        std::map<ElementId, std::size_t> counts;
        for (std::size_t j = 0; j < N; ++j) ++counts[tree_pminhash(tree, x, derive_seed(Seed{4}, j))];
        for (const auto& e : x.entries())
            CHECK(std::abs(static_cast<double>(counts[e.id]) / N - e.mass) <= 4 * sigma(e.mass, N));
    }
}
