#include "jpminhash/random.hpp"
#include "jpminhash/similarity.hpp"

#include <doctest.h>

#include <cmath>

using namespace jpminhash;
using doctest::Approx;

namespace {

SparseDistribution dense(std::vector<double> v) { return normalize(SparseVector::from_dense(v)); }

const SparseDistribution X = make_distribution({{1, 0.5}, {2, 0.4}, {3, 0.1}});
const SparseDistribution Y = make_distribution({{1, 0.2}, {2, 0.4}, {3, 0.4}});

SparseDistribution uniform_on(std::vector<ElementId> ids) {
    std::vector<Entry> e;
    for (auto id : ids) e.push_back({id, 1.0});
    return make_distribution(e);
}

} // namespace

TEST_SUITE("sparse vector") {
    TEST_CASE("normalize divides by the total") {
        const auto d = normalize(SparseVector::from_entries({{1, 2.0}, {2, 2.0}}));
        REQUIRE(d.size() == 2);
        CHECK(d.mass(1) == 0.5);
        CHECK(d.mass(2) == 0.5);
        CHECK(normalize(SparseVector::from_entries({{7, 5.0}})).mass(7) == 1.0);
    }

    TEST_CASE("degenerate inputs are rejected") {
        CHECK_THROWS_WITH_AS(normalize(SparseVector{}), "degenerate distribution", InvalidInput);
        CHECK_THROWS_AS(normalize(SparseVector::from_entries({{1, 0.0}})), InvalidInput);
        CHECK_THROWS_AS(SparseVector::from_entries({{1, -1.0}}), InvalidInput);
        CHECK_THROWS_AS(SparseVector::from_entries({{1, NAN}}), InvalidInput);
        CHECK_THROWS_AS(SparseVector::from_entries({{1, INFINITY}}), InvalidInput);
        CHECK_THROWS_AS(SparseVector::from_entries({{1, 1.0}, {1, 2.0}}), InvalidInput);
    }

    TEST_CASE("entries are sorted and zero masses dropped") {
        const auto v = SparseVector::from_entries({{9, 1.0}, {3, 0.0}, {4, 2.0}});
        REQUIRE(v.size() == 2);
        CHECK(v.entries()[0].id == 4);
        CHECK(v.entries()[1].id == 9);
        CHECK_FALSE(v.contains(3));
        CHECK(v.total() == 3.0);
    }

    TEST_CASE("normalization is idempotent") {
        Rng rng(Seed{11});
        for (int i = 0; i < 50; ++i) {
            const auto [x, y] = random_pair(rng, 30);
            const auto again = normalize(x);
            REQUIRE(again.size() == x.size());
            for (std::size_t k = 0; k < x.size(); ++k) {
                CHECK(again.entries()[k].id == x.entries()[k].id);
                CHECK(std::abs(again.entries()[k].mass - x.entries()[k].mass) <= 1e-15 * x.entries()[k].mass);
            }
        }
    }
}

TEST_SUITE("jp") {
    TEST_CASE("reference pair") {
        CHECK(jp_naive(X, Y) == Approx(0.607692307692).epsilon(1e-9));
        CHECK(jp(X, Y) == Approx(jp_naive(X, Y)).epsilon(1e-12));
    }

    TEST_CASE("identity and disjoint supports") {
        CHECK(jp_naive(X, X) == Approx(1.0));
        CHECK(jp(X, X) == Approx(1.0));
        const auto a = uniform_on({1, 2}), b = uniform_on({3, 4});
        CHECK(jp_naive(a, b) == 0.0);
        CHECK(jp(a, b) == 0.0);
    }

    TEST_CASE("uniform distributions reduce to the Jaccard index") {
        CHECK(jp(uniform_on({1, 2, 3}), uniform_on({2, 3, 4})) == Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("shifted pair at p = 0.5") {
        CHECK(jp(dense({0, 0.5, 0.5}), dense({0.5, 0.5, 0})) == Approx(1.0 / 3.0).epsilon(1e-12));
    }

    TEST_CASE("per-term values") {
        const auto t = jp_terms(X, Y);
        REQUIRE(t.terms.size() == 3);
        CHECK(t.terms[0].id == 1);
        CHECK(t.terms[0].value == Approx(0.2).epsilon(1e-12));
        CHECK(t.terms[1].value == Approx(0.4 / 1.3).epsilon(1e-12));
        CHECK(t.terms[2].value == Approx(0.1).epsilon(1e-12));
        CHECK(t.sum() == Approx(jp(X, Y)).epsilon(1e-12));

        const auto u = jp_terms(uniform_on({5, 6}), uniform_on({5, 6}));
        REQUIRE(u.terms.size() == 2);
        CHECK(u.terms[0].value == Approx(0.5));
        CHECK(u.terms[1].value == Approx(0.5));
    }

    TEST_CASE("term saturation counts elements outside the intersection") {
        // Both shared elements fall strictly below min(x_i, y_i); the
        // saturated terms are the two single-support elements (value 0).
        const auto x = make_distribution({{0, 0.4}, {1, 0.3}, {2, 0.3}});
        const auto y = make_distribution({{1, 0.3}, {2, 0.3}, {3, 0.4}});
        const auto t = jp_terms(x, y);
        REQUIRE(t.terms.size() == 2);
        for (const auto& term : t.terms) CHECK(term.value == Approx(0.3 / 1.4).epsilon(1e-12));
    }

    TEST_CASE("two-element pairs satisfy jp = 1 - tv") {
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const auto x = dense({i / 20.0, 1 - i / 20.0});
                const auto y = dense({j / 20.0, 1 - j / 20.0});
                CHECK(std::abs(jp(x, y) - (1.0 - total_variation(x, y))) <= 1e-12);
            }
        }
    }

    TEST_CASE("property: fast evaluation matches the double sum") {
        Rng rng(Seed{12});
        for (int i = 0; i < 300; ++i) {
            const auto [x, y] = random_pair(rng, 120);
            CHECK(std::abs(jp(x, y) - jp_naive(x, y)) <= 1e-9);
            CHECK(std::abs(jp_terms(x, y).sum() - jp(x, y)) <= 1e-9);
        }
    }

    TEST_CASE("property: symmetry and scale invariance") {
        Rng rng(Seed{13});
        for (int i = 0; i < 200; ++i) {
            const auto [x, y] = random_pair(rng, 40);
            CHECK(std::abs(jp(x, y) - jp(y, x)) <= 1e-12);
            const auto xs = normalize(x.scaled(rng.uniform(0.1, 50.0)));
            const auto ys = normalize(y.scaled(rng.uniform(0.1, 50.0)));
            CHECK(std::abs(jp(xs, ys) - jp(x, y)) <= 1e-12);
        }
    }

    TEST_CASE("property: ties in the ratio order") {
        // Repeated ratios exercise the tie-break path.
        const auto x = dense({0.2, 0.2, 0.2, 0.2, 0.2});
        const auto y = dense({0.1, 0.1, 0.3, 0.3, 0.2});
        CHECK(std::abs(jp(x, y) - jp_naive(x, y)) <= 1e-12);
    }
}

TEST_SUITE("other measures") {
    TEST_CASE("jw") {
        CHECK(jw(X, Y) == Approx(0.7 / 1.3).epsilon(1e-12));
        CHECK(jw(X, X) == Approx(1.0));
        // Normalized indicators of {1,2,3,4} and {1,2}.
        CHECK(jw(uniform_on({1, 2, 3, 4}), uniform_on({1, 2})) == Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK_THROWS_AS(jw(SparseVector{}, SparseVector{}), InvalidInput);
        CHECK(jw(SparseVector{}, SparseVector::from_entries({{1, 1.0}})) == 0.0);
    }

    TEST_CASE("support jaccard") {
        CHECK(support_jaccard(uniform_on({1, 2, 3}), uniform_on({2, 3, 4})) == 0.5);
        CHECK(support_jaccard(X, Y) == 1.0);
        CHECK(support_jaccard(uniform_on({1}), uniform_on({2})) == 0.0);
        CHECK_THROWS_AS(support_jaccard(SparseVector{}, SparseVector{}), InvalidInput);
    }

    TEST_CASE("total variation") {
        CHECK(total_variation(dense({1, 0}), dense({0, 1})) == 1.0);
        CHECK(total_variation(X, Y) == Approx(0.3).epsilon(1e-12));
        CHECK(total_variation(X, X) == 0.0);
    }

    TEST_CASE("jsd") {
        CHECK(jsd(X, X) == Approx(0.0));
        CHECK(jsd(dense({1, 0}), dense({0, 1})) == Approx(1.0));
        CHECK(jsd(dense({1, 0}), dense({0.5, 0.5})) == Approx(0.311278124459).epsilon(1e-9));
    }

    TEST_CASE("report bundles the five measures") {
        const auto r = similarity_report(X, Y);
        CHECK(r.jp == Approx(jp(X, Y)));
        CHECK(r.jw == Approx(jw(X, Y)));
        CHECK(r.support_jaccard == 1.0);
        CHECK(r.tv == Approx(0.3));
        CHECK(r.jsd == Approx(jsd(X, Y)));
    }

    TEST_CASE("property: sandwich and tv identity") {
        Rng rng(Seed{14});
        for (int i = 0; i < 500; ++i) {
            const auto [x, y] = random_pair(rng, 60);
            const double p = jp(x, y), w = jw(x, y), tv = total_variation(x, y);
            CHECK(w <= p + 1e-9);
            CHECK(p <= 2 * w / (1 + w) + 1e-9);
            CHECK(std::abs(w - (1 - tv) / (1 + tv)) <= 1e-9);
            const double j = jsd(x, y);
            CHECK(j >= 0.0);
            CHECK(j <= 1.0);
        }
    }
}

TEST_SUITE("bound curves") {
    TEST_CASE("endpoints and midpoint") {
        const auto b0 = bound_curves(0.0);
        CHECK(b0.d == 0.0);
        CHECK(b0.jp_lower == 1.0);
        CHECK(b0.jp_upper == 1.0);
        const auto b1 = bound_curves(1.0);
        CHECK(b1.d == Approx(1.0));
        CHECK(b1.jp_lower == 0.0);
        CHECK(b1.jp_upper == 0.0);
        const auto h = bound_curves(0.5);
        CHECK(h.jp_lower == Approx(1.0 / 3.0));
        CHECK(h.jp_upper == 0.5);
        CHECK(h.d == Approx(0.188721875541).epsilon(1e-9));
        CHECK_THROWS_AS(bound_curves(-0.1), InvalidInput);
        CHECK_THROWS_AS(bound_curves(1.1), InvalidInput);
    }
}

TEST_SUITE("constructions") {
    TEST_CASE("lower pair") {
        const auto [x1, y1] = construct_lower_pair(dense({0.5, 0.5}), dense({0.5, 0.5}));
        CHECK(x1 == y1);
        CHECK(x1.size() == 2);

        const auto [x2, y2] = construct_lower_pair(X, Y);
        CHECK(jp_naive(x2, y2) == Approx(0.538461538).epsilon(1e-9));
        CHECK(jw(x2, y2) == Approx(jw(X, Y)).epsilon(1e-12));

        const auto [x3, y3] = construct_lower_pair(dense({1, 0}), dense({0, 1}));
        CHECK(jp(x3, y3) == 0.0);
    }

    TEST_CASE("upper pair") {
        const auto shared = SparseVector::from_entries({{1, 0.3}, {2, 0.2}});
        const auto [x, y] = construct_upper_pair(shared, 0.5, Partition{{{1}, {2}}});
        CHECK(x.mass(1) == Approx(0.8));
        CHECK(x.mass(2) == Approx(0.2));
        CHECK(y.mass(1) == Approx(0.3));
        CHECK(y.mass(2) == Approx(0.7));
        CHECK(jp(x, y) == Approx(0.5).epsilon(1e-12));
        CHECK(jw(x, y) == Approx(1.0 / 3.0).epsilon(1e-12));
    }

    TEST_CASE("upper pair at p = 0 returns the shared masses") {
        const auto shared = SparseVector::from_entries({{1, 0.6}, {2, 0.4}});
        const auto [x, y] = construct_upper_pair(shared, 0.0, Partition{{{1}, {2}}});
        CHECK(x == y);
        CHECK(jp(x, y) == Approx(1.0));
    }

    TEST_CASE("upper pair value does not depend on the split") {
        const auto shared = SparseVector::from_entries({{1, 0.2}, {2, 0.1}, {3, 0.15}, {4, 0.25}});
        const auto [a1, b1] = construct_upper_pair(shared, 0.3, Partition{{{1}, {2, 3, 4}}});
        const auto [a2, b2] = construct_upper_pair(shared, 0.3, Partition{{{1, 3}, {2, 4}}});
        CHECK(std::abs(jp(a1, b1) - jp(a2, b2)) <= 1e-9);
        CHECK(jp(a1, b1) == Approx(0.7).epsilon(1e-12));
    }

    TEST_CASE("upper pair validation") {
        const auto shared = SparseVector::from_entries({{1, 0.3}, {2, 0.2}});
        CHECK_THROWS_AS(construct_upper_pair(shared, 0.5, Partition{{{1, 2}, {}}}), InvalidInput);
        CHECK_THROWS_AS(construct_upper_pair(shared, 0.4, Partition{{{1}, {2}}}), InvalidInput);
        CHECK_THROWS_AS(construct_upper_pair(shared, 0.5, Partition{{{1}}}), InvalidInput);
        CHECK_THROWS_AS(construct_upper_pair(shared, 0.5, Partition{{{1}, {2}, {3}}}), InvalidInput);
        CHECK_THROWS_AS(construct_upper_pair(shared, 0.5, Partition{{{1}, {3}}}), InvalidInput);
    }

    TEST_CASE("adversarial z") {
        const auto z = adversarial_z(X, Y, 2);
        CHECK(z.mass(1) == Approx(5.0 / 13.0).epsilon(1e-12));
        CHECK(z.mass(2) == Approx(4.0 / 13.0).epsilon(1e-12));
        CHECK(z.mass(3) == Approx(4.0 / 13.0).epsilon(1e-12));
        CHECK(jp_naive(X, z) >= 0.607692);
        CHECK(jp_naive(Y, z) >= 0.607692);
        CHECK(adversarial_z(X, X, 1) == X);
        CHECK_THROWS_AS(adversarial_z(X, uniform_on({1, 2}), 3), InvalidInput);
    }

    TEST_CASE("coarsen") {
        const auto c = coarsen(X, Partition{{{1}, {2, 3}}});
        REQUIRE(c.size() == 2);
        CHECK(c.mass(0) == Approx(0.5));
        CHECK(c.mass(1) == Approx(0.5));
        const auto s = coarsen(X, Partition{{{1}, {2}, {3}}});
        CHECK(s.mass(0) == X.mass(1));
        CHECK(s.mass(2) == X.mass(3));
        CHECK_THROWS_AS(coarsen(X, Partition{{{1}, {2}}}), InvalidInput);
        CHECK_THROWS_AS(coarsen(X, Partition{{{1, 2}, {2, 3}}}), InvalidInput);
    }

    TEST_CASE("property: coarsening never decreases jp") {
        Rng rng(Seed{15});
        for (int i = 0; i < 200; ++i) {
            const auto [x, y] = random_pair(rng, 20);
            std::vector<ElementId> ids;
            for (const auto& e : x.entries()) ids.push_back(e.id);
            for (const auto& e : y.entries())
                if (!x.contains(e.id)) ids.push_back(e.id);
            Partition f;
            f.groups.resize(1 + rng.below(ids.size()));
            for (auto id : ids) f.groups[rng.below(f.groups.size())].push_back(id);
            std::erase_if(f.groups, [](const auto& g) { return g.empty(); });
            CHECK(jp(coarsen(x, f), coarsen(y, f)) >= jp(x, y) - 1e-9);
        }
    }

    TEST_CASE("property: adversarial z dominates for every shared element") {
        Rng rng(Seed{16});
        for (int i = 0; i < 100; ++i) {
            const auto [x, y] = random_pair(rng, 15);
            const double base = jp(x, y);
            for (const auto& t : jp_terms(x, y).terms) {
                const auto z = adversarial_z(x, y, t.id);
                CHECK(jp(x, z) >= base - 1e-9);
                CHECK(jp(y, z) >= base - 1e-9);
                CHECK(std::abs(z.mass(t.id) - t.value) <= 1e-12);
            }
        }
    }
}
