#include <doctest.h>

#include <algorithm>
#include <random>

#include "emotraj/discriminator.hpp"
#include "emotraj/error.hpp"
#include "test_support.hpp"

using namespace emotraj;

namespace {

WeightTrajectory constant_trajectory(const std::vector<double>& weights, const std::string& label,
                                     int length = 8) {
    WeightTrajectory t;
    t.label = label;
    t.columns.assign(static_cast<size_t>(length), weights);
    return t;
}

} // namespace

TEST_CASE("selection exhausts the space when K == D") {
    std::mt19937_64 rng(1);
    std::vector<WeightTrajectory> trajs;
    for (int s = 0; s < 4; ++s) {
        std::vector<double> wa(10), wb(10);
        for (int i = 0; i < 10; ++i) {
            wa[static_cast<size_t>(i)] = testsupport::uniform_pm1(rng);
            wb[static_cast<size_t>(i)] = testsupport::uniform_pm1(rng) + 2.0;
        }
        trajs.push_back(constant_trajectory(wa, "a"));
        trajs.push_back(constant_trajectory(wb, "b"));
    }
    DirectionSelection sel = select_directions(trajs, 10);
    REQUIRE(sel.count() == 10);
    CHECK_FALSE(sel.reduced);
    std::vector<int> sorted = sel.indices;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 10; ++i) CHECK(sorted[static_cast<size_t>(i)] == i);
    for (size_t i = 0; i + 1 < sel.scores.size(); ++i) CHECK(sel.scores[i] >= sel.scores[i + 1]);
}

TEST_CASE("a single differing direction is ranked first with the hand-computed score") {
    // two classes whose mean weights differ only in direction 3
    std::vector<double> base{1.0, -2.0, 0.5, 4.0, 7.0};
    std::vector<double> other = base;
    other[3] = 10.0;
    std::vector<WeightTrajectory> trajs{
        constant_trajectory(base, "calm"), constant_trajectory(base, "calm"),
        constant_trajectory(other, "joy"), constant_trajectory(other, "joy")};
    DirectionSelection sel = select_directions(trajs, 3);

    CHECK(sel.indices[0] == 3);
    // oracle: population variance of the class means {4, 10} = ((4-7)^2 + (10-7)^2)/2 = 9
    CHECK(sel.scores[0] == doctest::Approx(9.0).epsilon(1e-12));
    for (size_t i = 1; i < sel.scores.size(); ++i) CHECK(sel.scores[i] == 0.0);
}

TEST_CASE("identical classes give zero scores and index-order tie-break") {
    std::vector<double> w{5, 6, 7, 8};
    std::vector<WeightTrajectory> trajs{constant_trajectory(w, "a"), constant_trajectory(w, "b")};
    DirectionSelection sel = select_directions(trajs, 4);
    REQUIRE(sel.count() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(sel.indices[static_cast<size_t>(i)] == i);
        CHECK(sel.scores[static_cast<size_t>(i)] == 0.0);
    }
}

TEST_CASE("reduced flag when K < D") {
    std::vector<WeightTrajectory> trajs{constant_trajectory({1, 2}, "a"),
                                        constant_trajectory({3, 4}, "b")};
    DirectionSelection sel = select_directions(trajs, 10);
    CHECK(sel.count() == 2);
    CHECK(sel.reduced);
}

TEST_CASE("single class is rejected") {
    std::vector<WeightTrajectory> trajs{constant_trajectory({1, 2}, "only"),
                                        constant_trajectory({2, 3}, "only")};
    try {
        select_directions(trajs, 2);
        FAIL("expected SingleClass");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingleClass);
    }
}

TEST_CASE("selection invariances") {
    std::mt19937_64 rng(33);
    std::vector<WeightTrajectory> trajs;
    const char* labels[3] = {"x", "y", "z"};
    for (int c = 0; c < 3; ++c)
        for (int s = 0; s < 3; ++s) {
            std::vector<double> w(6);
            for (int i = 0; i < 6; ++i)
                w[static_cast<size_t>(i)] = testsupport::uniform_pm1(rng) + c * (i % 2 ? 1.5 : 0.2);
            trajs.push_back(constant_trajectory(w, labels[c]));
        }
    DirectionSelection ref = select_directions(trajs, 4);

    SUBCASE("permutation of the input list") {
        std::vector<WeightTrajectory> shuffled = trajs;
        std::reverse(shuffled.begin(), shuffled.end());
        DirectionSelection sel = select_directions(shuffled, 4);
        CHECK(sel.indices == ref.indices);
        // accumulation order changes, so scores agree to rounding only
        for (size_t i = 0; i < sel.scores.size(); ++i)
            CHECK(sel.scores[i] == doctest::Approx(ref.scores[i]).epsilon(1e-12));
    }
    SUBCASE("relabeling the emotions") {
        std::vector<WeightTrajectory> renamed = trajs;
        for (auto& t : renamed) t.label = "class-" + t.label;
        DirectionSelection sel = select_directions(renamed, 4);
        CHECK(sel.indices == ref.indices);
        CHECK(sel.scores == ref.scores);
    }
    SUBCASE("scaling one direction scales its score by c^2") {
        const double c = 3.0;
        std::vector<WeightTrajectory> scaled = trajs;
        for (auto& t : scaled)
            for (auto& col : t.columns) col[2] *= c;
        DirectionSelection all_ref = select_directions(trajs, 6);
        DirectionSelection all = select_directions(scaled, 6);
        // find direction 2's score in both rankings
        auto score_of = [](const DirectionSelection& sel, int dir) {
            for (size_t i = 0; i < sel.indices.size(); ++i)
                if (sel.indices[i] == dir) return sel.scores[i];
            return -1.0;
        };
        CHECK(score_of(all, 2) == doctest::Approx(c * c * score_of(all_ref, 2)).epsilon(1e-10));
        for (int d = 0; d < 6; ++d)
            if (d != 2)
                CHECK(score_of(all, d) == doctest::Approx(score_of(all_ref, d)).epsilon(1e-12));
    }
}
