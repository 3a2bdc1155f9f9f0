#include <doctest.h>

#include <cmath>
#include <random>

#include "emotraj/eigenspace.hpp"
#include "emotraj/error.hpp"
#include "emotraj/linalg.hpp"
#include "test_support.hpp"

using namespace emotraj;

namespace {

std::vector<std::vector<double>> random_faces(std::mt19937_64& rng, int count, int dim) {
    std::vector<std::vector<double>> faces(static_cast<size_t>(count));
    for (auto& f : faces) {
        f.resize(static_cast<size_t>(dim));
        for (auto& v : f) v = static_cast<double>(rng() % 256);
    }
    return faces;
}

} // namespace

TEST_CASE("identical faces are degenerate") {
    std::vector<std::vector<double>> faces(5, std::vector<double>{3, 1, 4, 1, 5, 9});
    try {
        train_pca(faces, 3);
        FAIL("expected DegenerateData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateData);
    }
}

TEST_CASE("two-point PCA matches the hand solution") {
    // faces {psi0 + delta, psi0 - delta}: mean psi0, one eigenface delta/|delta|,
    // eigenvalue |delta|^2
    std::vector<double> psi0{10, 20, 30, 40};
    std::vector<double> delta{1, -2, 0.5, 3};
    std::vector<std::vector<double>> faces(2);
    faces[0].resize(4);
    faces[1].resize(4);
    for (int i = 0; i < 4; ++i) {
        faces[0][static_cast<size_t>(i)] = psi0[static_cast<size_t>(i)] + delta[static_cast<size_t>(i)];
        faces[1][static_cast<size_t>(i)] = psi0[static_cast<size_t>(i)] - delta[static_cast<size_t>(i)];
    }
    EigenModel model = train_pca(faces, 2);
    REQUIRE(model.k() == 1); // the second eigenvalue vanishes and is dropped
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(model.mean[static_cast<size_t>(i)] - psi0[static_cast<size_t>(i)]) <= 1e-12);
    const double delta_norm = norm2(delta);
    CHECK(std::abs(model.eigenvalues[0] - delta_norm * delta_norm) <=
          1e-8 * delta_norm * delta_norm);
    const double alignment = std::abs(dot(model.eigenfaces[0], delta)) / delta_norm;
    CHECK(std::abs(alignment - 1.0) <= 1e-10);
}

TEST_CASE("gram-trick basis matches the direct covariance eigendecomposition") {
    std::mt19937_64 rng(404);
    auto faces = random_faces(rng, 10, 64); // 8x8 faces keep the oracle feasible
    EigenModel model = train_pca(faces, 10, 8, 8);
    SymmetricEigen direct = testsupport::direct_covariance_eigen(faces);

    REQUIRE(model.k() >= 5);
    for (int i = 0; i < model.k(); ++i) {
        CHECK(std::abs(model.eigenvalues[static_cast<size_t>(i)] -
                       direct.values[static_cast<size_t>(i)]) <=
              1e-6 * std::max(1.0, direct.values[static_cast<size_t>(i)]));
        std::vector<double> dv = direct.vectors.column(i);
        testsupport::canonicalize_sign(dv);
        double max_dev = 0.0;
        for (size_t p = 0; p < dv.size(); ++p)
            max_dev = std::max(max_dev,
                               std::abs(dv[p] - model.eigenfaces[static_cast<size_t>(i)][p]));
        CHECK(max_dev <= 1e-6);
    }
}

TEST_CASE("trained model invariants") {
    std::mt19937_64 rng(99);
    auto faces = random_faces(rng, 12, 40);
    EigenModel model = train_pca(faces, 12);

    SUBCASE("U^T U = I within 1e-8") {
        for (int a = 0; a < model.k(); ++a)
            for (int b = 0; b < model.k(); ++b) {
                const double d = dot(model.eigenfaces[static_cast<size_t>(a)],
                                     model.eigenfaces[static_cast<size_t>(b)]);
                CHECK(std::abs(d - (a == b ? 1.0 : 0.0)) <= 1e-8);
            }
    }
    SUBCASE("eigenvalues descend") {
        for (size_t i = 0; i + 1 < model.eigenvalues.size(); ++i)
            CHECK(model.eigenvalues[i] >= model.eigenvalues[i + 1]);
    }
    SUBCASE("singular values square to M times the eigenvalue") {
        REQUIRE(model.singular_values.size() == model.eigenvalues.size());
        for (size_t i = 0; i < model.eigenvalues.size(); ++i) {
            const double expected = faces.size() * model.eigenvalues[i];
            CHECK(model.singular_values[i] * model.singular_values[i] ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("spectrum sums to trace(A^T A)/M") {
        double trace = 0.0;
        for (const auto& f : faces) {
            std::vector<double> phi(f.size());
            for (size_t i = 0; i < f.size(); ++i) phi[i] = f[i] - model.mean[i];
            trace += dot(phi, phi);
        }
        trace /= static_cast<double>(faces.size());
        double total = 0.0;
        for (double v : model.spectrum) total += v;
        CHECK(std::abs(total - trace) <= 1e-8 * trace);
    }
    SUBCASE("training-face reconstruction residual is bounded by the dropped spectrum") {
        double dropped = 0.0;
        for (size_t i = static_cast<size_t>(model.k()); i < model.spectrum.size(); ++i)
            dropped += model.spectrum[i];
        const double bound = faces.size() * dropped + 1e-6;
        for (const auto& f : faces) {
            WeightVector w = project(model, f);
            std::vector<double> rec = reconstruct(model, w);
            double resid = 0.0;
            for (size_t p = 0; p < f.size(); ++p) {
                const double d = f[p] - rec[p];
                resid += d * d;
            }
            CHECK(resid <= bound);
        }
    }
}

TEST_CASE("projection identities") {
    std::mt19937_64 rng(2);
    auto faces = random_faces(rng, 8, 30);
    EigenModel model = train_pca(faces, 8);
    REQUIRE(model.k() >= 2);

    SUBCASE("mean projects to zero") {
        WeightVector w = project(model, model.mean);
        for (double v : w) CHECK(std::abs(v) <= 1e-10);
    }
    SUBCASE("mean plus 3 u1 projects to (3, 0, ...)") {
        std::vector<double> face = model.mean;
        for (size_t p = 0; p < face.size(); ++p) face[p] += 3.0 * model.eigenfaces[0][p];
        WeightVector w = project(model, face);
        CHECK(std::abs(w[0] - 3.0) <= 1e-8);
        for (size_t i = 1; i < w.size(); ++i) CHECK(std::abs(w[i]) <= 1e-8);
    }
    SUBCASE("reconstruct then project returns the weights") {
        WeightVector w(static_cast<size_t>(model.k()));
        for (auto& v : w) v = 10.0 * testsupport::uniform_pm1(rng);
        WeightVector back = project(model, reconstruct(model, w));
        for (size_t i = 0; i < w.size(); ++i) CHECK(std::abs(back[i] - w[i]) <= 1e-8);
    }
    SUBCASE("dimension mismatch is rejected") {
        CHECK_THROWS_AS(project(model, std::vector<double>(7, 0.0)), Error);
    }
    SUBCASE("centering off projects the raw face") {
        EigenModel literal = model;
        literal.centering = false;
        std::vector<double> face = faces[0];
        WeightVector w = project(literal, face);
        for (int i = 0; i < literal.k(); ++i)
            CHECK(w[static_cast<size_t>(i)] ==
                  doctest::Approx(dot(literal.eigenfaces[static_cast<size_t>(i)], face))
                      .epsilon(1e-12));
    }
}

TEST_CASE("project_sequence stacks per-frame projections in order") {
    std::mt19937_64 rng(8);
    auto faces = random_faces(rng, 6, 24);
    EigenModel model = train_pca(faces, 6);
    REQUIRE(model.k() >= 3);

    SUBCASE("all-mean sequence is all zero") {
        std::vector<std::vector<double>> frames(8, model.mean);
        WeightTrajectory traj = project_sequence(model, frames);
        REQUIRE(traj.length() == 8);
        for (const auto& col : traj.columns)
            for (double v : col) CHECK(std::abs(v) <= 1e-10);
    }
    SUBCASE("ramp along u2 shows up in direction 1 only") {
        std::vector<std::vector<double>> frames;
        for (int t = 0; t < 8; ++t) {
            std::vector<double> f = model.mean;
            for (size_t p = 0; p < f.size(); ++p) f[p] += t * model.eigenfaces[1][p];
            frames.push_back(std::move(f));
        }
        WeightTrajectory traj = project_sequence(model, frames);
        for (int t = 0; t < 8; ++t) {
            CHECK(std::abs(traj.weight(1, t) - t) <= 1e-8);
            for (int d = 0; d < model.k(); ++d)
                if (d != 1) CHECK(std::abs(traj.weight(d, t)) <= 1e-8);
        }
    }
    SUBCASE("matches per-frame project calls") {
        std::vector<std::vector<double>> frames = random_faces(rng, 8, 24);
        WeightTrajectory traj = project_sequence(model, frames, "ramp");
        CHECK(traj.label == "ramp");
        for (int t = 0; t < 8; ++t)
            CHECK(traj.columns[static_cast<size_t>(t)] == project(model, frames[static_cast<size_t>(t)]));
    }
}
