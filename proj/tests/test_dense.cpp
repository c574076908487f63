#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"

#include "qsearch/dense.hpp"
#include "qsearch/errors.hpp"
#include "qsearch/schedule.hpp"
#include "qsearch/search.hpp"

using namespace qsearch;

namespace {

SearchSpec uniform_spec(std::vector<int> sizes_outer_first,
                        std::uint64_t target) {
    auto spec =
        SearchSpec::uniform(RegisterPartition(std::move(sizes_outer_first)),
                            target);
    spec.mode = RunMode::exact_expectation;
    spec.boost = BoostPolicy::none;
    return spec;
}

std::vector<double> gammas_for(const SearchSpec& spec,
                               const std::vector<long long>& iterates) {
    const auto thetas = spec.overlap_angles();
    const std::vector<long long> intermediates(iterates.begin(),
                                               iterates.end() - 1);
    return gamma_schedule(
        std::vector<double>(thetas.begin(),
                            thetas.begin() +
                                static_cast<long>(iterates.size())),
        intermediates);
}

} // namespace

TEST_SUITE("dense") {

TEST_CASE("mirror projector matches the reflection it was built from") {
    // W_{stage-1} is an involution, so the projector onto its -1 eigenspace
    // is (I - W)/2. P_W is built along a different route (propagating the
    // aligned slice through the stage power), and the two must coincide.
    for (std::uint64_t target : {std::uint64_t{0b1111}, std::uint64_t{0b0110}}) {
        const auto spec = uniform_spec({2, 2}, target);
        for (const auto& iterates :
             {std::vector<long long>{1, 1}, std::vector<long long>{2, 3}}) {
            const auto ds = build_dense(spec, 2, iterates);
            const auto dim = ds.invariant_basis.cols();
            const Eigen::MatrixXcd reduced = ds.invariant_basis.adjoint() *
                                             ds.W_prev * ds.invariant_basis;
            const Eigen::MatrixXcd mirror =
                0.5 * (Eigen::MatrixXcd::Identity(dim, dim) - reduced);
            CHECK((ds.P_W - mirror).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("invariant basis is orthonormal and preserved by the operators") {
    const auto spec = uniform_spec({1, 1, 2}, 0b1111);
    const auto ds = build_dense(spec, 3, {1, 2, 1});
    const auto& B = ds.invariant_basis;
    const auto dim = B.cols();
    REQUIRE(dim == 8);
    CHECK((B.adjoint() * B - Eigen::MatrixXcd::Identity(dim, dim))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    // W and S map the span to itself: projecting their action back onto the
    // basis loses nothing.
    for (const Eigen::MatrixXcd* op : {&ds.W, &ds.S_psi}) {
        const Eigen::MatrixXcd image = (*op) * B;
        const Eigen::MatrixXcd back = B * (B.adjoint() * image);
        CHECK((image - back).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("principal angles split into the two predicted clusters") {
    const auto spec = uniform_spec({1, 1, 2}, 0b1111);
    const std::vector<long long> iterates{1, 2, 1};
    const auto ds = build_dense(spec, 3, iterates);
    const auto spectrum = principal_angle_spectrum(ds.P_S, ds.P_W);

    const double gamma = gammas_for(spec, iterates).back();
    REQUIRE(spectrum.clusters.size() == 2);
    CHECK(spectrum.clusters[0].multiplicity == 2);
    CHECK(spectrum.clusters[1].multiplicity == 2);
    CHECK(std::abs(spectrum.clusters[0].value -
                   std::sin(gamma) * std::sin(gamma)) <= 1e-10);
    CHECK(std::abs(spectrum.clusters[1].value -
                   std::cos(gamma) * std::cos(gamma)) <= 1e-10);
    CHECK(spectrum.eigenvalues.size() == 4);

    const auto j = spectrum_to_json(spectrum);
    CHECK(j["eigenvalues"].size() == 4);
    CHECK(j["clusters"].size() == 2);
    CHECK(j["clusters"][0]["multiplicity"] == 2);
    CHECK(j.contains("cluster_tolerance"));
}

TEST_CASE("first stage has a single principal angle, the overlap itself") {
    const auto spec = uniform_spec({3, 2}, 0b11111);
    const auto ds = build_dense(spec, 1, {1});
    const auto spectrum = principal_angle_spectrum(ds.P_S, ds.P_W);
    REQUIRE(spectrum.clusters.size() == 1);
    CHECK(spectrum.clusters[0].multiplicity == 1);
    const double theta = spec.overlap_angles()[0];
    CHECK(std::abs(spectrum.clusters[0].value -
                   std::sin(theta) * std::sin(theta)) <= 1e-12);
}

TEST_CASE("spectrum requires genuine projectors") {
    const auto spec = uniform_spec({2, 2}, 0b1111);
    const auto ds = build_dense(spec, 2, {1, 1});
    Eigen::MatrixXcd broken = ds.P_S;
    broken(0, 0) += 0.5; // no longer idempotent
    CHECK_THROWS_AS(principal_angle_spectrum(broken, ds.P_W), NumericError);
    CHECK_THROWS_AS(principal_angle_spectrum(ds.P_S, broken), NumericError);
}

TEST_CASE("conditional mirror acts as the same rotation on every branch") {
    const auto spec = uniform_spec({2, 2, 2}, 0b110111);

    {
        const auto report = diagonal_block_check(spec, 3, {2, 1});
        CHECK(report.stage == 3);
        CHECK(report.t == 1);
        CHECK(report.dev_aligned <= 1e-10);
        CHECK(report.dev_orthogonal <= 1e-10);
        CHECK(report.dev_cross <= 1e-10);
        CHECK(std::abs(report.expected_aligned -
                       std::pow(std::cos(2.0 * report.gamma), 2)) <= 1e-12);
    }
    {
        // Zero power: the projector is untouched, so the aligned block is
        // exactly the identity.
        const auto report = diagonal_block_check(spec, 3, {2, 0});
        CHECK(report.t == 0);
        CHECK(report.expected_aligned == 1.0);
        CHECK(report.dev_aligned <= 1e-12);
        CHECK(report.dev_cross <= 1e-12);
    }

    CHECK_THROWS_AS(diagonal_block_check(spec, 1, {}), ConfigError);
    CHECK_THROWS_AS(diagonal_block_check(spec, 3, {1}), ConfigError);
}

TEST_CASE("dense round-one success matches the schedule") {
    for (const auto& sizes :
         {std::vector<int>{2, 2}, std::vector<int>{1, 2, 2}}) {
        auto spec = uniform_spec(sizes, 0);
        spec.target = spec.partition.total_dim() - 1;
        const auto plan = resolve_plan(spec);
        const double dense = brute_force_success(spec);
        CHECK(std::abs(dense - plan.rounds[0].success) <= 1e-10);
    }
}

TEST_CASE("density-matrix evolution reproduces the prefix cascade") {
    auto spec = uniform_spec({2, 2}, 0b1011);
    const auto plan = resolve_plan(spec);
    const auto brute = brute_force_search(spec);
    REQUIRE(brute.prefix_probabilities.size() == plan.prefix_success.size());
    for (std::size_t k = 0; k < plan.prefix_success.size(); ++k)
        CHECK(std::abs(brute.prefix_probabilities[k] -
                       plan.prefix_success[k]) <= 1e-10);
    CHECK(brute.success_probability == brute.prefix_probabilities.back());
}

TEST_CASE("dense builds refuse oversized register spans") {
    const auto spec = uniform_spec({7, 6}, 0);
    CHECK_THROWS_AS(build_dense(spec, 2), ResourceCapError);

    const auto big = uniform_spec({6, 6}, 0);
    CHECK_THROWS_AS(brute_force_success(big), ResourceCapError);
    CHECK_THROWS_AS(brute_force_search(big), ResourceCapError);
}

TEST_CASE("stage argument is validated") {
    const auto spec = uniform_spec({2, 2}, 0b1111);
    CHECK_THROWS_AS(build_dense(spec, 0), ConfigError);
    CHECK_THROWS_AS(build_dense(spec, 3), ConfigError);
    CHECK_THROWS_AS(build_dense(spec, 2, {1}), ConfigError);
    CHECK_THROWS_AS(build_dense(spec, 2, {0, 1}), ConfigError);
}

} // TEST_SUITE
