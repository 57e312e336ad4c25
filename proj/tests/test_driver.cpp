#include "warpbo/driver.hpp"

#include "helpers.hpp"
#include "warpbo/benchmarks.hpp"
#include "warpbo/rng.hpp"

#include <doctest.h>

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace warpbo;

namespace {

bool same_point(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) return false;
    for (Eigen::Index m = 0; m < a.size(); ++m) {
        if (a[m] != b[m]) return false;
    }
    return true;
}

double sphere(const Eigen::VectorXd& x) {
    return (x.array() - 0.3).square().sum();
}

} // namespace

TEST_CASE("initial design is feasible, deterministic and uniform") {
    const Box box(Eigen::Vector2d(-1.0, 3.0), Eigen::Vector2d(2.0, 5.0));
    Rng rng1(181), rng2(181);
    const auto design1 = initial_design(box, 100, rng1);
    const auto design2 = initial_design(box, 100, rng2);
    REQUIRE(design1.size() == 100);
    for (std::size_t i = 0; i < design1.size(); ++i) {
        CHECK(box.contains(design1[i]));
        CHECK(same_point(design1[i], design2[i]));
    }

    // Per-dimension empirical CDF of many draws is uniform.
    Rng rng3(191);
    const auto big = initial_design(box, 10000, rng3);
    for (int m = 0; m < 2; ++m) {
        std::vector<double> u;
        u.reserve(big.size());
        for (const auto& x : big) u.push_back((x[m] - box.lo[m]) / box.side(m));
        CHECK(testutil::ks_statistic_uniform01(u) < testutil::kKsCritical1pc);
    }
}

TEST_CASE("bo config validation") {
    BoConfig config;
    config.n_init = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.n_init = 4;
    config.budget = 2; // budget below the design size
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.budget = 10;
    config.refit_every = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.refit_every = 1;
    config.noise_var = -1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.noise_var = 1e-6;
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("run_bo produces a feasible monotone trace of the full budget") {
    const Box box = Box::unit(2);
    const WarpMap warp = WarpMap::all_uniform(box);
    BoConfig config;
    config.n_init = 4;
    config.budget = 15;
    config.seed = 7;
    const RunResult result = run_bo(sphere, box, warp, config);
    REQUIRE(!result.error.has_value());
    REQUIRE(result.trace.size() == 15);
    REQUIRE(result.iteration_seconds.size() == 15);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& rec = result.trace[i];
        CHECK(rec.iteration == static_cast<int>(i));
        CHECK(box.contains(rec.point));
        CHECK(rec.value == sphere(rec.point));
        best = std::min(best, rec.value);
        CHECK(rec.best == best);
        CHECK(result.iteration_seconds[i] >= 0.0);
    }
    // The optimiser should easily beat random chance on a sphere.
    CHECK(result.trace.back().best < 0.05);
}

TEST_CASE("a budget equal to the design size runs zero model steps") {
    const Box box = Box::unit(2);
    BoConfig config;
    config.n_init = 5;
    config.budget = 5;
    config.seed = 11;
    const RunResult result = run_bo_plain(sphere, box, config);
    REQUIRE(!result.error.has_value());
    CHECK(result.trace.size() == 5);
}

TEST_CASE("uniform warp reproduces the plain run bitwise") {
    const Benchmark* bench = find_benchmark("branin");
    REQUIRE(bench != nullptr);
    // Rescale to the unit box so warped and plain share coordinates.
    const Box unit = Box::unit(2);
    const auto objective = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd x = bench->box.lo.array() +
                            u.array() * (bench->box.hi - bench->box.lo).array();
        return bench->fn(x);
    };
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        BoConfig config;
        config.n_init = 4;
        config.budget = 12;
        config.seed = seed;
        const RunResult warped = run_bo(objective, unit, WarpMap::all_uniform(unit), config);
        const RunResult plain = run_bo_plain(objective, unit, config);
        REQUIRE(!warped.error.has_value());
        REQUIRE(!plain.error.has_value());
        REQUIRE(warped.trace.size() == plain.trace.size());
        for (std::size_t i = 0; i < warped.trace.size(); ++i) {
            CHECK(same_point(warped.trace[i].point, plain.trace[i].point));
            CHECK(warped.trace[i].value == plain.trace[i].value);
            CHECK(warped.trace[i].best == plain.trace[i].best);
        }
    }
}

TEST_CASE("minimizing f matches maximizing -f point for point") {
    const Box box = Box::unit(2);
    const WarpMap warp = WarpMap::all_uniform(box);
    const auto neg_sphere = [](const Eigen::VectorXd& x) { return -sphere(x); };
    BoConfig config;
    config.n_init = 4;
    config.budget = 14;
    config.seed = 17;
    config.direction = Direction::Minimize;
    const RunResult down = run_bo(sphere, box, warp, config);
    config.direction = Direction::Maximize;
    const RunResult up = run_bo(neg_sphere, box, warp, config);
    REQUIRE(!down.error.has_value());
    REQUIRE(!up.error.has_value());
    REQUIRE(down.trace.size() == up.trace.size());
    for (std::size_t i = 0; i < down.trace.size(); ++i) {
        CHECK(same_point(down.trace[i].point, up.trace[i].point));
        CHECK(down.trace[i].value == -up.trace[i].value);
        CHECK(down.trace[i].best == -up.trace[i].best);
    }
}

TEST_CASE("maximize direction tracks a running maximum") {
    const Box box = Box::unit(1);
    const auto hump = [](const Eigen::VectorXd& x) {
        return std::exp(-20.0 * (x[0] - 0.6) * (x[0] - 0.6));
    };
    BoConfig config;
    config.n_init = 3;
    config.budget = 12;
    config.seed = 19;
    config.direction = Direction::Maximize;
    const RunResult result = run_bo_plain(hump, box, config);
    REQUIRE(!result.error.has_value());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& rec : result.trace) {
        best = std::max(best, rec.value);
        CHECK(rec.best == best);
    }
    CHECK(result.trace.back().best > 0.9);
}

TEST_CASE("repeated runs of one configuration are bitwise identical") {
    const Box box = Box::unit(2);
    WarpMap warp;
    warp.dims = {PriorSpec::truncated_normal(0.0, 1.0, 0.3, 0.4),
                 PriorSpec::truncated_gamma(0.0, 1.0, 2.0, 0.3)};
    BoConfig config;
    config.n_init = 4;
    config.budget = 12;
    config.seed = 23;
    const RunResult a = run_bo(sphere, box, warp, config);
    const RunResult b = run_bo(sphere, box, warp, config);
    REQUIRE(!a.error.has_value());
    REQUIRE(!b.error.has_value());
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(same_point(a.trace[i].point, b.trace[i].point));
        CHECK(a.trace[i].value == b.trace[i].value);
        CHECK(a.trace[i].best == b.trace[i].best);
    }
}

TEST_CASE("an explicit initial design is used verbatim") {
    const Box box = Box::unit(2);
    std::vector<Eigen::VectorXd> design;
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd x(2);
        x << 0.1 + 0.2 * i, 0.9 - 0.2 * i;
        design.push_back(x);
    }
    BoConfig config;
    config.n_init = 4;
    config.budget = 8;
    config.seed = 29;
    const RunResult warped = run_bo(sphere, box, WarpMap::all_uniform(box), config, &design);
    const RunResult plain = run_bo_plain(sphere, box, config, &design);
    const RunResult prior =
        run_prior_search(sphere, box, WarpMap::all_uniform(box), config, &design);
    for (const RunResult* r : {&warped, &plain, &prior}) {
        REQUIRE(!r->error.has_value());
        REQUIRE(r->trace.size() == 8);
        for (int i = 0; i < 4; ++i) CHECK(same_point(r->trace[i].point, design[i]));
    }
}

TEST_CASE("ucb runs complete and respect the direction") {
    const Box box = Box::unit(2);
    BoConfig config;
    config.n_init = 4;
    config.budget = 10;
    config.seed = 31;
    config.acquisition.kind = AcquisitionKind::Ucb;
    const RunResult result = run_bo_plain(sphere, box, config);
    REQUIRE(!result.error.has_value());
    CHECK(result.trace.size() == 10);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : result.trace) {
        best = std::min(best, rec.value);
        CHECK(rec.best == best);
    }
}

TEST_CASE("prior search draws from the prior and keeps a monotone best") {
    const Box box(Eigen::VectorXd::Constant(1, -3.0), Eigen::VectorXd::Constant(1, 3.0));
    WarpMap warp;
    warp.dims = {PriorSpec::truncated_normal(-3.0, 3.0, 0.0, 1.0)};
    BoConfig config;
    config.n_init = 1;
    config.budget = 10000;
    config.seed = 37;
    const RunResult result =
        run_prior_search([](const Eigen::VectorXd& x) { return x[0] * x[0]; }, box, warp,
                         config);
    REQUIRE(!result.error.has_value());
    REQUIRE(result.trace.size() == 10000);

    // PIT: pushing the draws through the prior CDF must give uniforms.
    std::vector<double> u;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : result.trace) {
        CHECK(box.contains(rec.point));
        best = std::min(best, rec.value);
        CHECK(rec.best == best);
        u.push_back(cdf(warp.dims[0], rec.point[0]));
    }
    CHECK(testutil::ks_statistic_uniform01(u) < testutil::kKsCritical1pc);
}

TEST_CASE("prior search with a uniform prior is plain random search") {
    const Box box = Box::unit(2);
    BoConfig config;
    config.n_init = 2;
    config.budget = 10000;
    config.seed = 41;
    const RunResult result =
        run_prior_search(sphere, box, WarpMap::all_uniform(box), config);
    REQUIRE(!result.error.has_value());
    for (int m = 0; m < 2; ++m) {
        std::vector<double> u;
        for (const auto& rec : result.trace) u.push_back(rec.point[m]);
        CHECK(testutil::ks_statistic_uniform01(u) < testutil::kKsCritical1pc);
    }
}

TEST_CASE("make_shifted_prior centres on the optimum at zero offset") {
    const Benchmark* bench = find_benchmark("gaussian3d");
    REQUIRE(bench != nullptr);
    const Eigen::VectorXd& opt = bench->known_minimizers.front();
    const WarpMap warp = make_shifted_prior(bench->box, opt, 0.0, 1.0);
    REQUIRE(warp.dim() == 3);
    for (int m = 0; m < 3; ++m) {
        CHECK(warp.dims[m].kind == PriorKind::TruncatedNormal);
        CHECK(warp.dims[m].mu == opt[m]);
        CHECK(warp.dims[m].sigma == 1.0);
        CHECK(warp.dims[m].a == bench->box.lo[m]);
        CHECK(warp.dims[m].b == bench->box.hi[m]);
    }
}

TEST_CASE("make_shifted_prior offsets by a fraction of the side and clamps") {
    const Box box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(4.0, 4.0));
    Eigen::Vector2d opt(1.0, 3.9);
    const WarpMap warp = make_shifted_prior(box, opt, 0.05, 0.25);
    CHECK(warp.dims[0].mu == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(warp.dims[1].mu == 4.0); // 3.9 + 0.2 clamped to the upper bound
    CHECK(warp.dims[0].sigma == 0.25);

    CHECK_THROWS_AS(make_shifted_prior(box, Eigen::Vector2d(5.0, 1.0), 0.05, 0.25),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_shifted_prior(box, opt, 1.5, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(make_shifted_prior(box, opt, 0.05, 0.0), std::invalid_argument);
}

TEST_CASE("a throwing objective yields a partial trace and an error marker") {
    const Box box = Box::unit(1);
    int calls = 0;
    const auto flaky = [&calls](const Eigen::VectorXd& x) {
        if (++calls > 6) throw std::runtime_error("sensor offline");
        return x[0];
    };
    BoConfig config;
    config.n_init = 4;
    config.budget = 20;
    config.seed = 43;
    const RunResult result = run_bo_plain(flaky, box, config);
    REQUIRE(result.error.has_value());
    CHECK(result.error->find("sensor offline") != std::string::npos);
    CHECK(result.trace.size() == 6);
}

TEST_CASE("a constant objective still yields distinct in-box points") {
    const Box box = Box::unit(2);
    BoConfig config;
    config.n_init = 3;
    config.budget = 10;
    config.seed = 47;
    const RunResult result =
        run_bo_plain([](const Eigen::VectorXd&) { return 1.0; }, box, config);
    REQUIRE(!result.error.has_value());
    REQUIRE(result.trace.size() == 10);
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        CHECK(box.contains(result.trace[i].point));
        for (std::size_t j = i + 1; j < result.trace.size(); ++j) {
            CHECK(!same_point(result.trace[i].point, result.trace[j].point));
        }
    }
}

TEST_CASE("runs survive a box smaller than the duplicate tolerance") {
    // Every proposal collides with an existing point, so completion relies on
    // the perturbation guard and the Cholesky jitter ladder together.
    const Box box(Eigen::Vector2d::Zero(), Eigen::Vector2d::Constant(5e-10));
    BoConfig config;
    config.n_init = 3;
    config.budget = 10;
    config.seed = 53;
    const RunResult result = run_bo_plain(sphere, box, config);
    REQUIRE(!result.error.has_value());
    REQUIRE(result.trace.size() == 10);
    for (const auto& rec : result.trace) CHECK(box.contains(rec.point));
}
