#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "isee/control.hpp"

#include <cmath>

using namespace isee;
using namespace isee::testing;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

RunningCost quadratic_cost(double wy = 1.0, double wu = 1.0) {
    RunningCost rc;
    rc.l = [wy, wu](double, const SpectralState& y, const Vector& u) {
        return wy * y.squaredNorm() + wu * u.squaredNorm();
    };
    rc.d1 = wy;
    rc.d2 = wu;
    return rc;
}

}  // namespace

TEST_CASE("projection") {
    SUBCASE("interior points are fixed") {
        const auto set = AdmissibleSet::ball(Vector::Zero(2), 1.0);
        CHECK(set.project_value(vec({0.3, -0.2})) == vec({0.3, -0.2}));
    }
    SUBCASE("ball projection scales radially") {
        const auto set = AdmissibleSet::ball(Vector::Zero(2), 1.0);
        const Vector out = set.project_value(vec({3.0, 4.0}));
        CHECK(out(0) == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(out(1) == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("box projection clamps") {
        const auto set = AdmissibleSet::box(vec({-1.0, -1.0}), vec({1.0, 1.0}));
        CHECK(set.project_value(vec({2.0, -3.0})) == vec({1.0, -1.0}));
    }
    SUBCASE("idempotent and non-expansive on random pairs") {
        const auto ball = AdmissibleSet::ball(vec({0.5, -0.5, 0.0}), 0.8);
        const auto box = AdmissibleSet::box(vec({-1.0, 0.0, -2.0}), vec({1.0, 0.5, 2.0}));
        std::uint64_t draw = 0;
        for (int trial = 0; trial < 200; ++trial) {
            Vector a(3), b(3);
            for (Eigen::Index i = 0; i < 3; ++i) {
                a(i) = 3.0 * rng::normal(31, 0, draw++);
                b(i) = 3.0 * rng::normal(31, 0, draw++);
            }
            for (const auto& set : {ball, box}) {
                const Vector pa = set.project_value(a);
                CHECK((set.project_value(pa) - pa).norm() <= 1e-14);
                CHECK((pa - set.project_value(b)).norm() <= (a - b).norm() + 1e-12);
            }
        }
    }
}

TEST_CASE("cost estimates") {
    SUBCASE("null system costs nothing") {
        ProblemSpec spec = base_spec(vec({-1.0, -1.0}), 1.0, Vector::Zero(2));
        const auto grid = uniform_grid(1.0, 64);
        const auto est = cost(spec, ControlSignal::zero(1.0, 1, 4), quadratic_cost(),
                              grid, 16, 0);
        CHECK(est.j == 0.0);
        CHECK(est.standard_error == 0.0);
    }
    SUBCASE("deterministic exponential decay against the closed form") {
        ProblemSpec spec = base_spec(vec({-1.0}), 1.0, vec({1.0}));
        const auto grid = uniform_grid(1.0, 2048);
        const auto est = cost(spec, ControlSignal::zero(1.0, 1, 4), quadratic_cost(),
                              grid, 2, 0);
        const double expected = (1.0 - std::exp(-2.0)) / 2.0;
        CHECK(est.j == doctest::Approx(expected).epsilon(1e-3));
        CHECK(est.standard_error == 0.0);
    }
    SUBCASE("deterministic in the seed and continuous in the control") {
        ProblemSpec spec = random_spec(55, 2);
        const auto grid = make_grid(spec.horizon, 64, spec.impulses);
        const ControlSignal u = random_control(spec, 4, 55, 2);
        const auto a = cost(spec, u, quadratic_cost(), grid, 32, 9);
        const auto b = cost(spec, u, quadratic_cost(), grid, 32, 9);
        CHECK(a.j == b.j);

        double prev_delta = std::numeric_limits<double>::infinity();
        for (double scale : {1e-1, 1e-2, 1e-3}) {
            ControlSignal nudged = u;
            nudged.values[0](0) += scale;
            const auto c = cost(spec, nudged, quadratic_cost(), grid, 32, 9);
            const double delta = std::abs(c.j - a.j);
            CHECK(delta < prev_delta);
            prev_delta = delta;
        }
    }
    SUBCASE("non-finite integrand names the sample") {
        ProblemSpec spec = base_spec(vec({-1.0}), 1.0, vec({1.0}));
        RunningCost rc = quadratic_cost();
        rc.l = [](double t, const SpectralState&, const Vector&) {
            return t > 0.5 ? std::numeric_limits<double>::infinity() : 0.0;
        };
        const auto grid = uniform_grid(1.0, 16);
        CHECK_THROWS_WITH_AS(
            cost(spec, ControlSignal::zero(1.0, 1, 1), rc, grid, 2, 0),
            doctest::Contains("non-finite integrand"), std::runtime_error);
    }
}

TEST_CASE("coercivity audit") {
    ProblemSpec spec = base_spec(vec({-1.0, -1.0}), 1.0, Vector::Zero(2));
    SUBCASE("exact equality case passes") {
        const auto audit = audit_A4(quadratic_cost(), spec, 2000, 1);
        CHECK(audit.passed());
    }
    SUBCASE("missing state term is flagged") {
        RunningCost rc;
        rc.l = [](double, const SpectralState&, const Vector& u) { return u.squaredNorm(); };
        rc.d1 = 1.0;  // claimed but not true
        rc.d2 = 1.0;
        const auto audit = audit_A4(rc, spec, 500, 2);
        CHECK_FALSE(audit.violations.empty());
    }
    SUBCASE("demo cost has no violations at scale") {
        const auto audit = audit_A4(quadratic_cost(), spec, 10000, 3);
        CHECK(audit.passed());
    }
}

TEST_CASE("convexity audit accepts quadratics and rejects concave costs") {
    ProblemSpec spec = base_spec(vec({-1.0}), 1.0, Vector::Zero(1));
    CHECK(audit_A3(quadratic_cost(), spec, 2000, 4).passed());
    RunningCost rc;
    rc.l = [](double, const SpectralState&, const Vector& u) {
        return std::sqrt(1.0 + u.norm());
    };
    rc.d2 = 1.0;
    const auto audit = audit_A3(rc, spec, 2000, 5);
    CHECK_FALSE(audit.violations.empty());
}

TEST_CASE("continuous dependence") {
    ProblemSpec spec = base_spec(Vector::Constant(3, -1.0), 0.25, Vector::Ones(3));
    spec.B = Matrix::Identity(3, 2);
    spec.g = [](double, const SpectralState& y, Vector& out) { out = 0.1 * y; };
    const LipschitzBundle lb{0.01, 0.0, 0.01, 0.0};
    const auto grid = uniform_grid(0.25, 64);

    SUBCASE("identical controls give zero distance") {
        const ControlSignal u = random_control(spec, 4, 2, 0, 0.5);
        const auto report = continuous_dependence(spec, lb, u, u, grid, 16, 0);
        CHECK(report.applicable);
        CHECK(report.lhs_pc_sq == 0.0);
        CHECK(report.control_dist_sq == 0.0);
        CHECK(report.bound_satisfied);
    }
    SUBCASE("random pairs satisfy the bound") {
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            const ControlSignal u1 = random_control(spec, 4, 3, 2 * trial, 0.5);
            const ControlSignal u2 = random_control(spec, 4, 3, 2 * trial + 1, 0.5);
            const auto report = continuous_dependence(spec, lb, u1, u2, grid, 64, trial);
            CHECK(report.applicable);
            CHECK(report.bound_satisfied);
        }
    }
    SUBCASE("negative denominator reports inapplicable") {
        const LipschitzBundle big{4.0, 4.0, 4.0, 4.0};
        const ControlSignal u1 = random_control(spec, 4, 4, 0, 0.5);
        const ControlSignal u2 = random_control(spec, 4, 4, 1, 0.5);
        ProblemSpec wide = spec;
        wide.horizon = 4.0;
        const auto wide_grid = uniform_grid(4.0, 64);
        const ControlSignal w1 = ControlSignal::zero(4.0, 2, 4);
        const auto report = continuous_dependence(wide, big, w1, w1, wide_grid, 8, 0);
        CHECK_FALSE(report.applicable);
        CHECK_FALSE(report.bound_satisfied);
    }
}

TEST_CASE("optimizer") {
    SUBCASE("singleton admissible set returns immediately") {
        ProblemSpec spec = base_spec(vec({-1.0}), 1.0, vec({1.0}));
        spec.B = Matrix::Identity(1, 1);
        const auto set = AdmissibleSet::box(vec({0.0}), vec({0.0}));
        OptimizeOptions opts;
        opts.budget = 100;
        opts.cost_paths = 8;
        const auto grid = uniform_grid(1.0, 32);
        const auto result = optimize(spec, quadratic_cost(), set,
                                     ControlSignal::zero(1.0, 1, 4), grid, opts);
        CHECK(result.evaluations == 1);
        for (const auto& v : result.u_star.values) CHECK(v(0) == 0.0);
    }
    SUBCASE("iterates stay admissible and best-so-far never rises") {
        ProblemSpec spec = base_spec(vec({-0.5}), 1.0, vec({1.0}));
        spec.B = Matrix::Identity(1, 1);
        spec.h = [](double, const SpectralState&, Matrix& out) { out(0, 0) = 0.2; };
        const auto set = AdmissibleSet::box(vec({-2.0}), vec({2.0}));
        OptimizeOptions opts;
        opts.budget = 200;
        opts.cost_paths = 16;
        const auto grid = uniform_grid(1.0, 64);
        const auto result = optimize(spec, quadratic_cost(), set,
                                     ControlSignal::zero(1.0, 1, 4), grid, opts);
        for (std::size_t i = 1; i < result.history.size(); ++i)
            CHECK(result.history[i].j_best <= result.history[i - 1].j_best);
        for (const auto& v : result.u_star.values) {
            CHECK(v(0) >= -2.0);
            CHECK(v(0) <= 2.0);
        }
        CHECK(result.j_star.j <= result.history.front().j_current + 1e-12);
    }
    SUBCASE("beats random search on the scalar toy") {
        ProblemSpec spec = base_spec(vec({-1.0}), 1.0, vec({1.0}));
        spec.B = Matrix::Identity(1, 1);
        spec.h = [](double, const SpectralState&, Matrix& out) { out(0, 0) = 0.3; };
        const auto set = AdmissibleSet::box(vec({-2.0}), vec({2.0}));
        const auto grid = uniform_grid(1.0, 64);
        const RunningCost rc = quadratic_cost();

        OptimizeOptions opts;
        opts.budget = 400;
        opts.cost_paths = 32;
        opts.cost_seed = 17;
        const auto result =
            optimize(spec, rc, set, ControlSignal::zero(1.0, 1, 4), grid, opts);

        double best_random = std::numeric_limits<double>::infinity();
        for (std::uint64_t trial = 0; trial < 50; ++trial) {
            ControlSignal u = random_control(spec, 4, 99, trial, 1.0);
            u = project(set, u);
            best_random = std::min(best_random,
                                   cost(spec, u, rc, grid, 32, 17).j);
        }
        const double j0 =
            cost(spec, ControlSignal::zero(1.0, 1, 4), rc, grid, 32, 17).j;
        CHECK(result.j_star.j <= j0);
        CHECK(result.j_star.j <= best_random);

        // restarting from the found optimum keeps the history flat
        OptimizeOptions again = opts;
        again.budget = 100;
        const auto second = optimize(spec, rc, set, result.u_star, grid, again);
        CHECK(second.j_star.j <= result.j_star.j);
        CHECK(result.j_star.j - second.j_star.j <=
              3.0 * (result.j_star.standard_error + 1e-6));
    }
}

TEST_CASE("control distance accounts for differing breakpoints") {
    ControlSignal a = ControlSignal::zero(1.0, 1, 2);
    a.values[0](0) = 1.0;  // 1 on [0, 0.5), 0 after
    ControlSignal b = ControlSignal::zero(1.0, 1, 4);
    b.values[0](0) = 1.0;  // 1 on [0, 0.25), 0 after
    const double dist = ControlSignal::distance_sq(a, b);
    CHECK(dist == doctest::Approx(0.25).epsilon(1e-12));
}
