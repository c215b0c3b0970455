#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "ldplab/checks.hpp"
#include "ldplab/noise.hpp"

using namespace ldplab;
using namespace test_util;

namespace {

std::shared_ptr<BrusselatorCoefficients> make_bruss(GKind gk = GKind::bounded,
                                                    double stress_eps = 0.5) {
    const TorusGrid g = grid(16, 2);
    BrusselatorCoefficients::Config cfg;
    cfg.a1 = {{{ScalarCoeff(1.0), ScalarCoeff(0.0)}, {ScalarCoeff(0.0), ScalarCoeff(1.0)}}};
    cfg.a2 = cfg.a1;
    cfg.b1 = {{0.5, 0.0}, {0.0, 0.5}, {0, 0}, {0, 0}};
    cfg.b2 = {{0.0, 0.5}, {0.5, 0.0}, {0, 0}, {0, 0}};
    cfg.g_family.kind = gk;
    if (gk == GKind::stressor) {
        // weights sized so (1/2)|c|^2 = (1 - eps) exactly
        const double c = std::sqrt(2.0 * (1.0 - stress_eps));
        cfg.g_family.weights = {0.0, 0.0, c, 0.0};
        cfg.epsilon_growth = stress_eps;
    } else {
        cfg.g_family.weights = {0.0, 0.0, 0.2, 0.1};
        cfg.epsilon_growth = 0.5;
    }
    cfg.lambda0 = 0.5; cfg.lambda1 = -0.2; cfg.lambda2 = 0.1;
    cfg.mu0 = 0.3; cfg.mu1 = 0.1; cfg.mu2 = -0.2;
    cfg.M = gk == GKind::bounded ? 10.0 * 0.2 * 0.2 : 1.0;
    cfg.delta = 0.4;
    return BrusselatorCoefficients::make(g, cfg);
}

std::shared_ptr<AllenCahnCoefficients> make_ac() {
    AllenCahnCoefficients::Config cfg;
    cfg.b = {{0.8, 0.0}, {0.0, 0.6}, {0, 0}, {0, 0}};
    cfg.g_family.kind = GKind::quad_odd;
    cfg.g_family.weights = {0.0, 0.0, 0.5, 0.3};
    cfg.C1 = 0.25 + 0.09;
    cfg.C0 = 1.0;
    return AllenCahnCoefficients::make(grid(16, 1), cfg);
}

} // namespace

TEST_CASE("subcriticality arithmetic") {
    auto r = check_subcriticality(1.0, 0.75);
    CHECK(r.passed());
    CHECK(r.margin == 0.0);  // critical pair

    r = check_subcriticality(0.0, 0.75);
    CHECK(r.passed());
    CHECK(r.margin == doctest::Approx(0.5));

    r = check_subcriticality(2.0, 5.0 / 6.0);
    CHECK_FALSE(r.passed());
    CHECK(r.margin == doctest::Approx(-1.0));
    CHECK_FALSE(r.witnesses.empty());  // fail implies witnesses

    CHECK_THROWS_AS(check_subcriticality(-0.1, 0.75), std::domain_error);
    CHECK_THROWS_AS(check_subcriticality(1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(check_subcriticality(1.0, 1.0), std::domain_error);
}

TEST_CASE("alpha-weighted subcriticality arithmetic") {
    auto r = check_alpha_subcriticality(2.0, 5.0 / 6.0, 0.5);
    CHECK(r.passed());
    CHECK(std::abs(r.margin) <= 1e-15);  // critical case

    r = check_alpha_subcriticality(2.0, 5.0 / 6.0, 0.0);
    CHECK_FALSE(r.passed());

    // boundary: rho_hat = 0, beta_hat = 1 sits exactly on the balance
    r = check_alpha_subcriticality(0.0, 1.0, 0.0);
    CHECK(r.passed());
    CHECK(r.margin == 0.0);
    // and margins approach it from below as rho_hat decreases
    CHECK(check_alpha_subcriticality(1e-6, 1.0, 0.0).margin == doctest::Approx(-1e-6));

    CHECK_THROWS_AS(check_alpha_subcriticality(-1.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(check_alpha_subcriticality(1.0, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(check_alpha_subcriticality(1.0, 1.0, 0.7), std::domain_error);
}

TEST_CASE("noise smallness arithmetic") {
    auto r = check_allen_cahn_noise(1.0, 1.0, 1.0);
    CHECK(r.passed());
    CHECK(r.margin == doctest::Approx(0.5));

    r = check_allen_cahn_noise(2.0, 1.0, 1.0);
    CHECK_FALSE(r.passed());  // strict inequality: margin 0 fails
    CHECK(r.margin == 0.0);

    CHECK(check_allen_cahn_noise(1.0, 0.0, 2.0).passed());   // endpoint C1 = 2
    CHECK_FALSE(check_allen_cahn_noise(1.0, -0.1, 1.0).passed());
    CHECK_FALSE(check_allen_cahn_noise(1.0, 0.0, 2.1).passed());
}

TEST_CASE("parabolicity estimates") {
    using Mat = std::array<std::array<double, 2>, 2>;
    const Mat eye = {{{1.0, 0.0}, {0.0, 1.0}}};

    SUBCASE("identity, no noise") {
        auto r = check_parabolicity({eye}, {}, 64);
        CHECK(r.passed());
        CHECK(r.margin == doctest::Approx(1.0));
    }
    SUBCASE("unit direction eats half") {
        auto r = check_parabolicity({eye}, {{{{1.0, 0.0}}}}, 64);
        CHECK(r.passed());
        CHECK(r.margin == doctest::Approx(0.5));
    }
    SUBCASE("tuned degeneracy") {
        const double s = std::sqrt(2.0);  // (1/2) s^2 = 1 along e1
        auto r = check_parabolicity({eye}, {{{{s, 0.0}}}}, 64);
        CHECK_FALSE(r.passed());
        CHECK(std::abs(r.margin) <= 1e-14);
    }
    SUBCASE("noise only lowers the estimate") {
        auto with = check_parabolicity({eye}, {{{{0.4, 0.2}}}}, 64);
        auto without = check_parabolicity({eye}, {}, 64);
        CHECK(with.margin <= without.margin);
    }
    SUBCASE("noise ordering holds on random tensors and directions") {
        for (int s = 0; s < 20; ++s) {
            // random symmetric positive tensor plus random directions
            const double a = 0.5 + counter_uniform(88, s, 0, 0);
            const double dsh = 0.4 * (2.0 * counter_uniform(88, s, 1, 0) - 1.0);
            const double c = 0.5 + counter_uniform(88, s, 2, 0);
            const Mat t = {{{a, dsh}, {dsh, c}}};
            std::vector<std::vector<Vec2>> dirs;
            for (int q = 0; q < 3; ++q)
                dirs.push_back({{0.6 * (2.0 * counter_uniform(88, s, 3 + 2 * q, 0) - 1.0),
                                 0.6 * (2.0 * counter_uniform(88, s, 4 + 2 * q, 0) - 1.0)}});
            auto with = check_parabolicity({t}, dirs, 64);
            auto without = check_parabolicity({t}, {}, 64);
            CHECK(with.margin <= without.margin + 1e-14);
        }
    }
    SUBCASE("scaling covariance") {
        const Mat two = {{{2.0, 0.0}, {0.0, 2.0}}};
        auto base = check_parabolicity({eye}, {{{{0.5, 0.0}}}}, 64);
        auto scaled = check_parabolicity({two}, {{{{0.5 * std::sqrt(2.0), 0.0}}}}, 64);
        CHECK(close_rel(scaled.margin, 2.0 * base.margin, 1e-10));
    }
    SUBCASE("coefficient-set wrapper reports per component") {
        const auto bruss = make_bruss();
        auto r = check_parabolicity(*bruss, 64);
        CHECK(r.passed());
        CHECK(r.margin == doctest::Approx(0.875));  // 1 - (1/2) 0.5^2
    }
}

TEST_CASE("growth envelope") {
    SUBCASE("zero family passes for any positive level") {
        auto bruss = make_bruss(GKind::zero);
        auto r = check_growth_envelope(*bruss, 2000, 8.0, 11);
        CHECK(r.passed());
        CHECK(r.margin >= bruss->config().M);  // N_1 >= M when the left side vanishes
    }
    SUBCASE("bounded family with the sup-norm level") {
        auto bruss = make_bruss(GKind::bounded);
        auto r = check_growth_envelope(*bruss, 5000, 8.0, 12);
        CHECK(r.passed());
    }
    SUBCASE("critical stressor: margin tends to the level at large amplitudes") {
        auto bruss = make_bruss(GKind::stressor, 0.1);
        auto r = check_growth_envelope(*bruss, 5000, 50.0, 13);
        CHECK(r.passed());
        CHECK(r.margin >= bruss->config().M * 0.999);
    }
    SUBCASE("delta >= nu is rejected at construction") {
        auto bruss = make_bruss();
        BrusselatorCoefficients::Config bad = bruss->config();
        bad.delta = bruss->nu(0) + bruss->nu(1);  // above both ellipticities
        CHECK_THROWS_AS(BrusselatorCoefficients::make(bruss->grid(), bad),
                        std::invalid_argument);
    }
}

TEST_CASE("linear-part dissipation fit") {
    SUBCASE("identity diffusion recovers nu within 5 percent") {
        const TorusGrid g = grid(32, 2);
        BrusselatorCoefficients::Config cfg;
        cfg.a1 = {{{ScalarCoeff(1.0), ScalarCoeff(0.0)}, {ScalarCoeff(0.0), ScalarCoeff(1.0)}}};
        cfg.a2 = cfg.a1;
        cfg.b1 = {{0, 0}};
        cfg.b2 = {{0, 0}};
        cfg.g_family.kind = GKind::zero;
        cfg.M = 0.4; cfg.delta = 0.4; cfg.epsilon_growth = 0.5;
        const auto c = BrusselatorCoefficients::make(g, cfg);
        auto r = check_linear_coercivity(*c, 400, 7);
        CHECK(r.passed());
        double theta = 0;
        for (auto& [k, v] : r.extra)
            if (k == "theta_hat") theta = v;
        CHECK(close_rel(theta, 1.0, 0.05));
    }
    SUBCASE("no dissipation fails") {
        ScalarLinearCoefficients::Config cfg;
        cfg.lambda = 0.0;
        cfg.nu = 0.0;
        cfg.b_mult = 0.0;
        cfg.sigma_add = 0.0;
        const auto c = ScalarLinearCoefficients::make(grid(16, 1), cfg);
        auto r = check_linear_coercivity(*c, 200, 7);
        CHECK_FALSE(r.passed());
    }
    SUBCASE("transport noise with the drift correction recovers the viscosity") {
        NavierStokesCoefficients::Config cfg;
        cfg.nu = 0.5;
        cfg.b = {{0.6, 0.0}, {0.0, 0.6}};
        cfg.correction_weight = 1.0;  // fold -correction into the linear part
        const auto ns = NavierStokesCoefficients::make(grid(32, 2), cfg);
        auto r = check_linear_coercivity(*ns, 400, 7);
        CHECK(r.passed());
        double theta = 0;
        for (auto& [k, v] : r.extra)
            if (k == "theta_hat") theta = v;
        CHECK(close_rel(theta, 0.5, 0.05));
    }
}

TEST_CASE("full-pair dissipation dichotomy") {
    SUBCASE("scalar double-well passes") {
        const auto ac = make_ac();
        auto r = check_full_coercivity(*ac, 2000, 3);
        CHECK(r.passed());
    }
    SUBCASE("two-species system fails with a quartic-direction witness") {
        const auto bruss = make_bruss();
        auto r = check_full_coercivity(*bruss, 2000, 3);
        CHECK_FALSE(r.passed());
        REQUIRE_FALSE(r.witnesses.empty());
        bool named = false;
        for (const auto& w : r.witnesses)
            if (w.description.find("u1*u2^3") != std::string::npos) named = true;
        CHECK(named);
    }
    SUBCASE("pure diffusion passes") {
        ScalarLinearCoefficients::Config cfg;
        cfg.lambda = 0.0;
        cfg.nu = 1.0;
        const auto c = ScalarLinearCoefficients::make(grid(16, 1), cfg);
        CHECK(check_full_coercivity(*c, 500, 5).passed());
    }
}

TEST_CASE("fail verdicts replay bit-exactly") {
    const auto bruss = make_bruss();
    auto r1 = check_full_coercivity(*bruss, 1000, 99);
    auto r2 = check_full_coercivity(*bruss, 1000, 99);
    REQUIRE_FALSE(r1.passed());
    REQUIRE(r1.witnesses.size() == r2.witnesses.size());
    CHECK(r1.margin == r2.margin);
    for (size_t i = 0; i < r1.witnesses.size(); ++i) {
        CHECK(r1.witnesses[i].lhs == r2.witnesses[i].lhs);
        CHECK(r1.witnesses[i].sample_index == r2.witnesses[i].sample_index);
    }
}

TEST_CASE("noise family lipschitz envelope") {
    const auto bruss = make_bruss();
    auto r = check_g_lipschitz(*bruss, 0.75, 200, 17);
    CHECK(r.passed());
}
