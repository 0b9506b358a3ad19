#include <gtest/gtest.h>

#include <cmath>

#include "../test_support.hpp"
#include "efeo/assembly.hpp"
#include "efeo/basis.hpp"

using namespace efeo;

namespace {

AssemblyOptions quadrature_route() {
    AssemblyOptions o;
    o.route = IntegrationRoute::quadrature;
    return o;
}

}  // namespace

TEST(Assembly, NodalBlockOfParadigmProblem) {
    const ProblemSpec p = ProblemSpec::paradigm(0.1);
    const EnrichedSpace s = build_enriched_space(p, build_uniform_mesh_1d(-1.0, 1.0, 4));
    const DenseMatrix a = assemble_matrix(p, s);
    const std::size_t c = s.corrector_count();
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(a(c + i, c + i), 0.4, 1e-14);
        if (i + 1 < 3) {
            EXPECT_NEAR(a(c + i, c + i + 1), -0.7, 1e-14);
            EXPECT_NEAR(a(c + i + 1, c + i), 0.3, 1e-14);
        }
    }
    EXPECT_NEAR(a(c, c + 2), 0.0, 0.0);
}

TEST(Assembly, ClosedFormMatchesQuadratureRoute1D) {
    for (const char* name : {"paradigm1d", "boundary1d", "interior1d"}) {
        for (double eps : {1e-1, 1e-2, 1e-4}) {
            const ProblemSpec p = ProblemSpec::by_name(name, eps);
            const EnrichedSpace s =
                build_enriched_space(p, build_uniform_mesh_1d(p.x_domain.lo, p.x_domain.hi, 16));
            const DenseMatrix a = assemble_matrix(p, s);
            const DenseMatrix q = assemble_matrix(p, s, quadrature_route());
            const double scale = a.cwiseAbs().maxCoeff();
            EXPECT_LE((a - q).cwiseAbs().maxCoeff(), 1e-10 * scale) << name << " eps " << eps;

            const ForcingParams f = ForcingParams::one_d(1.3, -0.7, 1.9, -0.4, p.cls == ProblemClass::interior1d);
            const Vector fa = assemble_load(p, s, f);
            const Vector fq = assemble_load(p, s, f, quadrature_route());
            EXPECT_LE((fa - fq).cwiseAbs().maxCoeff(), 1e-11 * (1.0 + fa.cwiseAbs().maxCoeff()));
        }
    }
}

TEST(Assembly, CorrectorEntriesMatchIndependentIntegrals) {
    const double eps = 1e-3;
    const ProblemSpec p = ProblemSpec::boundary_layer(eps);
    const EnrichedSpace s = build_enriched_space(p, build_uniform_mesh_1d(0.0, 1.0, 10));
    const DenseMatrix a = assemble_matrix(p, s);
    const Affine b = p.convection_1d();
    for (std::size_t i : {0u, 1u, 5u, 9u}) {
        for (std::size_t k : {0u, 1u, 9u}) {
            const auto integrand = [&](double x) {
                const BasisValue u = s.eval(k, {x, 0.0});
                const BasisValue v = s.eval(i, {x, 0.0});
                return eps * u.grad[0] * v.grad[0] + b(x) * u.grad[0] * v.value;
            };
            double ref = 0.0;
            for (int e = 0; e < 10; ++e)
                ref += efeo_test::oracle_integral(integrand, e * 0.1, (e + 1) * 0.1, 1.0, eps * 1e-3);
            EXPECT_NEAR(a(i, k), ref, 1e-10 * (1.0 + std::abs(ref))) << i << "," << k;
        }
    }
}

TEST(Assembly, AxisGramsAgreeAcrossRoutes2D) {
    const ProblemSpec p = ProblemSpec::square(1e-2);
    const EnrichedSpace s = build_enriched_space(p, build_tensor_mesh_2d(8, 8));
    for (const AxisBasis* axis : {&s.x_axis(), &s.y_axis()}) {
        const AxisGram g = assemble_axis_gram(*axis, Affine{-1.0, 0.0});
        const AxisGram q = assemble_axis_gram(*axis, Affine{-1.0, 0.0}, quadrature_route());
        for (const auto& [x, y] : {std::pair{&g.mass, &q.mass}, std::pair{&g.stiffness, &q.stiffness},
                                   std::pair{&g.convection, &q.convection}}) {
            EXPECT_LE((*x - *y).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + x->cwiseAbs().maxCoeff()));
        }
    }
}

TEST(Assembly, MatrixAgreesWithDirectBilinearForm2D) {
    const ProblemSpec p = ProblemSpec::square(1e-2);
    const EnrichedSpace s = build_enriched_space(p, build_tensor_mesh_2d(4, 4));
    const DenseMatrix a = assemble_matrix(p, s);
    std::vector<double> u(s.total_dim(), 0.0);
    for (std::size_t k : {std::size_t{0}, std::size_t{3}, s.total_dim() - 1}) {
        std::fill(u.begin(), u.end(), 0.0);
        u[k] = 1.0;
        for (std::size_t i : {std::size_t{0}, std::size_t{2}, std::size_t{7}, s.total_dim() - 2}) {
            const double direct = bilinear_form_direct(p, s, u, i);
            EXPECT_NEAR(a(i, k), direct, 1e-9 * (1.0 + std::abs(direct))) << i << "," << k;
        }
    }
}

TEST(Assembly, LoadMatchesDirectIntegration2D) {
    const ProblemSpec p = ProblemSpec::square(1e-3);
    const EnrichedSpace s = build_enriched_space(p, build_tensor_mesh_2d(6, 6));
    const ForcingParams f = ForcingParams::two_d(0.8, -1.1, 1.7, -0.3, 0.6, 1.2);
    const Vector fa = assemble_load(p, s, f);
    for (std::size_t i = 0; i < s.total_dim(); i += 5) {
        EXPECT_NEAR(fa[i], load_direct(p, s, f, i), 1e-11) << i;
    }
}

TEST(Assembly, LoadAssemblerIsReusable) {
    const ProblemSpec p = ProblemSpec::interior_layer(1e-4);
    const EnrichedSpace s = build_enriched_space(p, build_uniform_mesh_1d(-1.0, 1.0, 20));
    const LoadAssembler loads(p, s);
    const ForcingParams f = ForcingParams::one_d(1.0, 0.5, 0.3, -1.2, true);
    const ForcingParams g = ForcingParams::one_d(-0.2, 1.5, 1.1, 0.9, true);
    EXPECT_EQ(loads(f), assemble_load(p, s, f));
    EXPECT_EQ(loads(g), assemble_load(p, s, g));
    EXPECT_EQ(loads.size(), s.total_dim());
}
