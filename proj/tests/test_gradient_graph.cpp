#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "gglr/gradient_graph.hpp"
#include "test_util.hpp"

using gglr::Connectivity;
using gglr::GradientDirection;
using gglr::GradientField;
using gglr::SparseMatrix;

namespace {

// Independent quadratic-form oracle: sum of w_ij (g_i - g_j)^2 over
// unordered edges of the adjacency.
double edge_sum(const SparseMatrix& w, const std::vector<double>& g) {
    const auto d = testutil::to_dense(w);
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = i + 1; j < d[i].size(); ++j) {
            const double diff = g[i] - g[j];
            s += d[i][j] * diff * diff;
        }
    }
    return s;
}

GradientField constant_field(GradientDirection dir, int img_rows, int img_cols, double v) {
    GradientField f = GradientField::zero(dir, img_rows, img_cols);
    for (double& x : f.values) x = v;
    return f;
}

double min_eigenvalue(const SparseMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(testutil::to_eigen(m), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("1x3 gradient operator matches the textbook stencil up to global sign") {
    const auto f = testutil::to_dense(gglr::gradient_operator(1, 3, GradientDirection::horizontal));
    // our convention: g = x_next - x_current
    CHECK(f == testutil::Dense{{-1.0, 1.0, 0.0}, {0.0, -1.0, 1.0}});
}

TEST_CASE("constant images are in the null space of both gradient operators") {
    testutil::Rng rng(31);
    for (int t = 0; t < 10; ++t) {
        const int m = rng.uniform_int(2, 9), n = rng.uniform_int(2, 9);
        for (auto dir : {GradientDirection::horizontal, GradientDirection::vertical}) {
            const auto f = gglr::gradient_operator(m, n, dir);
            const auto g = f.matvec(std::vector<double>(static_cast<std::size_t>(m * n), 1.0));
            for (double v : g) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("horizontal ramp has an all-ones horizontal gradient") {
    const int m = 4, n = 6;
    gglr::ImageGrid img = gglr::ImageGrid::zero(m, n);
    for (int l = 0; l < n; ++l) {
        for (int k = 0; k < m; ++k) img.at(k, l) = static_cast<double>(l);
    }
    const auto g = gglr::gradient_operator(m, n, GradientDirection::horizontal).matvec(gglr::vectorize(img));
    for (double v : g) CHECK(v == doctest::Approx(1.0));
    const auto gf = gglr::image_gradients(img, GradientDirection::horizontal);
    CHECK(gf.values == g);
}

TEST_CASE("gradient operator dimensions and minimum size") {
    const auto fh = gglr::gradient_operator(3, 5, GradientDirection::horizontal);
    CHECK(fh.rows() == 3 * 4);
    CHECK(fh.cols() == 15);
    const auto fv = gglr::gradient_operator(3, 5, GradientDirection::vertical);
    CHECK(fv.rows() == 2 * 5);
    CHECK(fv.cols() == 15);
    CHECK_THROWS_AS(gglr::gradient_operator(1, 1, GradientDirection::horizontal), std::invalid_argument);
    CHECK_THROWS_AS(gglr::gradient_operator(1, 3, GradientDirection::vertical), std::invalid_argument);
}

TEST_CASE("edge weight values") {
    CHECK(gglr::edge_weight(0.37, 0.37, 0.5) == 1.0);
    CHECK(gglr::edge_weight(1.0, 1.0 - 0.68, 0.68) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
    // monotone decay in |g_i - g_j|
    double prev = 1.0;
    for (int i = 1; i <= 20; ++i) {
        const double w = gglr::edge_weight(0.0, i * 0.3, 0.68);
        CHECK(w < prev);
        prev = w;
    }
    CHECK(prev < 1e-8);
    CHECK_THROWS_AS(gglr::edge_weight(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gglr::edge_weight(0.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("constant field builds the unweighted grid Laplacian") {
    const GradientField f = constant_field(GradientDirection::horizontal, 3, 4, 0.7);  // 3x3 gradient grid
    const auto g = gglr::build_gradient_graph(f, Connectivity::four, 0.68);
    const auto w = testutil::to_dense(g.adjacency);
    // every 4-neighbor edge has weight exactly 1 and the diagonal is zero
    int edges = 0;
    for (int i = 0; i < 9; ++i) {
        CHECK(w[i][i] == 0.0);
        for (int j = 0; j < 9; ++j) {
            CHECK(w[i][j] == w[j][i]);
            if (w[i][j] != 0.0) {
                CHECK(w[i][j] == 1.0);
                ++edges;
            }
        }
    }
    CHECK(edges == 2 * 12);  // 12 undirected edges on a 3x3 grid
    // L = D - W with unit weights
    const auto l = testutil::to_dense(g.laplacian);
    for (int i = 0; i < 9; ++i) {
        double deg = 0.0;
        for (int j = 0; j < 9; ++j) {
            if (i != j) deg += w[i][j];
        }
        CHECK(l[i][i] == deg);
    }
}

TEST_CASE("two-node graph matches the closed form") {
    // 1x2 gradient grid (1x3 image row), gap delta
    const double delta = 0.5, sigma = 0.68;
    GradientField f = GradientField::zero(GradientDirection::horizontal, 1, 3);
    f.values = {0.1, 0.1 + delta};
    const auto g = gglr::build_gradient_graph(f, Connectivity::two, sigma);
    const double w = std::exp(-delta * delta / (sigma * sigma));
    const auto l = testutil::to_dense(g.laplacian);
    CHECK(l[0][0] == doctest::Approx(w).epsilon(1e-15));
    CHECK(l[0][1] == doctest::Approx(-w).epsilon(1e-15));
    CHECK(l[1][0] == doctest::Approx(-w).epsilon(1e-15));
    CHECK(l[1][1] == doctest::Approx(w).epsilon(1e-15));
}

TEST_CASE("a large gradient jump disconnects the pieces") {
    // two constant runs separated by a step much larger than sigma
    const double sigma = 0.68;
    GradientField f = GradientField::zero(GradientDirection::horizontal, 1, 11);
    for (int l = 0; l < 10; ++l) f.values[static_cast<std::size_t>(l)] = l < 5 ? 0.02 : 0.02 + 50 * sigma;
    const auto g = gglr::build_gradient_graph(f, Connectivity::two, sigma);
    const auto w = testutil::to_dense(g.adjacency);
    CHECK(w[4][5] == 0.0);  // below the drop threshold -> removed
    CHECK(w[3][4] == 1.0);
    CHECK(w[5][6] == 1.0);
}

TEST_CASE("2-connected links follow the field's own axis") {
    // horizontal field on a 3x3 image -> 3x2 grid; only left/right links
    const auto gh = gglr::build_gradient_graph(constant_field(GradientDirection::horizontal, 3, 3, 0.0),
                                               Connectivity::two, 1.0);
    const auto wh = testutil::to_dense(gh.adjacency);
    CHECK(wh[gglr::vec_index(3, 0, 0)][gglr::vec_index(3, 0, 1)] == 1.0);
    CHECK(wh[gglr::vec_index(3, 0, 0)][gglr::vec_index(3, 1, 0)] == 0.0);
    // vertical field -> 2x3 grid; only up/down links
    const auto gv = gglr::build_gradient_graph(constant_field(GradientDirection::vertical, 3, 3, 0.0),
                                               Connectivity::two, 1.0);
    const auto wv = testutil::to_dense(gv.adjacency);
    CHECK(wv[gglr::vec_index(2, 0, 0)][gglr::vec_index(2, 1, 0)] == 1.0);
    CHECK(wv[gglr::vec_index(2, 0, 0)][gglr::vec_index(2, 0, 1)] == 0.0);
}

TEST_CASE("lifted Laplacian of the 3-pixel row with unit weights") {
    const auto f = gglr::gradient_operator(1, 3, GradientDirection::horizontal);
    const auto graph = gglr::build_gradient_graph(constant_field(GradientDirection::horizontal, 1, 3, 0.3),
                                                  Connectivity::two, 0.68);
    const auto lifted = gglr::lift_laplacian(f, graph.laplacian);
    const auto d = testutil::to_dense(lifted);
    CHECK(d == testutil::Dense{{1.0, -2.0, 1.0}, {-2.0, 4.0, -2.0}, {1.0, -2.0, 1.0}});
    // signed-graph reading: w_ij = -L_ij off the diagonal
    CHECK(-d[0][1] == 2.0);
    CHECK(-d[1][2] == 2.0);
    CHECK(-d[0][2] == -1.0);
}

TEST_CASE("quadratic form equals the edge-sum oracle") {
    testutil::Rng rng(32);
    for (int t = 0; t < 20; ++t) {
        // 1x8 row with signal-dependent weights
        const auto x = testutil::random_vector(rng, 8);
        const auto f = gglr::gradient_operator(1, 8, GradientDirection::horizontal);
        GradientField field = GradientField::zero(GradientDirection::horizontal, 1, 8);
        field.values = f.matvec(x);
        const auto graph = gglr::build_gradient_graph(field, Connectivity::two, 0.68);
        const auto lifted = gglr::lift_laplacian(f, graph.laplacian);
        const double quad = gglr::gglr_value(x, lifted, SparseMatrix(8, 8));
        const double oracle = edge_sum(graph.adjacency, field.values);
        CHECK(quad == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("gglr value vanishes on constants and planes") {
    const int m = 6, n = 7;
    const auto fh = gglr::gradient_operator(m, n, GradientDirection::horizontal);
    const auto fv = gglr::gradient_operator(m, n, GradientDirection::vertical);

    auto lifted_for = [&](const gglr::ImageGrid& img) {
        const auto gh = gglr::image_gradients(img, GradientDirection::horizontal);
        const auto gv = gglr::image_gradients(img, GradientDirection::vertical);
        const auto lh = gglr::build_gradient_graph(gh, Connectivity::four, 0.68).laplacian;
        const auto lv = gglr::build_gradient_graph(gv, Connectivity::four, 0.68).laplacian;
        return std::pair{gglr::lift_laplacian(fh, lh), gglr::lift_laplacian(fv, lv)};
    };

    const gglr::ImageGrid flat = gglr::ImageGrid::constant(m, n, 0.42);
    const auto [lh0, lv0] = lifted_for(flat);
    CHECK(gglr::gglr_value(gglr::vectorize(flat), lh0, lv0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    const gglr::ImageGrid plane = testutil::plane_image(m, n, 0.1, 0.03, 0.02);
    const auto [lh1, lv1] = lifted_for(plane);
    const auto x = gglr::vectorize(plane);
    double xsq = 0.0;
    for (double v : x) xsq += v * v;
    CHECK(std::fabs(gglr::gglr_value(x, lh1, lv1)) <= 1e-10 * xsq);
}

TEST_CASE("two-piece linear signal has near-zero gglr under its own weights") {
    const double sigma = 0.68;
    const int n = 16;
    std::vector<double> x(n);
    x[0] = 10.0;
    for (int i = 1; i < n; ++i) {
        const double slope = i <= 7 ? -0.01 : (i == 8 ? -50.0 * sigma : -0.03);
        x[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i - 1)] + slope;
    }
    const auto f = gglr::gradient_operator(1, n, GradientDirection::horizontal);
    GradientField field = GradientField::zero(GradientDirection::horizontal, 1, n);
    field.values = f.matvec(x);
    const auto graph = gglr::build_gradient_graph(field, Connectivity::two, sigma);
    const auto lifted = gglr::lift_laplacian(f, graph.laplacian);
    double xsq = 0.0;
    for (double v : x) xsq += v * v;
    CHECK(gglr::gglr_value(x, lifted, SparseMatrix(n, n)) <= 1e-6 * xsq);
}

TEST_CASE("flipping the sign convention changes nothing downstream") {
    testutil::Rng rng(33);
    const auto x = testutil::random_vector(rng, 12);
    const auto f = gglr::gradient_operator(3, 4, GradientDirection::horizontal);
    const auto f_neg = gglr::sparse_scale(f, -1.0);

    GradientField field = GradientField::zero(GradientDirection::horizontal, 3, 4);
    field.values = f.matvec(x);
    GradientField field_neg = field;
    field_neg.values = f_neg.matvec(x);

    const auto g1 = gglr::build_gradient_graph(field, Connectivity::four, 0.68);
    const auto g2 = gglr::build_gradient_graph(field_neg, Connectivity::four, 0.68);
    CHECK(testutil::to_dense(g1.adjacency) == testutil::to_dense(g2.adjacency));
    CHECK(testutil::to_dense(g1.laplacian) == testutil::to_dense(g2.laplacian));

    const auto l1 = gglr::lift_laplacian(f, g1.laplacian);
    const auto l2 = gglr::lift_laplacian(f_neg, g2.laplacian);
    CHECK(testutil::to_dense(l1) == testutil::to_dense(l2));
    CHECK(gglr::gglr_value(x, l1, SparseMatrix(12, 12)) == gglr::gglr_value(x, l2, SparseMatrix(12, 12)));
}

TEST_CASE("1D uniform-weight lifted Laplacian annihilates constants and lines") {
    const int n = 12;
    const auto f = gglr::gradient_operator(1, n, GradientDirection::horizontal);
    const auto graph = gglr::build_gradient_graph(constant_field(GradientDirection::horizontal, 1, n, 0.0),
                                                  Connectivity::two, 1.0);
    const auto lifted = gglr::lift_laplacian(f, graph.laplacian);

    testutil::Rng rng(34);
    const double a1 = rng.uniform(-2, 2), a2 = rng.uniform(-2, 2);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        // alpha1 * ones + alpha2 * decreasing line x_{i+1} = x_i - delta
        x[static_cast<std::size_t>(i)] = a1 * 1.0 + a2 * (5.0 - 0.7 * i);
    }
    const auto lx = lifted.matvec(x);
    double nl = 0.0, nx = 0.0;
    for (int i = 0; i < n; ++i) {
        nl += lx[static_cast<std::size_t>(i)] * lx[static_cast<std::size_t>(i)];
        nx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    }
    CHECK(std::sqrt(nl) <= 1e-10 * std::sqrt(nx));
}

TEST_CASE("2D uniform-weight null space is exactly the planar span") {
    const int m = 8, n = 8;
    const auto fh = gglr::gradient_operator(m, n, GradientDirection::horizontal);
    const auto fv = gglr::gradient_operator(m, n, GradientDirection::vertical);
    const auto lh = gglr::build_gradient_graph(constant_field(GradientDirection::horizontal, m, n, 0.0),
                                               Connectivity::four, 1.0)
                        .laplacian;
    const auto lv = gglr::build_gradient_graph(constant_field(GradientDirection::vertical, m, n, 0.0),
                                               Connectivity::four, 1.0)
                        .laplacian;
    const auto sum = gglr::sparse_add(gglr::lift_laplacian(fh, lh), gglr::lift_laplacian(fv, lv));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(testutil::to_eigen(sum), Eigen::EigenvaluesOnly);
    int null_dim = 0;
    for (int i = 0; i < eig.eigenvalues().size(); ++i) {
        if (eig.eigenvalues()[i] < 1e-9) ++null_dim;
    }
    CHECK(null_dim == 3);

    // each basis vector of {1, col ramp, row ramp} is annihilated
    for (int b = 0; b < 3; ++b) {
        std::vector<double> v(static_cast<std::size_t>(m * n));
        for (int l = 0; l < n; ++l) {
            for (int k = 0; k < m; ++k) {
                v[gglr::vec_index(m, k, l)] = b == 0 ? 1.0 : (b == 1 ? l : k);
            }
        }
        const auto lxv = sum.matvec(v);
        double nl = 0.0, nv = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            nl += lxv[i] * lxv[i];
            nv += v[i] * v[i];
        }
        CHECK(std::sqrt(nl) <= 1e-10 * std::sqrt(nv));
    }
}

TEST_CASE("random graphs stay positive semi-definite") {
    testutil::Rng rng(35);
    for (int t = 0; t < 25; ++t) {
        const int m = rng.uniform_int(2, 6), n = rng.uniform_int(2, 6);
        const auto dir = t % 2 == 0 ? GradientDirection::horizontal : GradientDirection::vertical;
        const auto conn = t % 3 == 0 ? Connectivity::two : Connectivity::four;
        const double sigma = rng.uniform(0.1, 2.0);
        GradientField field = GradientField::zero(dir, m, n);
        for (double& v : field.values) v = rng.uniform(-2, 2);
        const auto graph = gglr::build_gradient_graph(field, conn, sigma);
        CHECK(min_eigenvalue(graph.laplacian) >= -1e-10);
        const auto f = gglr::gradient_operator(m, n, dir);
        CHECK(min_eigenvalue(gglr::lift_laplacian(f, graph.laplacian)) >= -1e-10);
    }
}

TEST_CASE("lift_laplacian rejects mismatched dimensions") {
    const auto f = gglr::gradient_operator(1, 3, GradientDirection::horizontal);
    CHECK_THROWS_AS(gglr::lift_laplacian(f, SparseMatrix::identity(3)), std::invalid_argument);
}
