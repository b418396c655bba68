#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "gglr/sparse.hpp"
#include "test_util.hpp"

using gglr::SparseMatrix;
using gglr::Triplet;

TEST_CASE("from_triplets canonicalizes: sorted, deduplicated, in range") {
    SparseMatrix a = SparseMatrix::from_triplets(3, 3, {{2, 1, 1.0}, {0, 2, 2.0}, {2, 1, 0.5}, {0, 0, -1.0}});
    const auto d = testutil::to_dense(a);
    CHECK(d[0][0] == -1.0);
    CHECK(d[0][2] == 2.0);
    CHECK(d[2][1] == 1.5);
    CHECK(a.nnz() == 3);

    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, -1, 1.0}}), std::invalid_argument);
}

TEST_CASE("identity matvec returns its input") {
    testutil::Rng rng(11);
    const auto x = testutil::random_vector(rng, 17);
    const auto y = SparseMatrix::identity(17).matvec(x);
    CHECK(testutil::max_abs_diff(x, y) == 0.0);
}

TEST_CASE("transpose is an involution") {
    testutil::Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const int rows = rng.uniform_int(1, 12), cols = rng.uniform_int(1, 12);
        std::vector<Triplet> trip;
        for (int e = rng.uniform_int(0, 30); e > 0; --e) {
            trip.push_back({rng.uniform_int(0, rows - 1), rng.uniform_int(0, cols - 1), rng.uniform(-2, 2)});
        }
        const SparseMatrix a = SparseMatrix::from_triplets(rows, cols, trip);
        const SparseMatrix att = gglr::sparse_transpose(gglr::sparse_transpose(a));
        CHECK(testutil::to_dense(a) == testutil::to_dense(att));
    }
}

TEST_CASE("sparse kernels agree with dense triple-loop oracles") {
    testutil::Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        const int rows = rng.uniform_int(1, 64), cols = rng.uniform_int(1, 64);
        std::vector<Triplet> ta, tb;
        for (int e = rng.uniform_int(0, 4 * rows); e > 0; --e) {
            ta.push_back({rng.uniform_int(0, rows - 1), rng.uniform_int(0, cols - 1), rng.uniform(-2, 2)});
        }
        for (int e = rng.uniform_int(0, 4 * rows); e > 0; --e) {
            tb.push_back({rng.uniform_int(0, rows - 1), rng.uniform_int(0, cols - 1), rng.uniform(-2, 2)});
        }
        const SparseMatrix a = SparseMatrix::from_triplets(rows, cols, ta);
        const SparseMatrix b = SparseMatrix::from_triplets(rows, cols, tb);
        const auto da = testutil::to_dense(a);
        const auto db = testutil::to_dense(b);
        const auto x = testutil::random_vector(rng, static_cast<std::size_t>(cols));

        CHECK(testutil::max_abs_diff(a.matvec(x), testutil::dense_matvec(da, x)) <= 1e-12);

        const auto dsum = testutil::to_dense(gglr::sparse_add(a, b));
        const auto dscale = testutil::to_dense(gglr::sparse_scale(a, -1.75));
        const auto dtrans = testutil::to_dense(gglr::sparse_transpose(a));
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                CHECK(std::fabs(dsum[r][c] - (da[r][c] + db[r][c])) <= 1e-12);
                CHECK(std::fabs(dscale[r][c] - -1.75 * da[r][c]) <= 1e-12);
                CHECK(dtrans[c][r] == da[r][c]);
            }
        }
    }
}

TEST_CASE("triple product matches dense FtLF") {
    testutil::Rng rng(14);
    for (int t = 0; t < 25; ++t) {
        const int m = rng.uniform_int(1, 20), n = rng.uniform_int(1, 20);
        std::vector<Triplet> tf, tl;
        for (int e = rng.uniform_int(1, 3 * m); e > 0; --e) {
            tf.push_back({rng.uniform_int(0, m - 1), rng.uniform_int(0, n - 1), rng.uniform(-2, 2)});
        }
        for (int e = rng.uniform_int(1, 3 * m); e > 0; --e) {
            tl.push_back({rng.uniform_int(0, m - 1), rng.uniform_int(0, m - 1), rng.uniform(-2, 2)});
        }
        const SparseMatrix f = SparseMatrix::from_triplets(m, n, tf);
        const SparseMatrix l = SparseMatrix::from_triplets(m, m, tl);
        const Eigen::MatrixXd expect = testutil::to_eigen(f).transpose() * testutil::to_eigen(l) * testutil::to_eigen(f);
        const Eigen::MatrixXd got = testutil::to_eigen(gglr::sparse_triple_product(f, l));
        CHECK((expect - got).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const SparseMatrix a = SparseMatrix::identity(3);
    CHECK_THROWS_AS(a.matvec(std::vector<double>(4, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(gglr::sparse_add(a, SparseMatrix::identity(4)), std::invalid_argument);
    CHECK_THROWS_AS(gglr::sparse_triple_product(a, SparseMatrix::identity(4)), std::invalid_argument);
}

TEST_CASE("symmetrize yields exact symmetry and preserves symmetric input") {
    SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 3.0}});
    const auto d = testutil::to_dense(gglr::sparse_symmetrize(a));
    CHECK(d[0][1] == 2.0);
    CHECK(d[1][0] == 2.0);
    CHECK(gglr::is_symmetric(gglr::sparse_symmetrize(a)));
    CHECK_FALSE(gglr::is_symmetric(a));
}
