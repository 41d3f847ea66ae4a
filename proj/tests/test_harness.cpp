#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hmpii/harness.hpp"

using namespace hmpii;

TEST(Harness, Scaling) {
    for (double k : {1.0, 2.0, 3.0}) {
        cplx x(-1.3, 0.7);
        EXPECT_NEAR(std::abs(y_to_x(x_to_y(x, k), k) - x), 0.0, 1e-15);
        EXPECT_NEAR(y_scale(k), std::pow(k * k / 2.0, 1.0 / 3.0), 1e-15);
    }
    // x = 0 maps to y = 0; u(0) for alpha = 3/2 scales to p = -2^{-1/3} u(0)
    EXPECT_NEAR(std::abs(scaled_value(1.0, 1.0) + std::pow(2.0, -1.0 / 3.0)), 0.0, 1e-15);
}

TEST(Harness, RealSliceAtZero) {
    SliceJob job;
    job.x_min = -1.0;
    job.x_max = 1.0;
    job.samples = 3;
    job.k_list = {1.0};
    auto rows = run_slice(job, {});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].flag, "ok");
    EXPECT_NEAR(std::abs(rows[1].asym + std::pow(2.0, -2.0 / 3.0)), 0.0, 1e-13);
    EXPECT_LE(rows[1].abs_err, 0.2);
    EXPECT_NEAR(rows[1].abs_err, std::abs(rows[1].asym - rows[1].num), 1e-15);
}

TEST(Harness, CsvSchemaAndDeterminism) {
    SliceJob job;
    job.samples = 7;
    job.k_list = {1.0, 2.0};
    auto a = run_slice(job, {}), b = run_slice(job, {});
    std::ostringstream sa, sb;
    write_rows_csv(sa, a);
    write_rows_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    std::string first = sa.str().substr(0, sa.str().find('\n'));
    EXPECT_EQ(first, "x_re,x_im,asym_re,asym_im,num_re,num_im,abs_err,flag");
    EXPECT_EQ(a.size(), 14u);
    EXPECT_EQ(a[7].k, 2.0);
}

TEST(Harness, GridSmoke) {
    GridJob job;
    auto rows = run_grid(job, {});
    EXPECT_EQ(rows.size(), 64u);
    int ok = 0;
    for (const auto& r : rows) ok += r.flag == "ok";
    EXPECT_GT(ok, 50);
    job.res_re = 4;
    EXPECT_THROW(run_grid(job, {}), std::invalid_argument);
}

TEST(Harness, HorizontalSliceFlagsPoles) {
    SliceJob job;
    job.mode = SliceJob::Mode::Horizontal;
    job.im_offset = -9.0;
    job.x_min = -2.5;
    job.x_max = -0.5;
    job.samples = 9;
    job.k_list = {1.0};
    auto rows = run_slice(job, {});
    ASSERT_EQ(rows.size(), 9u);
    for (const auto& r : rows) {
        if (r.flag == "ok") {
            EXPECT_TRUE(std::isfinite(r.abs_err));
            EXPECT_LE(r.abs_err, 0.5) << r.x;
        } else {
            EXPECT_EQ(r.flag, "NearPole") << r.x;
        }
    }
}

TEST(Harness, PoleDiscRadiusShrinksWithK) {
    Window w{-2.0, -1.0, -9.5, -8.5};
    auto p1 = poles_near(w, 1.0, 0.5), p3 = poles_near(w, 3.0, 0.5);
    EXPECT_GT(p3.size(), p1.size());
    EXPECT_TRUE(poles_near({2.0, 3.0, -1.0, 1.0}, 1.0, 0.5).empty());
}
