#include "otma/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace otma;

namespace {

Mat2 mx_matrix()
{
    Mat2 m;
    m << 0.8, 0.0, 0.0, 0.4;
    return m;
}

Mat2 my_matrix()
{
    Mat2 m;
    m << 0.6, 0.2, 0.2, 0.8;
    return m;
}

bool is_spd(const Mat2& a)
{
    return std::abs(a(0, 1) - a(1, 0)) < 1e-12 && Eigen::SelfAdjointEigenSolver<Mat2>(a).eigenvalues().minCoeff() > 0;
}

double run_error(const std::string& name, int nx, int ny)
{
    const RunResult r = run_experiment(experiment_by_name(name), nx, ny);
    EXPECT_TRUE(r.solution.report.converged) << name << " " << nx << " " << ny;
    return r.map_error;
}

}  // namespace

TEST(ExactEllipseMap, IdentityMatrices)
{
    EXPECT_NEAR((exact_ellipse_map(Mat2::Identity(), Mat2::Identity()) - Mat2::Identity()).norm(), 0.0, 1e-15);
}

TEST(ExactEllipseMap, MapsBoundaryOntoBoundary)
{
    const Mat2 a = exact_ellipse_map(mx_matrix(), my_matrix());
    EXPECT_TRUE(is_spd(a));
    const Mat2 my_inv = my_matrix().inverse();
    for (int k = 0; k < 1000; ++k) {
        const double t = 2 * std::numbers::pi * k / 1000;
        const Vec2 x = mx_matrix() * Vec2(std::cos(t), std::sin(t));
        EXPECT_NEAR((my_inv * (a * x)).norm(), 1.0, 1e-10);
    }
}

TEST(ExactEllipseMap, AreaBalance)
{
    Mat2 mx, my;
    mx << 2.0, 0.0, 0.0, 1.0;
    my << 1.0, 0.0, 0.0, 2.0;
    const Mat2 a = exact_ellipse_map(mx, my);
    EXPECT_TRUE(is_spd(a));
    const double area_x = std::numbers::pi * mx.determinant();
    const double area_y = std::numbers::pi * my.determinant();
    EXPECT_NEAR(a.determinant() * area_x, area_y, 1e-10);
}

TEST(ExactEllipseMap, RejectsNonSpd)
{
    Mat2 bad;
    bad << 1.0, 0.0, 0.0, -1.0;
    EXPECT_THROW(exact_ellipse_map(bad, Mat2::Identity()), std::invalid_argument);
    Mat2 skew;
    skew << 1.0, 0.5, 0.0, 1.0;
    EXPECT_THROW(exact_ellipse_map(Mat2::Identity(), skew), std::invalid_argument);
}

TEST(SplitDomain, ExactMapPushesSourceIntoTarget)
{
    const ExperimentSpec s = split_domain_spec();
    const ConvexTarget disk = ConvexTarget::circle(Vec2::Zero(), 0.85);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.1, 1.1);
    int inside = 0;
    for (int k = 0; k < 20000; ++k) {
        const Vec2 x(u(rng), u(rng));
        if (!s.source_region(x)) {
            continue;
        }
        ++inside;
        EXPECT_LE(disk.signed_distance((*s.exact_map)(x)), 1e-12);
    }
    EXPECT_GT(inside, 0);
    // Source area equals the disk area: two half-disks.
    EXPECT_NEAR(static_cast<double>(inside) / 20000 * 2.2 * 2.2, std::numbers::pi * 0.85 * 0.85, 0.05);
}

TEST(Experiments, LookupByName)
{
    EXPECT_EQ(experiment_by_name("ellipse").name, "ellipse");
    EXPECT_EQ(experiment_by_name("split").name, "split");
    EXPECT_EQ(experiment_by_name("gallery:diamond").name, "gallery:diamond");
    EXPECT_THROW(experiment_by_name("torus"), std::invalid_argument);
    EXPECT_THROW(gallery_spec("star"), std::invalid_argument);
    EXPECT_EQ(gallery_shapes().size(), 6u);
    for (const auto& shape : gallery_shapes()) {
        const ConvexTarget t = gallery_spec(shape).target(64);
        EXPECT_GT(t.area(), 0.5) << shape;
    }
    EXPECT_THROW(build_experiment_problem(ellipse_spec(), 2, 32), std::invalid_argument);
}

TEST(Experiments, EllipseAtSixtyFour)
{
    const double e = run_error("ellipse", 64, 64);
    EXPECT_GE(e, 0.0291 / 2);
    EXPECT_LE(e, 0.0291 * 2);
}

TEST(Experiments, SplitAtSixtyFour)
{
    const double e = run_error("split", 64, 64);
    EXPECT_GE(e, 0.0146 / 2);
    EXPECT_LE(e, 0.0146 * 2);
}

TEST(Experiments, SplitAtOneTwentyEight)
{
    const double e = run_error("split", 128, 64);
    EXPECT_GE(e, 0.0066 / 2.5);
    EXPECT_LE(e, 0.0066 * 2.5);
}

TEST(Experiments, EllipseFinest)
{
    const double e = run_error("ellipse", 362, 256);
    EXPECT_GE(e, 0.0056 / 2);
    EXPECT_LE(e, 0.0056 * 2);
}

TEST(Experiments, CoarseTargetPlateau)
{
    const double coarse = run_error("ellipse", 64, 8);
    const double fine = run_error("ellipse", 64, 64);
    EXPECT_GT(coarse, 2 * fine);
    EXPECT_GT(coarse, 0.06);
}

TEST(Experiments, EllipseRefinesAlongDiagonal)
{
    const double e32 = run_error("ellipse", 32, 32);
    const double e64 = run_error("ellipse", 64, 64);
    const double e128 = run_error("ellipse", 128, 128);
    EXPECT_LT(e64, e32);
    EXPECT_LT(e128, e64);
}

TEST(Gallery, SquareIsIdentity)
{
    const RunResult r = run_experiment(gallery_spec("square"), 64, 64);
    ASSERT_TRUE(r.solution.report.converged);
    const double h = 2.0 / 64;
    EXPECT_LE(r.map_error, 2 * (h + DirectionSet::uniform(0.0491).dalpha()));
}

TEST(Gallery, Containment)
{
    for (const std::string shape : {"circle", "triangle"}) {
        const RunResult r = run_experiment(gallery_spec(shape), 64, 64);
        ASSERT_TRUE(r.solution.report.converged) << shape;
        EXPECT_LE(r.containment, 2 * 2.0 / 64) << shape;
        EXPECT_TRUE(std::isnan(r.map_error));
    }
}

TEST(Containment, Metric)
{
    const Grid g(-1.0, 1.0, 5);
    VectorField f{g, std::vector<Vec2>(g.size(), Vec2(0.0, 0.0))};
    f.values[3] = Vec2(2.0, 0.0);
    const ConvexTarget disk = ConvexTarget::circle(Vec2::Zero(), 1.0);
    std::vector<bool> mask(g.size(), true);
    EXPECT_NEAR(pushforward_containment(f, mask, disk), 1.0, 1e-12);
    mask[3] = false;
    EXPECT_NEAR(pushforward_containment(f, mask, disk), -1.0, 1e-12);
}

TEST(Table, CsvLayout)
{
    RunOptions opts;
    opts.solver.max_iterations = 50;
    const TableResult t = run_table(ellipse_spec(), {16}, {8, 16}, opts);
    ASSERT_EQ(t.errors.size(), 1u);
    ASSERT_EQ(t.errors[0].size(), 2u);
    std::ostringstream os;
    write_table_csv(os, t);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "N_X,8,16");
    EXPECT_EQ(row.rfind("16,", 0), 0u);

    TableResult bad = t;
    bad.errors[0][1] = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream nan_os;
    write_table_csv(nan_os, bad);
    EXPECT_NE(nan_os.str().find(",nan"), std::string::npos);
}

TEST(Table, RequiresExactMap)
{
    EXPECT_THROW(run_table(gallery_spec("circle"), {16}, {16}), std::invalid_argument);
}

TEST(Table, FailedRunsBecomeNaN)
{
    RunOptions opts;
    opts.solver.max_iterations = 0;
    const TableResult t = run_table(ellipse_spec(), {16}, {16}, opts);
    EXPECT_TRUE(std::isnan(t.errors[0][0]));
    EXPECT_FALSE(t.all_converged());
}
