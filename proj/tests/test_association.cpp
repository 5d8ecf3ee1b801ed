#include <gtest/gtest.h>

#include <queue>
#include <random>

#include "otcell/association.hpp"
#include "otcell/metrics.hpp"
#include "otcell/oracle.hpp"

using namespace otcell;

namespace {

Scenario dense_urban() {
    Scenario sc;
    sc.area = {0, 4000, 0, 4000};
    sc.nodes = grid_deployment(sc.area, 4, 2);
    sc.total_users = 300;
    sc.payload_bits = 1e6;
    return sc;
}

Scenario single_node() {
    Scenario sc;
    sc.area = {0, 1000, 0, 1000};
    sc.nodes = {{5, NodeKind::aerial, 500, 500, 150, 1, 1e6}};
    sc.total_users = 50;
    sc.payload_bits = 1e6;
    return sc;
}

// two identical aerial nodes mirror-symmetric about x = 500
Scenario twin_uavs() {
    Scenario sc;
    sc.area = {0, 1000, 0, 1000};
    sc.nodes = {{0, NodeKind::aerial, 250, 500, 120, 1, 1e6},
                {1, NodeKind::aerial, 750, 500, 120, 1, 1e6}};
    sc.total_users = 100;
    sc.payload_bits = 1e6;
    return sc;
}

int component_count(const Partition& p, int id) {
    std::vector<char> seen(p.labels.size(), 0);
    int comps = 0;
    for (int start = 0; start < static_cast<int>(p.labels.size()); ++start) {
        if (seen[start] || p.labels[start] != id) continue;
        ++comps;
        std::queue<int> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const int c = q.front();
            q.pop();
            const int ix = c % p.nx, iy = c / p.nx;
            constexpr int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int jx = ix + dx[k], jy = iy + dy[k];
                if (jx < 0 || jx >= p.nx || jy < 0 || jy >= p.ny) continue;
                const int j = jy * p.nx + jx;
                if (!seen[j] && p.labels[j] == id) {
                    seen[j] = 1;
                    q.push(j);
                }
            }
        }
    }
    return comps;
}

}  // namespace

TEST(SnrAssociation, SingleNodeOwnsEverything) {
    Scenario sc = single_node();
    DensityGrid grid = uniform_density(sc.area, 8, 8);
    Partition p = snr_association(sc, grid);
    for (int label : p.labels) EXPECT_EQ(label, 5);
    ASSERT_EQ(p.masses.size(), 1u);
    EXPECT_NEAR(p.masses[0], 1.0, 1e-12);
}

TEST(SnrAssociation, CoLocatedTwinsTieBreakToLowestId) {
    Scenario sc;
    sc.area = {0, 1000, 0, 1000};
    // deliberately listed out of id order
    sc.nodes = {{7, NodeKind::aerial, 400, 400, 100, 1, 1e6},
                {3, NodeKind::aerial, 400, 400, 100, 1, 1e6}};
    sc.total_users = 10;
    sc.payload_bits = 1e6;
    DensityGrid grid = uniform_density(sc.area, 6, 6);
    Partition p = snr_association(sc, grid);
    for (int label : p.labels) EXPECT_EQ(label, 3);
}

TEST(SnrAssociation, HotspotPartitionStructure) {
    Scenario sc = dense_urban();
    DensityGrid grid = truncated_gaussian_density(sc.area, 1300, 1300, 1000, 200, 200);
    Partition p = snr_association(sc, grid);
    validate_partition(sc, grid, p);
    // every node owns one contiguous region
    for (const NodeSpec& n : sc.nodes) {
        EXPECT_EQ(component_count(p, n.id), 1) << "node " << n.id;
        EXPECT_GT(partition_mass(grid, p, n.id), 0.0);
    }
    // the strongest signal at the hotspot comes from the nearer macrocell
    EXPECT_EQ(p.labels[65 * 200 + 65], 4);
}

TEST(AssignmentRule, EqualWeightsReduceToMaxSnr) {
    Scenario sc = dense_urban();
    DensityGrid grid = uniform_density(sc.area, 50, 50);
    Partition base = snr_association(sc, grid);
    const std::vector<double> equal(sc.nodes.size(), 1.0 / sc.nodes.size());
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            ASSERT_EQ(assignment_rule(sc, equal, grid.cell_x(ix), grid.cell_y(iy)),
                      base.labels[static_cast<std::size_t>(iy) * grid.nx + ix]);
}

TEST(AssignmentRule, FlooredMassWins) {
    Scenario sc = dense_urban();
    // nodes 0 and 3 sit at the floor; their keys are ~1e-12 of the loaded
    // nodes' keys, so one of them must win, and kernels pick node 0 here
    std::vector<double> masses{0.0, 0.5, 0.5, 1e-12, 0.2, 0.2};
    EXPECT_EQ(assignment_rule(sc, masses, 1000, 1000), 0);
}

TEST(AssignmentRule, SmallerLoadWinsAtEqualKernel) {
    Scenario sc = twin_uavs();
    // the midpoint x = 500 sees identical kernels from both twins
    std::vector<double> masses{0.3, 0.7};
    EXPECT_EQ(assignment_rule(sc, masses, 500, 500), 0);
    masses = {0.7, 0.3};
    EXPECT_EQ(assignment_rule(sc, masses, 500, 500), 1);
}

TEST(AssignmentRule, CommonWeightScaleInvariance) {
    // the rule compares (a_l / W_l) F only up to a common factor: scaling all
    // masses, or all bandwidths with the per-user noise floor held fixed,
    // cannot change any argmin
    Scenario sc = dense_urban();
    const std::vector<double> masses{0.3, 0.05, 0.05, 0.1, 0.35, 0.15};
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pos(0.0, 4000.0);
    for (double factor : {4.0, 3.0, 0.25}) {
        std::vector<double> scaled_masses = masses;
        for (double& m : scaled_masses) m *= factor;
        Scenario scaled = sc;
        for (NodeSpec& n : scaled.nodes) n.bandwidth *= factor;
        scaled.channel.noise_psd /= factor;  // keeps N0 * W, and so the SNR, unchanged
        for (int i = 0; i < 200; ++i) {
            const double x = pos(rng), y = pos(rng);
            const int want = assignment_rule(sc, masses, x, y);
            ASSERT_EQ(assignment_rule(sc, scaled_masses, x, y), want);
            ASSERT_EQ(assignment_rule(scaled, masses, x, y), want);
        }
    }
}

TEST(AssignmentRule, PayloadInvariance) {
    Scenario sc = dense_urban();
    std::vector<double> masses{0.3, 0.05, 0.05, 0.1, 0.35, 0.15};
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> pos(0.0, 4000.0);
    for (double factor : {2.0, 3.0}) {
        Scenario scaled = sc;
        scaled.payload_bits *= factor;
        for (int i = 0; i < 200; ++i) {
            const double x = pos(rng), y = pos(rng);
            ASSERT_EQ(assignment_rule(sc, masses, x, y), assignment_rule(scaled, masses, x, y));
        }
    }
}

TEST(AssignmentRule, RejectsWrongMassCount) {
    Scenario sc = dense_urban();
    std::vector<double> masses{0.5, 0.5};
    EXPECT_THROW(assignment_rule(sc, masses, 100, 100), std::invalid_argument);
}

TEST(OtAssociation, SingleNodeConvergesImmediately) {
    Scenario sc = single_node();
    DensityGrid grid = uniform_density(sc.area, 10, 10);
    const auto [p, trace] = ot_association(sc, grid);
    EXPECT_TRUE(trace.converged);
    EXPECT_EQ(trace.iterations, 1);
    EXPECT_NEAR(p.masses[0], 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(fixed_point_violation(sc, grid, p), 0.0);
}

TEST(OtAssociation, SymmetricTwinsSplitEvenly) {
    Scenario sc = twin_uavs();
    DensityGrid grid = uniform_density(sc.area, 40, 40);
    const auto [p, trace] = ot_association(sc, grid);
    EXPECT_TRUE(trace.converged);
    EXPECT_NEAR(p.masses[0], 0.5, 1e-9);
    EXPECT_NEAR(p.masses[1], 0.5, 1e-9);
    EXPECT_DOUBLE_EQ(fixed_point_violation(sc, grid, p), 0.0);
    validate_partition(sc, grid, p);
}

TEST(OtAssociation, ToyInstanceMatchesExhaustiveOptimum) {
    std::mt19937_64 rng(34);  // 3 nodes, 10 points
    ToyInstance toy = make_random_toy(rng);
    ASSERT_EQ(toy.points.size(), 10u);
    const OracleResult best = enumerate_optimal(toy.scenario, toy.points);
    const auto [p, trace] = ot_association(toy.scenario, toy.points);
    const double solved = average_delay(toy.scenario, toy.points, p);
    EXPECT_NEAR(solved / best.objective, 1.0, 1e-9);
}

TEST(OtAssociation, ImprovesOnSnrBaseline) {
    Scenario sc = dense_urban();
    for (double sigma : {200.0, 1000.0}) {
        DensityGrid grid = truncated_gaussian_density(sc.area, 1300, 1300, sigma, 100, 100);
        Partition base = snr_association(sc, grid);
        const auto [opt, trace] = ot_association(sc, grid, {}, base);
        validate_partition(sc, grid, opt);
        EXPECT_LE(average_delay(sc, grid, opt), average_delay(sc, grid, base)) << sigma;
    }
}

TEST(OtAssociation, ShrinksCongestedHotspotCell) {
    Scenario sc = dense_urban();
    DensityGrid grid = truncated_gaussian_density(sc.area, 1300, 1300, 1000, 100, 100);
    Partition base = snr_association(sc, grid);
    const auto [opt, trace] = ot_association(sc, grid);
    const int owner = base.labels[32 * 100 + 32];  // cell containing the hotspot
    int cells_base = 0, cells_opt = 0;
    for (std::size_t i = 0; i < base.labels.size(); ++i) {
        cells_base += (base.labels[i] == owner);
        cells_opt += (opt.labels[i] == owner);
    }
    EXPECT_LT(cells_opt, cells_base);
    // shedding area must shed load as well
    const double mass_base = partition_mass(grid, base, owner);
    const double mass_opt = partition_mass(grid, opt, owner);
    EXPECT_LT(mass_opt, mass_base);
}

TEST(OtAssociation, TraceShapesAndBounds) {
    Scenario sc = dense_urban();
    DensityGrid grid = truncated_gaussian_density(sc.area, 1300, 1300, 600, 60, 60);
    SolverConfig cfg;
    cfg.max_iter = 40;
    const auto [p, trace] = ot_association(sc, grid, cfg);
    EXPECT_LE(trace.iterations, 40);
    EXPECT_EQ(trace.objective.size(), static_cast<std::size_t>(trace.iterations));
    EXPECT_EQ(trace.mass_change.size(), trace.objective.size());
    for (double v : trace.mass_change) EXPECT_GE(v, 0.0);
    for (double v : trace.objective) EXPECT_GT(v, 0.0);
}

TEST(OtAssociation, RejectsBadConfigAndInit) {
    Scenario sc = dense_urban();
    DensityGrid grid = uniform_density(sc.area, 10, 10);
    SolverConfig bad;
    bad.damping = 0.0;
    EXPECT_THROW(ot_association(sc, grid, bad), std::invalid_argument);
    bad = {};
    bad.tol = 0.0;
    EXPECT_THROW(ot_association(sc, grid, bad), std::invalid_argument);
    bad = {};
    bad.max_iter = 0;
    EXPECT_THROW(ot_association(sc, grid, bad), std::invalid_argument);

    Partition init = snr_association(sc, grid);
    init.labels[0] = 42;  // not a scenario node id
    EXPECT_THROW(ot_association(sc, grid, SolverConfig{}, init), std::invalid_argument);
    init = snr_association(sc, uniform_density(sc.area, 5, 5));
    EXPECT_THROW(ot_association(sc, grid, SolverConfig{}, init), std::invalid_argument);
}

TEST(FixedPointViolation, PositiveForSnrUnderHotspot) {
    Scenario sc = dense_urban();
    DensityGrid grid = truncated_gaussian_density(sc.area, 1300, 1300, 200, 100, 100);
    Partition base = snr_association(sc, grid);
    EXPECT_GT(fixed_point_violation(sc, grid, base), 0.0);
}

TEST(FixedPointViolation, ZeroOnSingleNode) {
    Scenario sc = single_node();
    DensityGrid grid = uniform_density(sc.area, 12, 12);
    Partition p = snr_association(sc, grid);
    EXPECT_DOUBLE_EQ(fixed_point_violation(sc, grid, p), 0.0);
}

TEST(UniformReduction, OneRelabelingStepEqualsSnr) {
    Scenario sc = dense_urban();
    DensityGrid grid = uniform_density(sc.area, 100, 100);
    Partition base = snr_association(sc, grid);
    const std::vector<double> equal(sc.nodes.size(), 1.0 / sc.nodes.size());
    int diffs = 0;
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            diffs += assignment_rule(sc, equal, grid.cell_x(ix), grid.cell_y(iy)) !=
                     base.labels[static_cast<std::size_t>(iy) * grid.nx + ix];
    EXPECT_EQ(diffs, 0);
}

TEST(ValidatePartition, CatchesCorruptedMasses) {
    Scenario sc = dense_urban();
    DensityGrid grid = uniform_density(sc.area, 20, 20);
    Partition p = snr_association(sc, grid);
    EXPECT_NO_THROW(validate_partition(sc, grid, p));
    Partition corrupt = p;
    corrupt.masses[0] += 1e-6;
    EXPECT_THROW(validate_partition(sc, grid, corrupt), std::invalid_argument);
    corrupt = p;
    corrupt.labels[0] = 99;
    EXPECT_THROW(validate_partition(sc, grid, corrupt), std::invalid_argument);
}
