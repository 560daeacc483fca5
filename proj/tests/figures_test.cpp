#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "bcrb/csv.hpp"
#include "bcrb/figures.hpp"

using namespace bcrb;

namespace {

FigureOptions light_options(unsigned threads) {
    FigureOptions opt;
    opt.threads = threads;
    opt.fig8_samples = 10;
    opt.magnification_samples = 10;
    opt.link_d_samples = 60;
    return opt;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy * sxy / (sxx * syy);
}

} // namespace

TEST(Linspace, EndpointsExact) {
    const auto v = linspace(1.5, 6.0, 46);
    ASSERT_EQ(v.size(), 46u);
    EXPECT_EQ(v.front(), 1.5);
    EXPECT_EQ(v.back(), 6.0);
    EXPECT_THROW(linspace(2.0, 3.0, 1), domain_error);
}

TEST(ParallelMap, OrderAndExceptions) {
    const auto squares = parallel_map(
        100, [](std::size_t i) { return static_cast<double>(i * i); }, 4);
    for (std::size_t i = 0; i < squares.size(); ++i) EXPECT_EQ(squares[i], static_cast<double>(i * i));
    EXPECT_THROW(parallel_map(
                     10,
                     [](std::size_t i) {
                         if (i == 7) throw domain_error("seven");
                         return 0.0;
                     },
                     3),
                 domain_error);
}

TEST(FigureId, ParseAndReject) {
    for (FigureId id : all_figures) EXPECT_EQ(parse_figure_id(to_string(id)), id);
    EXPECT_THROW(parse_figure_id("fig99"), domain_error);
    EXPECT_THROW(parse_figure_id("fig5"), domain_error);
}

TEST(Figures, ThreadCountDoesNotChangeOutput) {
    const Scenario s;
    for (FigureId id : all_figures) {
        EXPECT_EQ(to_csv(generate_figure(id, s, light_options(1))), to_csv(generate_figure(id, s, light_options(4))))
            << to_string(id);
    }
}

TEST(Figures, ColumnsAlignedAndMetadataPresent) {
    const Scenario s;
    for (FigureId id : all_figures) {
        const auto ds = generate_figure(id, s, light_options(0));
        ASSERT_GE(ds.columns.size(), 2u);
        EXPECT_GT(ds.rows(), 0u);
        std::set<std::string> names;
        for (const auto& c : ds.columns) {
            EXPECT_EQ(c.values.size(), ds.rows()) << to_string(id) << " " << c.name;
            EXPECT_FALSE(c.unit.empty());
            names.insert(c.name);
        }
        EXPECT_EQ(names.size(), ds.columns.size());
        std::set<std::string> keys;
        for (const auto& [k, v] : ds.metadata) keys.insert(k);
        for (const char* key : {"figure", "N", "N_source", "lambda_m", "log_base", "scenario"})
            EXPECT_TRUE(keys.count(key)) << to_string(id) << " lacks " << key;
    }
}

TEST(Figures, CompareCavitiesSpot) {
    const auto ds = generate_figure(FigureId::fig6, Scenario{});
    EXPECT_EQ(ds.rows(), 46u);
    for (double w : ds.column("omega3_bcrb").values) EXPECT_LT(w, 0.4e-3);
    for (double w : ds.column("omega3_original").values) EXPECT_GT(w, 0.4e-3);
}

TEST(Figures, PvOutputPlateauAndCutoff) {
    const auto ds = generate_figure(FigureId::fig11, Scenario{});
    const auto& d = ds.column("d").values;
    double previous_cutoff = 0.0;
    for (const char* name : {"P_out_Pin200", "P_out_Pin225", "P_out_Pin250"}) {
        const auto& p = ds.column(name).values;
        for (double v : p) EXPECT_GE(v, 0.0);
        const auto first_zero = std::find(p.begin(), p.end(), 0.0);
        ASSERT_NE(first_zero, p.end()) << name;
        const double cutoff = d[static_cast<std::size_t>(first_zero - p.begin())];
        EXPECT_GT(cutoff, previous_cutoff) << name;
        previous_cutoff = cutoff;
    }
    EXPECT_NEAR(ds.column("P_out_Pin250").values.front(), 6.0, 1.0);
    EXPECT_GE(previous_cutoff, 100.0);
    EXPECT_LE(previous_cutoff, 400.0);
}

TEST(Figures, SpectralEfficiencyOrderedBySplit) {
    const auto ds = generate_figure(FigureId::fig12, Scenario{});
    const char* order[] = {"C_tilde_mu0.01", "C_tilde_mu0.1", "C_tilde_mu0.5", "C_tilde_mu0.9", "C_tilde_mu0.99"};
    for (std::size_t k = 0; k + 1 < std::size(order); ++k) {
        EXPECT_GT(ds.column(order[k]).values.front(), ds.column(order[k + 1]).values.front());
    }
    for (const char* name : order) {
        const double plateau = ds.column(name).values.front();
        EXPECT_GE(plateau, 11.0);
        EXPECT_LE(plateau, 17.0);
    }
    EXPECT_EQ(ds.column(order[0]).unit, "bit/s/Hz");
}

TEST(Figures, MaxDistanceLinearInCurvature) {
    const auto ds = generate_figure(FigureId::fig8, Scenario{});
    const auto& rho2 = ds.column("rho2").values;
    for (const char* name : {"d_max_M2.5", "d_max_M3.5", "d_max_M5"}) {
        EXPECT_GE(r_squared(rho2, ds.column(name).values), 0.99) << name;
    }
    const auto& lo = ds.column("d_max_M2.5").values;
    const auto& hi = ds.column("d_max_M5").values;
    for (std::size_t i = 0; i < rho2.size(); ++i) EXPECT_GE(lo[i], hi[i]);
}

TEST(Figures, CurvatureAndSpotAgainstMagnification) {
    const auto opt = light_options(0);
    const auto rho = generate_figure(FigureId::fig9, Scenario{}, opt);
    const auto& r10 = rho.column("rho2_min_d10").values;
    const auto& r40 = rho.column("rho2_min_d40").values;
    for (std::size_t i = 0; i < r10.size(); ++i) EXPECT_LT(r10[i], r40[i]);
    const auto spot = generate_figure(FigureId::fig10, Scenario{}, opt);
    const auto& w = spot.column("omega3_max_d20").values;
    for (std::size_t i = 1; i < w.size(); ++i) EXPECT_LT(w[i], w[i - 1]);
}

TEST(Sweep, EvaluatesEveryPoint) {
    SweepSpec spec;
    spec.variable = "d";
    spec.lo = 1.0;
    spec.hi = 20.0;
    spec.samples = 20;
    const auto ds = run_sweep(spec, 2);
    EXPECT_EQ(ds.rows(), 20u);
    const auto& stable = ds.column("stable").values;
    const auto& w = ds.column("omega1").values;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        EXPECT_EQ(stable[i] == 1.0, !std::isnan(w[i]));
    }
    EXPECT_EQ(stable.front(), 1.0);
    EXPECT_EQ(stable.back(), 0.0);
    EXPECT_EQ(to_csv(ds), to_csv(run_sweep(spec, 1)));
}

TEST(Sweep, RejectsBadSpec) {
    SweepSpec spec;
    spec.variable = "colour";
    EXPECT_THROW(run_sweep(spec), domain_error);
    spec.variable = "d";
    spec.lo = 2.0;
    spec.hi = 1.0;
    EXPECT_THROW(run_sweep(spec), domain_error);
}

TEST(Csv, Layout) {
    FigureDataset ds;
    ds.figure_id = "t";
    ds.columns = {{"x", "m", {1.0, 2.5}}, {"y", "W", {std::nan(""), 3.0}}};
    ds.metadata = {{"figure", "t"}};
    EXPECT_EQ(to_csv(ds), "# figure: t\nx [m],y [W]\n1,nan\n2.5,3\n");
    ds.columns[1].values.pop_back();
    EXPECT_THROW(to_csv(ds), domain_error);
}
