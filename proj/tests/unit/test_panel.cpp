#include "svarkit/error.hpp"
#include "svarkit/panel.hpp"
#include "svarkit/text_io.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace svarkit {
namespace {

std::vector<VariableSpec> specs(std::initializer_list<const char*> names) {
  std::vector<VariableSpec> out;
  int k = 0;
  for (const char* n : names) out.push_back({n, "", k++});
  return out;
}

std::string monthly_csv(YearMonth start, int rows, std::initializer_list<const char*> names) {
  std::ostringstream os;
  os << "date";
  for (const char* n : names) os << ',' << n;
  os << '\n';
  for (int t = 0; t < rows; ++t) {
    os << format_year_month(start.plus_months(t));
    int j = 0;
    for ([[maybe_unused]] const char* n : names) os << ',' << (t * 0.5 + j++);
    os << '\n';
  }
  return os.str();
}

TEST(Calendar, ParseAndFormat) {
  EXPECT_EQ(parse_year_month("2018-12"), (YearMonth{2018, 12}));
  EXPECT_EQ(format_year_month({1980, 1}), "1980-01");
  EXPECT_EQ((YearMonth{1980, 12}.plus_months(1)), (YearMonth{1981, 1}));
  EXPECT_THROW(parse_year_month("2018-13"), DataError);
  EXPECT_THROW(parse_year_month("2018/01"), DataError);
}

TEST(LoadPanel, FullSampleDimensions) {
  const char* names[] = {"CO2", "TCC", "PR", "AT", "SST", "SIE", "SIT", "Albedo"};
  std::istringstream in(monthly_csv({1980, 1}, 468, {"CO2", "TCC", "PR", "AT", "SST", "SIE", "SIT", "Albedo"}));
  std::vector<VariableSpec> spec;
  for (int j = 0; j < 8; ++j) spec.push_back({names[j], "", j});
  const auto panel = load_panel(in, spec);
  EXPECT_EQ(panel.rows(), 468);
  EXPECT_EQ(panel.cols(), 8);
  EXPECT_EQ(panel.start(), (YearMonth{1980, 1}));
  EXPECT_EQ(panel.end(), (YearMonth{2018, 12}));
}

TEST(LoadPanel, SingleColumnThreeRows) {
  std::istringstream in("date,x\n2000-01,1\n2000-02,2\n2000-03,3\n");
  const auto spec = specs({"x"});
  const auto panel = load_panel(in, spec);
  EXPECT_EQ(panel.rows(), 3);
  EXPECT_EQ(panel.cols(), 1);
  EXPECT_EQ(panel.values()(2, 0), 3.0);
}

TEST(LoadPanel, GapMonthIsError) {
  std::istringstream in("date,x\n2000-01,1\n2000-03,3\n");
  const auto spec = specs({"x"});
  try {
    (void)load_panel(in, spec);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("non-contiguous"), std::string::npos);
  }
}

TEST(LoadPanel, UnknownVariableAndBadCell) {
  {
    std::istringstream in("date,x\n2000-01,1\n");
    const auto spec = specs({"y"});
    EXPECT_THROW((void)load_panel(in, spec), DataError);
  }
  {
    std::istringstream in("date,x\n2000-01,1\n2000-02,abc\n");
    const auto spec = specs({"x"});
    EXPECT_THROW((void)load_panel(in, spec), DataError);
  }
}

TEST(LoadPanel, ReordersByOrderingIndex) {
  std::istringstream in("date,a,b,c\n2000-01,1,2,3\n2000-02,4,5,6\n");
  std::vector<VariableSpec> spec{{"a", "", 2}, {"b", "", 0}, {"c", "", 1}};
  const auto panel = load_panel(in, spec);
  EXPECT_EQ(panel.names(), (std::vector<std::string>{"b", "c", "a"}));
  EXPECT_EQ(panel.values()(1, 0), 5.0);
  EXPECT_EQ(panel.values()(1, 2), 4.0);
}

TEST(LoadPanel, TrimsRaggedEdgesButRejectsInteriorGaps) {
  std::istringstream ok("date,a,b\n2000-01,,1\n2000-02,2,2\n2000-03,3,3\n2000-04,4,NA\n");
  const auto spec = specs({"a", "b"});
  const auto panel = load_panel(ok, spec);
  EXPECT_EQ(panel.start(), (YearMonth{2000, 2}));
  EXPECT_EQ(panel.rows(), 2);

  std::istringstream bad("date,a,b\n2000-01,1,1\n2000-02,,2\n2000-03,3,3\n");
  EXPECT_THROW((void)load_panel(bad, spec), DataError);
}

TEST(Panel, RejectsBadOrderingAndDuplicates) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Ones(3, 2);
  EXPECT_THROW(TimeSeriesPanel({2000, 1}, v, {{"a", "", 1}, {"b", "", 0}}), DataError);
  EXPECT_THROW(TimeSeriesPanel({2000, 1}, v, {{"a", "", 0}, {"a", "", 1}}), DataError);
}

TEST(WritePanel, RoundTripIsExact) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd values = testing::normal_matrix(gen, 25, 3, std::pow(10.0, trial % 7 - 3));
    const auto panel = testing::make_panel(values, {1990 + trial, 1 + trial % 12});
    std::ostringstream os;
    write_panel(os, panel);
    std::istringstream is(os.str());
    const auto back = load_panel(is, panel.variables());
    EXPECT_EQ(back.start(), panel.start());
    EXPECT_TRUE((back.values().array() == panel.values().array()).all());
    std::ostringstream os2;
    write_panel(os2, back);
    EXPECT_EQ(os.str(), os2.str());
  }
}

TEST(DeseasonDummies, PureSeasonalPatternVanishes) {
  Eigen::MatrixXd v(60, 1);
  for (int t = 0; t < 60; ++t) v(t, 0) = std::sin(0.7 * (t % 12)) * 3.0 + 10.0;
  const auto [out, fit] = deseason_dummies(testing::make_panel(v, {2000, 4}), {});
  EXPECT_LT(out.values().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(fit.method, SeasonalMethod::dummy);
}

TEST(DeseasonDummies, TrendResidualsHaveZeroMonthlyMeans) {
  Eigen::MatrixXd v(100, 1);
  for (int t = 0; t < 100; ++t) v(t, 0) = t;
  const auto [out, fit] = deseason_dummies(testing::make_panel(v, {2001, 7}), {});
  for (int m = 0; m < 12; ++m) {
    double sum = 0;
    int n = 0;
    for (int t = m; t < 100; t += 12) {
      sum += out.values()(t, 0);
      ++n;
    }
    EXPECT_NEAR(sum / n, 0.0, 1e-10);
  }
}

TEST(DeseasonDummies, SkippedColumnPassesThroughBitForBit) {
  std::mt19937_64 gen(3);
  Eigen::MatrixXd v = testing::normal_matrix(gen, 48, 2);
  std::vector<VariableSpec> vars{{"CO2", "ppm", 0}, {"SIE", "", 1}};
  const TimeSeriesPanel panel({1980, 1}, v, vars);
  const auto [out, fit] = deseason_dummies(panel, {"CO2"});
  EXPECT_TRUE((out.values().col(0).array() == v.col(0).array()).all());
  EXPECT_TRUE((fit.monthly_means.col(0).array() == 0.0).all());
  EXPECT_FALSE((out.values().col(1).array() == v.col(1).array()).all());
}

TEST(DeseasonDummies, IdempotentAndMonthMeansZeroOnRandomPanels) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> len(24, 200);
  std::uniform_int_distribution<int> month(1, 12);
  for (int trial = 0; trial < 25; ++trial) {
    const int T = len(gen);
    Eigen::MatrixXd v = testing::normal_matrix(gen, T, 3, 5.0);
    v.col(1).array() += 100.0;
    const auto panel = testing::make_panel(v, {1990, month(gen)});
    const auto once = deseason_dummies(panel, {}).first;
    const auto twice = deseason_dummies(once, {}).first;
    const double scale = v.cwiseAbs().maxCoeff();
    EXPECT_LT((twice.values() - once.values()).cwiseAbs().maxCoeff(), 1e-10 * scale);
    for (int j = 0; j < 3; ++j) {
      for (int m = 1; m <= 12; ++m) {
        double sum = 0;
        int n = 0;
        for (Eigen::Index t = 0; t < T; ++t) {
          if (once.date(t).month == m) {
            sum += once.values()(t, j);
            ++n;
          }
        }
        if (n) {
          EXPECT_LT(std::abs(sum / n), 1e-10 * scale);
        }
      }
    }
  }
}

TEST(RestrictWindow, CountsAndErrors) {
  const auto panel = testing::make_panel(Eigen::MatrixXd::Ones(468, 2), {1980, 1});
  const auto sub = restrict_window(panel, {1984, 1}, {2018, 12});
  EXPECT_EQ(sub.rows(), 420);
  EXPECT_EQ(sub.start(), (YearMonth{1984, 1}));

  const auto full = restrict_window(panel, panel.start(), panel.end());
  EXPECT_EQ(full.rows(), panel.rows());
  EXPECT_TRUE(full.values() == panel.values());

  EXPECT_THROW((void)restrict_window(panel, {2000, 5}, {2000, 4}), DataError);
  EXPECT_THROW((void)restrict_window(panel, {1979, 12}, {2000, 4}), DataError);
}

}  // namespace
}  // namespace svarkit
