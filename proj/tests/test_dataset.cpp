#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "mvfc/dataset.hpp"
#include "mvfc/error.hpp"
#include "support.hpp"

using mvfc::Matrix;
using mvfc::MultiViewDataset;

namespace {

std::string csv_block(std::size_t rows, std::size_t cols, double base) {
  std::ostringstream s;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) s << (j ? "," : "") << base + static_cast<double>(i * cols + j);
    s << '\n';
  }
  return s.str();
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("views load as features x samples") {
    testing::TempDir dir("load");
    const auto a = dir.path() / "a.csv", b = dir.path() / "b.csv", lab = dir.path() / "labels.csv";
    testing::write_text(a, csv_block(4, 2, 0));
    testing::write_text(b, csv_block(4, 3, 100));
    testing::write_text(lab, "0\n0\n1\n1\n");
    const std::vector<std::filesystem::path> paths{a, b};
    const auto ds = mvfc::load_multiview(paths, lab);
    CHECK(ds.samples() == 4);
    CHECK(ds.view_count() == 2);
    CHECK(ds.view_dims() == std::vector<std::size_t>{2, 3});
    CHECK(ds.view(1)(2, 3) == 100 + 3 * 3 + 2);
    CHECK(ds.labels() == std::vector<int>{0, 0, 1, 1});
  }

  TEST_CASE("sample count mismatch is rejected") {
    testing::TempDir dir("mismatch");
    const auto a = dir.path() / "a.csv", b = dir.path() / "b.csv";
    testing::write_text(a, csv_block(4, 2, 0));
    testing::write_text(b, csv_block(5, 2, 0));
    const std::vector<std::filesystem::path> paths{a, b};
    CHECK_THROWS_AS(mvfc::load_multiview(paths, std::nullopt), mvfc::DataError);
    const auto lab = dir.path() / "l.csv";
    testing::write_text(lab, "1\n2\n3\n");
    const std::vector<std::filesystem::path> one{a};
    CHECK_THROWS_AS(mvfc::load_multiview(one, lab), mvfc::DataError);
  }

  TEST_CASE("wide three-view input of 226 samples") {
    testing::TempDir dir("wide");
    std::vector<std::filesystem::path> paths;
    testing::Gen g(5);
    for (std::size_t width : {2500u, 215u, 389u}) {
      std::string text;
      for (std::size_t i = 0; i < 226; ++i) {
        for (std::size_t j = 0; j < width; ++j) text += (j ? ",0." : "0.") + std::to_string(g.size(0, 9));
        text += '\n';
      }
      paths.push_back(dir.path() / ("v" + std::to_string(width) + ".csv"));
      testing::write_text(paths.back(), text);
    }
    const auto ds = mvfc::load_multiview(paths, std::nullopt);
    CHECK(ds.view_count() == 3);
    CHECK(ds.samples() == 226);
    CHECK(ds.view_dims() == std::vector<std::size_t>{2500, 215, 389});
    CHECK(ds.min_view_dim() == 215);
    CHECK_FALSE(ds.has_labels());
    CHECK_THROWS_AS(ds.labels(), mvfc::DataError);
  }

  TEST_CASE("min-max scaling endpoints") {
    const MultiViewDataset ds({Matrix::from_rows({{-1, 0, 1}, {5, 5, 5}, {0, 1, 1}})});
    const auto out = mvfc::normalize_minmax(ds).view(0);
    CHECK(out == Matrix::from_rows({{0, 0.5, 1}, {0, 0, 0}, {0, 1, 1}}));
  }

  TEST_CASE("zero-noise synthetic views equal the generating product") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      mvfc::SyntheticSpec spec;
      spec.seed = seed;
      spec.view_dims = {4, 7, 3};
      const auto draw = mvfc::draw_synthetic(spec);
      for (std::size_t k = 0; k < 3; ++k) {
        const Matrix& p = draw.basis[k];
        const Matrix& x = draw.raw_views[k];
        for (std::size_t i = 0; i < x.cols(); ++i) {
          for (std::size_t f = 0; f < x.rows(); ++f) {
            double v = 0.0;
            for (std::size_t j = 0; j < spec.rank; ++j) v += p(f, j) * draw.coeff(j, i);
            CHECK(x(f, i) == doctest::Approx(v).epsilon(1e-14));
          }
        }
      }
      CHECK(mvfc::min_value(draw.dataset.view(0)) >= 0.0);
      CHECK(mvfc::max_value(draw.dataset.view(0)) <= 1.0);
    }
  }

  TEST_CASE("synthetic draws are deterministic and balanced") {
    mvfc::SyntheticSpec spec;
    spec.noise_sigma = 0.01;
    spec.seed = 9;
    const auto a = mvfc::generate_synthetic(spec), b = mvfc::generate_synthetic(spec);
    for (std::size_t k = 0; k < a.view_count(); ++k) CHECK(a.view(k) == b.view(k));
    const auto& labels = a.labels();
    for (int l = 0; l < 3; ++l) CHECK(std::count(labels.begin(), labels.end(), l) == 20);
    spec.samples = 7;
    const auto odd = mvfc::generate_synthetic(spec).labels();
    CHECK(std::count(odd.begin(), odd.end(), 0) == 3);
    CHECK(std::count(odd.begin(), odd.end(), 2) == 2);
  }

  TEST_CASE("synthetic spec validation") {
    mvfc::SyntheticSpec spec;
    spec.clusters = 1;
    CHECK_THROWS_AS(spec.validate(), mvfc::ConfigError);
    spec = {};
    spec.view_dims.clear();
    CHECK_THROWS_AS(spec.validate(), mvfc::ConfigError);
    spec = {};
    spec.noise_sigma = -1;
    CHECK_THROWS_AS(spec.validate(), mvfc::ConfigError);
  }

  TEST_CASE("write then load reproduces the dataset") {
    testing::TempDir dir("roundtrip");
    mvfc::SyntheticSpec spec;
    spec.noise_sigma = 0.05;
    const auto ds = mvfc::generate_synthetic(spec);
    const auto files = mvfc::write_multiview(ds, dir.path());
    REQUIRE(files.size() == 3);
    const std::vector<std::filesystem::path> views{files[0], files[1]};
    const auto back = mvfc::load_multiview(views, files[2]);
    for (std::size_t k = 0; k < 2; ++k) CHECK(back.view(k) == ds.view(k));
    CHECK(back.labels() == ds.labels());
  }

  TEST_CASE("constructor invariants") {
    CHECK_THROWS_AS(MultiViewDataset(std::vector<Matrix>{}), mvfc::DataError);
    CHECK_THROWS_AS(MultiViewDataset({Matrix(2, 1)}), mvfc::DataError);
    CHECK_THROWS_AS(MultiViewDataset({Matrix(2, 3), Matrix(2, 4)}), mvfc::DataError);
    CHECK_THROWS_AS(MultiViewDataset({Matrix(2, 3)}, std::vector<int>{1, 2}), mvfc::DataError);
  }
}
