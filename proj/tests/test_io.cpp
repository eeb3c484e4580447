#include "hfd/analytic.hpp"
#include "hfd/error.hpp"
#include "hfd/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace hfd;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir()
{
  static const fs::path dir = [] {
    std::random_device rd;
    auto d = fs::temp_directory_path() / ("hfd_io_" + std::to_string(rd()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_text(const std::string& name, const std::string& text)
{
  const auto path = scratch_dir() / name;
  std::ofstream(path) << text;
  return path;
}

Dataset fgm_dataset(std::size_t n, std::uint64_t seed)
{
  const FgmCase fgm;
  Dataset d;
  d.feature_names = { "a", "b", "c" };
  d.X = fgm.sample(n, seed);
  d.y = fgm.target(d.X);
  return d;
}

} // namespace

TEST_CASE("CSV ingestion")
{
  const auto path = write_text("basic.csv", "x1,x2,y\n1,2,3\n4,NaN,6\n7,8,9\n\n10,11,12\n");
  const auto d = ingest_csv(path, ColumnRef{ -1 });
  CHECK(d.feature_names == std::vector<std::string>{ "x1", "x2" });
  CHECK(d.n() == 3);
  CHECK(d.dropped_rows == 1);
  CHECK(d.X(1, 0) == 7.0);
  CHECK(d.X(2, 1) == 11.0);
  CHECK(d.y(2) == 12.0);

  const auto by_name = ingest_csv(path, ColumnRef{ std::string("x1") });
  CHECK(by_name.feature_names == std::vector<std::string>{ "x2", "y" });
  CHECK(by_name.y(0) == 1.0);

  const auto no_target = ingest_csv(path, std::nullopt);
  CHECK(no_target.p() == 3);
  CHECK(no_target.y.size() == 0);

  CHECK_THROWS_AS(ingest_csv(path, ColumnRef{ std::string("nope") }), InputError);
  CHECK_THROWS_AS(ingest_csv(path, ColumnRef{ 3 }), InputError);
  CHECK_THROWS_AS(ingest_csv(scratch_dir() / "missing.csv", std::nullopt), InputError);
  CHECK_THROWS_AS(ingest_csv(write_text("empty.csv", ""), std::nullopt), InputError);
  const auto ragged = ingest_csv(write_text("ragged.csv", "a,b\n1,2\n3\n4,5\nx,1\n"), ColumnRef{ 1 });
  CHECK(ragged.n() == 2);
  CHECK(ragged.dropped_rows == 2);
}

TEST_CASE("CSV write and read back")
{
  Matrix M(3, 2);
  M << 0.1, -1.0 / 3.0, 1e-300, 2.5, 12345.678901234567, -0.0;
  const auto path = scratch_dir() / "out.csv";
  write_csv(path, { "u", "v" }, M);
  const auto d = ingest_csv(path, std::nullopt);
  CHECK(d.X == M);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("model JSON round trip")
{
  const auto data = fgm_dataset(1500, 31);
  FitConfig cfg;
  cfg.d = 6;
  const auto model = fit(data.X, data.y, cfg, nullptr, data.feature_names);
  const json doc = model_to_json(model);
  const auto back = model_from_json(json::parse(doc.dump()));
  CHECK(back.feature_names == model.feature_names);
  CHECK(back.components.size() == model.components.size());
  CHECK((back.predict(data.X) - model.predict(data.X)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(model_to_json(back).dump() == doc.dump());
}

TEST_CASE("schema version checks")
{
  CHECK_NOTHROW(check_schema_version(json{ { "schema_version", "1.3" } }));
  CHECK_THROWS_AS(check_schema_version(json{ { "schema_version", "2.0" } }), SchemaError);
  CHECK_THROWS_AS(check_schema_version(json::object()), SchemaError);
  const auto data = fgm_dataset(400, 32);
  FitConfig cfg;
  cfg.d = 3;
  json doc = model_to_json(fit(data.X, data.y, cfg));
  doc["schema_version"] = "9.0";
  CHECK_THROWS_AS(model_from_json(doc), SchemaError);
  doc["schema_version"] = "1.0";
  doc.erase("nu_empty");
  CHECK_THROWS_AS(model_from_json(doc), SchemaError);
}

TEST_CASE("external-marginal models are not serializable")
{
  const auto data = fgm_dataset(400, 33);
  FitConfig cfg;
  cfg.d = 3;
  const auto model = fit(data.X, data.y, cfg, std::make_shared<FgmMarginals>(FgmCase{}));
  CHECK_THROWS_AS(model_to_json(model), SchemaError);
}

TEST_CASE("feature alignment")
{
  const auto data = fgm_dataset(400, 34);
  FitConfig cfg;
  cfg.d = 3;
  const auto model = fit(data.X, data.y, cfg, nullptr, data.feature_names);
  Dataset shuffled = data;
  shuffled.feature_names = { "c", "a", "b" };
  shuffled.X.col(0) = data.X.col(2);
  shuffled.X.col(1) = data.X.col(0);
  shuffled.X.col(2) = data.X.col(1);
  CHECK(align_features(model, shuffled) == data.X);
  Dataset wrong = data;
  wrong.feature_names = { "a", "b", "z" };
  try {
    align_features(model, wrong);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("c") != std::string::npos);
    CHECK(msg.find("z") != std::string::npos);
  }
}

TEST_CASE("export bundle contents and round trip")
{
  const auto data = fgm_dataset(2000, 35);
  FitConfig cfg;
  cfg.d = 6;
  const auto model = fit(data.X, data.y, cfg, nullptr, data.feature_names);
  ExportOptions opt;
  opt.grid_1d = 25;
  opt.grid_2d = 7;
  opt.max_rows = 5;
  const json bundle = export_bundle(model, data, opt);
  CHECK_NOTHROW(check_schema_version(bundle));
  CHECK(bundle.at("feature_names") == json(data.feature_names));
  CHECK(bundle.at("attributions").size() == 5);
  CHECK(bundle.contains("metrics"));

  const auto path = scratch_dir() / "bundle.json";
  write_file_atomic(path, bundle.dump());
  std::ifstream in(path);
  const json back = json::parse(in);
  const auto restored = model_from_json(back.at("model"));

  const Vector mid = data.X.colwise().mean().transpose();
  for (const auto& me : back.at("main_effects")) {
    const Subset S = me.at("S").get<Subset>();
    const auto xs = me.at("x_raw").get<std::vector<double>>();
    const auto vs = me.at("values").get<std::vector<double>>();
    REQUIRE(xs.size() == 25);
    CHECK(xs.front() == data.X.col(S[0]).minCoeff());
    CHECK(xs.back() == data.X.col(S[0]).maxCoeff());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      std::vector<double> x(mid.data(), mid.data() + 3);
      x[S[0]] = xs[k];
      CHECK(std::abs(restored.component_eval(S, x) - vs[k]) <= 1e-12);
    }
  }
  for (const auto& it : back.at("interactions")) {
    const Subset S = it.at("S").get<Subset>();
    const auto gx = it.at("x_raw").get<std::vector<double>>();
    const auto gy = it.at("y_raw").get<std::vector<double>>();
    const auto vs = it.at("values_row_major").get<std::vector<double>>();
    REQUIRE(vs.size() == gx.size() * gy.size());
    for (std::size_t a = 0; a < gx.size(); ++a)
      for (std::size_t b = 0; b < gy.size(); ++b) {
        std::vector<double> x(mid.data(), mid.data() + 3);
        x[S[0]] = gx[a];
        x[S[1]] = gy[b];
        CHECK(std::abs(restored.component_eval(S, x) - vs[a * gy.size() + b]) <= 1e-12);
      }
  }
  for (const auto& at : back.at("attributions")) {
    const auto x = at.at("x_raw").get<std::vector<double>>();
    const auto phi = at.at("phi").get<std::vector<double>>();
    const auto a = restored.shapley(x);
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(a.phi(j) - phi[j]) <= 1e-12);
    CHECK(std::abs(at.at("prediction").get<double>() - a.prediction) <= 1e-12);
  }
}

TEST_CASE("metrics JSON")
{
  const auto data = fgm_dataset(1000, 36);
  FitConfig cfg;
  cfg.d = 4;
  const auto model = fit(data.X, data.y, cfg);
  const auto report = compute_metrics(model, data.X, data.y);
  const json doc = metrics_to_json(report);
  CHECK(doc.at("r2").get<double>() == report.r2);
  CHECK(doc.at("cosine_table").size() == report.cosine_table.size());
  CHECK(format_cosine_table(report.cosine_table).find("cosine") != std::string::npos);
}
