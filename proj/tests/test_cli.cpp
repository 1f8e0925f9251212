#include "cli.hpp"

#include "cifti/experiments.hpp"
#include "cifti/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cifti;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const &name) {
  auto const dir = fs::temp_directory_path() / ("cifti-cli-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(fs::path const &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args, fs::path const &out) {
  args.push_back("-o");
  args.push_back(out.string());
  args.push_back("--threads");
  args.push_back("2");
  return run_cli(args);
}

} // namespace

TEST_CASE("cli levels") {
  auto const out = scratch("levels");
  REQUIRE(run({"levels", "--n-xi", "64", "--q", "2"}, out) == exit_code::ok);
  auto const j = read_json(out / "levels.json");
  auto const &schemes = j.at("schemes");
  REQUIRE(schemes.size() == 3);
  bool found = false;
  for(auto const &scheme : schemes)
    if(scheme.at("kind") == "dft-symmetric") {
      CHECK(scheme.at("r") == 4);
      found = true;
    }
  CHECK(found);
  CHECK(fs::exists(out / "levels.csv"));
}

TEST_CASE("cli profile has r columns for the DFT basis") {
  auto const out = scratch("profile");
  REQUIRE(run({"profile", "--n-xi", "256", "--q", "3", "--basis", "dft"}, out) == exit_code::ok);
  std::istringstream csv(slurp(out / "profile_dft.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("rho,level_1,", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == 8);
  int rows = 0;
  for(std::string line; std::getline(csv, line);)
    ++rows;
  CHECK(rows == 3);
}

TEST_CASE("cli sample writes the pattern and its mask") {
  auto const out = scratch("sample");
  REQUIRE(run({"sample", "--n-xi", "128", "--q", "3", "--ratio", "0.25"}, out) == exit_code::ok);
  auto const p = pattern_from_json(read_json(out / "pattern.json").at("pattern"));
  CHECK(p.size() == 32);
  CHECK(p.kind == PatternKind::mls);
  auto const mask = slurp(out / "mask.csv");
  CHECK(std::count(mask.begin(), mask.end(), '1') == 32);
}

TEST_CASE("cli phase transition at full sampling succeeds everywhere") {
  auto const out = scratch("phase");
  REQUIRE(run({"phase-transition", "--n-xi", "64", "--q", "2", "--fluorochromes", "4", "--ratios", "1.0",
               "--trials", "5"},
              out)
          == exit_code::ok);
  auto const j = read_json(out / "phase_transition.json");
  for(auto const &point : j.at("points"))
    CHECK(point.at("success_rate") == 1.0);
}

TEST_CASE("cli noiseless nyquist reconstruction") {
  auto const out = scratch("nyquist");
  REQUIRE(run({"reconstruct", "--n-xi", "64", "--q", "2", "--n-x", "2", "--n-y", "3", "--ratio", "1"}, out)
          == exit_code::ok);
  auto const report = read_json(out / "report.json");
  CHECK(report.at("aggregate_error").get<double>() <= 1e-6);
  auto const xhat = load_volume(out / "xhat.bin");
  CHECK(xhat.X.cols() == 6);
  REQUIRE(xhat.shape);
  CHECK(xhat.shape->nx == 2);
  for(auto const band : {"band_16.csv", "band_32.csv", "band_48.csv"})
    CHECK(fs::exists(out / band));
}

TEST_CASE("cli reconstructs a saved volume") {
  auto const out = scratch("input");
  REQUIRE(run({"reconstruct", "--n-xi", "64", "--q", "2", "--n-x", "2", "--n-y", "2", "--ratio", "1"}, out)
          == exit_code::ok);
  auto const again = scratch("input-again");
  REQUIRE(run({"reconstruct", "--volume", (out / "truth.bin").string(), "--q", "2", "--ratio", "1"}, again)
          == exit_code::ok);
  CHECK(read_json(again / "report.json").at("aggregate_error").get<double>() <= 1e-6);
  CHECK_FALSE(fs::exists(again / "truth.bin"));
}

TEST_CASE("cli exit codes") {
  auto const out = scratch("codes");
  CHECK(run({"levels", "--n-xi", "100"}, out) == exit_code::config);
  CHECK(run({"phase-transition", "--ratios", "0,0.5"}, out) == exit_code::config);
  CHECK(run({"levels", "--no-such-flag"}, out) == exit_code::config);
  CHECK(run_cli(std::vector<std::string>{}) == exit_code::config);
  // missing inputs fail validation
  CHECK(run({"profile", "--dictionary", "/nonexistent/dyes.csv"}, out) == exit_code::config);
  CHECK(run({"levels", "--config", "/nonexistent/config.json"}, out) == exit_code::config);

  fs::create_directories(out);
  write_text(out / "bad.json", "{\"N_xi\": 64, \"unknown_key\": 1}");
  CHECK(run({"levels", "--config", (out / "bad.json").string()}, out) == exit_code::config);
  write_text(out / "broken.json", "{");
  CHECK(run({"levels", "--config", (out / "broken.json").string()}, out) == exit_code::config);

  // unreadable data and unwritable outputs are i/o failures
  HSVolume v;
  v.X = RealMatrix::Ones(64, 4);
  save_volume(out / "v.bin", v);
  fs::resize_file(out / "v.bin", 64);
  CHECK(run({"reconstruct", "--volume", (out / "v.bin").string()}, out) == exit_code::io);
  write_text(out / "file", "");
  CHECK(run({"levels", "--n-xi", "16", "--q", "1"}, out / "file" / "sub") == exit_code::io);

  // one iteration cannot converge on a subsampled volume
  CHECK(run({"reconstruct", "--n-xi", "64", "--q", "2", "--n-x", "2", "--n-y", "2", "--max-iter", "1"}, out)
        == exit_code::solver);
}

TEST_CASE("cli flags override the config file") {
  auto const out = scratch("override");
  fs::create_directories(out);
  write_text(out / "config.json", "{\"N_xi\": 32, \"q\": 1, \"ratio\": 0.5}");
  REQUIRE(run({"sample", "--config", (out / "config.json").string(), "--n-xi", "64"}, out) == exit_code::ok);
  auto const p = pattern_from_json(read_json(out / "pattern.json").at("pattern"));
  CHECK(p.N == 64);
  CHECK(p.size() == 32);
}

TEST_CASE("cli output directory from the environment") {
  auto const out = scratch("env");
  ::setenv("CIFTI_OUTPUT_DIR", out.string().c_str(), 1);
  int const code = run_cli({"levels", "--n-xi", "16", "--q", "1"});
  ::unsetenv("CIFTI_OUTPUT_DIR");
  CHECK(code == exit_code::ok);
  CHECK(fs::exists(out / "levels.json"));
}

TEST_CASE("cli outputs are deterministic") {
  std::vector<std::vector<std::string>> const commands{
      {"levels", "--n-xi", "64", "--q", "2"},
      {"coherence", "--n-xi", "32", "--q", "2"},
      {"profile", "--n-xi", "128", "--q", "3"},
      {"sample", "--n-xi", "128", "--strategy", "initial-vds", "--ratio", "0.2"},
      {"phase-transition", "--n-xi", "64", "--q", "2", "--fluorochromes", "4", "--ratios", "0.5,1", "--trials",
       "3"},
      {"reconstruct", "--n-xi", "64", "--q", "2", "--n-x", "2", "--n-y", "2", "--eps", "0.01", "--eps-relative"}};
  for(auto const &command : commands) {
    auto const a = scratch("det-a"), b = scratch("det-b");
    REQUIRE(run(command, a) == exit_code::ok);
    auto args = command;
    args.push_back("--threads");
    args.push_back("1");
    args.push_back("-o");
    args.push_back(b.string());
    REQUIRE(run_cli(args) == exit_code::ok);
    int files = 0;
    for(auto const &entry : fs::directory_iterator(a)) {
      ++files;
      auto const name = entry.path().filename();
      REQUIRE(fs::exists(b / name));
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), command[0] << ": " << name.string());
    }
    CHECK(files > 0);
  }
}
