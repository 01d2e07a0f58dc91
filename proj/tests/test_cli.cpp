#include "cpm/cli.hpp"
#include "cpm/csv.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace cpm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Splits stdout into leading JSON lines and the table that follows.
std::pair<std::vector<json>, std::string> split(const std::string& out) {
  std::vector<json> lines;
  std::size_t pos = 0;
  while (pos < out.size() && out[pos] == '{') {
    const std::size_t end = out.find('\n', pos);
    lines.push_back(json::parse(out.substr(pos, end - pos)));
    pos = end + 1;
  }
  return {lines, out.substr(pos)};
}

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cpm_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bell number") {
  const Run r = run({"bell", "--k", "10"});
  CHECK(r.code == 0);
  const auto [lines, body] = split(r.out);
  REQUIRE(lines.size() == 1);
  const CsvTable t = parse_csv(body);
  CHECK(t.rows.at(0).at(t.column("value")) == "115975");
  CHECK(run({"bell", "--k", "3", "--x", "2"}).out.find(",22,") != std::string::npos);
}

TEST_CASE("every run starts with a valid header") {
  const std::vector<std::vector<std::string>> cases = {
      {"bell", "--k", "4"},
      {"identities"},
      {"moments", "--weights", "gamma:2,1/2", "--k", "6", "--x", "3"},
      {"rate", "--weights", "unit", "--chi", "1"},
      {"compare", "--weights", "unit", "--chi", "1", "--k-max", "20"},
      {"aux", "--weights", "unit", "--x", "3", "--u", "0.5"},
      {"graphsim", "--n", "100", "--kappa", "2", "--s", "1", "--trials", "10", "--seed", "1"},
  };
  for (const auto& args : cases) {
    const Run r = run(args);
    CAPTURE(args.front());
    CHECK(r.code == 0);
    const auto [lines, body] = split(r.out);
    REQUIRE(!lines.empty());
    std::string why;
    CHECK_MESSAGE(cli::validate(lines.front(), cli::header_schema(), &why), why);
    CHECK(lines.front()["subcommand"] == args.front());
    CHECK(lines.front()["version"] == "1.0.0");
    const CsvTable t = parse_csv(body);
    CHECK(!t.rows.empty());
  }
}

TEST_CASE("schema validator rejects malformed headers") {
  json h = {{"tool", "cpm"}, {"version", "1"}, {"subcommand", "bell"}, {"format", "csv"}, {"out", nullptr}, {"config", json::object()}};
  std::string why;
  CHECK(cli::validate(h, cli::header_schema(), &why));
  json bad = h;
  bad.erase("config");
  CHECK(!cli::validate(bad, cli::header_schema(), &why));
  CHECK(why.find("config") != std::string::npos);
  bad = h;
  bad["subcommand"] = "plot";
  CHECK(!cli::validate(bad, cli::header_schema()));
  bad = h;
  bad["out"] = 3;
  CHECK(!cli::validate(bad, cli::header_schema()));
}

TEST_CASE("moments table") {
  const Run r = run({"moments", "--weights", "exponential", "--k", "3", "--x", "2"});
  const CsvTable t = parse_csv(split(r.out).second);
  CHECK(t.header == std::vector<std::string>{"k", "x", "method", "value", "log_value"});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[3][t.column("value")] == "44");
  CHECK(t.rows[3][t.column("method")] == "recurrence");
  CHECK(std::stod(t.rows[3][t.column("log_value")]) == doctest::Approx(std::log(44.0)).epsilon(1e-15));

  const Run third = run({"moments", "--weights", "unit", "--k", "1", "--x", "1/3"});
  const CsvTable tt = parse_csv(split(third.out).second);
  CHECK(tt.rows[1][tt.column("value")] == "0.333333333333333333333333333333");

  const Run lg = run({"moments", "--weights", "unit", "--k", "10", "--x", "1", "--log"});
  const CsvTable tl = parse_csv(split(lg.out).second);
  CHECK(std::stod(tl.rows[10][tl.column("log_value")]) == doctest::Approx(std::log(115975.0)).epsilon(1e-14));

  const Run fn = run({"moments", "--weights", "unit", "--k", "2", "--x", "1", "--finite-n", "2"});
  const CsvTable tf = parse_csv(split(fn.out).second);
  CHECK(tf.rows[2][tf.column("value")] == "1.5");
  CHECK(tf.rows[2][tf.column("method")] == "finite_n");
}

TEST_CASE("json table output carries exact ratios") {
  const Run r = run({"moments", "--weights", "unit", "--k", "2", "--x", "1/2", "--format", "json"});
  CHECK(r.code == 0);
  const std::size_t nl = r.out.find('\n');
  const json doc = json::parse(r.out.substr(nl + 1));
  CHECK(doc["rows"][2]["ratio"] == "3/4");
  CHECK(doc["rows"][2]["k"] == 2);
}

TEST_CASE("compare rate gap decreases in k") {
  const Run r = run({"compare", "--weights", "unit", "--chi", "1", "--k-max", "200"});
  REQUIRE(r.code == 0);
  const CsvTable t = parse_csv(split(r.out).second);
  CHECK(t.header == std::vector<std::string>{"k", "log_exact", "log_predicted_eq1_10", "rate_gap"});
  REQUIRE(t.rows.size() == 200);
  const std::size_t c = t.column("rate_gap");
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(std::stod(t.rows[i][c]) < std::stod(t.rows[i - 1][c]));
}

TEST_CASE("aux summary and pmf") {
  const Run r = run({"aux", "--weights", "unit", "--x", "1", "--u", "0.5", "--llt-chi", "1", "--k", "100"});
  REQUIRE(r.code == 0);
  const auto [lines, body] = split(r.out);
  REQUIRE(lines.size() == 2);
  const json& s = lines[1]["summary"];
  CHECK(s["mean"].get<double>() == doctest::Approx(0.5 * std::exp(0.5)));
  CHECK(std::fabs(s["r_k"].get<double>() - 1) < 0.05);
  const CsvTable t = parse_csv(body);
  CHECK(t.header == std::vector<std::string>{"j", "p_j"});
  double total = 0;
  for (const auto& row : t.rows) total += std::stod(row[1]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(run({"aux", "--weights", "unit", "--x", "1", "--u", "0.5", "--llt-chi", "1"}).code == cli::kExitUsage);
}

TEST_CASE("graphsim output is reproducible and written atomically") {
  const fs::path a = temp_path("a.csv"), b = temp_path("b.csv");
  const std::vector<std::string> base = {"graphsim", "--n", "400", "--kappa", "3", "--weights", "exponential",
                                         "--s", "0.5,1,1.5", "--trials", "200", "--seed", "77"};
  auto with_out = [&](const fs::path& p) {
    auto args = base;
    args.insert(args.end(), {"--out", p.string()});
    return args;
  };
  REQUIRE(run(with_out(a)).code == 0);
  auto serial = with_out(b);
  serial.push_back("--serial");
  REQUIRE(run(serial).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(!fs::exists(a.string() + ".tmp"));
  const CsvTable t = read_csv(a);
  CHECK(t.header == std::vector<std::string>{"n", "kappa", "s", "p_hat", "ci", "bound", "threshold", "vacuous_flag"});
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) CHECK(std::stod(t.rows[i][3]) <= std::stod(t.rows[i - 1][3]));
  CHECK(format_csv(t) == slurp(a));
}

TEST_CASE("graphsim seed falls back to CPM_SEED") {
  const std::vector<std::string> args = {"graphsim", "--n", "100", "--kappa", "2", "--s", "1", "--trials", "20"};
  ::setenv("CPM_SEED", "123", 1);
  const auto [h1, body1] = split(run(args).out);
  ::unsetenv("CPM_SEED");
  auto explicit_seed = args;
  explicit_seed.insert(explicit_seed.end(), {"--seed", "123"});
  const auto [h2, body2] = split(run(explicit_seed).out);
  CHECK(h1.front()["config"]["seed"] == 123);
  CHECK(h1.front()["config"]["seed_source"] == "CPM_SEED");
  CHECK(body1 == body2);
  ::setenv("CPM_SEED", "abc", 1);
  CHECK(run(args).code == cli::kExitUsage);
  ::unsetenv("CPM_SEED");
}

TEST_CASE("relative deviation levels") {
  const Run r = run({"graphsim", "--n", "200", "--kappa", "4", "--s", "2", "--s-relative", "--trials", "10", "--seed", "3"});
  const CsvTable t = parse_csv(split(r.out).second);
  CHECK(std::stod(t.rows[0][t.column("s")]) == doctest::Approx(2 * std::stod(t.rows[0][t.column("threshold")])));
}

TEST_CASE("identities pass") {
  const Run r = run({"identities"});
  CHECK(r.code == 0);
  const CsvTable t = parse_csv(split(r.out).second);
  CHECK(t.rows.size() == 4);
  for (const auto& row : t.rows) CHECK(row[t.column("status")] == "pass");
  for (const auto& check : cli::identity_report()) CHECK(check.failures == 0);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"bell", "--k", "3", "--bogus"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"moments", "--weights", "nope", "--k", "3", "--x", "1"}).code == cli::kExitUsage);
  CHECK(run({"moments", "--weights", "unit", "--k", "3", "--x", "abc"}).code == cli::kExitUsage);
  CHECK(run({"moments", "--weights", "unit", "--k", "3", "--x", "1", "--exact", "--log"}).code == cli::kExitUsage);
  CHECK(run({"bell", "--k", "3", "--format", "xml"}).code == cli::kExitUsage);
  CHECK(run({"rate", "--weights", "unit", "--chi", "-1"}).code == cli::kExitDomain);
  CHECK(run({"aux", "--weights", "exponential", "--x", "1", "--u", "2"}).code == cli::kExitDomain);
  CHECK(run({"moments", "--weights", "unit", "--k", "30", "--x", "1", "--finite-n", "5"}).code == cli::kExitDomain);
  CHECK(run({"bell", "--k", "3", "--out", "/nonexistent-dir/x.csv"}).code == cli::kExitIo);
  CHECK(run({"moments", "--weights", "custom:/nonexistent/m.json", "--k", "3", "--x", "1"}).code == cli::kExitIo);
  CHECK(run({"--help"}).code == cli::kExitOk);
  const Run err = run({"rate", "--weights", "unit", "--chi", "0"});
  CHECK(err.err.find("cpm rate") != std::string::npos);
  CHECK(err.err.find("asymptotics") != std::string::npos);
}

TEST_CASE("custom model file") {
  const fs::path p = temp_path("model.json");
  std::ofstream(p) << R"({"moments": [1, 1, 2, 6, 24]})";
  const Run r = run({"moments", "--weights", "custom:" + p.string(), "--k", "4", "--x", "1"});
  REQUIRE(r.code == 0);
  const CsvTable t = parse_csv(split(r.out).second);
  CHECK(t.rows[4][t.column("value")] == "73");  // 4! S_4(1)
  CHECK(run({"moments", "--weights", "custom:" + p.string(), "--k", "5", "--x", "1"}).code == cli::kExitDomain);
}

TEST_CASE("installed binary") {
  const fs::path out = temp_path("bin.txt");
  const std::string cmd = std::string(CPM_TOOL_PATH) + " bell --k 10 > " + out.string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(slurp(out).find("\n10,1,115975,") != std::string::npos);
  const int bad = std::system((std::string(CPM_TOOL_PATH) + " bell --nope 2>/dev/null >/dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
}
