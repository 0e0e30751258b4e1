#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace
{

struct Result
{
  int code = -1;
  std::string out;
};

std::string data(const std::string & name) { return std::string(GRIDBLOCK_TEST_DATA) + "/" + name; }

Result cli(const std::string & args)
{
  const std::string cmd = std::string(GRIDBLOCK_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE * pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_file(const std::string & name, const std::string & content)
{
  const auto path = std::filesystem::temp_directory_path() / ("gridblock_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("tasks lists the five built-ins")
{
  const auto text = cli("tasks --format text");
  CHECK(text.code == 0);
  CHECK(text.out == "tile-cleaning\nsecret-realm\nmineral\nriver-crossing\nknights-tour\n");
  const auto json = cli("tasks");
  CHECK(json.code == 0);
  std::istringstream lines(json.out);
  std::vector<std::string> ids;
  for (std::string line; std::getline(lines, line);) ids.push_back(nlohmann::json::parse(line)["id"]);
  CHECK(ids == std::vector<std::string>{"tile-cleaning", "secret-realm", "mineral", "river-crossing", "knights-tour"});
}

TEST_CASE("check exit codes")
{
  CHECK(cli("check --task tile-cleaning --program " + data("tile_cleaning_reference.xml")).code == 0);
  CHECK(cli("check --task tile-cleaning --program " + data("tile_cleaning_flat.xml")).code == 1);
  CHECK(cli("check --task tile-cleaning --program " + data("empty.xml")).code == 1);
  CHECK(cli("check --task tile-cleaning --program " + data("malformed.xml")).code == 2);
  CHECK(cli("check --task nowhere --program " + data("empty.xml")).code == 2);
  CHECK(cli("check --task tile-cleaning --program /no/such/file.xml").code == 2);
  CHECK(cli("check --task tile-cleaning").code == 2);
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("mineral wrong route is rejected at (1,3)")
{
  const auto r = cli("check --task mineral --program " + data("mineral_wrong_route.xml"));
  CHECK(r.code == 1);
  const auto v = nlohmann::json::parse(r.out);
  CHECK(v["is_correct"] == false);
  CHECK(v["return_button"] == false);
  CHECK(v["text"].get<std::string>().find("(1,3)") != std::string::npos);

  const auto run = nlohmann::json::parse(cli("run --task mineral --program " + data("mineral_wrong_route.xml")).out);
  CHECK(run["trace"]["energy"]["final"] == 0);
  CHECK(run["wire"].back() == nlohmann::json{{"cmd", "END"}});
}

TEST_CASE("output is byte-identical across runs")
{
  for (const auto * args :
       {"run --task knights-tour --program knights_reference.xml", "trace --task river-crossing --program river_classical.xml",
        "run --task secret-realm --program secret_realm_obstacle.xml --format text"}) {
    std::string a = args;
    const auto pos = a.find("--program ") + 10;
    a.replace(pos, a.find(".xml") + 4 - pos, data(a.substr(pos, a.find(".xml") + 4 - pos)));
    const auto first = cli(a), second = cli(a);
    CHECK(first.out == second.out);
    CHECK_FALSE(first.out.empty());
  }
}

TEST_CASE("custom task files and policy overrides")
{
  const auto task = temp_file(
    "corridor.json",
    R"({"id": "corridor", "start": {"x": 0, "y": 0, "orientation": "East"},
        "success": {"kind": "follow_exact_path", "path": [[0,0],[1,0],[2,0]]}})");
  const auto prog = temp_file(
    "corridor.xml",
    R"(<xml><block type="move_forward"><field name="SPEED">300</field><field name="DURATION">2</field></block></xml>)");
  CHECK(cli("check --task " + task + " --program " + prog).code == 0);

  const auto broken = temp_file("broken.json", R"({"id": "x"})");
  CHECK(cli("check --task " + broken + " --program " + prog).code == 2);

  const auto unsafe = data("river_unsafe.xml");
  CHECK(cli("check --task river-crossing --program " + unsafe).code == 1);
  const auto relaxed = temp_file("relaxed.json", R"({"safetyRulesOn": false})");
  const auto r = cli("run --task river-crossing --policies " + relaxed + " --program " + unsafe);
  const auto j = nlohmann::json::parse(r.out);
  for (const auto & f : j["trace"]["faults"]) CHECK(f["kind"] != "WrongBankAction");
}

TEST_CASE("solve")
{
  const auto river = nlohmann::json::parse(cli("solve --task river-crossing").out);
  CHECK(river["crossings"] == 7);
  CHECK(river["plan"][0]["carry"] == "goat");
  CHECK(river["accepted"] == true);

  const auto realm = nlohmann::json::parse(cli("solve --task secret-realm").out);
  CHECK(realm["shortestPaths"][0]["length"] == 5);

  const auto mineral = nlohmann::json::parse(cli("solve --task mineral").out);
  CHECK(mineral["accepted"] == true);
  CHECK(mineral["finalEnergy"].get<int>() > 0);

  const auto knight = nlohmann::json::parse(cli("solve --task knights-tour").out);
  CHECK(knight["referenceCheck"]["passed"] == true);
}
